from __future__ import annotations

from dataclasses import dataclass

FORMATS = ("text", "structured")


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    restarts: int = 32
    tol: float = 1e-10
    n_grid: int = 2000
    format: str = "text"
    digits: int = 4
    # restarts per greedy deflation step of the nuclear-norm upper estimate
    nuclear_restarts: int = 8

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError(f"restarts must be >= 1, got {self.restarts}")
        if not self.tol > 0:
            raise ValueError(f"tol must be positive, got {self.tol}")
        if self.n_grid < 100:
            raise ValueError(f"n_grid must be >= 100, got {self.n_grid}")
        if self.format not in FORMATS:
            raise ValueError(f"format must be one of {FORMATS}, got {self.format!r}")
        if self.nuclear_restarts < 1:
            raise ValueError("nuclear_restarts must be >= 1")
