"""Plain-text tensor files.

Line 1 holds ``d1 d2 d3``; the d1*d2*d3 entries follow, whitespace separated,
in (i, j, k) order with k fastest. Lines starting with '#' are comments.
"""

from __future__ import annotations

import math

import numpy as np

from .core import Tensor3

DISTRIBUTIONS = ("normal", "uniform")


class ParseError(ValueError):
    def __init__(self, message, line=None, column=None):
        loc = f"line {line}, column {column}: " if line is not None else ""
        super().__init__(loc + message)
        self.line = line
        self.column = column


def _tokens(text):
    for lineno, raw in enumerate(text.splitlines(), 1):
        if raw.lstrip().startswith("#"):
            continue
        col = 0
        for tok in raw.split():
            col = raw.index(tok, col)
            yield tok, lineno, col + 1
            col += len(tok)


def parse_tensor(text: str) -> Tensor3:
    toks = _tokens(text)
    header = []
    header_line = None
    for tok, line, col in toks:
        if header_line is not None and line != header_line:
            raise ParseError(f"header needs three dimensions, got {len(header)}", header_line, 1)
        header_line = line
        try:
            d = int(tok)
        except ValueError:
            raise ParseError(f"dimension {tok!r} is not an integer", line, col) from None
        if d < 1:
            raise ParseError(f"dimension {d} must be positive", line, col)
        header.append(d)
        if len(header) == 3:
            break
    if len(header) != 3:
        raise ParseError(f"header needs three dimensions, got {len(header)}", header_line or 1, 1)

    expected = header[0] * header[1] * header[2]
    shape = "x".join(map(str, header))
    values = []
    last = (header_line, 1)
    for tok, line, col in toks:
        last = (line, col)
        if len(values) == expected:
            raise ParseError(f"too many entries: expected {expected} for shape {shape}", line, col)
        try:
            v = float(tok)
        except ValueError:
            raise ParseError(f"entry {tok!r} is not a real number", line, col) from None
        if not math.isfinite(v):
            raise ParseError(f"entry {tok!r} is not finite", line, col)
        values.append(v)
    if len(values) != expected:
        raise ParseError(
            f"expected {expected} entries for shape {shape}, found {len(values)}", *last
        )
    return Tensor3.from_entries(header, values)


def read_tensor(path) -> Tensor3:
    with open(path, encoding="utf-8") as fh:
        return parse_tensor(fh.read())


def format_tensor(A: Tensor3, comment: str | None = None) -> str:
    """Text form with 17 significant digits, one (i, j) fibre per line."""
    d1, d2, d3 = A.dims
    lines = []
    if comment:
        lines += [f"# {c}" for c in comment.splitlines()]
    lines.append(f"{d1} {d2} {d3}")
    for i in range(d1):
        for j in range(d2):
            lines.append(" ".join(format(float(v), ".17g") for v in A.data[i, j]))
    return "\n".join(lines) + "\n"


def parse_shape(text: str) -> tuple[int, int, int]:
    parts = text.lower().split("x")
    try:
        dims = tuple(int(p) for p in parts)
    except ValueError:
        raise ValueError(f"shape must look like d1xd2xd3, got {text!r}") from None
    if len(dims) != 3 or min(dims) < 1:
        raise ValueError(f"shape must be three positive integers, got {text!r}")
    return dims


def random_tensor(dims, seed, dist: str = "normal") -> Tensor3:
    """Seeded random tensor; ``seed`` is an int or a tuple of ints, ``uniform`` draws from [-1, 1)."""
    rng = np.random.default_rng(seed)
    if dist == "normal":
        data = rng.standard_normal(tuple(dims))
    elif dist == "uniform":
        data = rng.uniform(-1.0, 1.0, size=tuple(dims))
    else:
        raise ValueError(f"distribution must be one of {DISTRIBUTIONS}, got {dist!r}")
    return Tensor3(data)
