"""Dense containers and the contractions, unfoldings and slices built from them.

Indices are zero-based in storage. Axes are numbered 1, 2, 3 in the public
API so that ``contract(A, 3)`` is the contraction over the third index.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

AXES = (1, 2, 3)

# pair-symmetry tolerance accepted at Biquadratic construction (before mirroring)
_PAIR_SYM_RTOL = 1e-12


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=np.float64, copy=True)
    arr.setflags(write=False)
    return arr


def _check_axis(axis: int) -> int:
    if axis not in AXES:
        raise ValueError(f"axis must be one of {AXES}, got {axis!r}")
    return axis


@dataclass(frozen=True, eq=False)
class Tensor3:
    """Real third-order tensor of shape (d1, d2, d3)."""

    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=np.float64)
        if arr.ndim != 3 or min(arr.shape) < 1:
            raise ValueError(f"Tensor3 needs a 3-d array with positive dims, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("Tensor3 entries must be finite")
        object.__setattr__(self, "data", _frozen(arr))

    @classmethod
    def from_entries(cls, dims, entries) -> "Tensor3":
        """Build from a flat list in (i, j, k) lexicographic order, k fastest."""
        dims = tuple(int(d) for d in dims)
        if len(dims) != 3 or min(dims) < 1:
            raise ValueError(f"dims must be three positive integers, got {dims}")
        flat = np.asarray(entries, dtype=np.float64).ravel()
        expected = dims[0] * dims[1] * dims[2]
        if flat.size != expected:
            raise ValueError(f"expected {expected} entries for shape {dims}, got {flat.size}")
        return cls(flat.reshape(dims))

    @classmethod
    def zeros(cls, dims) -> "Tensor3":
        return cls(np.zeros(tuple(dims)))

    @property
    def dims(self) -> tuple[int, int, int]:
        return self.data.shape

    @property
    def entries(self) -> np.ndarray:
        return self.data.ravel()

    def frobenius(self) -> float:
        return float(np.sqrt(np.sum(self.data**2)))

    def permuted(self, order) -> "Tensor3":
        """Tensor with axes reordered; ``order`` is a permutation of (1, 2, 3)."""
        return Tensor3(np.transpose(self.data, [a - 1 for a in order]))


@dataclass(frozen=True, eq=False)
class Biquadratic:
    """Fourth-order tensor of shape (d1, d2, d1, d2) with t[i,j,p,q] == t[p,q,i,j]."""

    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=np.float64)
        if arr.ndim != 4 or arr.shape[:2] != arr.shape[2:] or min(arr.shape) < 1:
            raise ValueError(f"Biquadratic needs shape (d1, d2, d1, d2), got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("Biquadratic entries must be finite")
        swapped = arr.transpose(2, 3, 0, 1)
        scale = max(1.0, float(np.max(np.abs(arr))))
        if np.max(np.abs(arr - swapped)) > _PAIR_SYM_RTOL * scale:
            raise ValueError("Biquadratic violates pair symmetry t[i,j,p,q] == t[p,q,i,j]")
        # mirror so the symmetry holds bit-exactly
        arr = 0.5 * (arr + swapped)
        object.__setattr__(self, "data", _frozen(arr))

    @property
    def dims(self) -> tuple[int, int]:
        return self.data.shape[:2]

    @property
    def entries(self) -> np.ndarray:
        return self.data.ravel()

    def form(self, x, y) -> float:
        """<T, x (x) y (x) x (x) y>."""
        return float(np.einsum("ijpq,i,j,p,q->", self.data, x, y, x, y))


@dataclass(frozen=True, eq=False)
class SymMatrix:
    """Dense symmetric matrix; the upper triangle is authoritative."""

    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError(f"SymMatrix needs a square array, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("SymMatrix entries must be finite")
        upper = np.triu(arr)
        arr = upper + np.triu(arr, 1).T
        object.__setattr__(self, "data", _frozen(arr))

    @property
    def n(self) -> int:
        return self.data.shape[0]


@dataclass(frozen=True, eq=False)
class RectMatrix:
    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=np.float64)
        if arr.ndim != 2:
            raise ValueError(f"RectMatrix needs a 2-d array, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("RectMatrix entries must be finite")
        object.__setattr__(self, "data", _frozen(arr))

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]


def contract(A: Tensor3, axis: int) -> Biquadratic:
    """Self-contraction of ``A`` over one index.

    axis=3 gives t[i,j,p,q] = sum_k a[i,j,k] a[p,q,k] with dims (d1, d2);
    axis=2 keeps (i, k) and axis=1 keeps (j, k).
    """
    _check_axis(axis)
    a = A.data
    if axis == 3:
        t = np.einsum("ijk,pqk->ijpq", a, a)
    elif axis == 2:
        t = np.einsum("ijk,pjq->ikpq", a, a)
    else:
        t = np.einsum("ijk,ipq->jkpq", a, a)
    return Biquadratic(t)


def flatten_biquadratic(T: Biquadratic) -> SymMatrix:
    """Row-major pairing: row (i, j) -> i*d2 + j."""
    d1, d2 = T.dims
    return SymMatrix(T.data.reshape(d1 * d2, d1 * d2))


def unfold(A: Tensor3, axis: int) -> RectMatrix:
    """Mode-``axis`` unfolding; the remaining two indices keep their order, last fastest."""
    _check_axis(axis)
    moved = np.moveaxis(A.data, axis - 1, 0)
    return RectMatrix(moved.reshape(moved.shape[0], -1))


def gram(A: Tensor3, axis: int) -> SymMatrix:
    """Contraction of ``A`` with itself over the two indices other than ``axis``."""
    _check_axis(axis)
    spec = {1: "ikl,jkl->ij", 2: "kil,kjl->ij", 3: "kli,klj->ij"}[axis]
    return SymMatrix(np.einsum(spec, A.data, A.data))


def slice_matrices(T: Biquadratic, mode: str) -> list[SymMatrix]:
    """Fixed-index slices of a biquadratic tensor.

    mode="second": for each j, the d1 x d1 matrix (t[i,j,p,j]).
    mode="first": for each i, the d2 x d2 matrix (t[i,j,i,q]).
    """
    d1, d2 = T.dims
    t = T.data
    if mode == "second":
        return [SymMatrix(t[:, j, :, j]) for j in range(d2)]
    if mode == "first":
        return [SymMatrix(t[i, :, i, :]) for i in range(d1)]
    raise ValueError(f"mode must be 'first' or 'second', got {mode!r}")


def rank_one(u, v, w) -> Tensor3:
    u, v, w = (np.asarray(a, dtype=np.float64).ravel() for a in (u, v, w))
    return Tensor3(np.einsum("i,j,k->ijk", u, v, w))


def inner(A: Tensor3, B: Tensor3) -> float:
    if A.dims != B.dims:
        raise ValueError(f"dimension mismatch: {A.dims} vs {B.dims}")
    return float(np.sum(A.data * B.data))


def multilinear_form(A: Tensor3, x, y, z) -> float:
    """<A, x (x) y (x) z>."""
    x, y, z = (np.asarray(a, dtype=np.float64).ravel() for a in (x, y, z))
    if (x.size, y.size, z.size) != A.dims:
        raise ValueError(f"vector lengths {(x.size, y.size, z.size)} do not match dims {A.dims}")
    return float(np.einsum("ijk,i,j,k->", A.data, x, y, z))


# Example tensor of the worked 2x2x3 case, used by tests, the CLI and scripts.
EXAMPLE_1_ENTRIES = {
    (1, 1, 1): 4.0, (1, 2, 1): 1.0, (1, 1, 2): 3.0, (1, 2, 2): 2.0, (1, 1, 3): 2.0, (1, 2, 3): -1.0,
    (2, 1, 1): -1.0, (2, 2, 1): 2.0, (2, 1, 2): -5.0, (2, 2, 2): 1.0, (2, 1, 3): 3.0, (2, 2, 3): 4.0,
}


def example_1() -> Tensor3:
    a = np.zeros((2, 2, 3))
    for (i, j, k), val in EXAMPLE_1_ENTRIES.items():
        a[i - 1, j - 1, k - 1] = val
    return Tensor3(a)
