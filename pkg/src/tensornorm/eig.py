"""Symmetric eigensolver (cyclic Jacobi) and the matrix norms derived from it."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import RectMatrix, SymMatrix

MAX_SWEEPS = 100
DEFAULT_TOL = 1e-12
# negative eigenvalues of a numerically PSD matrix above -CLAMP * ||S||_inf are set to zero
PSD_CLAMP = 1e-10


class EigenConvergenceError(RuntimeError):
    def __init__(self, off_diagonal: float, sweeps: int):
        super().__init__(
            f"Jacobi iteration did not converge after {sweeps} sweeps "
            f"(off-diagonal Frobenius mass {off_diagonal:.3e})"
        )
        self.off_diagonal = off_diagonal
        self.sweeps = sweeps


class NotPSDError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class EigenDecomposition:
    values: np.ndarray  # descending
    vectors: np.ndarray  # columns paired with values


def _off_mass(a: np.ndarray) -> np.ndarray:
    n = a.shape[-1]
    mask = ~np.eye(n, dtype=bool)
    return np.sqrt(np.sum(a[..., mask] ** 2, axis=-1))


def jacobi_batch(S: np.ndarray, tol: float = DEFAULT_TOL, max_sweeps: int = MAX_SWEEPS):
    """Diagonalize a stack of symmetric matrices of shape (B, n, n).

    Rotations use the same (p, q) order for every member with per-member
    angles, so the whole batch advances together. Returns (values, vectors)
    with values sorted descending along the last axis.
    """
    a = np.array(S, dtype=np.float64, copy=True)
    if a.ndim != 3 or a.shape[1] != a.shape[2]:
        raise ValueError(f"expected shape (B, n, n), got {a.shape}")
    b, n, _ = a.shape
    v = np.broadcast_to(np.eye(n), (b, n, n)).copy()
    scale = np.sqrt(np.sum(a**2, axis=(1, 2)))
    target = tol * scale

    sweeps = 0
    off = _off_mass(a)
    while np.any(off > target):
        if sweeps >= max_sweeps:
            raise EigenConvergenceError(float(np.max(off)), sweeps)
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[:, p, q]
                active = np.abs(apq) > 0.0
                if not np.any(active):
                    continue
                app = a[:, p, p]
                aqq = a[:, q, q]
                with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
                    theta = np.where(active, (aqq - app) / (2.0 * apq), 0.0)
                    t = np.where(
                        active,
                        np.sign(theta) / (np.abs(theta) + np.hypot(1.0, theta)),
                        0.0,
                    )
                # sign(0) == 0 would stall a rotation with equal diagonals
                t = np.where(active & (theta == 0.0), 1.0, t)
                c = 1.0 / np.sqrt(1.0 + t**2)
                s = t * c
                cc = c[:, None]
                ss = s[:, None]
                col_p = a[:, :, p].copy()
                col_q = a[:, :, q].copy()
                a[:, :, p] = cc * col_p - ss * col_q
                a[:, :, q] = ss * col_p + cc * col_q
                row_p = a[:, p, :].copy()
                row_q = a[:, q, :].copy()
                a[:, p, :] = cc * row_p - ss * row_q
                a[:, q, :] = ss * row_p + cc * row_q
                a[:, p, q] = 0.0
                a[:, q, p] = 0.0
                vp = v[:, :, p].copy()
                vq = v[:, :, q].copy()
                v[:, :, p] = cc * vp - ss * vq
                v[:, :, q] = ss * vp + cc * vq
        sweeps += 1
        off = _off_mass(a)

    values = np.diagonal(a, axis1=1, axis2=2).copy()
    order = np.argsort(-values, axis=1, kind="stable")
    values = np.take_along_axis(values, order, axis=1)
    vectors = np.take_along_axis(v, order[:, None, :], axis=2)
    return values, vectors


def sym_eig(S: SymMatrix, tol: float = DEFAULT_TOL) -> EigenDecomposition:
    """Full spectrum of a symmetric matrix, eigenvalues in descending order."""
    data = S.data if isinstance(S, SymMatrix) else SymMatrix(S).data
    values, vectors = jacobi_batch(data[None], tol=tol)
    return EigenDecomposition(values[0], vectors[0])


def spectral_radius(S: SymMatrix) -> float:
    vals = sym_eig(S).values
    return float(np.max(np.abs(vals)))


def matrix_nuclear(S: SymMatrix) -> float:
    return float(np.sum(np.abs(sym_eig(S).values)))


def clamp_psd(values: np.ndarray, scale: float) -> np.ndarray:
    """Zero out small negative eigenvalues; raise on anything clearly negative."""
    floor = -PSD_CLAMP * max(scale, np.finfo(float).tiny)
    if np.any(values < floor):
        raise NotPSDError(f"eigenvalue {values.min():.3e} below PSD clamp threshold {floor:.3e}")
    return np.maximum(values, 0.0)


def singular_values(M: RectMatrix) -> np.ndarray:
    """Singular values (descending) from the symmetric embedding [[0, M], [M^T, 0]].

    Its eigenvalues are +-s plus zeros, so small singular values keep an
    absolute accuracy of order eps * ||M|| instead of sqrt(eps) * ||M||.
    """
    data = M.data if isinstance(M, RectMatrix) else RectMatrix(M).data
    m, n = data.shape
    emb = np.zeros((m + n, m + n))
    emb[:m, m:] = data
    emb[m:, :m] = data.T
    vals = sym_eig(SymMatrix(emb)).values[: min(m, n)]
    return np.maximum(vals, 0.0)


def matrix_nuclear_rect(M: RectMatrix) -> float:
    return float(np.sum(singular_values(M)))
