"""Reference values for the spectral norm, independent of the bound machinery.

For d1 = d2 = 2 the unit vectors x and y are single angles, and for fixed
(x, y) the best z is the normalized contraction, so the spectral norm is the
maximum over a two-angle square of ||A(x, y, .)||.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Tensor3, multilinear_form
from .msolve import hopm_batch, random_unit_starts, SolverError

DEFAULT_GRID = 2000
DEFAULT_ORACLE_RESTARTS = 512
_CHUNK = 256


@dataclass(frozen=True, eq=False)
class OracleResult:
    value: float
    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    resolution: int  # grid size or restart count
    method: str
    slack: float = 0.0  # truth lies in [value, value + slack]


def _angles_to_value(a, theta, phi):
    x = np.array([math.cos(theta), math.sin(theta)])
    y = np.array([math.cos(phi), math.sin(phi)])
    w = np.einsum("ijk,i,j->k", a, x, y)
    return float(np.dot(w, w)), x, y, w


def _newton_polish(a, theta, phi, steps=8):
    """Maximize g = ||A(x(theta), y(phi), .)||^2 by safeguarded Newton steps."""
    g, *_ = _angles_to_value(a, theta, phi)
    for _ in range(steps):
        c, s = math.cos(theta), math.sin(theta)
        cp, sp = math.cos(phi), math.sin(phi)
        x, xt = np.array([c, s]), np.array([-s, c])
        y, yp = np.array([cp, sp]), np.array([-sp, cp])
        w = np.einsum("ijk,i,j->k", a, x, y)
        wt = np.einsum("ijk,i,j->k", a, xt, y)
        wp = np.einsum("ijk,i,j->k", a, x, yp)
        wtp = np.einsum("ijk,i,j->k", a, xt, yp)
        grad = 2.0 * np.array([w @ wt, w @ wp])
        hess = 2.0 * np.array(
            [[wt @ wt - w @ w, wt @ wp + w @ wtp], [wt @ wp + w @ wtp, wp @ wp - w @ w]]
        )
        try:
            step = -np.linalg.solve(hess, grad)
        except np.linalg.LinAlgError:
            break
        if not np.all(np.isfinite(step)) or np.max(np.abs(step)) > 0.1:
            break
        g_new, *_ = _angles_to_value(a, theta + step[0], phi + step[1])
        if g_new < g:
            break
        theta, phi, g = theta + step[0], phi + step[1], g_new
        if np.max(np.abs(step)) < 1e-15:
            break
    return theta, phi


def grid_oracle_2x2(A: Tensor3, n_grid: int = DEFAULT_GRID) -> OracleResult:
    """Spectral norm of a 2 x 2 x d3 tensor by an n_grid^2 angle lattice plus Newton polish.

    Near the maximizer the trilinear form with z frozen has curvature at most
    2 ||A|| in the two angles, so the lattice maximum is within a relative
    h^2 / 2 of the truth (h = pi / n_grid); ``slack`` reports that gap.
    """
    d1, d2, d3 = A.dims
    if (d1, d2) != (2, 2):
        raise ValueError(f"grid oracle needs d1 = d2 = 2, got dims {A.dims}")
    if n_grid < 100:
        raise ValueError("n_grid must be >= 100")
    a = A.data
    ang = np.arange(n_grid) * (math.pi / n_grid)
    cos, sin = np.cos(ang), np.sin(ang)
    Y = np.stack([cos, sin], axis=1)  # (n, 2)

    best = -1.0
    best_ij = (0, 0)
    for start in range(0, n_grid, _CHUNK):
        X = np.stack([cos[start:start + _CHUNK], sin[start:start + _CHUNK]], axis=1)
        # w[t, f, k] = sum_ij a_ijk x_i(theta_t) y_j(phi_f)
        g = np.zeros((X.shape[0], n_grid))
        for k in range(d3):
            wk = X @ a[:, :, k] @ Y.T
            g += wk * wk
        idx = np.unravel_index(np.argmax(g), g.shape)
        if g[idx] > best:
            best = float(g[idx])
            best_ij = (start + idx[0], idx[1])

    lattice = math.sqrt(best)
    theta, phi = ang[best_ij[0]], ang[best_ij[1]]
    p_theta, p_phi = _newton_polish(a, theta, phi)
    g_pol, x, y, w = _angles_to_value(a, p_theta, p_phi)
    if g_pol < best:
        g_pol, x, y, w = _angles_to_value(a, theta, phi)
    value = math.sqrt(g_pol)
    z = w / value if value > 0.0 else np.eye(d3)[0]
    h = math.pi / n_grid
    c = h * h / 2.0
    slack = max(lattice / (1.0 - c) - value, 0.0)
    return OracleResult(value, x, y, z, n_grid, "grid2x2", slack)


def multistart_oracle(A: Tensor3, restarts: int = DEFAULT_ORACLE_RESTARTS, seed: int = 0) -> OracleResult:
    """Best HOPM value over many random starts; a lower bound on the truth."""
    d1, d2, d3 = A.dims
    if A.frobenius() == 0.0:
        e = [np.eye(d)[0] for d in A.dims]
        return OracleResult(0.0, *e, restarts, "multistart")
    X, Y, Z = random_unit_starts(A.dims, restarts, seed)
    out = hopm_batch(A, X, Y, Z, tol=1e-13)
    good = np.flatnonzero(out["status"] == "converged")
    if good.size == 0:
        raise SolverError("all oracle restarts failed")
    b = good[np.argmax(out["lam"][good])]
    x, y, z = out["x"][b], out["y"][b], out["z"][b]
    return OracleResult(multilinear_form(A, x, y, z), x, y, z, restarts, "multistart")
