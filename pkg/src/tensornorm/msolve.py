"""Iterative solvers for tensor singular values and biquadratic M-eigenvalues.

Both solvers are alternating schemes that run a whole batch of starting
points at once; the single-start functions are thin wrappers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import Biquadratic, Tensor3, contract, gram
from .eig import jacobi_batch, sym_eig

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 2000
DEFAULT_RESTARTS = 32
DEGENERATE_NORM = 1e-14
# relative gap under which the top eigenvalue is treated as repeated
_TIE_RTOL = 1e-12


class SolverError(RuntimeError):
    pass


class DegenerateRayError(SolverError):
    """A contraction collapsed to the zero vector; the caller should restart."""


class ConvergenceError(SolverError):
    def __init__(self, message, iterate=None, residuals=None):
        super().__init__(message)
        self.iterate = iterate
        self.residuals = residuals


@dataclass(frozen=True, eq=False)
class SingularTriple:
    lam: float
    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    residuals: tuple[float, float, float]
    n_iter: int = 0
    history: tuple[float, ...] = field(default=(), repr=False)


@dataclass(frozen=True, eq=False)
class MEigPair:
    mu: float
    x: np.ndarray
    y: np.ndarray
    residuals: tuple[float, float]
    n_iter: int = 0
    history: tuple[float, ...] = field(default=(), repr=False)


@dataclass(frozen=True, eq=False)
class SpectralNormResult:
    value: float
    hopm_value: float
    meig_value: float
    triple: SingularTriple | None
    pair: MEigPair | None


def random_unit_starts(dims, restarts: int, seed: int) -> list[np.ndarray]:
    """Uniform points on each unit sphere; restart r draws from the stream keyed by (seed, r)."""
    out = [np.empty((restarts, d)) for d in dims]
    for r in range(restarts):
        rng = np.random.default_rng((seed, r))
        for arr, d in zip(out, dims):
            v = rng.standard_normal(d)
            while np.linalg.norm(v) == 0.0:
                v = rng.standard_normal(d)
            arr[r] = v / np.linalg.norm(v)
    return out


def _unit_rows(v: np.ndarray) -> np.ndarray:
    v = np.atleast_2d(np.asarray(v, dtype=np.float64))
    n = np.linalg.norm(v, axis=1, keepdims=True)
    if np.any(n == 0.0) or not np.all(np.isfinite(v)):
        raise ValueError("starting vectors must be finite and nonzero")
    return v / n


# ---------------------------------------------------------------- residuals


def _singular_residuals(a, lam, x, y, z):
    r1 = np.einsum("ijk,bj,bk->bi", a, y, z) - lam[:, None] * x
    r2 = np.einsum("ijk,bi,bk->bj", a, x, z) - lam[:, None] * y
    r3 = np.einsum("ijk,bi,bj->bk", a, x, y) - lam[:, None] * z
    return np.stack([np.max(np.abs(r), axis=1) for r in (r1, r2, r3)], axis=1)


def _m_residuals(t, mu, x, y):
    r5 = np.einsum("ijpq,bj,bp,bq->bi", t, y, x, y) - mu[:, None] * x
    r6 = np.einsum("ijpq,bi,bp,bq->bj", t, x, x, y) - mu[:, None] * y
    return np.stack([np.max(np.abs(r5), axis=1), np.max(np.abs(r6), axis=1)], axis=1)


def singular_residual(A: Tensor3, t: SingularTriple) -> tuple[float, float, float]:
    """Sup-norm defects of the three singular-vector equations."""
    vecs = [np.asarray(v, dtype=np.float64).ravel() for v in (t.x, t.y, t.z)]
    if tuple(v.size for v in vecs) != A.dims:
        raise ValueError(f"vector lengths {[v.size for v in vecs]} do not match dims {A.dims}")
    res = _singular_residuals(A.data, np.array([t.lam]), *(v[None] for v in vecs))
    return tuple(float(r) for r in res[0])


def m_residual(T: Biquadratic, p: MEigPair) -> tuple[float, float]:
    """Sup-norm defects of the two M-eigenvector equations."""
    x = np.asarray(p.x, dtype=np.float64).ravel()
    y = np.asarray(p.y, dtype=np.float64).ravel()
    if (x.size, y.size) != T.dims:
        raise ValueError(f"vector lengths {(x.size, y.size)} do not match dims {T.dims}")
    res = _m_residuals(T.data, np.array([p.mu]), x[None], y[None])
    return tuple(float(r) for r in res[0])


# ---------------------------------------------------------------- HOPM


def _normalize_or_flag(v, degenerate, idx):
    n = np.linalg.norm(v, axis=1)
    bad = n < DEGENERATE_NORM
    degenerate[idx[bad]] = True
    n = np.where(bad, 1.0, n)
    return v / n[:, None], n


def hopm_batch(A: Tensor3, X, Y, Z, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER, debug=False):
    """Run HOPM from every row of (X, Y, Z).

    Returns a dict with per-start ``lam``, ``x``, ``y``, ``z``, ``residuals``,
    ``n_iter``, ``status`` ("converged", "degenerate" or "max_iter") and
    ``history`` (list of lambda arrays, one per sweep).
    """
    a = A.data
    X, Y, Z = (_unit_rows(v).copy() for v in (X, Y, Z))
    b = X.shape[0]
    lam = np.full(b, -np.inf)
    res = np.full((b, 3), np.inf)
    n_iter = np.zeros(b, dtype=int)
    converged = np.zeros(b, dtype=bool)
    degenerate = np.zeros(b, dtype=bool)
    history = []

    for it in range(1, max_iter + 1):
        idx = np.flatnonzero(~converged & ~degenerate)
        if idx.size == 0:
            break
        x, y, z = X[idx], Y[idx], Z[idx]
        x, _ = _normalize_or_flag(np.einsum("ijk,bj,bk->bi", a, y, z), degenerate, idx)
        y, _ = _normalize_or_flag(np.einsum("ijk,bi,bk->bj", a, x, z), degenerate, idx)
        z, new_lam = _normalize_or_flag(np.einsum("ijk,bi,bj->bk", a, x, y), degenerate, idx)
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y)) and np.all(np.isfinite(z))):
            raise SolverError("non-finite iterate in HOPM")
        ok = ~degenerate[idx]
        prev = lam[idx]
        r = _singular_residuals(a, new_lam, x, y, z)
        if debug:
            grown = new_lam[ok] >= prev[ok] - 1e-12 * (1.0 + np.abs(new_lam[ok]))
            assert np.all(grown | ~np.isfinite(prev[ok])), "HOPM objective decreased"
        X[idx], Y[idx], Z[idx] = x, y, z
        lam[idx] = new_lam
        res[idx] = r
        n_iter[idx] = it
        done = (np.abs(new_lam - prev) < tol) & (np.max(r, axis=1) <= 10.0 * tol * (1.0 + new_lam))
        converged[idx[done & ok]] = True
        history.append(lam.copy())

    status = np.where(converged, "converged", np.where(degenerate, "degenerate", "max_iter"))
    return dict(lam=lam, x=X, y=Y, z=Z, residuals=res, n_iter=n_iter, status=status, history=history)


def _triple_from(out, b, with_history=False) -> SingularTriple:
    hist = tuple(float(h[b]) for h in out["history"]) if with_history else ()
    return SingularTriple(
        lam=float(out["lam"][b]),
        x=out["x"][b].copy(),
        y=out["y"][b].copy(),
        z=out["z"][b].copy(),
        residuals=tuple(float(r) for r in out["residuals"][b]),
        n_iter=int(out["n_iter"][b]),
        history=hist,
    )


def hopm(A: Tensor3, x0, y0, z0, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER, debug=False) -> SingularTriple:
    """Higher-order power method from a single start."""
    out = hopm_batch(A, x0, y0, z0, tol=tol, max_iter=max_iter, debug=debug)
    status = out["status"][0]
    if status == "degenerate":
        raise DegenerateRayError("contraction vanished; restart from another point")
    triple = _triple_from(out, 0, with_history=True)
    if status != "converged":
        raise ConvergenceError(
            f"HOPM did not converge in {max_iter} iterations", iterate=triple, residuals=triple.residuals
        )
    return triple


def structured_starts(A: Tensor3):
    """Deterministic starts: leading unfolding vectors plus the top singular pair of every slice.

    Starting from a slice's top singular pair makes HOPM end at or above that
    slice's spectral norm, so the estimate never falls below a slice bound.
    """
    d1, d2, d3 = A.dims
    a = A.data
    xs, ys, zs = [], [], []
    lead = [sym_eig(gram(A, k)).vectors[:, 0] for k in (1, 2, 3)]
    xs.append(lead[0]), ys.append(lead[1]), zs.append(lead[2])
    for fixed in (1, 2, 3):
        for idx in range(A.dims[fixed - 1]):
            m = np.take(a, idx, axis=fixed - 1)
            u = sym_eig(m @ m.T).vectors[:, 0]
            w = m.T @ u
            nw = np.linalg.norm(w)
            if nw < DEGENERATE_NORM:
                continue
            w = w / nw
            e = np.zeros(A.dims[fixed - 1])
            e[idx] = 1.0
            if fixed == 1:
                xs.append(e), ys.append(u), zs.append(w)
            elif fixed == 2:
                xs.append(u), ys.append(e), zs.append(w)
            else:
                xs.append(u), ys.append(w), zs.append(e)
    return np.array(xs), np.array(ys), np.array(zs)


def multistart_hopm(
    A: Tensor3,
    restarts=DEFAULT_RESTARTS,
    seed=0,
    tol=DEFAULT_TOL,
    max_iter=DEFAULT_MAX_ITER,
    structured=True,
) -> SingularTriple:
    """Best converged HOPM triple over seeded random starts (plus structured ones)."""
    X, Y, Z = random_unit_starts(A.dims, restarts, seed)
    if structured:
        sx, sy, sz = structured_starts(A)
        X, Y, Z = np.vstack([X, sx]), np.vstack([Y, sy]), np.vstack([Z, sz])
    out = hopm_batch(A, X, Y, Z, tol=tol, max_iter=max_iter)
    good = np.flatnonzero(out["status"] == "converged")
    if good.size == 0:
        raise SolverError("all HOPM restarts failed")
    best = good[np.argmax(out["lam"][good])]
    return _triple_from(out, best)


# ---------------------------------------------------------------- M-eigenvalues


def _top_eigvec(mats, prev):
    """Dominant eigenvector of each matrix, continuous with ``prev``."""
    vals, vecs = jacobi_batch(mats)
    top = vecs[:, :, 0].copy()
    if mats.shape[1] > 1:
        tied = vals[:, 0] - vals[:, 1] <= _TIE_RTOL * (1.0 + np.abs(vals[:, 0]))
        for b in np.flatnonzero(tied):
            space = vecs[b][:, vals[b] >= vals[b, 0] - _TIE_RTOL * (1.0 + abs(vals[b, 0]))]
            proj = space @ (space.T @ prev[b])
            n = np.linalg.norm(proj)
            if n > 1e-12:
                top[b] = proj / n
    flip = np.sum(top * prev, axis=1) < 0.0
    top[flip] *= -1.0
    return top, vals[:, 0]


def m_power_batch(T: Biquadratic, X, Y, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER, debug=False):
    """Alternating dominant-eigenvector iteration from every row of (X, Y)."""
    t = T.data
    X, Y = _unit_rows(X).copy(), _unit_rows(Y).copy()
    b = X.shape[0]
    mu = np.full(b, -np.inf)
    res = np.full((b, 2), np.inf)
    n_iter = np.zeros(b, dtype=int)
    converged = np.zeros(b, dtype=bool)
    history = []

    for it in range(1, max_iter + 1):
        idx = np.flatnonzero(~converged)
        if idx.size == 0:
            break
        x, y = X[idx], Y[idx]
        x, _ = _top_eigvec(np.einsum("ijpq,bj,bq->bip", t, y, y), x)
        y, new_mu = _top_eigvec(np.einsum("ijpq,bi,bp->bjq", t, x, x), y)
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y)) and np.all(np.isfinite(new_mu))):
            raise SolverError("non-finite iterate in M-eigenvalue iteration")
        prev = mu[idx]
        r = _m_residuals(t, new_mu, x, y)
        if debug:
            grown = new_mu >= prev - 1e-12 * (1.0 + np.abs(new_mu))
            assert np.all(grown | ~np.isfinite(prev)), "M-eigenvalue objective decreased"
        X[idx], Y[idx] = x, y
        mu[idx] = new_mu
        res[idx] = r
        n_iter[idx] = it
        done = (np.abs(new_mu - prev) < tol) & (np.max(r, axis=1) <= 10.0 * tol * (1.0 + np.abs(new_mu)))
        converged[idx[done]] = True
        history.append(mu.copy())

    status = np.where(converged, "converged", "max_iter")
    return dict(mu=mu, x=X, y=Y, residuals=res, n_iter=n_iter, status=status, history=history)


def _pair_from(out, b, with_history=False) -> MEigPair:
    hist = tuple(float(h[b]) for h in out["history"]) if with_history else ()
    return MEigPair(
        mu=float(out["mu"][b]),
        x=out["x"][b].copy(),
        y=out["y"][b].copy(),
        residuals=tuple(float(r) for r in out["residuals"][b]),
        n_iter=int(out["n_iter"][b]),
        history=hist,
    )


def m_power_iteration(
    T: Biquadratic, x0, y0, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER, debug=False
) -> MEigPair:
    """Largest-M-eigenvalue iteration for a PSD biquadratic tensor from one start."""
    out = m_power_batch(T, x0, y0, tol=tol, max_iter=max_iter, debug=debug)
    pair = _pair_from(out, 0, with_history=True)
    if out["status"][0] != "converged":
        raise ConvergenceError(
            f"M-eigenvalue iteration did not converge in {max_iter} iterations",
            iterate=pair,
            residuals=pair.residuals,
        )
    return pair


def largest_m_eigenvalue(
    T: Biquadratic, restarts=DEFAULT_RESTARTS, seed=0, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER
) -> MEigPair:
    X, Y = random_unit_starts(T.dims, restarts, seed)
    out = m_power_batch(T, X, Y, tol=tol, max_iter=max_iter)
    good = np.flatnonzero(out["status"] == "converged")
    if good.size == 0:
        raise SolverError("all M-eigenvalue restarts failed")
    best = good[np.argmax(out["mu"][good])]
    return _pair_from(out, best)


# ---------------------------------------------------------------- bridge

# which two tensor axes survive each contraction
_KEPT = {3: (0, 1), 2: (0, 2), 1: (1, 2)}


def singular_to_meig(A: Tensor3, t: SingularTriple, axis=3) -> MEigPair:
    """Map a singular triple to the M-eigenpair (lam^2, kept vectors) of contract(A, axis)."""
    vecs = (t.x, t.y, t.z)
    p, q = _KEPT[axis]
    T = contract(A, axis)
    pair = MEigPair(mu=t.lam**2, x=np.asarray(vecs[p]), y=np.asarray(vecs[q]), residuals=(0.0, 0.0))
    return MEigPair(mu=pair.mu, x=pair.x, y=pair.y, residuals=m_residual(T, pair))


def meig_to_singular(A: Tensor3, pair: MEigPair, axis=3) -> SingularTriple:
    """Complete an M-eigenpair of contract(A, axis) to a singular triple with lam = sqrt(mu)."""
    if pair.mu <= 0.0:
        raise ValueError("only positive M-eigenvalues map to nonzero singular values")
    lam = float(np.sqrt(pair.mu))
    p, q = _KEPT[axis]
    missing = ({0, 1, 2} - {p, q}).pop()
    vecs = [None, None, None]
    vecs[p], vecs[q] = np.asarray(pair.x, dtype=np.float64), np.asarray(pair.y, dtype=np.float64)
    operands = [A.data] + [vecs[i] for i in range(3) if i != missing]
    letters = "ijk"
    sub = "ijk," + ",".join(letters[i] for i in range(3) if i != missing) + "->" + letters[missing]
    vecs[missing] = np.einsum(sub, *operands) / lam
    t = SingularTriple(lam=lam, x=vecs[0], y=vecs[1], z=vecs[2], residuals=(0.0, 0.0, 0.0))
    return SingularTriple(lam=lam, x=t.x, y=t.y, z=t.z, residuals=singular_residual(A, t))


# ---------------------------------------------------------------- spectral norm


def spectral_norm_routes(
    A: Tensor3, restarts=DEFAULT_RESTARTS, seed=0, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER
) -> SpectralNormResult:
    """Spectral norm by HOPM and by the largest M-eigenvalue of contract(A, 3)."""
    if A.frobenius() == 0.0:
        return SpectralNormResult(0.0, 0.0, 0.0, None, None)
    triple = multistart_hopm(A, restarts=restarts, seed=seed, tol=tol, max_iter=max_iter)
    pair = largest_m_eigenvalue(contract(A, 3), restarts=restarts, seed=seed, tol=tol, max_iter=max_iter)
    meig_value = float(np.sqrt(max(pair.mu, 0.0)))
    return SpectralNormResult(max(triple.lam, meig_value), triple.lam, meig_value, triple, pair)


def spectral_norm(A: Tensor3, restarts=DEFAULT_RESTARTS, seed=0, tol=DEFAULT_TOL) -> float:
    return spectral_norm_routes(A, restarts=restarts, seed=seed, tol=tol).value
