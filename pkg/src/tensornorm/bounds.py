"""Closed-form spectral and nuclear norm bounds and the report that checks them."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .config import RunConfig
from .core import AXES, Biquadratic, Tensor3, contract, flatten_biquadratic, gram, rank_one, slice_matrices, unfold
from .eig import matrix_nuclear, matrix_nuclear_rect, spectral_radius
from .msolve import (
    SolverError,
    meig_to_singular,
    multistart_hopm,
    singular_to_meig,
    spectral_norm_routes,
)

MODES = ("second", "first")
CLOSED_FORM_SLACK = 1e-9
SOLVER_SLACK = 1e-6
BRIDGE_SLACK = 1e-8
NUCLEAR_RESIDUAL = 1e-10
STAGNATION = 1e-14

# slice family bounding gram(A, axis): (contraction axis, slice mode, fixed tensor axis)
_SANDWICH_FAMILY = {1: (3, "second", 2), 2: (1, "second", 3), 3: (2, "first", 1)}

SANDWICH_NOTE = (
    "sandwich middle term is the squared spectral norm: the slice bound L and rho(gram) "
    "bound ||A||^2, so the chain (1/d) rho(B) <= L <= ||A||^2 <= rho(B) <= d L is checked"
)
IDENTITY_NOTE = (
    "nuclear.axisK.identity_gap = gram nuclear norm minus squared unfolding nuclear norm; "
    "it is sum(s^2) - (sum s)^2 <= 0 and vanishes only for rank-one unfoldings, so it is "
    "reported, not checked"
)
BRACKET_NOTE = (
    "nuclear.bracket_upper = sqrt(min other dim * gram nuclear norm) is reported without a "
    "verdict: it can fall below the unfolding lower bound nuclear.axisK.unfold"
)


@dataclass(frozen=True)
class Verdict:
    name: str
    passed: bool
    slack: float  # margin by which the inequality holds; negative means violated


def _le(name, lhs, rhs, allowance) -> Verdict:
    slack = float(rhs - lhs)
    return Verdict(name, bool(slack >= -allowance), slack)


def _eq(name, a, b, allowance) -> Verdict:
    gap = abs(float(a) - float(b))
    return Verdict(name, bool(gap <= allowance), -gap)


@dataclass(frozen=True)
class SandwichRecord:
    axis: int
    fixed_axis: int
    d: int
    rho_gram: float
    L: float
    norm_sq: float

    @property
    def lower(self) -> float:
        return self.rho_gram / self.d

    @property
    def upper(self) -> float:
        return self.d * self.L

    def chain(self):
        return (self.lower, self.L, self.norm_sq, self.rho_gram, self.upper)

    def verdicts(self) -> list[Verdict]:
        s = 1.0 + self.rho_gram
        p = f"sandwich.axis{self.axis}"
        return [
            _le(f"{p}.scaled_gram_le_L", self.lower, self.L, CLOSED_FORM_SLACK * s),
            _le(f"{p}.L_le_norm_sq", self.L, self.norm_sq, SOLVER_SLACK * (1.0 + self.norm_sq)),
            _le(f"{p}.norm_sq_le_gram", self.norm_sq, self.rho_gram, CLOSED_FORM_SLACK * s),
            _le(f"{p}.gram_le_scaled_L", self.rho_gram, self.upper, CLOSED_FORM_SLACK * s),
        ]


@dataclass(frozen=True)
class NuclearRecord:
    frobenius: float
    flattening: dict  # axis -> nuclear norm of the flattened contraction
    gram: dict  # axis -> nuclear norm of the Gram matrix
    unfold: dict  # axis -> nuclear norm of the unfolding
    brackets: dict  # axis -> (lower, upper)
    best_lower: float
    bracket: tuple

    def identity_gap(self, axis) -> float:
        return self.gram[axis] - self.unfold[axis] ** 2


@dataclass(frozen=True)
class NuclearUpper:
    value: float
    terms: list = field(repr=False)  # (lam, x, y, z)
    tail: float = 0.0
    residual: float = 0.0
    converged: bool = False
    loose: bool = False


@dataclass
class BoundsReport:
    dims: tuple
    estimate: float = float("nan")
    hopm_value: float = float("nan")
    meig_value: float = float("nan")
    upper_flatten: dict = field(default_factory=dict)
    upper_gram: dict = field(default_factory=dict)
    lower_slice: dict = field(default_factory=dict)
    sandwich: dict = field(default_factory=dict)
    nuclear: NuclearRecord | None = None
    nuclear_upper: NuclearUpper | None = None
    verdicts: list = field(default_factory=list)
    errors: dict = field(default_factory=dict)
    notes: list = field(default_factory=lambda: [SANDWICH_NOTE, IDENTITY_NOTE, BRACKET_NOTE])

    @property
    def passed(self) -> bool:
        return not self.errors and all(v.passed for v in self.verdicts)

    def failures(self) -> list[Verdict]:
        return [v for v in self.verdicts if not v.passed]


# ---------------------------------------------------------------- spectral bounds


def flatten_bound(T: Biquadratic) -> float:
    """Spectral radius of the flattening; an upper bound on ||T||."""
    return spectral_radius(flatten_biquadratic(T))


def slice_bound(T: Biquadratic, mode: str) -> float:
    """Largest spectral radius among the slices; a lower bound on ||T||."""
    return max(spectral_radius(s) for s in slice_matrices(T, mode))


def upper_flatten(A: Tensor3, axis: int) -> float:
    return math.sqrt(flatten_bound(contract(A, axis)))


def upper_gram(A: Tensor3, axis: int) -> float:
    return math.sqrt(spectral_radius(gram(A, axis)))


def lower_slice(A: Tensor3, axis: int, mode: str) -> float:
    return math.sqrt(slice_bound(contract(A, axis), mode))


def sandwich(A: Tensor3, axis: int, norm: float) -> SandwichRecord:
    """Gram/slice chain for one axis; ``norm`` is the spectral-norm estimate."""
    c_axis, mode, fixed = _SANDWICH_FAMILY[axis]
    return SandwichRecord(
        axis=axis,
        fixed_axis=fixed,
        d=A.dims[fixed - 1],
        rho_gram=spectral_radius(gram(A, axis)),
        L=slice_bound(contract(A, c_axis), mode),
        norm_sq=norm**2,
    )


# ---------------------------------------------------------------- nuclear bounds


def _other_dims(A, axis):
    return [d for a, d in zip(AXES, A.dims) if a != axis]


def nuclear_bounds(A: Tensor3) -> NuclearRecord:
    flat, grams, unf, brackets = {}, {}, {}, {}
    for k in AXES:
        flat[k] = matrix_nuclear(flatten_biquadratic(contract(A, k)))
        grams[k] = matrix_nuclear(gram(A, k))
        unf[k] = matrix_nuclear_rect(unfold(A, k))
        g = max(grams[k], 0.0)
        brackets[k] = (math.sqrt(g), math.sqrt(min(_other_dims(A, k)) * g))
    lowers = [math.sqrt(max(v, 0.0)) for v in flat.values()]
    lowers += [b[0] for b in brackets.values()] + list(unf.values())
    bracket = (max(b[0] for b in brackets.values()), min(b[1] for b in brackets.values()))
    return NuclearRecord(
        frobenius=A.frobenius(),
        flattening=flat,
        gram=grams,
        unfold=unf,
        brackets=brackets,
        best_lower=max(lowers),
        bracket=bracket,
    )


def nuclear_decomposition(A: Tensor3, max_rank=None, restarts=8, seed=0, tol=1e-13) -> NuclearUpper:
    """Greedy rank-one deflation; sum |lam| plus a tail term certifies an upper bound.

    The tail is sqrt(d1 d2 d3) * ||R||_F for the final residual R, which
    bounds its nuclear norm through the entrywise decomposition.
    """
    d1, d2, d3 = A.dims
    cap = d1 * d2 * d3 if max_rank is None else int(max_rank)
    R = A.data.copy()
    terms = []
    res = float(np.sqrt(np.sum(R**2)))
    loose = False
    for step in range(cap):
        if res < NUCLEAR_RESIDUAL:
            break
        try:
            t = multistart_hopm(Tensor3(R), restarts=restarts, seed=seed + step, tol=tol)
        except SolverError:
            loose = True
            break
        R_next = R - t.lam * rank_one(t.x, t.y, t.z).data
        res_next = float(np.sqrt(np.sum(R_next**2)))
        if res - res_next < STAGNATION:
            loose = True
            break
        terms.append((t.lam, t.x, t.y, t.z))
        R, res = R_next, res_next
    converged = res < NUCLEAR_RESIDUAL
    tail = math.sqrt(d1 * d2 * d3) * res
    value = sum(abs(t[0]) for t in terms) + tail
    return NuclearUpper(value, terms, tail, res, converged, loose or not converged)


def nuclear_upper_estimate(A: Tensor3, max_rank=None, restarts=8, seed=0) -> float:
    return nuclear_decomposition(A, max_rank=max_rank, restarts=restarts, seed=seed).value


# ---------------------------------------------------------------- report


def _bridge_verdicts(A, routes) -> list[Verdict]:
    est = routes.value
    if routes.triple is None:
        return [
            Verdict("bridge.hopm_to_meig", True, 0.0),
            Verdict("bridge.meig_to_hopm", True, 0.0),
            Verdict("bridge.routes_agree", True, 0.0),
        ]
    scale = 1.0 + est**2
    out = []
    p = singular_to_meig(A, routes.triple)
    out.append(_le("bridge.hopm_to_meig", max(p.residuals), 0.0, BRIDGE_SLACK * scale))
    if routes.pair.mu > 0.0:
        t = meig_to_singular(A, routes.pair)
        defect = max(max(t.residuals), abs(np.linalg.norm(t.z) - 1.0))
        out.append(_le("bridge.meig_to_hopm", defect, 0.0, BRIDGE_SLACK * scale))
    else:
        out.append(Verdict("bridge.meig_to_hopm", True, 0.0))
    out.append(_eq("bridge.routes_agree", routes.hopm_value, routes.meig_value, SOLVER_SLACK * (1.0 + est)))
    return out


def build_report(A: Tensor3, config: RunConfig | None = None) -> BoundsReport:
    cfg = config or RunConfig()
    rep = BoundsReport(dims=A.dims)
    v = rep.verdicts

    def attempt(name, fn):
        try:
            return fn()
        except Exception as exc:  # recorded, report still returned
            rep.errors[name] = f"{type(exc).__name__}: {exc}"
            return None

    routes = attempt("spectral_norm", lambda: spectral_norm_routes(A, cfg.restarts, cfg.seed, cfg.tol))
    if routes is not None:
        rep.estimate, rep.hopm_value, rep.meig_value = routes.value, routes.hopm_value, routes.meig_value
        bridge = attempt("bridge", lambda: _bridge_verdicts(A, routes))
        v.extend(bridge or [])
    est = rep.estimate
    have_est = routes is not None

    for k in AXES:
        uf = attempt(f"upper.flatten.axis{k}", lambda: upper_flatten(A, k))
        ug = attempt(f"upper.gram.axis{k}", lambda: upper_gram(A, k))
        if uf is not None:
            rep.upper_flatten[k] = uf
        if ug is not None:
            rep.upper_gram[k] = ug
        if have_est:
            if uf is not None:
                v.append(_le(f"upper.flatten.axis{k}", est, uf, CLOSED_FORM_SLACK * (1.0 + est)))
            if ug is not None:
                v.append(_le(f"upper.gram.axis{k}", est, ug, CLOSED_FORM_SLACK * (1.0 + est)))
        if uf is not None and ug is not None:
            v.append(_eq(f"equality.flatten_gram.axis{k}", uf, ug, CLOSED_FORM_SLACK * (1.0 + uf)))
        for mode in MODES:
            lo = attempt(f"lower.slice.axis{k}.{mode}", lambda: lower_slice(A, k, mode))
            if lo is None:
                continue
            rep.lower_slice[(k, mode)] = lo
            if have_est:
                v.append(_le(f"lower.slice.axis{k}.{mode}", lo, est, SOLVER_SLACK * (1.0 + est)))
        if have_est:
            sw = attempt(f"sandwich.axis{k}", lambda: sandwich(A, k, est))
            if sw is not None:
                rep.sandwich[k] = sw
                v.extend(sw.verdicts())

    nuc = attempt("nuclear", lambda: nuclear_bounds(A))
    nup = attempt(
        "nuclear.upper",
        lambda: nuclear_decomposition(A, restarts=cfg.nuclear_restarts, seed=cfg.seed),
    )
    rep.nuclear, rep.nuclear_upper = nuc, nup
    if nuc is not None:
        F = nuc.frobenius
        for k in AXES:
            v.append(_eq(f"nuclear.gram_frobenius.axis{k}", math.sqrt(nuc.gram[k]), F, CLOSED_FORM_SLACK * (1.0 + F)))
            v.append(
                _eq(
                    f"nuclear.flattening_eq_gram.axis{k}",
                    nuc.flattening[k],
                    nuc.gram[k],
                    CLOSED_FORM_SLACK * (1.0 + nuc.gram[k]),
                )
            )
        d1, d2, d3 = A.dims
        if d3 >= max(d1, d2):
            v.append(
                _le(
                    "nuclear.flattening_vs_lower_sq",
                    nuc.best_lower**2 / d3,
                    nuc.flattening[3],
                    CLOSED_FORM_SLACK * (1.0 + nuc.flattening[3]),
                )
            )
        if nup is not None:
            v.append(_le("nuclear.lower_le_upper", nuc.best_lower, nup.value, CLOSED_FORM_SLACK * (1.0 + nup.value)))
    return rep


# ---------------------------------------------------------------- serialization


def _fmt(x, digits):
    if x is None:
        return "nan"
    return f"{x:.{digits}f}"


def report_items(rep: BoundsReport, digits: int = 4) -> list[tuple[str, str]]:
    """Flat (key, value) pairs in a stable order."""
    f = lambda x: _fmt(x, digits)  # noqa: E731
    items = [("dims", "x".join(str(d) for d in rep.dims))]
    items += [
        ("spectral_norm", f(rep.estimate)),
        ("route.hopm", f(rep.hopm_value)),
        ("route.meig", f(rep.meig_value)),
        ("m_eigenvalue", f(rep.meig_value**2)),
    ]
    for k in AXES:
        if k in rep.upper_flatten:
            items.append((f"upper.flatten.axis{k}", f(rep.upper_flatten[k])))
            items.append((f"rho.flatten.axis{k}", f(rep.upper_flatten[k] ** 2)))
    for k in AXES:
        if k in rep.upper_gram:
            items.append((f"upper.gram.axis{k}", f(rep.upper_gram[k])))
    for (k, mode), lo in sorted(rep.lower_slice.items()):
        items.append((f"lower.slice.axis{k}.{mode}", f(lo)))
        items.append((f"rho.slice.axis{k}.{mode}", f(lo**2)))
    for k, sw in sorted(rep.sandwich.items()):
        p = f"sandwich.axis{k}"
        items += [
            (f"{p}.fixed_axis", str(sw.fixed_axis)),
            (f"{p}.rho_gram_over_d", f(sw.lower)),
            (f"{p}.L", f(sw.L)),
            (f"{p}.norm_sq", f(sw.norm_sq)),
            (f"{p}.rho_gram", f(sw.rho_gram)),
            (f"{p}.d_times_L", f(sw.upper)),
        ]
    nuc = rep.nuclear
    if nuc is not None:
        items.append(("nuclear.frobenius", f(nuc.frobenius)))
        for k in AXES:
            items += [
                (f"nuclear.axis{k}.flattening", f(nuc.flattening[k])),
                (f"nuclear.axis{k}.gram", f(nuc.gram[k])),
                (f"nuclear.axis{k}.unfold", f(nuc.unfold[k])),
                (f"nuclear.axis{k}.bracket_lower", f(nuc.brackets[k][0])),
                (f"nuclear.axis{k}.bracket_upper", f(nuc.brackets[k][1])),
                (f"nuclear.axis{k}.identity_gap", f(nuc.identity_gap(k))),
            ]
        items += [
            ("nuclear.lower_best", f(nuc.best_lower)),
            ("nuclear.bracket_lower", f(nuc.bracket[0])),
            ("nuclear.bracket_upper", f(nuc.bracket[1])),
        ]
    if rep.nuclear_upper is not None:
        nu = rep.nuclear_upper
        items += [
            ("nuclear.upper_estimate", f(nu.value)),
            ("nuclear.upper_terms", str(len(nu.terms))),
            ("nuclear.upper_converged", "yes" if nu.converged else "no"),
        ]
    for vd in rep.verdicts:
        items.append((f"verdict.{vd.name}", f"{'pass' if vd.passed else 'fail'} {vd.slack:.3e}"))
    for name, msg in sorted(rep.errors.items()):
        items.append((f"error.{name}", msg))
    for i, note in enumerate(rep.notes, 1):
        items.append((f"note.{i}", note))
    return items


def report_dict(rep: BoundsReport) -> dict:
    """Structured form at full precision."""
    nuc = rep.nuclear
    out = {
        "dims": list(rep.dims),
        "spectral_norm": rep.estimate,
        "routes": {"hopm": rep.hopm_value, "meig": rep.meig_value},
        "upper_flatten": {f"axis{k}": val for k, val in rep.upper_flatten.items()},
        "upper_gram": {f"axis{k}": val for k, val in rep.upper_gram.items()},
        "lower_slice": {f"axis{k}.{m}": val for (k, m), val in sorted(rep.lower_slice.items())},
        "sandwich": {
            f"axis{k}": {
                "fixed_axis": sw.fixed_axis,
                "d": sw.d,
                "rho_gram_over_d": sw.lower,
                "L": sw.L,
                "norm_sq": sw.norm_sq,
                "rho_gram": sw.rho_gram,
                "d_times_L": sw.upper,
            }
            for k, sw in sorted(rep.sandwich.items())
        },
        "verdicts": [{"name": vd.name, "pass": vd.passed, "slack": vd.slack} for vd in rep.verdicts],
        "errors": dict(rep.errors),
        "notes": list(rep.notes),
    }
    if nuc is not None:
        out["nuclear"] = {
            "frobenius": nuc.frobenius,
            "flattening": {f"axis{k}": val for k, val in nuc.flattening.items()},
            "gram": {f"axis{k}": val for k, val in nuc.gram.items()},
            "unfold": {f"axis{k}": val for k, val in nuc.unfold.items()},
            "identity_gap": {f"axis{k}": nuc.identity_gap(k) for k in AXES},
            "best_lower": nuc.best_lower,
            "bracket": list(nuc.bracket),
        }
    if rep.nuclear_upper is not None:
        nu = rep.nuclear_upper
        out["nuclear_upper"] = {
            "value": nu.value,
            "terms": len(nu.terms),
            "tail": nu.tail,
            "residual": nu.residual,
            "converged": nu.converged,
        }
    return out
