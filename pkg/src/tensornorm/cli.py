"""Command-line entry point: ``tensornorm norm|bounds|check|experiment|gen``.

Exit codes: 0 ok, 2 bad input, 3 solver failure, 4 a checked inequality failed.
"""

from __future__ import annotations

import json
import sys

import click

from . import bounds as bnd
from .config import FORMATS, RunConfig
from .experiment import DEFAULT_EXPERIMENT_GRID, THRESHOLDS, format_table, run_experiment
from .core import contract
from .msolve import SolverError, m_residual, spectral_norm_routes
from .oracle import DEFAULT_ORACLE_RESTARTS, grid_oracle_2x2, multistart_oracle
from .tensorio import DISTRIBUTIONS, ParseError, format_tensor, parse_shape, parse_tensor, random_tensor

EXIT_INPUT = 2
EXIT_SOLVER = 3
EXIT_VERDICT = 4


def _load(path):
    try:
        if path == "-":
            return parse_tensor(sys.stdin.read())
        with open(path, encoding="utf-8") as fh:
            return parse_tensor(fh.read())
    except OSError as exc:
        click.echo(f"error: cannot read {path}: {exc.strerror}", err=True)
        sys.exit(EXIT_INPUT)
    except ParseError as exc:
        click.echo(f"error: {path}: {exc}", err=True)
        sys.exit(EXIT_INPUT)


def _emit(cfg, items, structured):
    if cfg.format == "structured":
        click.echo(json.dumps(structured, indent=2, default=float))
    else:
        for key, val in items:
            click.echo(f"{key} = {val}")


def _shape(ctx, param, value):
    if value is None:
        return None
    try:
        return parse_shape(value)
    except ValueError as exc:
        raise click.BadParameter(str(exc)) from None


@click.group()
@click.option("--seed", default=0, show_default=True, help="Base seed for random starts.")
@click.option("--restarts", default=32, show_default=True, help="Random starts per solver.")
@click.option("--tol", default=1e-10, show_default=True, help="Solver stopping tolerance.")
@click.option("--grid", "n_grid", default=None, type=int, help="Angle lattice size for the 2x2xn oracle.")
@click.option("--format", "fmt", default="text", type=click.Choice(FORMATS), show_default=True)
@click.option("--digits", default=4, show_default=True, help="Decimals in text output.")
@click.pass_context
def main(ctx, seed, restarts, tol, n_grid, fmt, digits):
    """Spectral and nuclear norm estimates and bounds for third-order tensors."""
    try:
        cfg = RunConfig(
            seed=seed, restarts=restarts, tol=tol, n_grid=n_grid or 2000, format=fmt, digits=digits
        )
    except ValueError as exc:
        raise click.UsageError(str(exc)) from None
    ctx.obj = {"cfg": cfg, "grid_given": n_grid is not None}


@main.command()
@click.argument("file")
@click.pass_obj
def norm(obj, file):
    """Spectral norm by HOPM and by the largest M-eigenvalue."""
    cfg = obj["cfg"]
    A = _load(file)
    try:
        r = spectral_norm_routes(A, cfg.restarts, cfg.seed, cfg.tol)
    except SolverError as exc:
        click.echo(f"error: solver failed: {exc}", err=True)
        sys.exit(EXIT_SOLVER)
    f = lambda x: f"{x:.{cfg.digits}f}"  # noqa: E731
    items = [
        ("spectral_norm", f(r.value)),
        ("route.hopm", f(r.hopm_value)),
        ("route.meig", f(r.meig_value)),
        ("m_eigenvalue", f(r.meig_value**2)),
    ]
    structured = {"spectral_norm": r.value, "routes": {"hopm": r.hopm_value, "meig": r.meig_value}}
    if r.triple is not None:
        m_res = m_residual(contract(A, 3), r.pair)
        items += [(f"residual.hopm.eq{i}", f"{v:.3e}") for i, v in enumerate(r.triple.residuals, 1)]
        items += [(f"residual.meig.eq{i}", f"{v:.3e}") for i, v in enumerate(m_res, 1)]
        items += [(f"vector.{n}", " ".join(f"{c:.6f}" for c in v)) for n, v in zip("xyz", (r.triple.x, r.triple.y, r.triple.z))]
        structured.update(
            residuals={"hopm": list(r.triple.residuals), "meig": list(m_res)},
            vectors={"x": r.triple.x.tolist(), "y": r.triple.y.tolist(), "z": r.triple.z.tolist()},
        )
    _emit(cfg, items, structured)


def _report_or_exit(A, cfg):
    rep = bnd.build_report(A, cfg)
    if "spectral_norm" in rep.errors:
        click.echo(f"error: solver failed: {rep.errors['spectral_norm']}", err=True)
        sys.exit(EXIT_SOLVER)
    return rep


@main.command()
@click.argument("file")
@click.pass_obj
def bounds(obj, file):
    """All upper and lower bounds with a verdict per inequality."""
    cfg = obj["cfg"]
    rep = _report_or_exit(_load(file), cfg)
    _emit(cfg, bnd.report_items(rep, cfg.digits), bnd.report_dict(rep))
    if rep.errors:
        sys.exit(EXIT_SOLVER)


def oracle_verdicts(A, rep, cfg) -> list:
    """Cross-checks of the report against the independent oracles."""
    est = rep.estimate
    out = []
    uppers = list(rep.upper_flatten.values()) + list(rep.upper_gram.values())
    lowers = list(rep.lower_slice.values())
    if A.dims[:2] == (2, 2):
        g = grid_oracle_2x2(A, cfg.n_grid)
        out.append(bnd._eq("oracle.grid_vs_estimate", g.value, est, g.slack + bnd.SOLVER_SLACK * (1.0 + g.value)))
        if uppers:
            out.append(bnd._le("oracle.grid_le_upper", g.value, min(uppers), bnd.CLOSED_FORM_SLACK * (1.0 + g.value)))
        if lowers:
            out.append(bnd._le("oracle.lower_le_grid", max(lowers), g.value + g.slack, bnd.CLOSED_FORM_SLACK * (1.0 + g.value)))
    m = multistart_oracle(A, restarts=max(cfg.restarts, DEFAULT_ORACLE_RESTARTS), seed=cfg.seed + 1)
    out.append(bnd._le("oracle.multistart_le_estimate", m.value, est, bnd.SOLVER_SLACK * (1.0 + est)))
    if uppers:
        out.append(bnd._le("oracle.multistart_le_upper", m.value, min(uppers), bnd.CLOSED_FORM_SLACK * (1.0 + m.value)))
    return out


@main.command()
@click.argument("file")
@click.pass_obj
def check(obj, file):
    """Verify every inequality plus the oracle cross-checks; exit 4 on any failure."""
    cfg = obj["cfg"]
    A = _load(file)
    rep = _report_or_exit(A, cfg)
    try:
        verdicts = rep.verdicts + oracle_verdicts(A, rep, cfg)
    except SolverError as exc:
        click.echo(f"error: oracle failed: {exc}", err=True)
        sys.exit(EXIT_SOLVER)
    failed = [v for v in verdicts if not v.passed]
    if cfg.format == "structured":
        click.echo(json.dumps(
            {"verdicts": [{"name": v.name, "pass": v.passed, "slack": v.slack} for v in verdicts],
             "errors": rep.errors, "passed": not failed and not rep.errors}, indent=2))
    else:
        width = max(len(v.name) for v in verdicts)
        for v in verdicts:
            click.echo(f"{'PASS' if v.passed else 'FAIL'}  {v.name.ljust(width)}  {v.slack: .3e}")
        for name, msg in rep.errors.items():
            click.echo(f"ERROR {name}: {msg}")
        click.echo(f"{len(verdicts) - len(failed)}/{len(verdicts)} checks passed")
    if rep.errors:
        sys.exit(EXIT_SOLVER)
    if failed:
        for v in failed:
            click.echo(f"failed: {v.name} (slack {v.slack:.3e})", err=True)
        sys.exit(EXIT_VERDICT)


@main.command()
@click.option("--shape", required=True, callback=_shape, help="d1xd2xd3")
@click.option("--count", default=1000, show_default=True, type=click.IntRange(min=1))
@click.option("--dist", default="normal", type=click.Choice(DISTRIBUTIONS), show_default=True)
@click.pass_obj
def experiment(obj, shape, count, dist):
    """Cumulative closeness of the slice lower bounds to the spectral norm on random tensors."""
    cfg = obj["cfg"]
    n_grid = cfg.n_grid if obj["grid_given"] else DEFAULT_EXPERIMENT_GRID
    res = run_experiment(shape, count, seed=cfg.seed, dist=dist, n_grid=n_grid)
    if cfg.format == "structured":
        click.echo(json.dumps({
            "shape": list(res.shape), "count": res.count, "dist": res.dist, "oracle": res.oracle,
            "thresholds": list(THRESHOLDS),
            "fractions": {f: res.fractions(f).tolist() for f in res.gaps},
        }, indent=2))
    else:
        click.echo(format_table(res))


@main.command()
@click.option("--shape", required=True, callback=_shape, help="d1xd2xd3")
@click.option("--seed", "gen_seed", default=None, type=int, help="Defaults to the global --seed.")
@click.option("--dist", default="normal", type=click.Choice(DISTRIBUTIONS), show_default=True)
@click.pass_obj
def gen(obj, shape, gen_seed, dist):
    """Write a seeded random tensor in the text format."""
    seed = obj["cfg"].seed if gen_seed is None else gen_seed
    A = random_tensor(shape, seed, dist)
    click.echo(format_tensor(A, comment=f"gen shape={'x'.join(map(str, shape))} seed={seed} dist={dist}"), nl=False)


if __name__ == "__main__":
    main()
