"""Command-line front end: ``conik xi-scan | worst-case | solve | gen-instance | report``.

Exit codes: 0 success, 1 bound violation, 2 usage or contract error,
3 numerical non-convergence.  JSON output carries ``"schema": "conik/v1"``
and prints floats with 17 significant digits, so identical invocations give
byte-identical files.
"""

import csv
import io
import json
import math
import sys
from pathlib import Path

import click
import numpy as np

from conik.barrier import as_barrier
from conik.cones import UnsupportedKind, parse_cone
from conik.duality import ShadowNotConverged
from conik.ipm import InvariantViolation, gen_feasible_instance, load_program, solve
from conik.proximity import gamma_g, gamma_inf, mu_mu_tilde, rho, tau_rho
from conik.scaling import xi_check_value, xi_local_bounds
from conik.worstcase import extreme_v_search, hatx_construct, sample_pairs, slice_grid, xi_sup_search

SCHEMA = "conik/v1"
EXIT_OK, EXIT_BOUND, EXIT_USAGE, EXIT_NONCONV = 0, 1, 2, 3
BOUND_SLACK = 1e-9
LOCAL_CONES = ("orthant:4", "psd:3", "soc:3,4", "exp:1", "toeplitz-tridiag:5")


# ---------------------------------------------------------------------------
# serialization


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if v is None:
        return "null"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if not math.isfinite(v):
            return "null"
        return format(v, ".17g")
    if isinstance(v, str):
        return _json_str(v)
    if isinstance(v, np.ndarray):
        return _fmt(v.tolist())
    if isinstance(v, dict):
        return "{" + ", ".join(f"{_json_str(str(k))}: {_fmt(x)}" for k, x in v.items()) + "}"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_fmt(x) for x in v) + "]"
    raise TypeError(f"cannot serialize {type(v).__name__}")


def _json_str(s):
    return json.dumps(s, ensure_ascii=False)


def dumps(obj):
    """JSON text with floats at 17 significant digits and non-finite as null."""
    return _fmt(obj)


def _envelope(kind, **payload):
    return {"schema": SCHEMA, "kind": kind, **payload}


def _write(path, text):
    if path is None or str(path) == "-":
        click.echo(text, nl=not text.endswith("\n"))
        return
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def _csv(rows, columns):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow(["" if r.get(c) is None else (format(r[c], ".17g") if isinstance(r[c], float) else r[c])
                    for c in columns])
    return buf.getvalue()


def _cone(spec):
    try:
        return parse_cone(spec)
    except ValueError as e:
        raise click.BadParameter(str(e), param_hint="--cone") from None


def _vector(text, name):
    try:
        return np.array([float(t) for t in text.split(",")])
    except ValueError:
        raise click.BadParameter(f"expected comma-separated numbers, got {text!r}", param_hint=name) from None


def applicable_bound(cone):
    """Bound on sup xi_check that must hold for this cone, with its source."""
    if cone.symmetric and cone.optimal:
        return rho(cone.theta), "rho_theta"
    if cone.negative_curvature is True:
        return 4.0 / 3.0, "negative_curvature"
    return 2.0 * cone.theta, "two_theta"


# ---------------------------------------------------------------------------
# commands


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
def main():
    """Complexity measures and worst-case pairs for conic interior-point methods.

    Cone specs are ``kind:params`` joined by ``⊕`` (or ``+``) for products,
    e.g. ``orthant:4``, ``exp:1⊕soc:3``, ``psd:3``, ``weighted:2,2``,
    ``toeplitz:3``, ``toeplitz-tridiag:5``, ``lmi-random:3,4,0``.
    """


@main.command("xi-scan")
@click.option("--cone", "cone_spec", required=True, help="Cone spec, e.g. orthant:4.")
@click.option("--samples", default=1000, show_default=True, type=click.IntRange(1))
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Per-sample records.")
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json", show_default=True)
def xi_scan(cone_spec, samples, seed, out, fmt):
    """Sample interior pairs and check xi_check against the applicable bound."""
    cone = _cone(cone_spec)
    F = as_barrier(cone)
    bound, source = applicable_bound(cone)
    theta = cone.theta
    rows, violations = [], 0
    for k, (mode, pair) in enumerate(sample_pairs(F, samples, seed)):
        xi = xi_check_value(pair)
        gg = gamma_g(pair)
        pointwise = 2.0 + 2.0 * (theta - 1.0) / (gg + 1.0)
        bad = xi > bound + BOUND_SLACK or xi > pointwise + BOUND_SLACK
        violations += bad
        rows.append({"index": k, "mode": mode, "xi_check": xi, "gamma_g": gg,
                     "gamma_inf": gamma_inf(pair, cross_check=False),
                     "mu_mu_tilde": mu_mu_tilde(pair), "violation": bool(bad)})
    best = max(rows, key=lambda r: r["xi_check"])
    summary = _envelope("xi_scan", cone=cone_spec, theta=theta, samples=samples, seed=seed,
                        max_xi_check=best["xi_check"], argmax=best["index"], bound=bound,
                        bound_source=source, violations=violations)
    if out is not None:
        if fmt == "csv":
            _write(out, _csv(rows, list(rows[0])))
        else:
            _write(out, dumps({**summary, "records": rows}) + "\n")
    click.echo(dumps(summary))
    sys.exit(EXIT_BOUND if violations else EXIT_OK)


@main.command("worst-case")
@click.option("--cone", "cone_spec", required=True)
@click.option("--s", "s_text", default=None, help="Dual point, comma separated (default -F'(center)).")
@click.option("--mu", default=1.0, show_default=True, type=click.FloatRange(min=0, min_open=True))
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--grid", default=61, show_default=True, type=click.IntRange(3))
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Certificate JSON; the slice grid goes next to it as <stem>-grid.<format>.")
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="csv", show_default=True,
              help="Format of the slice grid.")
def worst_case(cone_spec, s_text, mu, seed, grid, out, fmt):
    """Search the slice <s, v> = mu*theta for attaining extreme points."""
    cone = _cone(cone_spec)
    F = as_barrier(cone)
    s = -F.grad(cone.interior_point()) if s_text is None else _vector(s_text, "--s")
    if len(s) != cone.dim:
        raise click.BadParameter(f"--s needs {cone.dim} entries", param_hint="--s")
    if not cone.dual_contains(s).verdict == "interior":
        raise click.BadParameter("s must be interior to the dual cone", param_hint="--s")
    res = extreme_v_search(F, s, mu, seed=seed)
    certs = [hatx_construct(F, s, v, mu, x_shadow=res.x_shadow) for v in res.candidates] if res.found else []
    _, rho_t = tau_rho(cone.theta)
    doc = _envelope("worst_case", cone=cone_spec, s=s, mu=mu, theta=cone.theta, rho_theta=rho_t,
                    found=res.found, max_value=res.value, target=res.target,
                    result="attained" if res.found else "no attaining point",
                    certificates=[c.to_json() for c in certs])
    if not res.found:
        # xi_check is invariant under x -> t x, so this is its maximum over the slice
        doc["max_xi_check_on_slice"] = xi_sup_search(F, n_starts=4, seed=seed, budget=1500, s=s).best_xi
    text = dumps(doc) + "\n"
    _write(out, text)
    if out is not None and cone.dim == 3:
        rows = slice_grid(F, s, mu, grid)
        p = Path(out)
        gpath = p.with_name(p.stem + "-grid." + fmt)
        if fmt == "csv":
            flat = [{"u": r["u"], "w": r["w"], **{f"x{i + 1}": v for i, v in enumerate(r["x"])},
                     "verdict": r["verdict"], "dikin": r["dikin"], "gamma_g": r.get("gamma_g"),
                     "gamma_inf": r.get("gamma_inf"), "xi_check": r.get("xi_check")} for r in rows]
            _write(gpath, _csv(flat, list(flat[0])))
        else:
            _write(gpath, dumps(_envelope("slice_grid", cone=cone_spec, s=s, mu=mu,
                                          dikin_radii=[tau_rho(cone.theta)[0] / (tau_rho(cone.theta)[0] + 1), 1.0],
                                          rows=rows)) + "\n")
    if out is not None:
        click.echo(dumps({"found": res.found, "max_value": res.value, "target": res.target,
                          "certificates": len(certs), "valid": all(c.valid for c in certs)}))
    sys.exit(EXIT_BOUND if any(not c.valid for c in certs) else EXIT_OK)


@main.command("gen-instance")
@click.option("--cone", "cone_spec", required=True)
@click.option("--m", "m", required=True, type=click.IntRange(1), help="Number of equality constraints.")
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def gen_instance(cone_spec, m, seed, out):
    """Write a random strictly feasible instance file."""
    cone = _cone(cone_spec)
    try:
        prog = gen_feasible_instance(cone, m, seed)
    except ValueError as e:
        raise click.BadParameter(str(e), param_hint="--m") from None
    obj = prog.to_json()
    obj["cone"] = cone_spec
    _write(out, dumps(_envelope("instance", **obj)) + "\n")


@main.command("solve")
@click.argument("instance", type=click.Path(exists=True, dir_okay=False))
@click.option("--scaling", type=click.Choice(["nt", "integral"]), default="integral", show_default=True)
@click.option("--eps", default=1e-8, show_default=True, type=click.FloatRange(min=0, min_open=True))
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Solution JSON; the trace goes to <stem>.trace.jsonl next to it.")
def solve_cmd(instance, scaling, eps, out):
    """Solve an instance file with the predictor-corrector method."""
    try:
        prog = load_program(instance)
    except (ValueError, KeyError, TypeError) as e:
        click.echo(f"error: invalid instance file: {e}", err=True)
        sys.exit(EXIT_USAGE)
    try:
        res = solve(prog, scaling, eps)
    except UnsupportedKind as e:
        click.echo(f"error: {e}", err=True)
        sys.exit(EXIT_USAGE)
    except ValueError as e:
        click.echo(f"error: {e}", err=True)
        sys.exit(EXIT_USAGE)
    except InvariantViolation as e:
        click.echo(f"error: {e}", err=True)
        sys.exit(EXIT_BOUND)
    except (ShadowNotConverged, ArithmeticError, np.linalg.LinAlgError) as e:
        click.echo(f"error: numerical failure: {e}", err=True)
        sys.exit(EXIT_NONCONV)
    doc = _envelope("solution", scaling=scaling, eps=eps, **res.to_json())
    if prog.optimum is not None:
        doc["optimum"] = prog.optimum
        doc["objective_error"] = abs(res.objective - prog.optimum)
    if out is not None:
        _write(out, dumps(doc) + "\n")
        p = Path(out)
        _write(p.with_name(p.stem + ".trace.jsonl"), "".join(dumps(r) + "\n" for r in res.trace.records))
    click.echo(f"status={res.status} iterations={res.iterations} gap={res.gap:.6e} "
               f"objective={res.objective:.12g}")
    sys.exit(EXIT_OK if res.status == "optimal" else EXIT_NONCONV)


def _rho_rows():
    rows = []
    for n in range(2, 101):
        t, r = tau_rho(n)
        rows.append({"n": n, "tau": t, "rho": r})
    return rows


def _local_rows(cones, samples, seed):
    rows = []
    for spec in cones:
        F = as_barrier(parse_cone(spec))
        near = half = wide = -math.inf
        n_near = n_half = n_wide = 0
        for _, pair in sample_pairs(F, samples, seed):
            xi = xi_check_value(pair)
            d = pair.mu * pair.x_shadow - pair.x
            if gamma_g(pair) <= 1e-3:
                n_near += 1
                near = max(near, xi)
            if math.sqrt(max(float(d @ pair.hess_x @ d), 0.0)) <= 0.5:
                n_half += 1
                half = max(half, xi_local_bounds(pair).xi_upper)
            if mu_mu_tilde(pair) >= 2.0:
                n_wide += 1
                wide = max(wide, xi)
        rows.append({"cone": spec,
                     "near_central_n": n_near, "near_central_max_xi_check": near, "near_central_bound": 1.2115,
                     "half_dikin_n": n_half, "half_dikin_max_xi_upper": half, "half_dikin_bound": 3.0,
                     "mu_mu_tilde_ge_2_n": n_wide, "mu_mu_tilde_ge_2_max_xi_check": wide,
                     "mu_mu_tilde_ge_2_bound": 4.0})
    return rows


def _local_ok(r):
    return (r["near_central_max_xi_check"] < r["near_central_bound"]
            and r["half_dikin_max_xi_upper"] <= r["half_dikin_bound"] + BOUND_SLACK
            and r["mu_mu_tilde_ge_2_max_xi_check"] <= r["mu_mu_tilde_ge_2_bound"] + BOUND_SLACK)


@main.command("report")
@click.argument("table", type=click.Choice(["rho-table", "local-xi-table"]))
@click.option("--cone", "cone_spec", default=None, help="Restrict local-xi-table to one cone.")
@click.option("--samples", default=600, show_default=True, type=click.IntRange(1))
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json", show_default=True)
def report(table, cone_spec, samples, seed, out, fmt):
    """Emit the rho_n table or the local-regime table."""
    if table == "rho-table":
        rows, ok = _rho_rows(), True
    else:
        if cone_spec is not None:
            _cone(cone_spec)
        rows = _local_rows([cone_spec] if cone_spec else LOCAL_CONES, samples, seed)
        ok = all(_local_ok(r) for r in rows)
    if fmt == "csv":
        text = _csv(rows, list(rows[0]))
    else:
        text = dumps(_envelope(table.replace("-", "_"), samples=samples, seed=seed, rows=rows)) + "\n"
    _write(out, text)
    sys.exit(EXIT_OK if ok else EXIT_BOUND)


if __name__ == "__main__":
    main()
