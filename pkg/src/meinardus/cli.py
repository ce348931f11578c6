"""Command-line front end.

Subcommands: enumerate, estimate, saddle, nllt, charfn.  Models are named
from the builtin catalogue or loaded from a JSON file; --bits/--tol set
the working precision for the whole run.  Data goes to stdout (or
--output) as CSV (default) or JSON; diagnostics go to stderr.  Exit
codes: 2 input errors, 3 domain errors, 4 numeric errors, 1 unexpected.
"""

from __future__ import annotations

import csv
import functools
import io
import json
import os
import sys

import click
import gmpy2

from . import asymptotics, models, nllt, saddle
from .errors import MeinardusError
from .precision import PrecisionContext, round_to_int
from .series import enumerate_exact

_FLOAT_FMT = "{:.17g}"


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    if isinstance(x, str):
        return x
    return _FLOAT_FMT.format(float(x))


def _coeff_repr(c) -> str:
    """Integer digits when the value is integral to 1e-6 relative, else a
    float rendering (empty when the exponent leaves double range)."""
    if not gmpy2.is_finite(c):
        return ""
    rounded = round_to_int(c)
    if abs(float(c - rounded)) <= 1e-6 * (1 + abs(float(c))):
        return str(rounded)
    f = float(c)
    return _FLOAT_FMT.format(f) if f not in (float("inf"), float("-inf")) else ""


def _emit(rows: list[dict], fmt: str, output: str | None) -> None:
    if fmt == "json":
        text = json.dumps(rows, indent=2) + "\n"
    else:
        buf = io.StringIO()
        if rows:
            writer = csv.DictWriter(buf, fieldnames=list(rows[0].keys()),
                                    lineterminator="\n")
            writer.writeheader()
            for row in rows:
                writer.writerow({k: _fmt(v) for k, v in row.items()})
        text = buf.getvalue()
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


def _resolve_model(name: str, ctx: PrecisionContext,
                   eps: float | None, p: int | None) -> models.WeightedModel:
    if os.path.sep in name or name.endswith(".json") or os.path.exists(name):
        return models.load_model(name, ctx)
    return models.builtin(name, ctx, eps=eps, p=p)


def _run(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            fn(*args, **kwargs)
        except MeinardusError as exc:
            click.echo(f"{type(exc).__name__}: {exc}", err=True)
            sys.exit(exc.exit_code)
        except (ValueError, OverflowError) as exc:
            click.echo(f"{type(exc).__name__}: {exc}", err=True)
            sys.exit(2)

    return wrapper


def _common(fn):
    fn = click.option("--model", "model_name", required=True,
                      help="builtin name or JSON file path")(fn)
    fn = click.option("--bits", default=256, show_default=True,
                      help="mantissa precision")(fn)
    fn = click.option("--tol", default=1e-30, show_default=True,
                      help="relative truncation tolerance")(fn)
    fn = click.option("--eps", type=float, default=None,
                      help="log-damping exponent for example3")(fn)
    fn = click.option("--p", type=int, default=None,
                      help="ratio-kernel parameter")(fn)
    fn = click.option("--output", default=None, help="write to file")(fn)
    fn = click.option("--format", "fmt", default="csv",
                      type=click.Choice(["csv", "json"]), show_default=True)(fn)
    return fn


@click.group()
def main():
    """Exact enumeration and saddle-point asymptotics for multiplicative
    combinatorial models."""


@main.command("enumerate")
@_common
@click.option("--n", "n", type=int, required=True, help="highest coefficient")
@_run
def cmd_enumerate(model_name, bits, tol, eps, p, output, fmt, n):
    """Exact coefficients c_0..c_n (log-domain plus digits when integral)."""
    ctx = PrecisionContext(bits=bits, tol=tol)
    model = _resolve_model(model_name, ctx, eps, p)
    coeffs = enumerate_exact(model, n, ctx)
    rows = []
    for m, c in enumerate(coeffs.coeffs):
        log_c = float(gmpy2.log(c)) if c > 0 else (0.0 if c == 0 else float("nan"))
        rows.append({
            "n": m,
            "log_cn": log_c if c > 0 else "",
            "cn": _coeff_repr(c),
            "negative_flag": m in coeffs.flagged_negative,
        })
    _emit(rows, fmt, output)


@main.command("estimate")
@_common
@click.option("--n", "n", type=int, required=True)
@click.option("--variant", default="semi-exact", show_default=True,
              type=click.Choice(["pure", "semi-exact"]))
@click.option("--compare", is_flag=True, help="also enumerate exactly")
@click.option("--depth", "L", default=8, show_default=True,
              help="remainder-series truncation")
@_run
def cmd_estimate(model_name, bits, tol, eps, p, output, fmt, n, variant, compare, L):
    """Asymptotic estimate of log c_n with component breakdown."""
    ctx = PrecisionContext(bits=bits, tol=tol)
    model = _resolve_model(model_name, ctx, eps, p)
    rep = asymptotics.estimate_cn(model, n, variant, ctx, compare=compare, L=L)
    rows = [{
        "n": rep.n,
        "variant": rep.variant,
        "delta": float(rep.delta),
        "log_cn_estimate": float(rep.log_cn_estimate),
        "comp_tilt": float(rep.comp_tilt),
        "comp_log_gen_fn": float(rep.comp_log_gen_fn),
        "comp_gaussian": float(rep.comp_gaussian),
        "log_cn_exact": float(rep.log_cn_exact) if rep.log_cn_exact is not None else None,
        "ratio": rep.ratio,
        "delta_tail_bound": rep.delta_tail_bound,
    }]
    _emit(rows, fmt, output)


@main.command("saddle")
@_common
@click.option("--n", "n", type=int, required=True)
@_run
def cmd_saddle(model_name, bits, tol, eps, p, output, fmt, n):
    """Tilt parameter, residual, and moment diagnostics."""
    ctx = PrecisionContext(bits=bits, tol=tol)
    model = _resolve_model(model_name, ctx, eps, p)
    sol = saddle.solve_khintchine(model, n, ctx)
    row = {
        "n": sol.n,
        "delta": float(sol.delta),
        "residual": float(sol.residual),
        "iterations": sol.iterations,
        "K": sol.K,
        "method": sol.method,
    }
    if model.profile is not None:
        asym = saddle.asymptotic_delta(model.profile, n, ctx)
        row["asymptotic_delta"] = float(asym)
        row["delta_ratio"] = float(sol.delta / asym)
    else:
        row["asymptotic_delta"] = None
        row["delta_ratio"] = None
    mom = saddle.tilted_moments(model, sol.delta, None, ctx)
    row["mean"] = float(mom.mean)
    row["variance"] = float(mom.variance)
    row["third"] = float(mom.third)
    _emit([row], fmt, output)


@main.command("nllt")
@_common
@click.option("--grid", default="250,500,1000,2000", show_default=True,
              help="comma-separated sizes")
@click.option("--q-max", default=12, show_default=True)
@click.option("--ratio-cap", default=2000, show_default=True,
              help="largest n for the exact ratio series (0 disables)")
@_run
def cmd_nllt(model_name, bits, tol, eps, p, output, fmt, grid, q_max, ratio_cap):
    """Lattice-condition report with the exact local-limit ratio series."""
    ctx = PrecisionContext(bits=bits, tol=tol)
    model = _resolve_model(model_name, ctx, eps, p)
    ns = [int(x) for x in grid.split(",") if x.strip()]
    rep = nllt.check_nllt(model, ns, q_max, ctx, ratio_cap=ratio_cap)
    if fmt == "json":
        doc = {
            "gcd_support": rep.gcd_support,
            "case": rep.case,
            "condition_holds": rep.condition_holds,
            "offending_q": list(rep.offending),
            "per_q": [{
                "q": f.q,
                "required_class": f.required_class,
                "fitted_class": f.fitted_class,
                "fit_constant": f.fit_constant,
                "masses": [{"n": n, "mass": m, "ratio": r}
                           for n, m, r in zip(f.ns, f.masses, f.ratios)],
                "passed": f.passed,
            } for f in rep.per_q],
            "ratio_series": [{"n": n, "ratio": r} for n, r in rep.ratio_series],
        }
        text = json.dumps(doc, indent=2) + "\n"
        if output:
            with open(output, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            click.echo(text, nl=False)
        return
    offending = ";".join(str(q) for q in rep.offending)
    rows = []
    ratio_map = dict(rep.ratio_series)
    for f in rep.per_q:
        for n, m, r in zip(f.ns, f.masses, f.ratios):
            rows.append({
                "record": "mass",
                "q": f.q,
                "n": n,
                "mass": m,
                "mass_ratio": r,
                "required_class": f.required_class,
                "passed": f.passed,
                "gcd_support": rep.gcd_support,
                "case": rep.case,
                "condition_holds": rep.condition_holds,
                "offending_q": offending,
                "nllt_ratio": ratio_map.get(n, ""),
            })
    if not rows:
        rows.append({
            "record": "summary", "q": "", "n": "", "mass": "", "mass_ratio": "",
            "required_class": "", "passed": "",
            "gcd_support": rep.gcd_support, "case": rep.case,
            "condition_holds": rep.condition_holds, "offending_q": offending,
            "nllt_ratio": "",
        })
    _emit(rows, fmt, output)


@main.command("charfn")
@_common
@click.option("--n", "n", type=int, required=True)
@click.option("--alphas", default=None,
              help="comma-separated values in (0, 1/2]")
@click.option("--count", default=16, show_default=True,
              help="grid size when --alphas is absent")
@click.option("--delta", type=float, default=None,
              help="tilt override (defaults to the solved delta_n)")
@_run
def cmd_charfn(model_name, bits, tol, eps, p, output, fmt, n, alphas, count, delta):
    """Characteristic-function sweep phi_n(alpha)."""
    ctx = PrecisionContext(bits=bits, tol=tol)
    model = _resolve_model(model_name, ctx, eps, p)
    if delta is None:
        delta = float(saddle.solve_khintchine(model, n, ctx).delta)
    if alphas:
        grid = [float(x) for x in alphas.split(",") if x.strip()]
    else:
        grid = [0.5 * (i + 1) / count for i in range(count)]
    rows = []
    for a in grid:
        sample = nllt.char_fn(model, n, delta, a, ctx)
        rows.append({
            "n": n,
            "alpha": a,
            "delta": delta,
            "re": float(sample.value.real),
            "im": float(sample.value.imag),
            "log_abs": float(sample.log_abs),
        })
    _emit(rows, fmt, output)


if __name__ == "__main__":
    main()
