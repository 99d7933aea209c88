"""Command-line interface: ``tailcvar estimate | simulate | coverage | avar``."""
import json
import math
import pathlib
import sys

import click

from . import __version__
from .analysis import avar_curve
from .cvar import Method, estimate
from .distributions import Family, parse_distribution
from .errors import TailCvarError
from .harness import SimConfig, ingest, load_config, pot_issues, rows_to_csv, run_coverage, run_simulation, write_results
from .threshold import ThresholdGrid


def parse_n_grid(text):
    """``"5000,10000"`` or ``"10000..100000:10000"`` -> tuple of ints."""
    text = text.strip()
    try:
        if ".." in text:
            span, _, step = text.partition(":")
            lo, hi = (int(float(v)) for v in span.split(".."))
            step = int(float(step)) if step else lo
            if step <= 0 or hi < lo:
                raise ValueError
            return tuple(range(lo, hi + 1, step))
        return tuple(int(float(v)) for v in text.split(",") if v.strip())
    except ValueError:
        raise click.BadParameter(f"cannot parse n-grid {text!r}; use N1,N2,... or N1..N2:step") from None


def grid_options(fn):
    opts = [
        click.option("--q-start", type=float, default=None, help="Lowest threshold percentile [0.79]."),
        click.option("--q-end", type=float, default=None, help="Highest threshold percentile [0.98]."),
        click.option("--q-step", type=float, default=None, help="Percentile spacing [0.01]."),
        click.option("--gamma", type=float, default=None, help="ForwardStop significance [0.1]."),
        click.option("--xi-max", type=float, default=None, help="Shape cutoff for candidates [0.9]."),
    ]
    for o in reversed(opts):
        fn = o(fn)
    return fn


def build_grid(base, q_start, q_end, q_step, gamma, xi_max):
    if all(v is None for v in (q_start, q_end, q_step, gamma, xi_max)):
        return base
    q = base.percentiles
    step = q_step if q_step is not None else (round(q[1] - q[0], 10) if len(q) > 1 else 0.01)
    return ThresholdGrid.from_range(
        q[0] if q_start is None else q_start,
        q[-1] if q_end is None else q_end,
        step,
        base.gamma if gamma is None else gamma,
        base.xi_max if xi_max is None else xi_max,
    )


def _fail(exc):
    click.echo(f"error: {exc}", err=True)
    sys.exit(2)


@click.group()
@click.version_option(__version__)
def main():
    """Tail CVaR estimation with peaks-over-threshold bias correction."""


@main.command("estimate")
@click.option("--input", "input_path", required=True, type=click.Path(dir_okay=False), help="Data file.")
@click.option("--input-format", type=click.Choice(["lines", "csv_column"]), default="lines", show_default=True)
@click.option("--column", default=None, help="CSV column name or index for --input-format csv_column.")
@click.option("--alpha", type=float, required=True, help="Confidence level in (0, 1).")
@click.option("--method", type=click.Choice(["sa", "bpot", "upot"], case_sensitive=False), default="upot",
              show_default=True)
@click.option("--delta", type=float, default=0.05, show_default=True, help="CI has level 1 - delta.")
@grid_options
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json", show_default=True)
@click.option("--out", type=click.Path(file_okay=False), default=None, help="Also write estimate.json here.")
def estimate_cmd(input_path, input_format, column, alpha, method, delta, q_start, q_end, q_step, gamma,
                 xi_max, fmt, out):
    """Estimate CVaR_alpha from observations in a file."""
    try:
        sample = ingest(input_path, input_format, column)
        m = Method.parse(method)
        warnings = []
        if m is not Method.SA:
            warnings = pot_issues(sample)
            if sample.n < 10:
                raise TailCvarError(warnings[0])
        grid = build_grid(ThresholdGrid(), q_start, q_end, q_step, gamma, xi_max)
        est = estimate(sample, alpha, m, delta, grid)
    except (TailCvarError, ValueError) as exc:
        _fail(exc)
    for w in warnings:
        click.echo(f"warning: {w}", err=True)
    doc = est.to_dict()
    doc["warnings"] = warnings
    if fmt == "json":
        text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    else:
        d = est.diagnostics
        row = {
            "alpha": est.alpha, "method": est.method.value, "value": est.value,
            "ci_lower": est.ci_lower, "ci_upper": est.ci_upper, "n": sample.n,
            "u": d.get("u"), "k": d.get("k"), "percentile": d.get("percentile"),
            "xi_mle": d["fit"].xi if d.get("fit") else None,
            "xi_n": d.get("xi_n"), "epsilon_hat": d.get("epsilon_hat"),
            "sa_fallback": est.sa_fallback,
        }
        text = rows_to_csv([row], list(row))
    click.echo(text, nl=False)
    if out:
        p = pathlib.Path(out)
        p.mkdir(parents=True, exist_ok=True)
        (p / "estimate.json").write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def sim_options(fn):
    opts = [
        click.option("--config", "config_path", type=click.Path(dir_okay=False, exists=True), default=None,
                     help="JSON or YAML document with SimConfig fields."),
        click.option("--seed", type=int, default=None, help="Master seed."),
        click.option("--out", type=click.Path(file_okay=False), default=None, help="Output directory."),
        click.option("--dist", "dists", multiple=True, help="Distribution, e.g. burr:0.5,3 (repeatable)."),
        click.option("--reps", type=int, default=None, help="Replications per distribution."),
        click.option("--max-n", type=int, default=None, help="Draw size per replication."),
        click.option("--n-grid", default=None, help="Sample sizes: N1,N2,... or N1..N2:step."),
        click.option("--alpha", type=float, default=None),
        click.option("--delta", type=float, default=None),
        click.option("--workers", default=None, help="Worker processes or 'auto'."),
    ]
    for o in reversed(opts):
        fn = o(fn)
    return grid_options(fn)


def build_config(config_path, seed, dists, reps, max_n, n_grid, alpha, delta, workers, q_start, q_end, q_step,
                 gamma, xi_max, methods=None):
    cfg = load_config(config_path) if config_path else SimConfig()
    changes = {}
    if seed is not None:
        changes["master_seed"] = seed
    if dists:
        changes["distributions"] = tuple(parse_distribution(d) for d in dists)
    if reps is not None:
        changes["reps"] = reps
    if n_grid is not None:
        changes["n_grid"] = parse_n_grid(n_grid)
    if max_n is not None:
        changes["max_n"] = max_n
    elif "n_grid" in changes and changes["n_grid"][-1] > cfg.max_n:
        changes["max_n"] = changes["n_grid"][-1]
    if alpha is not None:
        changes["alpha"] = alpha
    if delta is not None:
        changes["delta"] = delta
    if workers is not None:
        changes["parallel_workers"] = "auto" if workers == "auto" else int(workers)
    if methods:
        changes["methods"] = tuple(Method.parse(m) for m in methods)
    changes["grid"] = build_grid(cfg.grid, q_start, q_end, q_step, gamma, xi_max)
    return cfg.replace(**changes)


def _progress(done, total):
    if done == total or done % max(1, total // 20) == 0:
        click.echo(f"  {done}/{total} replications", err=True)


def _run(kind, out, opts, methods=None):
    try:
        cfg = build_config(methods=methods, **opts)
        runner = run_coverage if kind == "coverage" else run_simulation
        result = runner(cfg, _progress)
        if out:
            write_results(result, out)
    except (TailCvarError, ValueError, OSError) as exc:
        _fail(exc)
    fields = ["distribution", "n", "method", "truth", "mean_estimate", "rmse", "bias", "coverage",
              "mean_threshold_percentile", "failure_count"]
    click.echo(rows_to_csv(result.rows, fields), nl=False)


@main.command("simulate")
@sim_options
@click.option("--methods", multiple=True, type=click.Choice(["sa", "bpot", "upot"], case_sensitive=False))
def simulate_cmd(out, methods, **opts):
    """Monte Carlo comparison of SA, BPOT and UPOT."""
    _run("simulate", out, opts, methods)


@main.command("coverage")
@sim_options
def coverage_cmd(out, **opts):
    """Empirical coverage of the UPOT confidence interval."""
    _run("coverage", out, opts)


@main.command("avar")
@click.option("--dist", "dist_text", required=True, help="Frechet distribution, e.g. frechet:2.25.")
@click.option("--alpha", type=float, required=True)
@click.option("--n-grid", default="10000..100000:10000", show_default=True)
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv", show_default=True)
@click.option("--out", type=click.Path(file_okay=False), default=None, help="Write fig_avar.csv here.")
def avar_cmd(dist_text, alpha, n_grid, fmt, out):
    """Asymptotic variance of UPOT vs SA on a Frechet law."""
    try:
        dist = parse_distribution(dist_text)
        if dist.family is not Family.FRECHET:
            raise TailCvarError("avar supports only frechet:<gamma>")
        if not dist.params[0] > 1:
            raise TailCvarError("avar needs gamma > 1 so that xi < 1")
        points = avar_curve(dist.params[0], alpha, parse_n_grid(n_grid))
    except (TailCvarError, ValueError) as exc:
        _fail(exc)
    rows = [{"distribution": str(dist), "alpha": alpha, "n": p.n, "k": p.k, "avar_upot": p.avar_upot,
             "avar_sa": p.avar_sa} for p in points]
    fields = ["distribution", "alpha", "n", "k", "avar_upot", "avar_sa"]
    text = rows_to_csv(rows, fields)
    if out:
        d = pathlib.Path(out)
        d.mkdir(parents=True, exist_ok=True)
        (d / "fig_avar.csv").write_text(text)
        (d / "results.csv").write_text(text)
        (d / "config_echo.json").write_text(json.dumps(
            {"command": "avar", "distribution": str(dist), "alpha": alpha, "n_grid": [p.n for p in points]},
            indent=2, sort_keys=True) + "\n")
    if fmt == "csv":
        click.echo(text, nl=False)
    else:
        click.echo(json.dumps([{k: (None if isinstance(v, float) and math.isnan(v) else v) for k, v in r.items()}
                               for r in rows], indent=2))


if __name__ == "__main__":
    main()
