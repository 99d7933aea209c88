"""Reproducible Monte Carlo driver and data ingestion.

Every replication draws ``max_n`` observations from its own random stream,
derived from ``(master_seed, distribution index, replication index)``, and
evaluates the estimators on prefixes of that draw for each sample size in
``n_grid``. Results are reduced in replication order, so output does not
depend on the number of workers.
"""
import csv
import dataclasses
import io
import json
import math
import os
import pathlib
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .analysis import coverage_probability, run_metrics
from .cvar import Method, estimate
from .distributions import DistributionSpec, parse_distribution
from .errors import DataError, DomainError, TailCvarError
from .sample import SortedSample
from .threshold import ThresholdGrid, autothresh

__all__ = [
    "TABLE1_DISTRIBUTIONS",
    "SimConfig",
    "SimRow",
    "SimResult",
    "derive_stream",
    "run_simulation",
    "run_coverage",
    "ingest",
    "load_config",
    "write_results",
]

TABLE1_DISTRIBUTIONS = (
    "burr:0.38,4", "burr:0.5,3", "burr:0.67,2.25", "burr:2,0.75", "burr:3.33,0.45",
    "frechet:1.5", "frechet:1.75", "frechet:2", "frechet:2.25", "frechet:2.5",
    "halft:1.5", "halft:1.75", "halft:2", "halft:2.25", "halft:2.5",
)


@dataclass(frozen=True)
class SimConfig:
    """Monte Carlo experiment settings.

    ``parallel_workers`` is an integer or ``"auto"`` (one per CPU).
    """

    distributions: tuple = tuple(parse_distribution(d) for d in TABLE1_DISTRIBUTIONS)
    alpha: float = 0.998
    delta: float = 0.05
    reps: int = 100
    max_n: int = 20000
    n_grid: tuple = (5000, 10000, 15000, 20000)
    master_seed: int = 20240611
    grid: ThresholdGrid = field(default_factory=ThresholdGrid)
    methods: tuple = (Method.SA, Method.BPOT, Method.UPOT)
    parallel_workers: object = 1

    def __post_init__(self):
        dists = tuple(parse_distribution(d) for d in self.distributions)
        object.__setattr__(self, "distributions", dists)
        object.__setattr__(self, "n_grid", tuple(int(n) for n in self.n_grid))
        object.__setattr__(self, "methods", tuple(Method.parse(m) for m in self.methods))
        if isinstance(self.grid, dict):
            object.__setattr__(self, "grid", _grid_from_dict(self.grid))
        if not dists:
            raise DataError("no distributions configured")
        if not self.n_grid or any(b <= a for a, b in zip(self.n_grid, self.n_grid[1:])):
            raise DataError("n_grid must be nonempty and strictly ascending")
        if self.n_grid[0] < 2 or self.n_grid[-1] > self.max_n:
            raise DataError("n_grid must lie within [2, max_n]")
        if self.reps < 1:
            raise DataError("reps must be positive")
        if not 0 < self.alpha < 1 or not 0 < self.delta < 1:
            raise DataError("alpha and delta must lie in (0, 1)")
        if not 0 <= int(self.master_seed) < 2**64:
            raise DataError("master_seed must be a 64-bit unsigned integer")
        if not self.methods:
            raise DataError("no methods configured")
        w = self.parallel_workers
        if w != "auto" and (not isinstance(w, int) or w < 1):
            raise DataError("parallel_workers must be a positive integer or 'auto'")

    @property
    def workers(self):
        if self.parallel_workers == "auto":
            return os.cpu_count() or 1
        return int(self.parallel_workers)

    def to_dict(self):
        g = self.grid
        return {
            "distributions": [str(d) for d in self.distributions],
            "alpha": self.alpha,
            "delta": self.delta,
            "reps": self.reps,
            "max_n": self.max_n,
            "n_grid": list(self.n_grid),
            "master_seed": int(self.master_seed),
            "grid": {"percentiles": list(g.percentiles), "gamma": g.gamma, "xi_max": g.xi_max},
            "methods": [m.value for m in self.methods],
            "parallel_workers": self.parallel_workers,
        }

    @classmethod
    def from_dict(cls, data):
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise DataError(f"unknown config fields: {sorted(unknown)}")
        return cls(**data)

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)


def _grid_from_dict(d):
    if "percentiles" in d:
        return ThresholdGrid(tuple(d["percentiles"]), d.get("gamma", 0.1), d.get("xi_max", 0.9))
    return ThresholdGrid.from_range(d.get("q_start", 0.79), d.get("q_end", 0.98), d.get("q_step", 0.01),
                                    d.get("gamma", 0.1), d.get("xi_max", 0.9))


@dataclass(frozen=True)
class SimRow:
    """Aggregates for one ``(distribution, n, method)`` cell.

    ``coverage`` is NaN unless the method reports intervals; ``coverage_reps``
    is its denominator (replications without a fallback).
    """

    distribution: str
    n: int
    method: str
    truth: float
    reps: int
    mean_estimate: float
    rmse: float
    bias: float
    coverage: float
    coverage_reps: int
    mean_threshold_percentile: float
    failure_count: int
    error_count: int


ROW_FIELDS = [f.name for f in dataclasses.fields(SimRow)]


@dataclass
class SimResult:
    rows: list
    config: SimConfig
    elapsed: dict = field(default_factory=dict)

    def row(self, distribution, n, method):
        key = (str(parse_distribution(distribution)), int(n), Method.parse(method).value)
        for r in self.rows:
            if (r.distribution, r.n, r.method) == key:
                return r
        raise KeyError(key)


def derive_stream(master_seed, distribution_index, rep_index):
    """Independent generator for one replication of one distribution."""
    ss = np.random.SeedSequence(entropy=int(master_seed), spawn_key=(int(distribution_index), int(rep_index)))
    return np.random.Generator(np.random.PCG64(ss))


def _run_rep(args):
    """Evaluate every ``(n, method)`` for one replication; returns plain tuples."""
    cfg, di, ri = args
    dist = cfg.distributions[di]
    draws = dist.sample(derive_stream(cfg.master_seed, di, ri), cfg.max_n)
    out = []
    for n in cfg.n_grid:
        sample = SortedSample(draws[:n])
        choice = None
        for m in cfg.methods:
            try:
                if m is not Method.SA and choice is None:
                    choice = _choose(sample, cfg)
                e = estimate(sample, cfg.alpha, m, cfg.delta, cfg.grid,
                             threshold=choice if m is not Method.SA else None)
                out.append((n, m.value, e.value, e.ci_lower, e.ci_upper,
                            e.diagnostics.get("percentile", math.nan), e.sa_fallback, False))
            except (TailCvarError, ValueError, ArithmeticError):
                out.append((n, m.value, math.nan, None, None, math.nan, False, True))
    return di, ri, out


def _choose(sample, cfg):
    choice = autothresh(sample, cfg.grid)
    if choice.is_nan or choice.k / (sample.n * (1.0 - cfg.alpha)) >= 1.0 - 1e-12:
        return choice
    return None  # let estimate() handle the restricted re-selection


def _execute(cfg, progress=None):
    tasks = [(cfg, di, ri) for di in range(len(cfg.distributions)) for ri in range(cfg.reps)]
    results = []
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            for res in pool.map(_run_rep, tasks, chunksize=max(1, len(tasks) // (8 * cfg.workers))):
                results.append(res)
                if progress:
                    progress(len(results), len(tasks))
    else:
        for t in tasks:
            results.append(_run_rep(t))
            if progress:
                progress(len(results), len(tasks))
    results.sort(key=lambda r: (r[0], r[1]))
    return results


def _aggregate(cfg, results):
    rows = []
    by_dist = {}
    for di, ri, recs in results:
        by_dist.setdefault(di, []).extend(recs)
    for di, dist in enumerate(cfg.distributions):
        try:
            truth = dist.true_cvar(cfg.alpha)
        except DomainError:
            truth = math.nan  # infinite mean
        recs = by_dist.get(di, [])
        for n in cfg.n_grid:
            for m in cfg.methods:
                cell = [r for r in recs if r[0] == n and r[1] == m.value]
                ok = [r for r in cell if not r[7]]
                vals = [r[2] for r in ok]
                rmse, bias = run_metrics(vals, truth) if vals else (math.nan, math.nan)
                mean = math.fsum(vals) / len(vals) if vals else math.nan
                with_ci = [(r[3], r[4]) for r in ok if not r[6] and r[3] is not None]
                cov = coverage_probability(with_ci, truth) if with_ci else math.nan
                pct = [r[5] for r in ok if not r[6] and not math.isnan(r[5])]
                rows.append(SimRow(
                    distribution=str(dist), n=n, method=m.value, truth=truth, reps=len(cell),
                    mean_estimate=mean, rmse=rmse, bias=bias, coverage=cov, coverage_reps=len(with_ci),
                    mean_threshold_percentile=math.fsum(pct) / len(pct) if pct else math.nan,
                    failure_count=sum(1 for r in ok if r[6]), error_count=len(cell) - len(ok),
                ))
    return rows


def run_simulation(config, progress=None):
    """Run all replications and aggregate per ``(distribution, n, method)``."""
    t0 = time.perf_counter()
    results = _execute(config, progress)
    rows = _aggregate(config, results)
    return SimResult(rows, config, {"total_seconds": time.perf_counter() - t0})


def run_coverage(config, progress=None):
    """Coverage of the UPOT interval; other methods are skipped."""
    return run_simulation(config.replace(methods=(Method.UPOT,)), progress)


def ingest(path, format="lines", column=None):
    """Read observations from a text file.

    ``format="lines"`` expects one number per line, ``#`` starting a comment.
    ``format="csv_column"`` reads a CSV with a header row and takes ``column``
    (a name or 0-based index, default 0).

    Raises
    ------
    DataError
        On unreadable, empty or non-finite input; the message names the line.
    """
    path = pathlib.Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    values = []
    if format == "lines":
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if line:
                values.append(_parse_value(line, lineno, path))
    elif format == "csv_column":
        reader = csv.reader(io.StringIO(text))
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path} is empty") from None
        col = 0 if column is None else column
        if isinstance(col, str) and not col.isdigit():
            if col not in header:
                raise DataError(f"column {col!r} not in header {header}")
            col = header.index(col)
        col = int(col)
        for lineno, row in enumerate(reader, start=2):
            if not row or not any(c.strip() for c in row):
                continue
            if col >= len(row):
                raise DataError(f"{path}:{lineno}: missing column {col}")
            values.append(_parse_value(row[col].strip(), lineno, path))
    else:
        raise DataError(f"unknown input format {format!r}")
    if not values:
        raise DataError(f"{path} contains no observations")
    return SortedSample(values)


def _parse_value(token, lineno, path):
    try:
        v = float(token)
    except ValueError:
        raise DataError(f"{path}:{lineno}: cannot parse {token!r} as a number") from None
    if not math.isfinite(v):
        raise DataError(f"{path}:{lineno}: non-finite value {token!r}")
    return v


def pot_issues(sample):
    """Reasons a sample is unsuitable for the POT estimators (empty if fine)."""
    issues = []
    if sample.n < 10:
        issues.append(f"only {sample.n} observations; POT methods need at least 10")
    nonpos = int(np.sum(sample.values <= 0))
    if nonpos:
        issues.append(f"{nonpos} non-positive observations; log-spacing statistics use the positive tail only")
    return issues


def load_config(path):
    """Read a JSON or YAML config document into a :class:`SimConfig`."""
    path = pathlib.Path(path)
    text = path.read_text()
    if path.suffix.lower() in (".yaml", ".yml"):
        import yaml

        data = yaml.safe_load(text)
    else:
        data = json.loads(text)
    if not isinstance(data, dict):
        raise DataError(f"{path}: config must be a mapping")
    return SimConfig.from_dict(data)


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return "nan" if math.isnan(v) else repr(v)
    return str(v)


def rows_to_csv(rows, fields):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(fields)
    for r in rows:
        d = r if isinstance(r, dict) else dataclasses.asdict(r)
        w.writerow([_fmt(d[f]) for f in fields])
    return buf.getvalue()


def write_results(result, out_dir):
    """Write ``results.csv``, ``config_echo.json``, figure CSVs and timings.

    Timings go to ``timings.json`` so the other files are byte-identical
    across reruns of the same config.
    """
    out = pathlib.Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "results.csv").write_text(rows_to_csv(result.rows, ROW_FIELDS))
    (out / "config_echo.json").write_text(json.dumps(result.config.to_dict(), indent=2, sort_keys=True) + "\n")
    (out / "fig_compare.csv").write_text(rows_to_csv(
        result.rows, ["distribution", "n", "method", "truth", "mean_estimate", "rmse", "bias"]))
    cov = [r for r in result.rows if r.method == Method.UPOT.value]
    if cov:
        (out / "fig_coverage.csv").write_text(rows_to_csv(
            cov, ["distribution", "n", "coverage", "coverage_reps", "failure_count"]))
    (out / "timings.json").write_text(json.dumps(result.elapsed, indent=2) + "\n")
    return out
