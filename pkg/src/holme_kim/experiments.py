"""Multi-seed experiment runner and the five theorem-checking experiments.

Each experiment returns an :class:`ExperimentResult`: flat rows ready for
CSV/JSON plus a summary dict. Seeds are ``base_seed + k``; every run is a
pure function of its configuration.
"""

from __future__ import annotations

import csv
import json
import math
import os
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import partial
from typing import Callable, Sequence

from .core import HkParams, Multigraph, sample_step
from .rng import HkRng, coin_threshold
from .stats import IncrementalStats, StatsSnapshot
from .theory import cherry_law_constant, phi, power_law_limit

CHECKPOINT_RATIO = 10 ** 0.25


def geometric_checkpoints(t_max: int, start: int = 10, ratio: float = CHECKPOINT_RATIO) -> tuple[int, ...]:
    """``start * ratio**k`` rounded, up to and including ``t_max``."""
    out = []
    k = 0
    while True:
        t = int(round(start * ratio ** k))
        if t >= t_max:
            break
        if not out or t > out[-1]:
            out.append(t)
        k += 1
    out.append(t_max)
    return tuple(out)


@dataclass(frozen=True)
class ExperimentConfig:
    m: int = 2
    p: float = 0.5
    t_max: int = 10_000
    n_seeds: int = 1
    base_seed: int = 0
    checkpoints: tuple[int, ...] | None = None
    output_path: str | None = None
    format: str = "csv"

    def __post_init__(self):
        HkParams(self.m, self.p, self.base_seed)
        if self.t_max < 10:
            raise ValueError(f"t_max must be >= 10, got {self.t_max}")
        if self.n_seeds < 1:
            raise ValueError(f"n_seeds must be >= 1, got {self.n_seeds}")
        if self.format not in ("csv", "json"):
            raise ValueError(f"format must be csv or json, got {self.format!r}")
        if self.checkpoints is None:
            object.__setattr__(self, "checkpoints", geometric_checkpoints(self.t_max))
        else:
            cps = tuple(int(c) for c in self.checkpoints)
            if list(cps) != sorted(set(cps)) or not cps or cps[0] < 1 or cps[-1] > self.t_max:
                raise ValueError(f"checkpoints must be strictly increasing within [1, t_max]: {cps}")
            object.__setattr__(self, "checkpoints", cps)

    @property
    def seeds(self) -> list[int]:
        return [self.base_seed + k for k in range(self.n_seeds)]

    def params(self, seed: int) -> HkParams:
        return HkParams(self.m, self.p, seed)


@dataclass
class SeedRun:
    seed: int
    checkpoints: tuple[int, ...]
    snapshots: list[StatsSnapshot | None]
    max_degree: list[int]
    tracked: dict[int, list[int | None]] = field(default_factory=dict)
    scatter: list[tuple[int, int, float]] = field(default_factory=list)
    elapsed: float = 0.0


def run_seed(
    params: HkParams,
    checkpoints: Sequence[int],
    *,
    with_stats: bool = True,
    tracked: Sequence[int] = (),
    scatter_threshold: int | None = None,
) -> SeedRun:
    """Grow one sequence to ``checkpoints[-1]``, recording state at each checkpoint.

    ``scatter_threshold`` collects ``(v, d(v), C(v) d(v))`` at the final time
    for every vertex of degree at least the threshold (requires stats).
    """
    start = time.perf_counter()
    rng = HkRng(params.seed)
    thr = coin_threshold(params.p)
    g = Multigraph.initial(params.m)
    st = IncrementalStats(params) if with_stats else None
    cps = list(checkpoints)
    run = SeedRun(params.seed, tuple(cps), [], [], {j: [] for j in tracked})

    def record(t: int) -> None:
        if st is not None:
            run.snapshots.append(st.snapshot(per_vertex=False))
            run.max_degree.append(st.max_degree)
        else:
            run.snapshots.append(None)
            run.max_degree.append(max(map(len, g.nbrs)))
        for j, series in run.tracked.items():
            series.append(g.degree(j) if j <= t else None)

    ci = 0
    while ci < len(cps) and cps[ci] <= 1:
        record(1)
        ci += 1
    for t in range(1, cps[-1]):
        trace = sample_step(g, params, rng, _thr=thr)
        if st is not None:
            st.update(trace, g)
        g.commit(trace.endpoints)
        if t + 1 == cps[ci]:
            record(t + 1)
            ci += 1
    if scatter_threshold is not None:
        if st is None:
            raise ValueError("vertex scatter needs with_stats=True")
        for v in g.vertices():
            d = st.deg[v]
            if d >= scatter_threshold:
                run.scatter.append((v, d, 2 * st.tri[v] / (d - 1)))
    run.elapsed = time.perf_counter() - start
    return run


def worker_count(n_tasks: int) -> int:
    env = os.environ.get("HK_THREADS")
    cap = int(env) if env else (os.cpu_count() or 1)
    return max(1, min(cap, n_tasks))


def run_seeds(config: ExperimentConfig, **kwargs) -> list[SeedRun]:
    """Run every seed of ``config``; parallel across seeds up to ``HK_THREADS``."""
    params = [config.params(s) for s in config.seeds]
    job = partial(run_seed, checkpoints=config.checkpoints, **kwargs)
    workers = worker_count(len(params))
    if workers == 1:
        return [job(p) for p in params]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(job, params))


@dataclass
class ExperimentResult:
    name: str
    config: ExperimentConfig
    rows: list[dict]
    summary: dict

    def to_dict(self) -> dict:
        cfg = asdict(self.config)
        cfg["checkpoints"] = list(self.config.checkpoints)
        cfg["seeds"] = self.config.seeds
        return {"experiment": self.name, "config": cfg, "summary": self.summary, "rows": self.rows}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def write_csv(self, fh) -> None:
        if not self.rows:
            return
        w = csv.DictWriter(fh, fieldnames=list(self.rows[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(self.rows)

    def write(self, path: str | None = None, fmt: str | None = None) -> None:
        path = path or self.config.output_path
        fmt = fmt or self.config.format
        if path is None:
            raise ValueError("no output path given")
        try:
            with open(path, "w", newline="", encoding="utf-8") as fh:
                if fmt == "json":
                    fh.write(self.to_json() + "\n")
                else:
                    self.write_csv(fh)
        except OSError as exc:
            raise OSError(f"cannot write results to {path!r}: {exc}") from exc


def _median(xs) -> float:
    return float(statistics.median(xs))


def _mean_se(xs) -> tuple[float, float]:
    n = len(xs)
    mu = math.fsum(xs) / n
    if n < 2:
        return mu, float("nan")
    var = math.fsum((x - mu) ** 2 for x in xs) / (n - 1)
    return mu, math.sqrt(var / n)


def degree_law(config: ExperimentConfig, d_report_max: int | None = None,
               runs: list[SeedRun] | None = None) -> ExperimentResult:
    """Mean ``N_t(d) / t`` over seeds against the limiting degree law."""
    m = config.m
    d_hi = d_report_max if d_report_max is not None else m + 8
    runs = runs if runs is not None else run_seeds(config)
    rows = []
    for ci, t in enumerate(config.checkpoints):
        for d in range(m, d_hi + 1):
            fr = [r.snapshots[ci].degree_hist.get(d, 0) / t for r in runs]
            mu, se = _mean_se(fr)
            limit = power_law_limit(m, d)
            rows.append({"t": t, "d": d, "mean_frac": mu, "stderr": se,
                         "limit": limit, "abs_error": abs(mu - limit)})
    final = [r for r in rows if r["t"] == config.t_max]
    summary = {
        "t": config.t_max,
        "n_seeds": config.n_seeds,
        "mean_frac": {str(r["d"]): r["mean_frac"] for r in final},
        "limit": {str(r["d"]): r["limit"] for r in final},
        "max_abs_error": max(r["abs_error"] for r in final),
    }
    return ExperimentResult("degree-law", config, rows, summary)


def _per_checkpoint(config, runs, fn: Callable[[StatsSnapshot, int], dict]) -> list[dict]:
    rows = []
    for ci, t in enumerate(config.checkpoints):
        for r in runs:
            rows.append({"seed": r.seed, "t": t, **fn(r.snapshots[ci], t)})
    return rows


def cherry_law(config: ExperimentConfig, runs: list[SeedRun] | None = None) -> ExperimentResult:
    """``C_t / (t ln t)`` per seed and in median, against ``C(m+1, 2)``."""
    runs = runs if runs is not None else run_seeds(config)
    limit = float(cherry_law_constant(config.m))
    rows = _per_checkpoint(config, runs, lambda s, t: {
        "ratio": s.cherries / (t * math.log(t)) if t > 1 else float("nan")})
    medians = {}
    for t in config.checkpoints:
        if t > 1:
            med = _median([r["ratio"] for r in rows if r["t"] == t])
            medians[t] = med
            rows.append({"seed": "median", "t": t, "ratio": med})
    summary = {
        "limit": limit,
        "median_ratio": {str(t): v for t, v in medians.items()},
        "distance_to_limit": {str(t): abs(v - limit) for t, v in medians.items()},
    }
    return ExperimentResult("cherry-law", config, rows, summary)


def clustering(config: ExperimentConfig, runs: list[SeedRun] | None = None) -> ExperimentResult:
    """Local and global clustering, and ``c_glo ln t``, along the checkpoints."""
    runs = runs if runs is not None else run_seeds(config)
    rows = _per_checkpoint(config, runs, lambda s, t: {
        "c_loc": s.c_loc, "c_glo": s.c_glo, "c_glo_log_t": s.c_glo * math.log(t)})
    med = {}
    for t in config.checkpoints:
        sel = [r for r in rows if r["t"] == t]
        agg = {k: _median([r[k] for r in sel]) for k in ("c_loc", "c_glo", "c_glo_log_t")}
        med[t] = agg
        rows.append({"seed": "median", "t": t, **agg})
    summary = {"median": {str(t): v for t, v in med.items()}}
    return ExperimentResult("clustering", config, rows, summary)


def degree_bounds(config: ExperimentConfig, tracked_vertex: int = 10,
                  runs: list[SeedRun] | None = None) -> ExperimentResult:
    """Max degree scaled by ``sqrt(t) ln t`` and the tracked-vertex martingale."""
    j = tracked_vertex
    if runs is None:
        runs = run_seeds(config, with_stats=False, tracked=(j,))
    rows = []
    for ci, t in enumerate(config.checkpoints):
        scale = math.sqrt(t) * math.log(t) if t > 1 else float("nan")
        dm = [r.max_degree[ci] / scale for r in runs]
        row = {"t": t, "dmax_scaled_median": _median(dm), "dmax_scaled_max": max(dm),
               "dmax_bound_mt": all(r.max_degree[ci] <= config.m * t for r in runs)}
        xs = [r.tracked[j][ci] / phi(t) for r in runs if j in r.tracked and r.tracked[j][ci] is not None]
        if xs:
            mu, se = _mean_se(xs)
            row.update({"tracked_mean": mu, "tracked_stderr": se})
        else:
            row.update({"tracked_mean": float("nan"), "tracked_stderr": float("nan")})
        rows.append(row)
    summary = {
        "tracked_vertex": j,
        "max_dmax_scaled": max(r["dmax_scaled_max"] for r in rows if r["t"] > 1),
    }
    return ExperimentResult("degree-bounds", config, rows, summary)


def vertex_clustering(config: ExperimentConfig, degree_threshold: int = 50,
                      runs: list[SeedRun] | None = None) -> ExperimentResult:
    """``C(v) d(v)`` at ``t_max`` for every vertex with ``d(v) >= degree_threshold``."""
    runs = runs if runs is not None else run_seeds(config, scatter_threshold=degree_threshold)
    rows = [{"seed": r.seed, "v": v, "d": d, "c_times_d": x} for r in runs for v, d, x in r.scatter]
    xs = [r["c_times_d"] for r in rows]
    summary = {"threshold": degree_threshold, "count": len(xs)}
    if xs:
        summary.update({"min": min(xs), "median": _median(xs), "max": max(xs)})
    return ExperimentResult("vertex-clustering", config, rows, summary)


EXPERIMENTS = {
    "degree-law": degree_law,
    "cherry-law": cherry_law,
    "clustering": clustering,
    "degree-bounds": degree_bounds,
    "vertex-clustering": vertex_clustering,
}
