"""Monte Carlo convergence studies against the closed-form limits.

For each node count on a grid, sample replicated graphs, measure the
empirical statistics, and compare them with the limiting values.  Every
cell draws its seed from (master seed, grid index, replication index), so
a study is a pure function of its spec.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DegenerateMarginal, InsufficientSupport
from .generate import GenConfig, generate_graph
from .layers import LayerTypeDistribution, cross_moment
from .limits import (
    LimitParams,
    limiting_assortativity,
    limiting_bidegree_pmf,
    limiting_degree_pmf,
    limiting_rank_correlations,
    tail_prediction,
)
from .stats import (
    Pmf1D,
    Pmf2D,
    bidegree_distribution,
    degree_distribution,
    kendall,
    pearson_correlation,
    size_biased,
    spearman,
)

ALL_METRICS = (
    "tv1", "tv2", "assortativity", "kendall", "spearman",
    "tail_slope", "subgraph_counts",
)

_MIN_TAIL_OBS = 50
_DEFAULT_T_LO = 10


def tv_distance_1d(f: Pmf1D, g: Pmf1D) -> float:
    """Half L1 distance; each law's mass defect counts as mass the other
    lacks."""
    width = max(len(f.probs), len(g.probs))
    a = np.zeros(width)
    b = np.zeros(width)
    a[: len(f.probs)] = f.probs
    b[: len(g.probs)] = g.probs
    return 0.5 * (float(np.abs(a - b).sum()) + f.mass_defect + g.mass_defect)


def tv_distance_2d(f: Pmf2D, g: Pmf2D) -> float:
    rows = max(f.probs.shape[0], g.probs.shape[0])
    cols = max(f.probs.shape[1], g.probs.shape[1])
    a = np.zeros((rows, cols))
    b = np.zeros((rows, cols))
    a[: f.probs.shape[0], : f.probs.shape[1]] = f.probs
    b[: g.probs.shape[0], : g.probs.shape[1]] = g.probs
    return 0.5 * (float(np.abs(a - b).sum()) + f.mass_defect + g.mass_defect)


def tail_slope_fit(f: Pmf1D, fit_range) -> tuple[float, float]:
    """Least-squares slope magnitude of log pmf against log support.

    Needs at least 5 positive-mass points inside the range.
    """
    t_lo, t_hi = fit_range
    support = np.arange(len(f.probs))
    mask = (support >= t_lo) & (support <= t_hi) & (f.probs > 0)
    if mask.sum() < 5:
        raise InsufficientSupport(
            f"only {int(mask.sum())} positive-mass points in [{t_lo}, {t_hi}]"
        )
    x = np.log(support[mask].astype(float))
    y = np.log(f.probs[mask])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    dof = len(x) - 2
    sxx = float(np.sum((x - x.mean()) ** 2))
    stderr = math.sqrt(float(resid @ resid) / dof / sxx) if dof > 0 else float("inf")
    return abs(float(slope)), stderr


@dataclass(frozen=True)
class StudySpec:
    dist: LayerTypeDistribution
    mu: float
    n_grid: tuple
    replications: int
    seed: int
    metrics: tuple = ALL_METRICS[:5]
    tail_epsilon: float = 1e-10
    fit_range: Optional[tuple] = None
    threads: int = 1

    def __post_init__(self):
        if list(self.n_grid) != sorted(self.n_grid):
            raise ValueError("n_grid must be sorted ascending")
        if self.replications < 1:
            raise ValueError("need at least one replication")
        unknown = set(self.metrics) - set(ALL_METRICS)
        if unknown:
            raise ValueError(f"unknown metrics: {sorted(unknown)}")

    def content_hash(self) -> str:
        payload = {
            "dist": {
                "family": self.dist.family,
                "sizes": self.dist.sizes.tolist(),
                "strengths": self.dist.strengths.tolist(),
                "probs": self.dist.probs.tolist(),
            },
            "mu": self.mu,
            "n_grid": list(self.n_grid),
            "replications": self.replications,
            "seed": self.seed,
            "metrics": list(self.metrics),
            "tail_epsilon": self.tail_epsilon,
            "fit_range": list(self.fit_range) if self.fit_range else None,
        }
        blob = json.dumps(payload, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:12]


@dataclass
class ConvergenceReport:
    """Per-cell metric values, per-n aggregates, and the theory row.

    The empirical bidegree pmf is pooled over all edges and replications
    before correlation metrics are applied; by node exchangeability this
    targets the same limit as conditioning on a fixed adjacent pair.
    """

    spec_hash: str
    rows: list = field(default_factory=list)           # dicts: n, replication, metric, value, note
    summary: dict = field(default_factory=dict)        # per-n aggregates
    theory: dict = field(default_factory=dict)

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("n,replication,metric,value,note\n")
            for row in self.rows:
                val = "" if row["value"] is None else repr(row["value"])
                fh.write(f"{row['n']},{row['replication']},{row['metric']},{val},{row.get('note', '')}\n")

    def to_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(
                {"spec_hash": self.spec_hash, "summary": self.summary, "theory": self.theory},
                fh, indent=2, default=float,
            )


def _cell_seed(master: int, n_index: int, rep: int) -> int:
    ss = np.random.SeedSequence(entropy=master, spawn_key=(n_index, rep))
    return int(ss.generate_state(1, np.uint64)[0])


def _pool_matrices(mats):
    rows = max(m.shape[0] for m in mats)
    cols = max(m.shape[1] for m in mats)
    out = np.zeros((rows, cols))
    for m in mats:
        out[: m.shape[0], : m.shape[1]] += m
    return out


def _theory_values(spec: StudySpec):
    params = LimitParams(spec.mu, spec.dist, spec.tail_epsilon)
    theory = {}
    need_bideg = {"tv2", "kendall", "spearman"} & set(spec.metrics)
    if "tv1" in spec.metrics or need_bideg:
        theory["_f1"] = limiting_degree_pmf(params)
    if need_bideg:
        theory["_f2"] = limiting_bidegree_pmf(params)
        theory["bidegree_mass_defect"] = theory["_f2"].mass_defect
    if {"kendall", "spearman"} & set(spec.metrics):
        rc = limiting_rank_correlations(params)
        theory["kendall"] = rc.kendall
        theory["spearman"] = rc.spearman
    if "assortativity" in spec.metrics:
        theory["assortativity"] = limiting_assortativity(params)
    if "tail_slope" in spec.metrics and spec.dist.family == "power_law":
        p = spec.dist.params
        tp = tail_prediction(p["alpha"], p["beta"], p["b"], spec.mu, spec.dist)
        theory["tail_slope"] = tp.marginal_exponent
        theory["c_prime"] = tp.c_prime
        theory["c_double_prime"] = tp.c_double_prime
    if "subgraph_counts" in spec.metrics:
        theory["links"] = cross_moment(spec.dist, 2, 1) / 2
        theory["two_stars"] = cross_moment(spec.dist, 3, 2) / 2
        theory["three_stars"] = cross_moment(spec.dist, 4, 3) / 6
    return theory


def _default_fit_range(pooled_degree_counts: np.ndarray):
    heavy = np.nonzero(pooled_degree_counts >= _MIN_TAIL_OBS)[0]
    t_hi = int(heavy.max()) if len(heavy) else 0
    return (_DEFAULT_T_LO, t_hi)


def run_study(spec: StudySpec) -> ConvergenceReport:
    theory = _theory_values(spec)
    report = ConvergenceReport(spec_hash=spec.content_hash())
    report.theory = {k: v for k, v in theory.items() if not k.startswith("_")}

    keep_records = "subgraph_counts" in spec.metrics
    need_bideg = {"tv2", "assortativity", "kendall", "spearman"} & set(spec.metrics)

    for ni, n in enumerate(spec.n_grid):
        per_metric: dict[str, list] = {}
        bideg_counts = []
        bideg_edges = 0
        degree_counts = np.zeros(1)

        def note(metric, rep, value, msg=""):
            report.rows.append(
                {"n": n, "replication": rep, "metric": metric, "value": value, "note": msg}
            )
            if value is not None:
                per_metric.setdefault(metric, []).append(value)

        for rep in range(spec.replications):
            cfg = GenConfig(
                n=n, mu=spec.mu, seed=_cell_seed(spec.seed, ni, rep),
                keep_layer_records=keep_records,
            )
            g = generate_graph(cfg, spec.dist, threads=spec.threads)
            f_deg = degree_distribution(g)
            counts = f_deg.probs * n
            pooled = np.zeros(max(len(degree_counts), len(counts)))
            pooled[: len(degree_counts)] += degree_counts
            pooled[: len(counts)] += counts
            degree_counts = pooled

            if "tv1" in spec.metrics:
                note("tv1", rep, tv_distance_1d(f_deg, theory["_f1"]))

            if need_bideg:
                if g.edge_count == 0:
                    for metric in need_bideg:
                        note(metric, rep, None, "degenerate: no edges")
                else:
                    f2 = bidegree_distribution(g)
                    bideg_counts.append(f2.probs * (2.0 * g.edge_count))
                    bideg_edges += g.edge_count
                    if "tv2" in spec.metrics:
                        note("tv2", rep, tv_distance_2d(f2, theory["_f2"]))
                    for metric, fn in (
                        ("assortativity", pearson_correlation),
                        ("kendall", kendall),
                        ("spearman", spearman),
                    ):
                        if metric in spec.metrics:
                            try:
                                note(metric, rep, fn(f2))
                            except DegenerateMarginal as exc:
                                note(metric, rep, None, f"degenerate: {exc}")

            if "tail_slope" in spec.metrics:
                fit_range = spec.fit_range or _default_fit_range(f_deg.probs * n)
                try:
                    slope, _ = tail_slope_fit(size_biased(f_deg), fit_range)
                    note("tail_slope", rep, slope)
                except InsufficientSupport as exc:
                    note("tail_slope", rep, None, f"degenerate: {exc}")

            if "subgraph_counts" in spec.metrics:
                from .stats import layer_subgraph_counts

                sc = layer_subgraph_counts(g.layer_records)
                note("links", rep, sc.links)
                note("two_stars", rep, sc.two_stars)
                note("three_stars", rep, sc.three_stars)

        agg = {}
        for metric, values in per_metric.items():
            arr = np.asarray(values, dtype=float)
            entry = {"mean": float(arr.mean()), "count": len(arr)}
            if len(arr) >= 2:
                entry["se"] = float(arr.std(ddof=1) / math.sqrt(len(arr)))
            else:
                entry["se"] = None
                entry["single_shot"] = True
            agg[metric] = entry

        # pooled-bidegree statistics across replications
        if bideg_counts:
            pooled2 = Pmf2D(_pool_matrices(bideg_counts) / (2.0 * bideg_edges))
            if "tv2" in spec.metrics:
                agg["tv2_pooled"] = tv_distance_2d(pooled2, theory["_f2"])
            for metric, fn in (
                ("assortativity", pearson_correlation),
                ("kendall", kendall),
                ("spearman", spearman),
            ):
                if metric in spec.metrics:
                    try:
                        agg[f"{metric}_pooled"] = fn(pooled2)
                    except DegenerateMarginal:
                        agg[f"{metric}_pooled"] = None
        if "tail_slope" in spec.metrics:
            fit_range = spec.fit_range or _default_fit_range(degree_counts)
            try:
                pooled1 = Pmf1D(degree_counts / degree_counts.sum())
                slope, stderr = tail_slope_fit(size_biased(pooled1), fit_range)
                agg["tail_slope_pooled"] = slope
                agg["tail_slope_pooled_stderr"] = stderr
                agg["fit_range"] = list(fit_range)
            except InsufficientSupport:
                agg["tail_slope_pooled"] = None

        report.summary[str(n)] = agg

    return report
