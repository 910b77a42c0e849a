"""Workload generation and the experiment driver.

Synthetic datasets are uniform points in the unit square; queries are
normally distributed around a center point.  ``run_experiment`` sweeps one
workload parameter at a time over its settings (the other two pinned at
their defaults), runs every requested algorithm on identical inputs, checks
that they all return the same skyline set, and aggregates the per-query
counters into a report.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .geom import Rect
from .index import build_index
from .skyline import (
    Metrics,
    QueryContext,
    brute_force_skyline,
    enhanced_spatial_skyline,
    spatial_skyline,
    vs2_skyline,
)
from .voronoi import VoronoiDiagram, build_voronoi

ALGORITHMS = ("es", "vs2", "alg1", "oracle")

# workload settings from the synthetic-experiment design; defaults underlined
CARDINALITIES = (50_000, 100_000, 200_000, 500_000, 1_000_000)
QUERY_SIZES = (5, 10, 15, 20, 40)
SIGMAS = (0.01, 0.02, 0.04, 0.06, 0.08)
DEFAULT_CARDINALITY = 500_000
DEFAULT_QUERY_SIZE = 15
DEFAULT_SIGMA = 0.06

STATISTICS = ("response_time_s", "dominance_tests", "cell_reads",
              "index_node_reads", "io_reads", "skyline_size", "seed_count")


class ConsistencyError(RuntimeError):
    """Two algorithms returned different skyline sets for the same query."""


@dataclass(frozen=True)
class ExperimentConfig:
    cardinalities: tuple[int, ...] = CARDINALITIES
    query_sizes: tuple[int, ...] = QUERY_SIZES
    sigmas: tuple[float, ...] = SIGMAS
    default_cardinality: int = DEFAULT_CARDINALITY
    default_query_size: int = DEFAULT_QUERY_SIZE
    default_sigma: float = DEFAULT_SIGMA
    queries_per_setting: int = 100
    seed: int = 0
    algorithms: tuple[str, ...] = ("es", "vs2")
    axis: str = "all"  # cardinality | query_size | sigma | all
    scale: float = 1.0  # desk-scale factor applied to cardinalities
    fanout: int = 32
    poi_path: str | None = None

    def __post_init__(self):
        for algo in self.algorithms:
            if algo not in ALGORITHMS:
                raise ValueError(f"unknown algorithm {algo!r}; choose from {ALGORITHMS}")
        if self.axis not in ("cardinality", "query_size", "sigma", "all"):
            raise ValueError(f"unknown sweep axis {self.axis!r}")

    def scaled(self, n: int) -> int:
        return max(1, int(round(n * self.scale)))


@dataclass(frozen=True)
class SweepPoint:
    axis: str
    cardinality: int
    query_size: int
    sigma: float


@dataclass
class QueryRecord:
    point: SweepPoint
    query_index: int
    seed: int
    algorithm: str
    skyline_size: int
    seed_count: int
    metrics: Metrics

    def statistic(self, name: str) -> float:
        if name == "response_time_s":
            return self.metrics.wall_time
        if name == "io_reads":
            return self.metrics.cell_reads + self.metrics.index_node_reads
        if name == "skyline_size":
            return float(self.skyline_size)
        if name == "seed_count":
            return float(self.seed_count)
        return float(getattr(self.metrics, name))


@dataclass
class ReportRow:
    axis: str
    cardinality: int
    query_size: int
    sigma: float
    algorithm: str
    statistic: str
    mean: float
    median: float


@dataclass
class Report:
    rows: list[ReportRow] = field(default_factory=list)
    query_records: list[QueryRecord] = field(default_factory=list)
    failures: list[str] = field(default_factory=list)

    CSV_HEADER = "axis,cardinality,query_size,sigma,algorithm,statistic,mean,median"

    def to_csv(self) -> str:
        lines = [self.CSV_HEADER]
        for r in self.rows:
            lines.append(f"{r.axis},{r.cardinality},{r.query_size},{r.sigma!r},"
                         f"{r.algorithm},{r.statistic},{r.mean!r},{r.median!r}")
        return "\n".join(lines) + "\n"

    def summary(self) -> str:
        cols = ("axis", "|P|", "|Q|", "sigma", "algo", "statistic", "mean", "median")
        table = [cols]
        for r in self.rows:
            table.append((r.axis, str(r.cardinality), str(r.query_size),
                          f"{r.sigma:g}", r.algorithm, r.statistic,
                          f"{r.mean:.6g}", f"{r.median:.6g}"))
        widths = [max(len(row[i]) for row in table) for i in range(len(cols))]
        out = []
        for k, row in enumerate(table):
            out.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)))
            if k == 0:
                out.append("  ".join("-" * w for w in widths))
        return "\n".join(out) + "\n"


def gen_uniform(n: int, seed: int) -> np.ndarray:
    """n uniform points in the unit square, deterministic per seed."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    return rng.random((n, 2))


def gen_query(center, sigma: float, k: int, seed: int,
              clip_box: Rect | None = None) -> np.ndarray:
    """k query points with coordinates normal(center, sigma), clamped to the
    clip box when one is given."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    rng = np.random.default_rng(seed)
    pts = rng.normal(loc=[float(center[0]), float(center[1])],
                     scale=sigma, size=(k, 2))
    if clip_box is not None:
        pts[:, 0] = np.clip(pts[:, 0], clip_box.xmin, clip_box.xmax)
        pts[:, 1] = np.clip(pts[:, 1], clip_box.ymin, clip_box.ymax)
    return pts


def load_poi(path) -> tuple[np.ndarray, list[str]]:
    """Parse a points-of-interest file and normalize it to the unit square.

    Rows are whitespace- or comma-separated.  The coordinates are the row's
    first two numeric tokens, except that when a row leads with an
    integer-valued token and carries three or more numeric tokens, the
    leading token is treated as an id/category column and skipped.  Rows
    without two numeric tokens are skipped and reported with line numbers.
    """
    points: list[tuple[float, float]] = []
    warnings: list[str] = []
    with open(path, "r", encoding="utf-8", errors="replace") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            tokens = line.replace(",", " ").split()
            numeric = []
            for tok in tokens:
                try:
                    numeric.append(float(tok))
                except ValueError:
                    continue
            if len(numeric) < 2:
                warnings.append(f"line {lineno}: no coordinate pair in {raw.strip()!r}")
                continue
            if len(numeric) >= 3 and float(numeric[0]).is_integer():
                x, y = numeric[1], numeric[2]
            else:
                x, y = numeric[0], numeric[1]
            if not (math.isfinite(x) and math.isfinite(y)):
                warnings.append(f"line {lineno}: non-finite coordinates")
                continue
            points.append((x, y))
    if not points:
        raise ValueError(f"{path}: no valid coordinate rows")
    pts = np.asarray(points, dtype=float)
    lo = pts.min(axis=0)
    span = pts.max(axis=0) - lo
    span[span == 0] = 1.0
    return (pts - lo) / span, warnings


@dataclass
class Structures:
    """Everything a query run needs for one dataset."""

    points: np.ndarray
    diagram: VoronoiDiagram
    cell_index: object
    point_index: object

    @classmethod
    def build(cls, points: np.ndarray, fanout: int = 32) -> "Structures":
        diagram = build_voronoi(points)
        cell_index = build_index(
            [(r, i) for i, r in enumerate(diagram.cell_mbrs())], fanout)
        point_index = build_index(
            [(Rect(x, y, x, y), i) for i, (x, y) in enumerate(points)], fanout)
        return cls(points, diagram, cell_index, point_index)


def run_algorithm(algo: str, structures: Structures, ctx: QueryContext,
                  query_points: np.ndarray, vs2_two_hop_prune: bool = False):
    """Run one algorithm; returns (skyline ids, seed ids, metrics)."""
    P = structures.points
    if algo == "es":
        res = enhanced_spatial_skyline(
            P, structures.diagram, ctx,
            cell_index=structures.cell_index, point_index=structures.point_index)
        return res.skyline_ids, res.seed_ids, res.metrics
    if algo == "vs2":
        res = vs2_skyline(P, structures.diagram, ctx, index=structures.cell_index,
                          two_hop_prune=vs2_two_hop_prune)
        return res.skyline_ids, res.seed_ids, res.metrics
    if algo == "alg1":
        res = spatial_skyline(P, ctx)
        return res.skyline_ids, res.seed_ids, res.metrics
    if algo == "oracle":
        metrics = Metrics()
        t0 = time.perf_counter()
        ids = brute_force_skyline(P, query_points)
        metrics.wall_time = time.perf_counter() - t0
        n = len(P)
        metrics.dominance_tests = n * (n - 1)
        return ids, set(), metrics
    raise ValueError(f"unknown algorithm {algo!r}")


def sweep_points(config: ExperimentConfig, poi_size: int | None = None) -> list[SweepPoint]:
    axes = ([config.axis] if config.axis != "all"
            else ["cardinality", "query_size", "sigma"])
    if poi_size is not None and "cardinality" in axes:
        axes = [a for a in axes if a != "cardinality"] or ["query_size"]
    default_n = poi_size if poi_size is not None else config.scaled(config.default_cardinality)
    points = []
    for axis in axes:
        if axis == "cardinality":
            for n in config.cardinalities:
                points.append(SweepPoint(axis, config.scaled(n),
                                         config.default_query_size, config.default_sigma))
        elif axis == "query_size":
            for k in config.query_sizes:
                points.append(SweepPoint(axis, default_n, k, config.default_sigma))
        else:
            for s in config.sigmas:
                points.append(SweepPoint(axis, default_n, config.default_query_size, s))
    return points


def _query_seed(config: ExperimentConfig, point_idx: int, query_idx: int,
                attempt: int) -> int:
    ss = np.random.SeedSequence([config.seed, point_idx, query_idx, attempt])
    return int(ss.generate_state(1)[0])


def run_experiment(config: ExperimentConfig, progress=None) -> Report:
    """Execute the sweep and aggregate metrics.

    Every query runs all requested algorithms on identical inputs; if any
    two disagree on the skyline set, a ConsistencyError is raised naming the
    query seed.  A query whose hull would leave the diagram's clip box is
    regenerated with a fresh seed increment and the regeneration is counted.
    """
    report = Report()
    poi = None
    if config.poi_path is not None:
        poi, _warnings = load_poi(config.poi_path)
    points = sweep_points(config, None if poi is None else len(poi))

    structures_cache: dict[int, Structures] = {}

    def structures_for(n: int) -> Structures:
        if n not in structures_cache:
            if len(structures_cache) > 1:  # keep the default-size dataset around
                structures_cache.pop(max(structures_cache,
                                         key=lambda k: abs(k - config.scaled(config.default_cardinality))))
            data = poi[:n] if poi is not None else gen_uniform(n, config.seed)
            structures_cache[n] = Structures.build(data, config.fanout)
        return structures_cache[n]

    for p_idx, point in enumerate(points):
        structures = structures_for(point.cardinality)
        box = structures.diagram.clip_box
        records: list[QueryRecord] = []
        regenerated = 0
        for q_idx in range(config.queries_per_setting):
            attempt = 0
            while True:
                seed = _query_seed(config, p_idx, q_idx, attempt)
                rng = np.random.default_rng(seed)
                if poi is not None:
                    center = structures.points[int(rng.integers(len(structures.points)))]
                else:
                    center = rng.random(2)
                Q = gen_query(center, point.sigma, point.query_size, seed, box)
                ctx = QueryContext.from_query_points(Q)
                if all(box.contains_point(v.x, v.y) for v in ctx.hull.vertices):
                    break
                attempt += 1
                regenerated += 1
                if attempt > 100:
                    raise RuntimeError(f"query regeneration loop at {point}")
            results = {}
            for algo in config.algorithms:
                ids, seed_ids, metrics = run_algorithm(algo, structures, ctx, Q)
                results[algo] = ids
                records.append(QueryRecord(point, q_idx, seed, algo,
                                           len(ids), len(seed_ids), metrics))
            sets = {algo: frozenset(ids) for algo, ids in results.items()}
            if len(set(sets.values())) > 1:
                sizes = {a: len(s) for a, s in sets.items()}
                report.failures.append(
                    f"{point}: query {q_idx} (seed {seed}) disagreement {sizes}")
                raise ConsistencyError(
                    f"skyline sets disagree at {point}, query {q_idx}, seed {seed}: {sizes}")
            if progress is not None:
                progress(point, q_idx)

        for algo in config.algorithms:
            algo_records = [r for r in records if r.algorithm == algo]
            for stat in STATISTICS:
                vals = np.asarray([r.statistic(stat) for r in algo_records])
                report.rows.append(ReportRow(
                    point.axis, point.cardinality, point.query_size, point.sigma,
                    algo, stat, float(vals.mean()), float(np.median(vals))))
        report.rows.append(ReportRow(
            point.axis, point.cardinality, point.query_size, point.sigma,
            "all", "regenerated_queries", float(regenerated), float(regenerated)))
        report.query_records.extend(records)

    return report
