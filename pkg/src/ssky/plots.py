"""Figure rendering for sweep reports.

One PNG per (swept axis, metric): mean metric value against the swept
parameter, one line per algorithm, mirroring the response-time / I/O /
dominance-test triptychs the報 report CSV carries.
"""

from __future__ import annotations

import os
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .bench import Report

FIGURE_METRICS = (
    ("response_time_s", "Response time [s]"),
    ("io_reads", "I/O [cell + index node reads]"),
    ("dominance_tests", "Dominance tests"),
)

_AXIS_LABEL = {
    "cardinality": "Dataset cardinality |P|",
    "query_size": "Query size |Q|",
    "sigma": "Query point std dev",
}

_STYLE = {
    "es": dict(marker="o", color="tab:blue"),
    "vs2": dict(marker="s", color="tab:orange"),
    "alg1": dict(marker="^", color="tab:green"),
    "oracle": dict(marker="x", color="tab:gray"),
}


def _axis_value(row):
    return {"cardinality": row.cardinality,
            "query_size": row.query_size,
            "sigma": row.sigma}[row.axis]


def render_sweep_figures(report: Report, out_dir, stem: str = "sweep") -> list[str]:
    """Write the metric figures next to the delimited output; returns paths."""
    os.makedirs(out_dir, exist_ok=True)
    by_axis: dict[str, list] = defaultdict(list)
    for row in report.rows:
        if row.algorithm != "all":
            by_axis[row.axis].append(row)

    written: list[str] = []
    for axis, rows in by_axis.items():
        for stat, ylabel in FIGURE_METRICS:
            series: dict[str, dict[float, float]] = defaultdict(dict)
            for row in rows:
                if row.statistic == stat:
                    series[row.algorithm][_axis_value(row)] = row.mean
            if not series:
                continue
            fig, ax = plt.subplots(figsize=(4.8, 3.4))
            for algo in sorted(series):
                pts = sorted(series[algo].items())
                ax.plot([x for x, _ in pts], [y for _, y in pts],
                        label=algo, **_STYLE.get(algo, {}))
            ax.set_xlabel(_AXIS_LABEL.get(axis, axis))
            ax.set_ylabel(ylabel)
            if stat != "response_time_s" and max(
                    max(s.values()) for s in series.values()) > 0:
                ax.set_yscale("log")
            ax.legend()
            ax.grid(True, alpha=0.3)
            fig.tight_layout()
            path = os.path.join(out_dir, f"{stem}_{axis}_{stat}.png")
            fig.savefig(path, dpi=150)
            plt.close(fig)
            written.append(path)
    return written
