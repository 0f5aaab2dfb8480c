"""SVG plot emission from result rows.

Plots are derived artifacts: they can be rebuilt from the CSV alone.  Styles:

* ``ratio_vs_p``        one SVG per graph, approximation ratio against depth
* ``ratio_vs_scaled_p`` same, with depth rescaled by phase gate count
* ``delta_vs_alignment`` one aggregated SVG, ratio delta against the number
  of aligned energy levels (needs standard rows to diff against)
"""

from __future__ import annotations

import csv
import logging
from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

logger = logging.getLogger(__name__)

STYLES = ("ratio_vs_p", "ratio_vs_scaled_p", "delta_vs_alignment")


def read_rows(csv_path) -> list[dict]:
    with open(csv_path, "r", encoding="utf-8", newline="") as fh:
        return [_coerce(row) for row in csv.DictReader(fh)]


def _coerce(row: dict) -> dict:
    out = dict(row)
    for key in ("n", "m_original", "p", "phase_gate_count", "c_max"):
        out[key] = int(row[key])
    for key in ("scaled_p", "expectation", "ratio"):
        out[key] = float(row[key])
    raw_aligned = row.get("aligned_levels", "")
    out["aligned_levels"] = int(raw_aligned) if raw_aligned not in ("", None) else None
    return out


def _normalize(row: dict) -> dict:
    if isinstance(row.get("p"), str):
        return _coerce(row)
    out = dict(row)
    aligned = out.get("aligned_levels")
    out["aligned_levels"] = None if aligned in ("", None) else int(aligned)
    return out


def _series_label(variant: str, method: str, detail: str) -> str:
    label = variant
    if method:
        label += f" {method}"
    if detail:
        label += f" [{detail}]"
    return label


def _plot_ratio(rows: list[dict], x_key: str, out_dir: Path, stem: str) -> list[Path]:
    by_graph: dict[str, list[dict]] = defaultdict(list)
    for row in rows:
        by_graph[row["graph_id"]].append(row)
    paths = []
    for graph_id, graph_rows in sorted(by_graph.items()):
        series: dict[tuple, list[tuple]] = defaultdict(list)
        for row in graph_rows:
            key = (row["variant"], row["method"], row["detail"])
            series[key].append((row[x_key], row["ratio"]))
        fig, ax = plt.subplots(figsize=(6, 4))
        for key in sorted(series):
            points = sorted(series[key])
            ax.plot(
                [x for x, _ in points],
                [y for _, y in points],
                marker="o",
                label=_series_label(*key),
            )
        ax.set_xlabel("circuit depth p" if x_key == "p" else "gate-count-scaled depth")
        ax.set_ylabel("approximation ratio")
        ax.set_title(graph_id)
        ax.legend(fontsize=7)
        ax.grid(True, alpha=0.3)
        path = out_dir / f"{graph_id}_{stem}.svg"
        fig.savefig(path, format="svg")
        plt.close(fig)
        paths.append(path)
    return paths


def _plot_delta_vs_alignment(rows: list[dict], out_dir: Path) -> list[Path]:
    standard_ratio = {
        (row["graph_id"], row["p"]): row["ratio"]
        for row in rows
        if row["variant"] == "standard"
    }
    points = []
    for row in rows:
        if row["variant"] == "standard" or row["aligned_levels"] is None:
            continue
        base = standard_ratio.get((row["graph_id"], row["p"]))
        if base is None:
            continue
        points.append((row["aligned_levels"], row["ratio"] - base))
    if not points:
        logger.warning("no comparable (sparsified, standard) row pairs; nothing to plot")
        return []
    by_bucket: dict[int, list[float]] = defaultdict(list)
    for k, delta in points:
        by_bucket[k].append(delta)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.scatter([k for k, _ in points], [d for _, d in points], alpha=0.5, label="instances")
    buckets = sorted(by_bucket)
    ax.plot(
        buckets,
        [sum(by_bucket[k]) / len(by_bucket[k]) for k in buckets],
        color="crimson",
        marker="s",
        label="bucket mean",
    )
    ax.axhline(0.0, color="gray", linewidth=0.8)
    ax.set_xlabel("aligned energy levels")
    ax.set_ylabel("ratio delta (sparsified - standard)")
    ax.legend(fontsize=8)
    ax.grid(True, alpha=0.3)
    path = out_dir / "delta_vs_alignment.svg"
    fig.savefig(path, format="svg")
    plt.close(fig)
    return [path]


def emit_plots(rows: list[dict], style: str, out_dir) -> list[Path]:
    """Write SVG plots for one style; returns the created paths."""
    if style not in STYLES:
        raise ValueError(f"unknown plot style {style!r}, expected one of {STYLES}")
    if not rows:
        logger.warning("no rows to plot")
        return []
    rows = [_normalize(r) for r in rows]
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if style == "ratio_vs_p":
        return _plot_ratio(rows, "p", out_dir, "ratio_vs_p")
    if style == "ratio_vs_scaled_p":
        return _plot_ratio(rows, "scaled_p", out_dir, "ratio_vs_scaled_p")
    return _plot_delta_vs_alignment(rows, out_dir)
