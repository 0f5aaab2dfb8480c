"""Energy-level alignment between an original graph and a sparsified one.

Assignments are sorted by decreasing cut value for each graph separately;
level k of the two graphs is aligned when one graph's level-k set contains
the other's.  The alignment count is the longest all-aligned prefix, so a
count of at least one means the optimal solutions line up.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from .exceptions import CapabilityError
from .graphs import Graph, cut_table, SPECTRUM_MAX_VERTICES

CONTAIN_NONE = "none"
CONTAIN_LEFT = "left_in_right"
CONTAIN_RIGHT = "right_in_left"
CONTAIN_EQUAL = "equal"


@dataclass(frozen=True)
class LevelDetail:
    k: int  # 1-based level index
    size_left: int
    size_right: int
    containment: str


@dataclass(frozen=True)
class AlignmentReport:
    aligned_levels: int
    ground_state_aligned: bool
    details: tuple[LevelDetail, ...]


def aligned_levels(g: Graph, g_sparse: Graph, contiguous: bool = True) -> AlignmentReport:
    """Count aligned energy levels of the two cut spectra.

    With ``contiguous`` (the default) the count is the largest k such that
    levels 1..k are all aligned; with ``contiguous=False`` it is the largest
    aligned k regardless of gaps.
    """
    if g.num_vertices != g_sparse.num_vertices:
        raise ValueError("graphs must share the vertex set")
    if g.num_vertices > SPECTRUM_MAX_VERTICES:
        raise CapabilityError(
            f"alignment limited to {SPECTRUM_MAX_VERTICES} vertices, got {g.num_vertices}"
        )
    table_l = cut_table(g)
    table_r = cut_table(g_sparse)
    values_l = np.unique(table_l)[::-1]
    values_r = np.unique(table_r)[::-1]
    depth = min(len(values_l), len(values_r))

    details = []
    aligned_flags = []
    for k in range(depth):
        mask_l = table_l == values_l[k]
        mask_r = table_r == values_r[k]
        left_in_right = not bool(np.any(mask_l & ~mask_r))
        right_in_left = not bool(np.any(mask_r & ~mask_l))
        if left_in_right and right_in_left:
            containment = CONTAIN_EQUAL
        elif left_in_right:
            containment = CONTAIN_LEFT
        elif right_in_left:
            containment = CONTAIN_RIGHT
        else:
            containment = CONTAIN_NONE
        aligned_flags.append(containment != CONTAIN_NONE)
        details.append(
            LevelDetail(k + 1, int(mask_l.sum()), int(mask_r.sum()), containment)
        )

    if contiguous:
        count = 0
        for flag in aligned_flags:
            if not flag:
                break
            count += 1
    else:
        count = max((i + 1 for i, flag in enumerate(aligned_flags) if flag), default=0)
    return AlignmentReport(
        aligned_levels=count,
        ground_state_aligned=bool(aligned_flags and aligned_flags[0]),
        details=tuple(details),
    )


@dataclass(frozen=True)
class StudyRow:
    aligned_levels: int
    ratio_delta: float


@dataclass(frozen=True)
class BucketSummary:
    aligned_levels: int
    count: int
    mean_delta: float


@dataclass(frozen=True)
class StudyResult:
    rows: tuple[StudyRow, ...]
    buckets: tuple[BucketSummary, ...]


def alignment_ratio_study(instances) -> StudyResult:
    """Pair alignment counts with approximation-ratio deltas.

    ``instances`` holds (graph, sparsified_graph, ratio_sparse,
    ratio_standard) tuples; the delta is sparse minus standard, positive when
    the sparsified phase operator did better.
    """
    rows = []
    by_bucket: dict[int, list[float]] = defaultdict(list)
    for g, g_sparse, ratio_sparse, ratio_standard in instances:
        for name, ratio in (("ratio_sparse", ratio_sparse), ("ratio_standard", ratio_standard)):
            if not -1e-9 <= ratio <= 1.0 + 1e-9:
                raise ValueError(f"{name}={ratio} outside [0, 1]")
        count = aligned_levels(g, g_sparse).aligned_levels
        delta = ratio_sparse - ratio_standard
        rows.append(StudyRow(count, delta))
        by_bucket[count].append(delta)
    buckets = tuple(
        BucketSummary(k, len(deltas), float(np.mean(deltas)))
        for k, deltas in sorted(by_bucket.items())
    )
    return StudyResult(tuple(rows), buckets)
