"""Segmentation quality metrics: DICE, AJI, DQ/SQ/PQ, pixel error maps."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .masks import InstanceMask, relabel_instances

IOU_MATCH_THRESHOLD = 0.5  # matches require IoU strictly greater than this

# Pixel codes of an ErrorMap's label grid.
TRUE_NEGATIVE = 0
TRUE_POSITIVE = 1
FALSE_POSITIVE = 2
FALSE_NEGATIVE = 3


@dataclass(frozen=True)
class MetricsReport:
    """Metric bundle; for single pairs pq equals dq * sq by construction.

    Corpus aggregates average each metric independently, so the panoptic
    identity is a per-pair guarantee only.
    """

    dice: float
    aji: float
    dq: float
    sq: float
    pq: float
    tp: int
    fp: int
    fn: int

    def __post_init__(self):
        for name in ("dice", "aji", "dq", "sq", "pq"):
            val = getattr(self, name)
            if not 0.0 <= val <= 1.0:
                raise ValueError(f"{name}={val} outside [0, 1]")

    def as_dict(self) -> dict:
        return {
            "dice": self.dice, "aji": self.aji,
            "dq": self.dq, "sq": self.sq, "pq": self.pq,
            "tp": self.tp, "fp": self.fp, "fn": self.fn,
        }


@dataclass(frozen=True, eq=False)
class ErrorMap:
    """Per-pixel foreground/background confusion labels plus counts."""

    labels: np.ndarray  # codes TRUE_NEGATIVE..FALSE_NEGATIVE
    tp: int
    fp: int
    fn: int
    tn: int


@dataclass(frozen=True)
class CorpusReport:
    """Aggregate metrics over a corpus with per-image reports retained."""

    aggregate: MetricsReport
    per_image: Mapping[str, MetricsReport]


def _check_dims(gt: InstanceMask, pred: InstanceMask) -> None:
    if gt.data.shape != pred.data.shape:
        raise ValueError(f"mask shapes differ: {gt.data.shape} vs {pred.data.shape}")


def dice(gt: InstanceMask, pred: InstanceMask) -> float:
    """Binary foreground overlap: 2|A∩B| / (|A|+|B|); 1.0 when both empty."""
    _check_dims(gt, pred)
    fg_gt = gt.data != 0
    fg_pred = pred.data != 0
    denom = int(fg_gt.sum()) + int(fg_pred.sum())
    if denom == 0:
        return 1.0
    return 2.0 * int((fg_gt & fg_pred).sum()) / denom


def _overlap_table(gt: InstanceMask, pred: InstanceMask):
    """Areas per instance and intersection counts per overlapping (gt, pred) pair."""
    g = gt.data
    p = pred.data
    gt_ids, gt_counts = np.unique(g[g != 0], return_counts=True)
    pred_ids, pred_counts = np.unique(p[p != 0], return_counts=True)
    gt_areas = dict(zip(gt_ids.tolist(), gt_counts.tolist()))
    pred_areas = dict(zip(pred_ids.tolist(), pred_counts.tolist()))

    both = (g != 0) & (p != 0)
    inter: dict[tuple[int, int], int] = {}
    if both.any():
        packed = g[both].astype(np.uint64) << np.uint64(32) | p[both].astype(np.uint64)
        keys, counts = np.unique(packed, return_counts=True)
        for key, count in zip(keys, counts):
            pair = (int(key >> np.uint64(32)), int(key & np.uint64(0xFFFFFFFF)))
            inter[pair] = int(count)
    return gt_areas, pred_areas, inter


def aji(gt: InstanceMask, pred: InstanceMask) -> float:
    """Aggregated Jaccard Index with greedy per-ground-truth matching.

    Both masks are first relabeled to raster order, making the result
    invariant under instance-id renumbering; the greedy pass then walks
    ground-truth instances in ascending (canonical) id, each taking the
    still-unused prediction of maximal IoU (ties to the lower pred id).
    Predictions that overlap nothing are never consumed; they count as
    unmatched and their pixels inflate the union. 1.0 when both masks are
    empty.
    """
    _check_dims(gt, pred)
    gt = relabel_instances(gt)
    pred = relabel_instances(pred)
    gt_areas, pred_areas, inter = _overlap_table(gt, pred)
    if not gt_areas and not pred_areas:
        return 1.0

    candidates: dict[int, list[int]] = {}
    for (gi, pj) in inter:
        candidates.setdefault(gi, []).append(pj)

    used: set[int] = set()
    inter_sum = 0
    union_sum = 0
    for gi in sorted(gt_areas):
        best_pj = None
        best_iou = 0.0
        for pj in sorted(candidates.get(gi, ())):
            if pj in used:
                continue
            i = inter[(gi, pj)]
            u = gt_areas[gi] + pred_areas[pj] - i
            iou = i / u
            if iou > best_iou:
                best_iou = iou
                best_pj = pj
        if best_pj is None:
            union_sum += gt_areas[gi]
        else:
            used.add(best_pj)
            i = inter[(gi, best_pj)]
            inter_sum += i
            union_sum += gt_areas[gi] + pred_areas[best_pj] - i
    union_sum += sum(area for pj, area in pred_areas.items() if pj not in used)
    return inter_sum / union_sum if union_sum else 1.0


def panoptic(gt: InstanceMask, pred: InstanceMask) -> tuple[float, float, float, int, int, int]:
    """Detection/segmentation/panoptic quality with IoU > 0.5 matching.

    Matches above 0.5 IoU are provably one-to-one, so the greedy pairing is
    the optimal one. Returns (dq, sq, pq, tp, fp, fn); when nothing exists on
    either side all three qualities are 1.0 by convention, and 0.0 when there
    are instances but no match.
    """
    _check_dims(gt, pred)
    gt_areas, pred_areas, inter = _overlap_table(gt, pred)
    ious = []
    matched_gt: set[int] = set()
    matched_pred: set[int] = set()
    for (gi, pj), i in sorted(inter.items()):
        u = gt_areas[gi] + pred_areas[pj] - i
        iou = i / u
        if iou > IOU_MATCH_THRESHOLD:
            matched_gt.add(gi)
            matched_pred.add(pj)
            ious.append(iou)
    tp = len(ious)
    fp = len(pred_areas) - len(matched_pred)
    fn = len(gt_areas) - len(matched_gt)
    if tp == 0:
        if fp == 0 and fn == 0:
            return 1.0, 1.0, 1.0, 0, 0, 0
        return 0.0, 0.0, 0.0, 0, fp, fn
    dq = tp / (tp + 0.5 * fp + 0.5 * fn)
    sq = float(np.mean(ious))
    return dq, sq, dq * sq, tp, fp, fn


def error_map(gt: InstanceMask, pred: InstanceMask) -> ErrorMap:
    """Foreground-vs-background confusion label for every pixel."""
    _check_dims(gt, pred)
    fg_gt = gt.data != 0
    fg_pred = pred.data != 0
    labels = np.zeros(gt.data.shape, dtype=np.uint8)
    labels[fg_gt & fg_pred] = TRUE_POSITIVE
    labels[~fg_gt & fg_pred] = FALSE_POSITIVE
    labels[fg_gt & ~fg_pred] = FALSE_NEGATIVE
    labels.flags.writeable = False
    return ErrorMap(
        labels=labels,
        tp=int((fg_gt & fg_pred).sum()),
        fp=int((~fg_gt & fg_pred).sum()),
        fn=int((fg_gt & ~fg_pred).sum()),
        tn=int((~fg_gt & ~fg_pred).sum()),
    )


def evaluate_pair(gt: InstanceMask, pred: InstanceMask) -> MetricsReport:
    """Full metric bundle for one ground-truth/prediction pair."""
    dq, sq, pq, tp, fp, fn = panoptic(gt, pred)
    return MetricsReport(
        dice=dice(gt, pred), aji=aji(gt, pred),
        dq=dq, sq=sq, pq=pq, tp=tp, fp=fp, fn=fn,
    )


def aggregate_reports(per_image: Mapping[str, MetricsReport]) -> CorpusReport:
    """Fold per-image reports: metrics by unweighted mean, counts by sum."""
    if not per_image:
        raise ValueError("corpus is empty")
    reports = list(per_image.values())

    def mean(attr: str) -> float:
        return float(np.mean([getattr(r, attr) for r in reports]))

    aggregate = MetricsReport(
        dice=mean("dice"), aji=mean("aji"),
        dq=mean("dq"), sq=mean("sq"), pq=mean("pq"),
        tp=sum(r.tp for r in reports),
        fp=sum(r.fp for r in reports),
        fn=sum(r.fn for r in reports),
    )
    return CorpusReport(aggregate=aggregate, per_image=dict(per_image))


def evaluate_corpus(pairs: Iterable[tuple[str, InstanceMask, InstanceMask]]) -> CorpusReport:
    """Evaluate named pairs and aggregate; per-image reports are retained."""
    per_image = {name: evaluate_pair(gt, pred) for name, gt, pred in pairs}
    return aggregate_reports(per_image)
