"""Training-loss formulas as pure functions over probability maps.

No autodiff and no network layers live here; probability maps and feature
grids arrive precomputed and only the loss values come out.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

import numpy as np

from .graph import CellGraph
from .masks import FourColorMask, InstanceMask

SOFT_DICE_EPS = 1e-6
_LOG_FLOOR = 1e-12  # keeps cross-entropy finite on confidently wrong pixels
_TWO_CHANNEL_TOL = 1e-6


class EmptyForegroundWarning(UserWarning):
    """Classification loss was requested on an image without foreground."""


@dataclass(frozen=True, eq=False)
class PredictionMaps:
    """Per-pixel class probabilities: channel 0 background, 1..4 colors.

    The derived foreground probability is the sum of the four color
    channels, and background + foreground must equal 1 per pixel (within
    1e-6) for the two-channel view consumed by the semantic loss.
    """

    data: np.ndarray  # (H, W, 5) float

    def __post_init__(self):
        data = np.ascontiguousarray(self.data, dtype=np.float64)
        if data.ndim != 3 or data.shape[2] != 5:
            raise ValueError(f"prediction maps must have shape (H, W, 5), got {data.shape}")
        _check_probabilities(data)
        twosum = data[..., 0] + data[..., 1:].sum(axis=2)
        if data.size and np.abs(twosum - 1.0).max() > _TWO_CHANNEL_TOL:
            raise ValueError("background + color probabilities must sum to 1 per pixel")
        data.flags.writeable = False
        object.__setattr__(self, "data", data)

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def background(self) -> np.ndarray:
        return self.data[..., 0]

    @property
    def color_probs(self) -> np.ndarray:
        return self.data[..., 1:]

    @property
    def foreground(self) -> np.ndarray:
        return self.data[..., 1:].sum(axis=2)


@dataclass(frozen=True)
class LossWeights:
    """Non-negative weights of the orthogonality and classification terms."""

    orthogonality: float = 2.0
    classification: float = 1.0

    def __post_init__(self):
        if self.orthogonality < 0 or self.classification < 0:
            raise ValueError("loss weights must be non-negative")


@dataclass(frozen=True, eq=False)
class FeatureSampleSet:
    """Per-cell feature samples drawn at a fixed rate.

    Each cell holds ceil(rate * pixel_count) row vectors, capped at the
    cell's pixel count.
    """

    samples: Mapping[int, np.ndarray]
    rate: float

    def __post_init__(self):
        object.__setattr__(self, "samples", MappingProxyType(dict(self.samples)))


@dataclass(frozen=True, eq=False)
class EdgeSamplePair:
    """Sampled features of the two cells joined by one adjacency edge."""

    edge: tuple[int, int]
    first: np.ndarray   # (M, d) samples of the lower-id cell
    second: np.ndarray  # (N, d) samples of the higher-id cell


def _check_probabilities(arr: np.ndarray) -> None:
    if arr.size and (arr.min() < 0.0 or arr.max() > 1.0):
        raise ValueError("probabilities must lie in [0, 1]")


def _safe_log(p: np.ndarray) -> np.ndarray:
    return np.log(np.maximum(p, _LOG_FLOOR))


def semantic_loss_terms(pred: PredictionMaps, gt: InstanceMask) -> tuple[float, float]:
    """(cross_entropy, soft_dice) of the binary foreground prediction.

    Cross entropy is the pixel mean of -log p(true class) on the two-channel
    background/foreground view; the dice term is 1 - 2*sum(p*q) /
    (sum(p) + sum(q) + eps) on the foreground channel against the binarized
    ground truth.
    """
    if pred.data.shape[:2] != gt.data.shape:
        raise ValueError(f"prediction {pred.data.shape[:2]} does not match mask {gt.data.shape}")
    truth_fg = gt.data != 0
    fg = pred.foreground
    p_true = np.where(truth_fg, fg, pred.background)
    ce = float(np.mean(-_safe_log(p_true)))
    overlap = float(fg[truth_fg].sum())
    dice_term = 1.0 - 2.0 * overlap / (float(fg.sum()) + float(truth_fg.sum()) + SOFT_DICE_EPS)
    return ce, dice_term


def semantic_loss(pred: PredictionMaps, gt: InstanceMask) -> float:
    """Binary semantic loss: cross entropy plus soft dice on the foreground."""
    ce, dice_term = semantic_loss_terms(pred, gt)
    return ce + dice_term


def classification_loss_terms(pred_colors: np.ndarray, gt_fc: FourColorMask) -> tuple[float, float]:
    """(cross_entropy, soft_dice) of the four-color prediction on foreground pixels.

    Background pixels contribute nothing. The dice term pools the four color
    channels (micro average), so a perfect prediction scores ~0 even when
    some colors are absent from the image. An image without foreground
    yields (0, 0) and an EmptyForegroundWarning.
    """
    pred_colors = np.asarray(pred_colors, dtype=np.float64)
    if pred_colors.ndim != 3 or pred_colors.shape[2] != 4:
        raise ValueError(f"color probabilities must have shape (H, W, 4), got {pred_colors.shape}")
    if pred_colors.shape[:2] != gt_fc.data.shape:
        raise ValueError(
            f"prediction {pred_colors.shape[:2]} does not match mask {gt_fc.data.shape}"
        )
    _check_probabilities(pred_colors)
    fg = gt_fc.data != 0
    if not fg.any():
        warnings.warn("no foreground pixels; classification loss is 0", EmptyForegroundWarning,
                      stacklevel=2)
        return 0.0, 0.0
    probs = pred_colors[fg]                        # (nF, 4)
    target = gt_fc.data[fg].astype(np.intp) - 1    # color code -> channel
    p_true = probs[np.arange(probs.shape[0]), target]
    ce = float(np.mean(-_safe_log(p_true)))
    n_fg = probs.shape[0]
    dice_term = 1.0 - 2.0 * float(p_true.sum()) / (float(probs.sum()) + n_fg + SOFT_DICE_EPS)
    return ce, dice_term


def classification_loss(pred_colors: np.ndarray, gt_fc: FourColorMask) -> float:
    """Foreground-only four-color loss: cross entropy plus pooled soft dice."""
    ce, dice_term = classification_loss_terms(pred_colors, gt_fc)
    return ce + dice_term


def _cell_pixel_index(mask: InstanceMask) -> tuple[np.ndarray, np.ndarray, dict[int, tuple[int, int]]]:
    """Raster-order pixel indices grouped by instance id."""
    flat = mask.data.ravel()
    order = np.argsort(flat, kind="stable")
    sorted_ids = flat[order]
    ids, starts = np.unique(sorted_ids, return_index=True)
    spans: dict[int, tuple[int, int]] = {}
    bounds = list(starts) + [flat.size]
    for pos, ident in enumerate(ids):
        if ident != 0:
            spans[int(ident)] = (int(bounds[pos]), int(bounds[pos + 1]))
    return order, sorted_ids, spans


def sample_cell_features(
    features: np.ndarray,
    mask: InstanceMask,
    cells: Iterable[int],
    rate: float,
    seed: int,
) -> FeatureSampleSet:
    """Draw seeded uniform pixel samples from each requested cell.

    Every cell gets its own deterministic random stream keyed by (seed,
    cell id), so adding cells or edges never perturbs existing samples.
    """
    features = np.asarray(features, dtype=np.float64)
    if features.ndim != 3:
        raise ValueError(f"feature grid must have shape (H, W, d), got {features.shape}")
    if features.shape[:2] != mask.data.shape:
        raise ValueError(
            f"feature grid {features.shape[:2]} does not match mask {mask.data.shape}"
        )
    if not 0.0 < rate <= 1.0:
        raise ValueError(f"sampling rate must lie in (0, 1], got {rate}")
    order, _, spans = _cell_pixel_index(mask)
    flat_features = features.reshape(-1, features.shape[2])
    samples: dict[int, np.ndarray] = {}
    for cell in sorted(set(int(c) for c in cells)):
        span = spans.get(cell)
        if span is None:
            raise ValueError(f"cell {cell} has no pixels in the mask")
        pixels = order[span[0]:span[1]]
        count = min(math.ceil(rate * pixels.size), pixels.size)
        rng = np.random.default_rng([seed, cell])
        chosen = rng.choice(pixels.size, size=count, replace=False)
        samples[cell] = flat_features[pixels[chosen]]
    return FeatureSampleSet(samples=samples, rate=rate)


def sample_adjacent_features(
    features: np.ndarray,
    mask: InstanceMask,
    graph: CellGraph,
    rate: float,
    seed: int,
) -> list[EdgeSamplePair]:
    """Per-edge pairs of sampled features from the two adjacent cells."""
    cells = {v for e in graph.edges for v in e}
    sample_set = sample_cell_features(features, mask, cells, rate, seed)
    return [
        EdgeSamplePair(edge=e, first=sample_set.samples[e[0]], second=sample_set.samples[e[1]])
        for e in sorted(graph.edges)
    ]


def _unit_rows(vectors: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(vectors, axis=1)
    if vectors.size and norms.min() == 0.0:
        raise ValueError("zero-norm feature vector in sample set")
    return vectors / norms[:, None]


def orthogonality_loss(
    pairs: Sequence[EdgeSamplePair | tuple[np.ndarray, np.ndarray]],
    method: str = "pairwise",
) -> float:
    """Mean cosine similarity between the sample sets of each adjacent pair.

    With method="pairwise" (default) each edge contributes the mean of all
    M*N pairwise cosines; "pooled" compares the mean-pooled vectors instead.
    Range [-1, 1]; negative similarity is not clamped.
    """
    if method not in ("pairwise", "pooled"):
        raise ValueError(f"unknown method {method!r}")
    pairs = list(pairs)
    if not pairs:
        raise ValueError("at least one adjacent pair is required")
    per_edge = []
    for pair in pairs:
        first, second = (pair.first, pair.second) if isinstance(pair, EdgeSamplePair) else pair
        first = np.atleast_2d(np.asarray(first, dtype=np.float64))
        second = np.atleast_2d(np.asarray(second, dtype=np.float64))
        if method == "pairwise":
            cosines = _unit_rows(first) @ _unit_rows(second).T
            per_edge.append(float(cosines.mean()))
        else:
            pooled = _unit_rows(np.vstack([first.mean(axis=0), second.mean(axis=0)]))
            per_edge.append(float(pooled[0] @ pooled[1]))
    return float(np.mean(per_edge))


def total_loss(sem: float, ort: float, cls: float, weights: LossWeights = LossWeights()) -> float:
    """Weighted sum: sem + w_ort * ort + w_cls * cls."""
    return sem + weights.orthogonality * ort + weights.classification * cls
