"""Four-color encoding toolkit for cell instance masks.

Converts instance label masks to four-color semantic masks and back,
canonicalizes equivalent encodings, checks coloring optimality on synthetic
layouts, and scores segmentations with the standard metric suite.
"""

from .codec import (
    PALETTE,
    color_instances,
    colorize,
    decode_mask,
    encode_mask,
    normalize_prediction,
)
from .coloring import (
    ColorAssignment,
    EncodingMatrix,
    ImproperEncodingWarning,
    OrderingStrategy,
    canonicalize_encoding,
    chromatic_number_exact,
    exact_k_coloring,
    greedy_color,
    relabel_canonical,
    traversal_order,
    verify_proper,
)
from .graph import DEFAULT_DELTA, CellGraph, build_cell_graph, max_degree
from .losses import (
    EdgeSamplePair,
    EmptyForegroundWarning,
    FeatureSampleSet,
    LossWeights,
    PredictionMaps,
    classification_loss,
    classification_loss_terms,
    orthogonality_loss,
    sample_adjacent_features,
    sample_cell_features,
    semantic_loss,
    semantic_loss_terms,
    total_loss,
)
from .masks import (
    MAX_ENCODABLE_ID,
    CapacityError,
    FourColorMask,
    InstanceMask,
    masks_equivalent,
    relabel_instances,
)
from .metrics import (
    CorpusReport,
    ErrorMap,
    MetricsReport,
    aggregate_reports,
    aji,
    dice,
    error_map,
    evaluate_corpus,
    evaluate_pair,
    panoptic,
)
from .stats import degree_stats, greedy_optimality_report
from .synth import color_usage_stats, gen_chain, gen_grid, gen_random_packing

__version__ = "0.1.0"

__all__ = [
    "CapacityError",
    "CellGraph",
    "ColorAssignment",
    "CorpusReport",
    "DEFAULT_DELTA",
    "EdgeSamplePair",
    "EmptyForegroundWarning",
    "EncodingMatrix",
    "ErrorMap",
    "FeatureSampleSet",
    "FourColorMask",
    "ImproperEncodingWarning",
    "InstanceMask",
    "LossWeights",
    "MAX_ENCODABLE_ID",
    "MetricsReport",
    "OrderingStrategy",
    "PALETTE",
    "PredictionMaps",
    "aggregate_reports",
    "aji",
    "build_cell_graph",
    "canonicalize_encoding",
    "chromatic_number_exact",
    "classification_loss",
    "classification_loss_terms",
    "color_instances",
    "color_usage_stats",
    "colorize",
    "decode_mask",
    "degree_stats",
    "dice",
    "encode_mask",
    "error_map",
    "evaluate_corpus",
    "evaluate_pair",
    "exact_k_coloring",
    "gen_chain",
    "gen_grid",
    "gen_random_packing",
    "greedy_color",
    "greedy_optimality_report",
    "masks_equivalent",
    "max_degree",
    "normalize_prediction",
    "orthogonality_loss",
    "panoptic",
    "relabel_canonical",
    "relabel_instances",
    "sample_adjacent_features",
    "sample_cell_features",
    "semantic_loss",
    "semantic_loss_terms",
    "total_loss",
    "traversal_order",
    "verify_proper",
]
