import math

import numpy as np
import pytest

from fourcolor import (
    EmptyForegroundWarning,
    FourColorMask,
    InstanceMask,
    LossWeights,
    PredictionMaps,
    build_cell_graph,
    classification_loss,
    classification_loss_terms,
    encode_mask,
    gen_chain,
    orthogonality_loss,
    sample_adjacent_features,
    sample_cell_features,
    semantic_loss,
    semantic_loss_terms,
    total_loss,
)
from helpers import mask_from_rows


def prediction_from_fc(fc: FourColorMask) -> PredictionMaps:
    """One-hot-correct five-channel prediction for a four-color ground truth."""
    h, w = fc.data.shape
    data = np.zeros((h, w, 5), dtype=np.float64)
    for channel in range(5):
        data[..., channel] = fc.data == channel
    return PredictionMaps(data)


GT = mask_from_rows([
    "11..",
    "11..",
    "..22",
    "..22",
])
GT_FC = FourColorMask((GT.data != 0).astype(np.uint8))  # far apart: both color 1


def test_prediction_maps_validation():
    with pytest.raises(ValueError, match=r"\[0, 1\]"):
        PredictionMaps(np.full((2, 2, 5), 1.5))
    with pytest.raises(ValueError, match="sum to 1"):
        bad = np.zeros((2, 2, 5))
        bad[..., 0] = 0.3  # colors all zero: bg + fg = 0.3
        PredictionMaps(bad)
    with pytest.raises(ValueError, match="shape"):
        PredictionMaps(np.zeros((2, 2, 4)))


def test_semantic_loss_perfect_prediction_near_zero():
    pred = prediction_from_fc(GT_FC)
    assert semantic_loss(pred, GT) <= 1e-5


def test_semantic_loss_uniform_gives_ln2():
    data = np.zeros((6, 7, 5))
    data[..., 0] = 0.5
    data[..., 1:] = 0.125
    gt = mask_from_rows(["1" * 7] * 3 + ["." * 7] * 3)
    ce, _ = semantic_loss_terms(PredictionMaps(data), gt)
    assert ce == pytest.approx(math.log(2), abs=1e-9)


def test_semantic_loss_inverted_foreground_dice_one():
    inverted = np.zeros((4, 4, 5))
    fg = (GT.data != 0).astype(np.float64)
    inverted[..., 0] = fg          # background prob = gt foreground
    inverted[..., 1] = 1.0 - fg    # foreground prob = 1 - gt
    _, dice_term = semantic_loss_terms(PredictionMaps(inverted), GT)
    assert dice_term == pytest.approx(1.0, abs=1e-5)


def test_semantic_loss_dimension_mismatch():
    pred = prediction_from_fc(GT_FC)
    with pytest.raises(ValueError, match="match"):
        semantic_loss(pred, mask_from_rows(["1"]))


def test_semantic_terms_match_fsum_recomputation():
    # high-precision independent evaluation in a different summation order
    rng = np.random.default_rng(99)
    h = w = 32
    bg = rng.random((h, w)) * 0.999 + 0.0005
    data = np.zeros((h, w, 5))
    data[..., 0] = bg
    share = rng.random((h, w, 4)) + 1e-9
    share /= share.sum(axis=2, keepdims=True)
    data[..., 1:] = share * (1.0 - bg)[..., None]
    pred = PredictionMaps(data)
    gt = InstanceMask((rng.random((h, w)) < 0.4).astype(np.uint32))

    ce, dice_term = semantic_loss_terms(pred, gt)

    fg = pred.foreground
    order = rng.permutation(h * w)
    truth = (gt.data != 0).ravel()[order]
    p_fg = fg.ravel()[order]
    p_bg = pred.background.ravel()[order]
    ce_ref = math.fsum(
        -math.log(max(p if t else b, 1e-12)) for t, p, b in zip(truth, p_fg, p_bg)
    ) / (h * w)
    num = math.fsum(p for t, p in zip(truth, p_fg) if t)
    den = math.fsum(p_fg.tolist()) + math.fsum(1.0 for t in truth if t) + 1e-6
    dice_ref = 1.0 - 2.0 * num / den
    assert ce == pytest.approx(ce_ref, abs=1e-9)
    assert dice_term == pytest.approx(dice_ref, abs=1e-9)


def test_classification_loss_perfect_prediction_near_zero():
    chain = gen_chain(3, cell_size=4)
    fc = encode_mask(chain, 1)
    onehot = np.zeros(fc.data.shape + (4,))
    for c in (1, 2, 3, 4):
        onehot[..., c - 1] = fc.data == c
    assert classification_loss(onehot, fc) <= 1e-5


def test_classification_loss_ignores_background_changes():
    chain = gen_chain(3, cell_size=4)
    fc = encode_mask(chain, 1)
    onehot = np.zeros(fc.data.shape + (4,))
    for c in (1, 2, 3, 4):
        onehot[..., c - 1] = fc.data == c
    base = classification_loss(onehot, fc)
    noisy = onehot.copy()
    noisy[fc.data == 0] = 0.25  # rewrite background pixels only
    assert classification_loss(noisy, fc) == pytest.approx(base, abs=1e-15)


def test_classification_loss_uniform_gives_ln4():
    fc = encode_mask(gen_chain(4, cell_size=4), 1)
    uniform = np.full(fc.data.shape + (4,), 0.25)
    ce, _ = classification_loss_terms(uniform, fc)
    assert ce == pytest.approx(math.log(4), abs=1e-9)


def test_classification_loss_empty_foreground_warns_zero():
    fc = FourColorMask(np.zeros((3, 3), dtype=np.uint8))
    with pytest.warns(EmptyForegroundWarning):
        assert classification_loss(np.full((3, 3, 4), 0.25), fc) == 0.0


def test_classification_loss_validation():
    fc = encode_mask(gen_chain(2, cell_size=4), 1)
    with pytest.raises(ValueError, match=r"\[0, 1\]"):
        classification_loss(np.full(fc.data.shape + (4,), 2.0), fc)
    with pytest.raises(ValueError, match="shape"):
        classification_loss(np.zeros((2, 2, 5)), fc)


def test_sampling_rate_one_takes_every_pixel():
    mask = mask_from_rows(["1122"])
    graph = build_cell_graph(mask, 1)
    features = np.arange(8, dtype=np.float64).reshape(1, 4, 2)
    pairs = sample_adjacent_features(features, mask, graph, rate=1.0, seed=0)
    assert len(pairs) == 1
    pair = pairs[0]
    assert sorted(map(tuple, pair.first)) == [(0.0, 1.0), (2.0, 3.0)]
    assert sorted(map(tuple, pair.second)) == [(4.0, 5.0), (6.0, 7.0)]


def test_sampling_count_is_ceil_of_rate():
    mask = mask_from_rows(["1111111111"])  # 10 pixels
    features = np.ones((1, 10, 3))
    sample_set = sample_cell_features(features, mask, [1], rate=0.5, seed=1)
    assert sample_set.samples[1].shape == (5, 3)
    assert sample_cell_features(features, mask, [1], rate=0.01, seed=1).samples[1].shape[0] == 1


def test_sampling_deterministic_and_cell_keyed():
    mask = mask_from_rows(["111.222", "111.222"])
    graph = build_cell_graph(mask, 2)
    rng = np.random.default_rng(5)
    features = rng.random((2, 7, 4))
    a = sample_adjacent_features(features, mask, graph, rate=0.5, seed=9)
    b = sample_adjacent_features(features, mask, graph, rate=0.5, seed=9)
    assert all(np.array_equal(x.first, y.first) and np.array_equal(x.second, y.second)
               for x, y in zip(a, b))
    c = sample_adjacent_features(features, mask, graph, rate=0.5, seed=10)
    assert not all(np.array_equal(x.first, y.first) for x, y in zip(a, c))


def test_sampling_errors():
    mask = mask_from_rows(["11"])
    features = np.ones((1, 2, 2))
    with pytest.raises(ValueError, match="no pixels"):
        sample_cell_features(features, mask, [7], rate=0.5, seed=0)
    with pytest.raises(ValueError, match="rate"):
        sample_cell_features(features, mask, [1], rate=0.0, seed=0)
    with pytest.raises(ValueError, match="rate"):
        sample_cell_features(features, mask, [1], rate=1.2, seed=0)
    with pytest.raises(ValueError, match="match"):
        sample_cell_features(np.ones((3, 3, 2)), mask, [1], rate=0.5, seed=0)


def test_orthogonality_orthogonal_sets_zero():
    first = np.array([[1.0, 0.0], [1.0, 0.0]])
    second = np.array([[0.0, 1.0], [0.0, 2.0]])
    assert orthogonality_loss([(first, second)]) == pytest.approx(0.0, abs=1e-12)


def test_orthogonality_identical_unit_vectors_one():
    v = np.array([[0.6, 0.8]])
    assert orthogonality_loss([(v, v), (v, v)]) == pytest.approx(1.0, abs=1e-12)


def test_orthogonality_means_over_edges():
    v = np.array([[1.0, 0.0]])
    w = np.array([[0.0, 1.0]])
    loss = orthogonality_loss([(v, v), (v, w)])
    assert loss == pytest.approx(0.5, abs=1e-12)


def test_orthogonality_symmetry_and_order_invariance():
    rng = np.random.default_rng(3)
    first = rng.normal(size=(4, 6))
    second = rng.normal(size=(3, 6))
    base = orthogonality_loss([(first, second)])
    assert orthogonality_loss([(second, first)]) == pytest.approx(base, abs=1e-12)
    assert orthogonality_loss([(first[::-1], second[::-1])]) == pytest.approx(base, abs=1e-12)


def test_orthogonality_pooled_flag():
    first = np.array([[1.0, 0.0], [0.0, 1.0]])
    second = np.array([[1.0, 0.0]])
    pairwise = orthogonality_loss([(first, second)])
    pooled = orthogonality_loss([(first, second)], method="pooled")
    assert pairwise == pytest.approx(0.5, abs=1e-12)
    assert pooled == pytest.approx(math.cos(math.pi / 4), abs=1e-12)
    with pytest.raises(ValueError, match="method"):
        orthogonality_loss([(first, second)], method="max")


def test_orthogonality_errors():
    with pytest.raises(ValueError, match="at least one"):
        orthogonality_loss([])
    with pytest.raises(ValueError, match="zero-norm"):
        orthogonality_loss([(np.zeros((1, 2)), np.ones((1, 2)))])


def test_orthogonality_negative_not_clamped():
    v = np.array([[1.0, 0.0]])
    w = np.array([[-1.0, 0.0]])
    assert orthogonality_loss([(v, w)]) == pytest.approx(-1.0, abs=1e-12)


def test_total_loss_values():
    assert total_loss(0.0, 0.0, 0.0) == 0.0
    assert total_loss(1.0, 1.0, 1.0) == 4.0  # default weights 2 and 1
    assert total_loss(0.5, 0.0, 0.25) == pytest.approx(0.75)
    assert total_loss(1.0, 1.0, 1.0, LossWeights(0.5, 0.5)) == 2.0


def test_total_loss_linear_in_each_argument():
    w = LossWeights()
    base = total_loss(0.2, 0.3, 0.4, w)
    assert total_loss(0.2 + 1.0, 0.3, 0.4, w) == pytest.approx(base + 1.0)
    assert total_loss(0.2, 0.3 + 1.0, 0.4, w) == pytest.approx(base + w.orthogonality)
    assert total_loss(0.2, 0.3, 0.4 + 1.0, w) == pytest.approx(base + w.classification)


def test_loss_weights_validation():
    with pytest.raises(ValueError, match="non-negative"):
        LossWeights(-1.0, 0.0)
