import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hypolo.datasets import ToySpec, generate_toy
from hypolo.detectors import detect
from hypolo.errors import DegenerateLabels
from hypolo.evaluation import auc_roc, roc_curve, sweep_k, trapezoid_auc


def pair_count_auc(scores, labels):
    pos = [s for s, l in zip(scores, labels) if l]
    neg = [s for s, l in zip(scores, labels) if not l]
    wins = sum(1.0 if p > n else 0.5 if p == n else 0.0 for p, n in itertools.product(pos, neg))
    return wins / (len(pos) * len(neg))


def test_perfect_ranking():
    assert auc_roc([1, 2, 3], ["inlier", "inlier", "outlier"]).auc == 1.0


def test_constant_scores():
    assert auc_roc([0.5] * 4, [0, 1, 0, 1]).auc == 0.5


def test_ties_count_half():
    scores, labels = [3, 1, 2, 2], [1, 0, 0, 1]
    assert pair_count_auc(scores, labels) == 0.875
    assert auc_roc(scores, labels).auc == 0.875


def test_counts_and_curve_ends():
    r = auc_roc([0.1, 0.4, 0.35, 0.8], [0, 0, 1, 1])
    assert (r.n_pos, r.n_neg) == (2, 2)
    assert r.roc_points[0] == (0.0, 0.0) and r.roc_points[-1] == (1.0, 1.0)
    assert r.auc == 0.75


def test_single_class_raises():
    with pytest.raises(DegenerateLabels):
        auc_roc([1, 2], [0, 0])
    with pytest.raises(DegenerateLabels):
        auc_roc([1, 2], ["outlier", "outlier"])


def test_nan_scores_rejected():
    with pytest.raises(ValueError):
        auc_roc([np.nan, 1.0], [0, 1])


def test_length_mismatch():
    with pytest.raises(ValueError):
        auc_roc([1.0, 2.0, 3.0], [0, 1])


labelled = st.integers(2, 40).flatmap(lambda n: st.tuples(
    st.lists(st.integers(0, 6).map(float), min_size=n, max_size=n),
    st.lists(st.booleans(), min_size=n, max_size=n).filter(lambda l: 0 < sum(l) < len(l)),
))


@given(labelled)
def test_matches_pair_count(data):
    s, l = data
    assert auc_roc(s, l).auc == pytest.approx(pair_count_auc(s, l), abs=1e-12)


@given(labelled)
def test_rank_statistic_equals_trapezoid(data):
    s, l = data
    fpr, tpr = roc_curve(s, l)
    assert auc_roc(s, l).auc == pytest.approx(trapezoid_auc(fpr, tpr), abs=1e-12)


@given(labelled)
def test_complement(data):
    s, l = data
    assert auc_roc(s, l).auc + auc_roc(-np.array(s), l).auc == pytest.approx(1.0, abs=1e-12)


@given(labelled)
def test_increasing_transform_invariant(data):
    s, l = data
    s = np.array(s)
    assert auc_roc(np.exp(s) * 3 + 1, l).auc == auc_roc(s, l).auc


def test_sweep_single_k_matches_direct():
    d = generate_toy(ToySpec(seed=2))
    direct = auc_roc(detect(d, "hloop", 10).scores, d.outlier_mask).auc
    assert sweep_k(d, "hloop", [10]) == [(10, direct)]


def test_sweep_deterministic_and_threads():
    d = generate_toy(ToySpec(seed=4))
    a = sweep_k(d, "hlof", range(3, 9))
    assert a == sweep_k(d, "hlof", range(3, 9))
    assert a == sweep_k(d, "hlof", range(3, 9), threads=4)
    assert [k for k, _ in a] == list(range(3, 9))


def test_sweep_needs_labels():
    d = generate_toy()
    from hypolo.datasets import Dataset
    with pytest.raises(DegenerateLabels):
        sweep_k(Dataset(d.points), "hloop", [5])
