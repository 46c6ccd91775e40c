from __future__ import annotations

import numpy as np
import pytest

from tappability.metrics import binary_metrics, roc_auc


def pairwise_auc_oracle(scores, labels):
    """Mann-Whitney AUC: P(score_pos > score_neg) + 0.5 P(tie)."""
    pos = [s for s, l in zip(scores, labels) if l]
    neg = [s for s, l in zip(scores, labels) if not l]
    if not pos or not neg:
        return None
    wins = sum((p > n) + 0.5 * (p == n) for p in pos for n in neg)
    return wins / (len(pos) * len(neg))


def test_perfect_scores():
    m = binary_metrics(np.array([1.0, 1.0, 0.0, 0.0]), np.array([1, 1, 0, 0]))
    assert (m.precision, m.recall, m.auc) == (100.0, 100.0, 1.0)
    assert (m.tp, m.fp, m.tn, m.fn) == (2, 0, 2, 0)


def test_hand_fixture_half_right():
    m = binary_metrics(np.array([0.9, 0.4, 0.6, 0.1]), np.array([1, 1, 0, 0]))
    assert (m.tp, m.fp, m.tn, m.fn) == (1, 1, 1, 1)
    assert m.precision == 50.0 and m.recall == 50.0
    assert m.auc == pytest.approx(0.75)


def test_hand_fixture_all_predicted_positive():
    m = binary_metrics(np.array([0.9, 0.8, 0.7, 0.6]), np.array([1, 0, 1, 0]))
    assert (m.tp, m.fp, m.tn, m.fn) == (2, 2, 0, 0)
    assert m.precision == 50.0 and m.recall == 100.0
    assert m.auc == pytest.approx(0.75)


def test_hand_fixture_all_tied_scores():
    m = binary_metrics(np.array([0.5] * 4), np.array([1, 1, 0, 0]))
    assert m.auc == pytest.approx(0.5)
    assert m.recall == 100.0  # decision is score >= threshold


def test_hand_fixture_no_predicted_positives():
    m = binary_metrics(np.array([0.1, 0.2, 0.3, 0.4]), np.array([0, 1, 0, 1]), threshold=0.5)
    assert m.precision is None
    assert m.recall == 0.0
    # pairwise oracle: pos {0.2, 0.4} vs neg {0.1, 0.3} -> 3 of 4 ordered pairs
    assert m.auc == pytest.approx(0.75)


def test_single_class_auc_undefined():
    m = binary_metrics(np.array([0.9, 0.1]), np.array([1, 1]))
    assert m.auc is None
    m = binary_metrics(np.array([0.9, 0.1]), np.array([0, 0]))
    assert m.auc is None


def test_auc_matches_pairwise_oracle_random():
    rng = np.random.default_rng(3)
    for _ in range(25):
        n = rng.integers(5, 60)
        scores = rng.choice(np.linspace(0, 1, 11), size=n)  # force ties
        labels = rng.integers(0, 2, size=n)
        got = roc_auc(scores, labels)
        want = pairwise_auc_oracle(scores, labels)
        if want is None:
            assert got is None
        else:
            assert got == pytest.approx(want, abs=1e-12)


def test_random_scores_auc_near_half():
    rng = np.random.default_rng(12345)
    scores = rng.random(10_000)
    labels = rng.integers(0, 2, size=10_000)
    assert roc_auc(scores, labels) == pytest.approx(0.5, abs=0.02)


def test_permutation_invariance():
    rng = np.random.default_rng(9)
    scores = rng.random(200)
    labels = rng.integers(0, 2, size=200)
    base = binary_metrics(scores, labels)
    perm = rng.permutation(200)
    shuffled = binary_metrics(scores[perm], labels[perm])
    assert shuffled == base


def test_threshold_semantics():
    m = binary_metrics(np.array([0.7, 1.0]), np.array([1, 1]), threshold=1.0)
    assert (m.tp, m.fn) == (1, 1)  # only exact 1.0 passes theta=1.0
