import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from vhoeval import JudgmentError, PairwiseComparisonMatrix, ahp_weights, consistency_ratio
from vhoeval.ahp import RANDOM_INDEX, ConsistencyWarning

PARAMS = ("ranking_abnormality", "number_of_handoffs")


def two_by_two(x):
    return PairwiseComparisonMatrix(PARAMS, [[1, x], [1 / x, 1]])


@pytest.mark.parametrize(
    "judgment, expected",
    [
        (1, (0.5, 0.5)),
        (1 / 3, (0.250, 0.750)),
        (1 / 5, (0.167, 0.833)),
        (1 / 7, (0.125, 0.875)),
    ],
    ids=["background", "conversational", "interactive", "streaming"],
)
def test_reference_parameter_weights(judgment, expected):
    w = ahp_weights(two_by_two(judgment))
    assert w.weights == pytest.approx(expected, abs=0.001)
    assert w.labels == PARAMS


@settings(max_examples=300)
@given(x=st.floats(1 / 9, 9))
def test_two_by_two_closed_form(x):
    w = ahp_weights(two_by_two(x)).weights
    assert w == pytest.approx((x / (1 + x), 1 / (1 + x)), abs=1e-12)


def test_two_by_two_cr_is_zero():
    assert consistency_ratio(two_by_two(1 / 7)) == 0.0


def test_consistent_3x3_cr_is_zero():
    p = PairwiseComparisonMatrix(("a", "b", "c"), [[1, 2, 4], [1 / 2, 1, 2], [1 / 4, 1 / 2, 1]])
    assert consistency_ratio(p) == pytest.approx(0.0, abs=1e-6)
    assert ahp_weights(p).weights == pytest.approx((4 / 7, 2 / 7, 1 / 7), abs=1e-12)


@pytest.mark.parametrize("seed", range(10))
def test_perturbed_3x3_cr_matches_power_iteration(seed):
    rng = np.random.default_rng(seed)
    base = rng.uniform(1, 5, 3)
    a = base[:, None] / base[None, :]
    for i, j in ((0, 1), (0, 2), (1, 2)):
        a[i, j] = np.clip(a[i, j] * rng.uniform(0.5, 2.0), 1 / 9, 9)
        a[j, i] = 1 / a[i, j]
    p = PairwiseComparisonMatrix(("a", "b", "c"), a)
    lam, _ = oracles.principal_eigenvalue(a.tolist())
    expected = ((lam - 3) / 2) / RANDOM_INDEX[3]
    assert consistency_ratio(p) == pytest.approx(expected, abs=1e-6)


@st.composite
def priority_vectors(draw, k=None):
    k = k or draw(st.integers(2, 6))
    return draw(st.lists(st.floats(1, 3), min_size=k, max_size=k))


@settings(max_examples=200)
@given(w=priority_vectors())
def test_consistent_matrix_recovers_weights(w):
    labels = tuple(f"c{i}" for i in range(len(w)))
    p = PairwiseComparisonMatrix.from_weights(labels, w)
    got = ahp_weights(p).weights
    assert got == pytest.approx(tuple(np.array(w) / sum(w)), abs=1e-9)
    assert sum(got) == pytest.approx(1.0, abs=1e-12)
    assert all(x > 0 for x in got)


@settings(max_examples=200)
@given(w=priority_vectors(), data=st.data())
def test_relabeling_permutes_weights(w, data):
    labels = tuple(f"c{i}" for i in range(len(w)))
    p = PairwiseComparisonMatrix.from_weights(labels, w)
    perm = data.draw(st.permutations(labels))
    before = dict(zip(labels, ahp_weights(p).weights))
    after = dict(zip(perm, ahp_weights(p.reorder(perm)).weights))
    for name in labels:
        assert after[name] == pytest.approx(before[name], abs=1e-12)


def test_inconsistent_matrix_warns():
    a = [[1, 9, 1 / 9], [1 / 9, 1, 9], [9, 1 / 9, 1]]
    p = PairwiseComparisonMatrix(("a", "b", "c"), a)
    with pytest.warns(ConsistencyWarning):
        ahp_weights(p)
    assert consistency_ratio(p) > 0.1


@pytest.mark.parametrize(
    "grid, match",
    [
        ([[1, 0], [0, 1]], "non-positive"),
        ([[1, 3], [1 / 2, 1]], "reciprocity"),
        ([[2, 1], [1, 1]], "diagonal"),
        ([[1, 10], [1 / 10, 1]], r"\[1/9, 9\]"),
        ([[1, 1, 1], [1, 1, 1]], "does not match"),
    ],
)
def test_invalid_matrices(grid, match):
    labels = ("a", "b")
    with pytest.raises(JudgmentError, match=match):
        PairwiseComparisonMatrix(labels, grid)
