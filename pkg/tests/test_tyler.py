import json

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from projshape import (
    Configuration,
    GroupElement,
    act,
    align_signs,
    diagonal_action_derivative,
    is_standardizable,
    projection_matrix,
    random_general_position,
    random_with_constraint,
    shape_distance,
    tyler_standardize,
)
from projshape import kernels
from projshape.errors import InstanceTooLarge, NotStandardizable, NotStandardized, RankDeficient
from projshape.tyler import standardization_residual

from .conftest import DOUBLE_PAIR, GENERIC_LINE, SINGLE_PAIR, TRIPLE
from .oracles import sign_distance_by_enumeration

TOL = 1e-10


def check_invariants(std, tol=TOL):
    P, Pr = std.matrix, std.projection
    k, n = P.shape
    assert np.max(np.abs(P.T @ P - np.eye(n))) <= tol
    assert np.max(np.abs(np.sum(P * P, axis=1) - n / k)) <= tol
    assert np.allclose(Pr, Pr.T, atol=tol)
    assert np.allclose(Pr @ Pr, Pr, atol=10 * tol)
    assert abs(np.trace(Pr) - n) <= 10 * tol
    assert np.max(np.abs(np.diag(Pr) - n / k)) <= tol


def test_balanced_double_pair_is_a_fixed_point():
    c = Configuration(np.array(DOUBLE_PAIR) / np.sqrt(2))
    std = tyler_standardize(c)
    assert std.iterations == 0
    check_invariants(std)


@pytest.mark.parametrize("rows", [SINGLE_PAIR, TRIPLE])
def test_non_standardizable(rows):
    c = Configuration(rows)
    assert is_standardizable(c).kind == "No"
    with pytest.raises(NotStandardizable) as info:
        tyler_standardize(c, max_iter=2000)
    assert info.value.residual > TOL
    assert info.value.iterations == 2000


def test_rank_deficient_is_not_standardizable():
    c = Configuration([[1, 0, 0], [0, 1, 0], [1, 1, 0], [1, 2, 0], [2, 1, 0]])
    with pytest.raises(NotStandardizable):
        tyler_standardize(c)


def test_classification_examples():
    assert is_standardizable(Configuration(DOUBLE_PAIR)).kind == "BalancedSplittable"
    assert is_standardizable(Configuration(GENERIC_LINE)).kind == "TylerRegular"
    assert is_standardizable(Configuration(TRIPLE)).kind == "No"
    res = is_standardizable(Configuration(DOUBLE_PAIR))
    assert res.to_dict()["witness"]["indices"] == [1, 2]


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_planted_balanced_split_standardizes(seed):
    c = random_with_constraint(2, 6, ({0, 1}, 1), seed, complement=True)
    # nearly coincident landmarks slow the iteration without breaking it
    assume(_min_separation(c.matrix[2:]) > 0.05)
    assert is_standardizable(c).kind == "BalancedSplittable"
    check_invariants(tyler_standardize(c))


def _min_separation(M):
    P = M / np.linalg.norm(M, axis=1, keepdims=True)
    G = np.abs(P @ P.T)
    np.fill_diagonal(G, 0.0)
    return float(np.sqrt(max(0.0, 1.0 - G.max() ** 2)))


def test_ill_conditioned_balanced_split_converges_slowly():
    c = random_with_constraint(2, 6, ({0, 1}, 1), 314854, complement=True)
    assert _min_separation(c.matrix[2:]) < 0.05
    with pytest.raises(NotStandardizable):
        tyler_standardize(c, max_iter=10000)
    check_invariants(tyler_standardize(c, max_iter=50000))


def test_projection_matrix(rng):
    P = rng.standard_normal((7, 3))
    Pr = projection_matrix(P)
    B = rng.standard_normal((3, 3))
    assert np.allclose(projection_matrix(P @ B), Pr, atol=1e-10)
    assert abs(np.trace(Pr) - 3) < 1e-10
    Q, _ = np.linalg.qr(P)
    assert np.allclose(projection_matrix(Q), Q @ Q.T, atol=1e-12)
    with pytest.raises(RankDeficient):
        projection_matrix(np.hstack([P[:, :2], P[:, :1]]))


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 3), st.integers(0, 5), st.integers(0, 2**32 - 1))
def test_standardization_invariance(d, extra, seed):
    rng = np.random.default_rng(seed)
    k = d + 3 + extra
    c = random_general_position(d, k, seed)
    a = tyler_standardize(c)
    b = tyler_standardize(act(GroupElement.random(k, d, rng), c))
    check_invariants(a)
    check_invariants(b)
    res = align_signs(a, b)
    assert res.distance <= 1e-8
    assert res.metric_regime
    S = np.array(res.signs, dtype=float)
    assert np.allclose(S[:, None] * a.projection * S[None, :], b.projection, atol=1e-8)


def test_balanced_split_distance_matches_enumeration():
    s = 1 / np.sqrt(2)
    a = tyler_standardize(Configuration(s * np.array(DOUBLE_PAIR)))
    b = tyler_standardize(Configuration(s * np.array([[1, 0], [0, 1], [1, 0], [0, 1]])))
    res = align_signs(a, b)
    expected = sign_distance_by_enumeration(a.projection, b.projection)
    assert res.distance > 0
    assert res.distance == pytest.approx(expected, abs=1e-12)
    assert not res.metric_regime
    json.dumps(res.to_dict())


@settings(max_examples=25, deadline=None)
@given(st.integers(4, 9), st.integers(0, 2**32 - 1))
def test_distance_matches_enumeration(k, seed):
    a = tyler_standardize(random_general_position(2, k + 1, seed))
    b = tyler_standardize(random_general_position(2, k + 1, seed + 7))
    for backend in kernels.AVAILABLE:
        got = shape_distance(a, b, backend=backend)
        assert got == pytest.approx(sign_distance_by_enumeration(a.projection, b.projection), abs=1e-10)


def test_sign_search_cap(rng):
    a = tyler_standardize(Configuration(rng.standard_normal((25, 3))))
    with pytest.raises(InstanceTooLarge):
        shape_distance(a, a)


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 3), st.integers(0, 4), st.integers(0, 2**32 - 1))
def test_derivative_matches_finite_differences(d, extra, seed):
    k = d + 3 + extra
    P = tyler_standardize(random_general_position(d, k, seed)).matrix
    h = 1e-5
    for i in range(k):
        D = np.ones(k)
        D[i] += h
        up = projection_matrix(D[:, None] * P)
        D[i] -= 2 * h
        down = projection_matrix(D[:, None] * P)
        fd = (up - down) / (2 * h)
        exact = diagonal_action_derivative(P, i)
        assert np.max(np.abs(exact - fd)) <= 1e-7
        assert np.allclose(exact, exact.T)
    Pr = P @ P.T
    assert np.allclose(np.diag(Pr), np.sum(P * P, axis=1))


def test_derivative_requires_standardized_input(rng):
    with pytest.raises(NotStandardized):
        diagonal_action_derivative(rng.standard_normal((5, 2)), 0)


def test_residual_helper():
    P = np.array(DOUBLE_PAIR) / np.sqrt(2)
    assert standardization_residual(P) < 1e-15
    assert standardization_residual(2 * P) == pytest.approx(3.0)
