import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

import oracles
from conftest import random_spd
from delaycert import inequalities as ineq


def test_aggregate_single_term_is_degenerate():
    c = np.array([0.3, -1.2])
    agg = ineq.aggregate([c])
    for v in (agg.v1, agg.v2, agg.v3):
        np.testing.assert_allclose(v, c)
    for z in (agg.zeta1, agg.zeta2, agg.zeta4):
        assert np.all(np.abs(z) <= 1e-12)


def test_aggregate_two_equal_terms():
    c = np.array([1.5, 2.0])
    agg = ineq.aggregate([c, c])
    np.testing.assert_allclose(agg.v1, 2 * c)
    np.testing.assert_allclose(agg.v2, 3 * c)
    np.testing.assert_allclose(agg.v3, 4 * c)


def test_aggregate_unit_vectors_against_loops():
    u = np.array([[1.0, 0.0], [0.0, 1.0]])
    agg = ineq.aggregate(ineq.FiniteSequence(u, start=0))
    v1, v2, v3 = oracles.v_aggregates(u)
    np.testing.assert_allclose(agg.v2, [2.0, 1.0])
    for a, b in ((agg.v1, v1), (agg.v2, v2), (agg.v3, v3)):
        np.testing.assert_allclose(a, b, atol=1e-12)


def test_zeta_definitions(rng):
    u = rng.uniform(-1, 1, (7, 3))
    agg = ineq.aggregate(u)
    ell = 7
    np.testing.assert_allclose(agg.zeta1, agg.v1 - 2 / (ell + 1) * agg.v2)
    np.testing.assert_allclose(agg.zeta2, agg.v1 - 6 / (ell + 1) * agg.v2 + 12 / ((ell + 1) * (ell + 2)) * agg.v3)
    np.testing.assert_allclose(agg.zeta4, agg.v2 - 3 / (ell + 2) * agg.v3)


def test_sequence_bookkeeping():
    s = ineq.FiniteSequence(np.zeros((4, 2)), start=-3)
    assert (len(s), s.dim, s.end) == (4, 2, 0)
    with pytest.raises(ValueError):
        ineq.FiniteSequence(np.zeros((0, 2)))


def test_weight_validation():
    u = np.ones((3, 2))
    with pytest.raises(ValueError, match="2x2 but the sequence has dimension 2|3x3 but the sequence has dimension 2"):
        ineq.jensen_single_gap(u, np.eye(3))
    with pytest.raises(ValueError, match="symmetric"):
        ineq.single_sum(u, np.array([[1.0, 0.5], [0.0, 1.0]]))
    with pytest.raises(ValueError, match="positive definite"):
        ineq.single_sum(u, np.diag([1.0, 0.0]))


def test_jensen_gaps_vanish_on_constants():
    c = np.array([[0.4, -0.7]])
    u = np.repeat(c, 5, axis=0)
    R = np.array([[2.0, 0.3], [0.3, 1.0]])
    assert abs(ineq.jensen_single_gap(u, R)) < 1e-12
    assert abs(ineq.jensen_double_gap(u[:2], R)) < 1e-12
    assert ineq.refined_single_bound(u, R) == pytest.approx(0.0, abs=1e-12)
    assert ineq.jensen_single_gap(u[:1], R) == pytest.approx(0.0, abs=1e-15)
    assert ineq.jensen_double_gap(u[:1], R) == pytest.approx(0.0, abs=1e-15)


def test_gaps_match_direct_summation(rng):
    u = rng.uniform(-1, 1, (5, 2))
    R = np.eye(2)
    v1 = u.sum(axis=0)
    expected = oracles.single_sum(u, R) - v1 @ v1 / 5
    assert ineq.jensen_single_gap(u, R) == pytest.approx(expected, rel=1e-12)
    u = rng.uniform(-1, 1, (4, 3))
    R = random_spd(rng, 3)
    _, v2, _ = oracles.v_aggregates(u)
    expected = oracles.double_sum(u, R) - 2 / 20 * v2 @ R @ v2
    assert ineq.jensen_double_gap(u, R) == pytest.approx(expected, rel=1e-10)


def test_refined_bounds_degenerate_length():
    R = np.eye(2)
    assert ineq.refined_single_bound([[1.0, 2.0]], R) == 0.0
    assert ineq.refined_double_bound([[1.0, 2.0]], R) == 0.0
    x = np.array([[1.0, 2.0]])
    assert ineq.corollary_single_bound(x, R) == pytest.approx(5.0)


def test_refined_bounds_on_fixed_cases(rng):
    u = rng.uniform(-1, 1, (6, 2))
    assert 0 <= ineq.refined_single_bound(u, np.eye(2)) <= ineq.jensen_single_gap(u, np.eye(2))
    u = rng.uniform(-1, 1, (5, 2))
    R = random_spd(rng, 2)
    assert 0 <= ineq.refined_double_bound(u, R) <= ineq.jensen_double_gap(u, R)


def test_corollary_chain(rng):
    u = rng.uniform(-1, 1, (4, 2))
    R = random_spd(rng, 2)
    assert ineq.single_sum(u, R) >= ineq.corollary_single_bound(u, R) >= ineq.jensen_single_rhs(u, R)
    assert ineq.double_sum(u, R) >= ineq.corollary_double_bound(u, R) >= ineq.jensen_double_rhs(u, R)


def test_coefficient_dominance():
    for ell in range(2, 101):
        c1, c2 = ineq.single_coeffs(ell)
        assert c1 >= 3 / ell and c2 >= 5 / ell


def test_reorder_identity_small_cases(rng):
    c = np.array([0.25, -2.0])
    lhs, rhs = ineq.reorder_identity_check([c])
    np.testing.assert_allclose(lhs, c)
    np.testing.assert_allclose(rhs, c)
    lhs, rhs = ineq.reorder_identity_check([c, c])
    np.testing.assert_allclose(lhs, 3 * c)
    np.testing.assert_allclose(rhs, 3 * c)
    v = rng.uniform(-1, 1, (7, 2))
    lhs, rhs = ineq.reorder_identity_check(v)
    _, v2, _ = oracles.v_aggregates(v)
    np.testing.assert_allclose(lhs, v2, atol=1e-12)
    np.testing.assert_allclose(lhs, rhs, atol=1e-12)


def test_long_sequences_use_compensated_sums(rng):
    u = rng.uniform(-1, 1, (200, 2))
    R = random_spd(rng, 2)
    gap = ineq.jensen_single_gap(u, R)
    assert gap >= ineq.refined_single_bound(u, R) - 1e-9 * ineq.single_sum(u, R)


# -- properties ----------------------------------------------------------------

@st.composite
def sequence_and_weight(draw):
    ell = draw(st.integers(1, 20))
    n = draw(st.integers(1, 3))
    u = draw(arrays(float, (ell, n), elements=st.floats(-1, 1)))
    M = draw(arrays(float, (n, n), elements=st.floats(-1, 1)))
    return u, M.T @ M + 0.1 * np.eye(n)


@settings(max_examples=300, deadline=None)
@given(sequence_and_weight())
def test_refined_inequalities_hold(case):
    u, R = case
    lhs1, lhs2 = ineq.single_sum(u, R), ineq.double_sum(u, R)
    tol1, tol2 = 1e-9 * max(1.0, lhs1), 1e-9 * max(1.0, lhs2)
    b1, b2 = ineq.refined_single_bound(u, R), ineq.refined_double_bound(u, R)
    assert b1 >= -tol1 and b2 >= -tol2
    assert ineq.jensen_single_gap(u, R) >= b1 - tol1
    assert ineq.jensen_double_gap(u, R) >= b2 - tol2
    assert lhs1 >= ineq.corollary_single_bound(u, R) - tol1
    assert lhs2 >= ineq.corollary_double_bound(u, R) - tol2


@settings(max_examples=200, deadline=None)
@given(arrays(float, st.tuples(st.integers(1, 20), st.integers(1, 3)), elements=st.floats(-1, 1)))
def test_aggregates_match_loops(u):
    agg = ineq.aggregate(u)
    for a, b in zip((agg.v1, agg.v2, agg.v3), oracles.v_aggregates(u)):
        np.testing.assert_allclose(a, b, atol=1e-10 * max(1.0, np.max(np.abs(b))))
    lhs, rhs = ineq.reorder_identity_check(u)
    np.testing.assert_allclose(lhs, rhs, rtol=0, atol=1e-12)
