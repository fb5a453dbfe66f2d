import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import linprog

from rego.errors import DimensionMismatch, RankDeficient
from rego.feasibility import box_feasible, min_inf_norm_solution
from rego.rand_linalg import min_two_norm_solution


def linprog_oracle(B, z):
    # min t over (y, t) with B y = z and -t <= y_i <= t, solved by HiGHS
    de, d = B.shape
    c = np.zeros(d + 1)
    c[-1] = 1.0
    A_ub = np.block([[np.eye(d), -np.ones((d, 1))], [-np.eye(d), -np.ones((d, 1))]])
    A_eq = np.hstack([B, np.zeros((de, 1))])
    res = linprog(c, A_ub=A_ub, b_ub=np.zeros(2 * d), A_eq=A_eq, b_eq=z,
                  bounds=[(None, None)] * d + [(0, None)], method="highs")
    assert res.status == 0
    return res.fun


def test_worked_examples():
    r = min_inf_norm_solution(np.array([[1.0, 2.0]]), np.array([3.0]))
    assert r.t == pytest.approx(1.0)
    np.testing.assert_allclose(r.y, [1.0, 1.0], atol=1e-12)
    r = min_inf_norm_solution(np.eye(2), np.array([1.0, -2.0]))
    assert r.t == pytest.approx(2.0)
    np.testing.assert_allclose(r.y, [1.0, -2.0], atol=1e-12)
    r = min_inf_norm_solution(np.array([[1.0, 1.0, 1.0]]), np.array([-3.0]))
    assert r.t == pytest.approx(1.0)


def test_zero_right_hand_side():
    r = min_inf_norm_solution(np.ones((2, 4)), np.zeros(2))
    assert r.t == 0.0 and not np.any(r.y)


@settings(max_examples=300, deadline=None)
@given(de=st.integers(1, 4), extra=st.integers(0, 5), seed=st.integers(0, 2**32 - 1))
def test_matches_highs(de, extra, seed):
    rng = np.random.default_rng(seed)
    B = rng.standard_normal((de, de + extra))
    z = rng.standard_normal(de)
    r = min_inf_norm_solution(B, z)
    assert r.optimal
    np.testing.assert_allclose(B @ r.y, z, atol=1e-8)
    assert np.max(np.abs(r.y)) == pytest.approx(r.t, abs=1e-9)
    assert r.t == pytest.approx(linprog_oracle(B, z), rel=1e-8, abs=1e-10)
    assert r.t <= np.max(np.abs(min_two_norm_solution(B, z))) + 1e-10


def test_square_system_has_unique_solution():
    rng = np.random.default_rng(4)
    B = rng.standard_normal((3, 3))
    z = rng.standard_normal(3)
    r = min_inf_norm_solution(B, z)
    np.testing.assert_allclose(r.y, np.linalg.solve(B, z), atol=1e-9)


def test_degenerate_but_consistent_rows():
    B = np.array([[1.0, 2.0, 0.0], [2.0, 4.0, 0.0]])
    r = min_inf_norm_solution(B, np.array([3.0, 6.0]))
    assert r.t == pytest.approx(1.0)
    assert r.status in ("optimal", "degenerate-warning")


def test_inconsistent_system_raises():
    B = np.array([[1.0, 2.0, 0.0], [2.0, 4.0, 0.0]])
    with pytest.raises(RankDeficient):
        min_inf_norm_solution(B, np.array([1.0, 1.0]))


def test_shape_errors():
    with pytest.raises(DimensionMismatch):
        min_inf_norm_solution(np.ones((2, 3)), np.ones(3))
    with pytest.raises(DimensionMismatch):
        min_inf_norm_solution(np.ones((3, 2)), np.ones(3))


def test_box_feasible_threshold():
    B = np.array([[1.0, 2.0]])
    z = np.array([3.0])
    assert box_feasible(B, z, 1.0)
    assert box_feasible(B, z, 1.0 + 1e-10)
    assert not box_feasible(B, z, 0.999)


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), scale=st.floats(0.1, 10))
def test_scaling_and_sign_equivariance(seed, scale):
    rng = np.random.default_rng(seed)
    B = rng.standard_normal((2, 4))
    z = rng.standard_normal(2)
    t = min_inf_norm_solution(B, z).t
    assert min_inf_norm_solution(B, scale * z).t == pytest.approx(scale * t, rel=1e-9)
    assert min_inf_norm_solution(B, -z).t == pytest.approx(t, rel=1e-9)
    # flipping a column's sign leaves the optimal box size unchanged
    Bf = B.copy()
    Bf[:, 0] *= -1
    assert min_inf_norm_solution(Bf, z).t == pytest.approx(t, rel=1e-9)
