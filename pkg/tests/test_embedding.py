import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rego.embedding import (EmbeddingSpec, effective_matrix, geometric_success, is_successful,
                            make_reduced, reduced_min_two_norm)
from rego.errors import DimensionMismatch
from rego.feasibility import min_inf_norm_solution
from rego.problems import BaseProblem, generate, get_problem
from rego.rand_linalg import RngStream, null_space_basis, sample_gaussian


def _origin_problem(D=8):
    # quadratic whose only minimizer is the origin
    base = BaseProblem(name="bowl", de=2, lower=-np.ones(2), upper=np.ones(2), f_star=0.0,
                       known_minimizers=(np.zeros(2),), func=lambda x: float(x @ x))
    return generate(base, D, RngStream(0))


@pytest.fixture
def branin10():
    return generate(get_problem("branin", scaled=True), 10, RngStream(1))


def test_center_maps_to_origin(branin10):
    spec = EmbeddingSpec.gaussian(10, 3, 2.0, RngStream(2))
    f = make_reduced(branin10, spec)
    assert f(np.zeros(3)) == branin10(np.zeros(10))


def test_identity_embedding_is_restriction(branin10):
    f = make_reduced(branin10, EmbeddingSpec(np.eye(10), 1.0))
    x = np.random.default_rng(0).uniform(-1, 1, 10)
    assert f(x) == branin10(x)


def test_eval_counter(branin10):
    f = make_reduced(branin10, EmbeddingSpec.gaussian(10, 2, 1.0, 3))
    for _ in range(7):
        f(np.zeros(2))
    assert f.eval_count == 7


def test_affine_offset_and_validation(branin10):
    A = sample_gaussian(10, 3, 4)
    p = np.full(10, 0.1)
    f = make_reduced(branin10, EmbeddingSpec(A, 1.5, p))
    y = np.array([0.2, -0.4, 0.9])
    assert f(y) == branin10(A @ y + p)
    with pytest.raises(DimensionMismatch):
        make_reduced(branin10, EmbeddingSpec(sample_gaussian(9, 3, 0), 1.0))
    with pytest.raises(DimensionMismatch):
        EmbeddingSpec(A, 1.0, np.zeros(9))
    with pytest.raises(ValueError):
        EmbeddingSpec(A, 0.0)


def test_success_predicate(branin10):
    spec = EmbeddingSpec.gaussian(10, 3, 1.0, 5)
    y = np.zeros(3)
    assert is_successful(branin10, spec, y, branin10.f_star)
    assert not is_successful(branin10, spec, y, branin10.f_star + 2e-3, epsilon=1e-3)
    assert not is_successful(branin10, spec, np.array([1.1, 0, 0]), branin10.f_star)
    assert is_successful(branin10, spec, np.array([1.0 + 5e-13, 0, 0]), branin10.f_star)
    with pytest.raises(ValueError):
        is_successful(branin10, spec, y, 0.0, epsilon=0.0)


@settings(max_examples=50, deadline=None)
@given(d1=st.floats(0.1, 5), extra=st.floats(0, 5), seed=st.integers(0, 1000))
def test_success_monotone_in_delta(d1, extra, seed):
    g = _origin_problem()
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((8, 3))
    y = rng.uniform(-d1, d1, 3)
    value = rng.uniform(-0.01, 0.01)
    if is_successful(g, EmbeddingSpec(A, d1), y, value):
        assert is_successful(g, EmbeddingSpec(A, d1 + extra), y, value)


def test_zero_minimizer_gives_zero_solution():
    g = _origin_problem()
    spec = EmbeddingSpec.gaussian(8, 3, 0.1, 0)
    np.testing.assert_array_equal(reduced_min_two_norm(g, spec), np.zeros(3))
    assert geometric_success(g, spec)


def test_square_embedding_recovers_minimum(branin10):
    spec = EmbeddingSpec.gaussian(10, 2, 1.0, RngStream(7))
    y = reduced_min_two_norm(branin10, spec)
    assert branin10(spec.to_full(y)) == pytest.approx(branin10.f_star, abs=1e-6)


@pytest.mark.parametrize("name", ["branin", "hartmann3", "shekel7"])
def test_null_space_directions_keep_minimum(name):
    g = generate(get_problem(name, scaled=True), 12, RngStream(3))
    spec = EmbeddingSpec.gaussian(12, g.de + 3, 1.0, RngStream(4))
    y = reduced_min_two_norm(g, spec)
    N = null_space_basis(effective_matrix(g, spec))
    rng = np.random.default_rng(0)
    for _ in range(20):
        w = N @ rng.normal(scale=3.0, size=N.shape[1])
        assert g(spec.to_full(y + w)) == pytest.approx(g.f_star, abs=1e-6)


def test_affine_target_shift(branin10):
    p = branin10.x_top_star.copy()
    spec = EmbeddingSpec(sample_gaussian(10, 3, 8), 0.01, p)
    np.testing.assert_allclose(reduced_min_two_norm(branin10, spec), 0.0, atol=1e-12)
    assert geometric_success(branin10, spec)


def test_geometric_success_agrees_with_lp_threshold(branin10):
    spec = EmbeddingSpec.gaussian(10, 3, 1.0, 11)
    B = effective_matrix(branin10, spec)
    ts = [min_inf_norm_solution(B, z).t for z in branin10.minimizers_effective]
    lo = min(ts)
    assert geometric_success(branin10, EmbeddingSpec(spec.A, lo * 1.001))
    assert not geometric_success(branin10, EmbeddingSpec(spec.A, lo * 0.999))
