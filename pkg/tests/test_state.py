import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corpus import REFERENCE_A, gaussian, grids, random_tensor_state
from rigidcover import (
    GaussianSpec,
    PureState,
    build_from_tensor,
    build_gaussian,
    enumerate_bipartitions,
    is_fully_separable,
    make_uniform_grid,
    overlap,
    schmidt_oracle,
)
from rigidcover.errors import (
    GridMismatchError,
    NotNormalizedError,
    NotPositiveDefiniteError,
    ShapeMismatchError,
    TruncationWarning,
    ZeroTensorError,
)
from rigidcover.partition import Bipartition
from rigidcover.state import partial_trace

SPLIT = Bipartition((1,), (2,), 2)


def test_identity_quadratic_is_product():
    state = gaussian(np.eye(2), count=32)
    sigma = schmidt_oracle(state, SPLIT)
    assert sigma[0] == pytest.approx(1.0, abs=1e-12)
    assert sigma[1] < 1e-12


def test_correlated_gaussian_is_entangled():
    sigma = schmidt_oracle(gaussian(REFERENCE_A, count=64), SPLIT)
    # Schmidt amplitudes of exp(-a(x^2+y^2)/2 + bxy) fall off geometrically
    # with ratio b / (a + sqrt(a^2 - b^2)) = 0.8 / 1.6
    assert sigma[1] / sigma[0] > 0.3
    assert sigma[1] / sigma[0] == pytest.approx(0.5, abs=1e-3)


def test_indefinite_quadratic_names_eigenvalue():
    with pytest.raises(NotPositiveDefiniteError, match="-1"):
        GaussianSpec(np.diag([1.0, -1.0]))


def test_quadratic_must_be_symmetric():
    with pytest.raises(NotPositiveDefiniteError):
        GaussianSpec([[1.0, 0.2], [0.0, 1.0]])


def test_gaussian_dimension_mismatch():
    with pytest.raises(ShapeMismatchError):
        build_gaussian(GaussianSpec(np.eye(3)), grids(2))


def test_truncation_warning():
    with pytest.warns(TruncationWarning):
        build_gaussian(GaussianSpec(np.eye(2) * 0.1), grids(2, 16))


def test_uniform_tensor_already_normalized():
    g = [make_uniform_grid(0, 1, 2)] * 2
    state = build_from_tensor(g, np.ones((2, 2)))
    np.testing.assert_allclose(state.coeffs, np.ones((2, 2)), atol=1e-15)
    np.testing.assert_allclose(build_from_tensor(g, 2 * np.ones((2, 2))).coeffs, state.coeffs)


def test_zero_tensor_rejected():
    g = [make_uniform_grid(0, 1, 2)] * 2
    with pytest.raises(ZeroTensorError):
        build_from_tensor(g, np.zeros((2, 2)))


def test_shape_mismatch():
    g = [make_uniform_grid(0, 1, 2)] * 2
    with pytest.raises(ShapeMismatchError):
        build_from_tensor(g, np.ones((2, 3)))


def test_constructor_checks_norm():
    g = [make_uniform_grid(0, 1, 2)] * 2
    with pytest.raises(NotNormalizedError):
        PureState(g, 2 * np.ones((2, 2)))


def test_coefficients_are_read_only():
    state = gaussian(np.eye(2), count=8)
    with pytest.raises(ValueError):
        state.coeffs[0, 0] = 1.0


def test_overlap_basic():
    state = gaussian(REFERENCE_A)
    assert overlap(state, state) == pytest.approx(1.0, abs=1e-12)
    g = [make_uniform_grid(0, 1, 4)] * 2
    left = np.zeros((4, 4))
    left[:2] = 1
    right = np.zeros((4, 4))
    right[2:] = 1
    assert overlap(build_from_tensor(g, left), build_from_tensor(g, right)) == 0


def test_overlap_gaussian_widths():
    a = gaussian(np.eye(2), count=64)
    b = gaussian(2 * np.eye(2), count=64)
    # 1-D: int e^{-3x^2/2} / sqrt(int e^{-x^2} int e^{-2x^2}) = sqrt(2/3) 2^{1/4}
    one_mode = math.sqrt(2 / 3) * 2 ** 0.25
    assert abs(overlap(a, b) - one_mode ** 2) < 1e-6


def test_overlap_grid_mismatch():
    with pytest.raises(GridMismatchError):
        overlap(gaussian(np.eye(2), count=8), gaussian(np.eye(2), count=16))


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), counts=st.lists(st.integers(2, 6), min_size=2, max_size=3))
def test_cauchy_schwarz(seed, counts):
    rng = np.random.default_rng(seed)
    a = random_tensor_state(rng, counts)
    b = random_tensor_state(rng, counts)
    assert abs(overlap(a, b)) <= 1 + 1e-10


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_normalization_idempotent(seed):
    state = random_tensor_state(np.random.default_rng(seed), [5, 4, 3])
    again = build_from_tensor(state.modes, state.coeffs)
    assert np.max(np.abs(again.coeffs - state.coeffs)) <= 1e-14


@pytest.mark.parametrize("diag", [[1.0, 2.0, 0.7], [0.5 + 0.3j, 1.0, 1.5 - 0.2j]])
def test_diagonal_quadratic_separable_everywhere(diag):
    state = gaussian(np.diag(diag), count=12)
    separable, verdicts = is_fully_separable(state)
    assert separable
    assert len(verdicts) == len(enumerate_bipartitions(3))


def test_partial_trace_of_product():
    g = grids(2, 8)
    f = np.exp(-g[0].points ** 2)
    h = np.exp(-0.5 * g[1].points ** 2 + 1j * g[1].points)
    state = build_from_tensor(g, np.outer(f, h))
    rho = partial_trace(state, [0])
    fn = f / np.sqrt(np.sum(g[0].weights * f ** 2))
    np.testing.assert_allclose(rho, np.outer(fn, fn), atol=1e-12)
