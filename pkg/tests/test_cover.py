import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corpus import REFERENCE_A, gaussian, grids, random_tensor_state
from rigidcover import (
    Side,
    build_crc_pair,
    build_from_tensor,
    conditional_state,
    cover_centroid,
    distance_matrix,
    enumerate_bipartitions,
    hs_distance,
    make_uniform_grid,
    marginal_weight,
    schmidt_oracle,
)
from rigidcover.cover import build_cover, hs_distance_direct, operator_spectrum
from rigidcover.errors import AllInactiveError, NotNormalizedError, UndefinedConditionalError
from rigidcover.partition import Bipartition
from rigidcover.state import partial_trace

SPLIT = Bipartition((1,), (2,), 2)


def product_2d(count=16):
    g = grids(2, count)
    f = np.exp(-0.5 * g[0].points ** 2)
    h = np.exp(-0.8 * (g[1].points - 0.5) ** 2)
    return g, f, h, build_from_tensor(g, np.outer(f, h))


def test_marginal_of_product():
    g, f, h, state = product_2d()
    lam = marginal_weight(state, SPLIT, Side.S)
    expected = h ** 2 / np.sum(g[1].weights * h ** 2)
    np.testing.assert_allclose(lam, expected, atol=1e-14)


def test_marginal_of_uniform_tensor():
    g = [make_uniform_grid(0, 1, 2)] * 2
    state = build_from_tensor(g, np.ones((2, 2)))
    np.testing.assert_allclose(marginal_weight(state, SPLIT, Side.S), [1.0, 1.0])
    np.testing.assert_allclose(marginal_weight(state, SPLIT, Side.R), [1.0, 1.0])


def test_marginal_of_correlated_gaussian():
    state = gaussian(REFERENCE_A, count=64)
    y = state.modes[1].points
    # |c|^2 ~ exp(-(x - 0.8y)^2 - 0.36 y^2): integrating out x leaves a Gaussian in y
    analytic = np.sqrt(0.36 / np.pi) * np.exp(-0.36 * y ** 2)
    lam = marginal_weight(state, SPLIT, Side.S)
    assert np.max(np.abs(lam - analytic)) < 1e-4


def test_conditional_of_product_is_constant():
    g, f, h, state = product_2d()
    target = f / np.sqrt(np.sum(g[0].weights * f ** 2))
    lam = marginal_weight(state, SPLIT, Side.S)
    for node in np.flatnonzero(lam >= 1e-12):
        np.testing.assert_allclose(conditional_state(state, SPLIT, Side.S, node), target, atol=1e-13)


def test_conditional_of_basis_tensor():
    g = [make_uniform_grid(0, 1, 4)] * 2
    raw = np.zeros((4, 4))
    raw[1, 2] = 1.0
    state = build_from_tensor(g, raw)
    v = conditional_state(state, SPLIT, Side.S, 2)
    np.testing.assert_allclose(v, [0, 2.0, 0, 0])  # unit weighted norm with w = 1/4
    with pytest.raises(UndefinedConditionalError):
        conditional_state(state, SPLIT, Side.S, 0)


def test_conditionals_of_correlated_gaussian_differ():
    state = gaussian(REFERENCE_A, count=32)
    w = state.modes[0].weights
    a = conditional_state(state, SPLIT, Side.S, 12)
    b = conditional_state(state, SPLIT, Side.S, 19)
    assert abs(np.sum(w * a * b.conj())) < 1 - 1e-6


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), counts=st.lists(st.integers(2, 5), min_size=2, max_size=3))
def test_pair_normalization(seed, counts):
    state = random_tensor_state(np.random.default_rng(seed), counts)
    for part in enumerate_bipartitions(len(counts)):
        pair = build_crc_pair(state, part)
        for cover in pair:
            assert cover.total_weight() == pytest.approx(1.0, abs=1e-8)
            assert np.all(cover.lam >= 0)
            norms = np.abs(cover.rows[cover.active_indices]) ** 2 @ cover.row_weights
            np.testing.assert_allclose(norms, 1.0, atol=1e-8)
            np.testing.assert_array_equal(cover.active_mask, cover.lam >= cover.weight_floor)


def test_product_three_mode_rows_identical():
    state = gaussian(np.diag([1.0, 0.7, 1.3]), count=12)
    pair = build_crc_pair(state, Bipartition((1,), (2, 3), 3))
    for cover in pair:
        rows = cover.rows[cover.active_indices]
        assert np.max(np.abs(rows - rows[0])) < 1e-8


def test_correlated_covers_are_spread():
    pair = build_crc_pair(gaussian(REFERENCE_A, count=32), SPLIT)
    for cover in pair:
        idx = cover.active_indices
        assert idx.size >= 2
        rows = cover.rows[idx]
        ov = np.abs(rows.conj() @ (cover.row_weights * rows[len(idx) // 2]))
        assert ov.min() < 1


def test_all_inactive():
    with pytest.raises(AllInactiveError):
        build_crc_pair(gaussian(REFERENCE_A, count=8), SPLIT, weight_floor=1e3)


def test_hs_distance_examples():
    g = [make_uniform_grid(0, 1, 2)]
    v = np.array([np.sqrt(2), 0])
    w = np.array([0, np.sqrt(2)])
    assert hs_distance(v, v, g) == 0
    assert hs_distance(v, w, g) == pytest.approx(np.sqrt(2), abs=1e-15)
    # |<v,u>| = 1/2
    u = np.array([np.sqrt(2) * 0.5, np.sqrt(2) * np.sqrt(0.75) * 1j])
    assert hs_distance(v, u, g) == pytest.approx(np.sqrt(1.5), abs=1e-15)
    assert hs_distance(v, u, g) == pytest.approx(1.224744871, abs=1e-9)


def test_hs_distance_requires_normalized():
    g = [make_uniform_grid(0, 1, 2)]
    with pytest.raises(NotNormalizedError):
        hs_distance([1.0, 0.0], [np.sqrt(2), 0.0], g)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), dim=st.integers(2, 64))
def test_distance_identity_against_frobenius(seed, dim):
    rng = np.random.default_rng(seed)
    g = [make_uniform_grid(-1.0, rng.uniform(0.0, 3.0), dim)]
    w = g[0].weights
    v, u = (rng.normal(size=dim) + 1j * rng.normal(size=dim) for _ in range(2))
    if rng.random() < 0.3:
        u = v * np.exp(1j * 0.7) + 1e-4 * u
    v, u = (x / np.sqrt(np.sum(w * np.abs(x) ** 2)) for x in (v, u))
    d = hs_distance(v, u, g)
    ov = abs(np.sum(w * v * u.conj()))
    assert abs(d ** 2 - (2 - 2 * ov ** 2)) < 1e-10
    assert abs(d ** 2 - hs_distance_direct(v, u, w) ** 2) < 1e-10


def test_distance_matrix_product_and_orthogonal():
    _, _, _, state = product_2d(8)
    for cover in build_crc_pair(state, SPLIT):
        assert np.nanmax(distance_matrix(cover)) < 1e-14
    g = [make_uniform_grid(0, 1, 2)] * 2
    state = build_from_tensor(g, np.eye(2))
    d = distance_matrix(build_cover(state, SPLIT, Side.S))
    np.testing.assert_allclose(d, [[0, np.sqrt(2)], [np.sqrt(2), 0]], atol=1e-15)


def test_distance_matrix_correlated():
    cover = build_cover(gaussian(REFERENCE_A, count=16), SPLIT, Side.S)
    d = distance_matrix(cover)
    np.testing.assert_array_equal(np.diag(d), 0)
    assert np.max(np.abs(d - d.T)) <= 1e-12
    # regression reference: the edge conditionals are nearly orthogonal
    assert np.max(d) > 0.1
    assert np.max(d) == pytest.approx(1.41421, abs=1e-4)


def test_distance_matrix_marks_inactive():
    g = [make_uniform_grid(0, 1, 3)] * 2
    raw = np.zeros((3, 3))
    raw[0, 0] = raw[1, 1] = 1.0
    cover = build_cover(build_from_tensor(g, raw), SPLIT, Side.S)
    d = distance_matrix(cover)
    assert np.isnan(d[2]).all() and np.isnan(d[:, 2]).all()
    assert d[0, 1] == pytest.approx(np.sqrt(2))


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_triangle_inequality(seed):
    state = random_tensor_state(np.random.default_rng(seed), [4, 3, 3])
    for cover in build_crc_pair(state, Bipartition((1,), (2, 3), 3)):
        d = distance_matrix(cover)
        m = d.shape[0]
        for a, b, c in itertools.combinations(range(m), 3):
            assert d[a, c] <= d[a, b] + d[b, c] + 1e-12


def test_centroid_of_product_is_projector():
    g, f, h, state = product_2d()
    cover = build_cover(state, SPLIT, Side.S)
    rho = cover_centroid(state, cover)
    fn = f / np.sqrt(np.sum(g[0].weights * f ** 2))
    np.testing.assert_allclose(rho, np.outer(fn, fn), atol=1e-12)
    spectrum = operator_spectrum(rho, g[0].weights)
    assert spectrum[0] == pytest.approx(1.0) and abs(spectrum[1]) < 1e-12


def test_centroid_of_uniform_tensor_is_rank_one():
    g = [make_uniform_grid(0, 1, 2)] * 2
    state = build_from_tensor(g, np.ones((2, 2)))
    rho = cover_centroid(state, build_cover(state, SPLIT, Side.R))
    np.testing.assert_allclose(operator_spectrum(rho, g[1].weights), [1.0, 0.0], atol=1e-14)


def test_centroid_spectrum_of_correlated_gaussian():
    state = gaussian(REFERENCE_A, count=32)
    sigma = schmidt_oracle(state, SPLIT)
    for cover in build_crc_pair(state, SPLIT):
        rho = cover_centroid(state, cover)
        np.testing.assert_allclose(rho, rho.conj().T, atol=1e-10)
        assert np.sum(cover.row_weights * np.diag(rho).real) == pytest.approx(1.0, abs=1e-8)
        spectrum = operator_spectrum(rho, cover.row_weights)
        np.testing.assert_allclose(spectrum, sigma ** 2, atol=1e-6)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), counts=st.lists(st.integers(2, 6), min_size=2, max_size=3))
def test_centroid_equals_partial_trace(seed, counts):
    state = random_tensor_state(np.random.default_rng(seed), counts)
    for part in enumerate_bipartitions(len(counts)):
        pair = build_crc_pair(state, part)
        rho_r = cover_centroid(state, pair.cover_r_conditioned)
        np.testing.assert_allclose(rho_r, partial_trace(state, part.r0), atol=1e-8)
        rho_s = cover_centroid(state, pair.cover_s_conditioned)
        np.testing.assert_allclose(rho_s, partial_trace(state, part.s0), atol=1e-8)
