import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wpent import ParameterError
from wpent.lattice import (GridSpec, build_grids, commutator_norm, detector_weights,
                           isolated_mode_epsilon, isolated_mode_weights, phase_matrix,
                           region_mask, to_momentum, to_position)


def overlap(kg, rg):
    ph = phase_matrix(kg, rg.points)
    return ph @ ph.conj().T / len(rg)


def test_1d_eight_points_integer_k_and_exact_orthogonality():
    rg, kg = build_grids(GridSpec(1, 2 * np.pi, 8))
    np.testing.assert_allclose(kg.kvecs[:, 0], np.arange(-4, 4))
    np.testing.assert_allclose(overlap(kg, rg), np.eye(8), atol=1e-14)


def test_1d_sixteen_points_offdiagonal_below_1e12():
    rg, kg = build_grids(GridSpec(1, 3.7, 16))
    off = overlap(kg, rg) - np.eye(16)
    assert np.max(np.abs(off)) < 1e-12


def test_3d_four_per_axis_zero_mode():
    rg, kg = build_grids(GridSpec(3, [1.0, 2.0, 3.0], 4))
    assert len(rg) == 64 and len(kg) == 64
    zero = np.flatnonzero(np.all(kg.kvecs == 0, axis=1))[0]
    assert np.sum(phase_matrix(kg, rg.points)[zero]) / len(rg) == 1.0


@pytest.mark.parametrize("kw", [dict(extent=0.0), dict(extent=-1.0), dict(points_per_axis=1),
                                dict(dimension=2), dict(points_per_axis=2.5)])
def test_invalid_grid_specs(kw):
    args = dict(dimension=1, extent=1.0, points_per_axis=8) | kw
    with pytest.raises(ParameterError):
        GridSpec(**args)


@given(st.sampled_from([1, 3]), st.floats(0.1, 50.0), st.integers(2, 9))
def test_cell_volume_times_points_is_volume(d, ext, n):
    spec = GridSpec(d, ext, n)
    assert abs(spec.cell_volume * spec.n_points - spec.volume) <= 1e-12 * spec.volume


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 24), st.integers(0, 2 ** 32 - 1))
def test_fourier_round_trip(n, seed):
    rg, kg = build_grids(GridSpec(1, 5.0, n))
    rng = np.random.default_rng(seed)
    a = rng.normal(size=n) + 1j * rng.normal(size=n)
    back = to_momentum(kg, rg, to_position(kg, rg, a))
    assert np.max(np.abs(back - a)) <= 1e-12 * np.max(np.abs(a))


@pytest.mark.parametrize("d,n", [(1, 8), (1, 9), (3, 4)])
def test_k_grid_symmetric(d, n):
    _, kg = build_grids(GridSpec(d, 2.0, n))
    assert kg.is_symmetric()


def test_full_space_weights_are_zero_mode_delta():
    rg, kg = build_grids(GridSpec(3, 1.0, 4))
    w = detector_weights(kg, rg, "full")
    expected = np.all(kg.kvecs == 0, axis=1).astype(float)
    np.testing.assert_allclose(w.values, expected, atol=1e-14)
    assert commutator_norm(w) == pytest.approx(1.0, abs=1e-14)


def test_origin_cell_weights():
    rg, kg = build_grids(GridSpec(1, 1.0, 16))
    np.testing.assert_allclose(detector_weights(kg, rg, "origin", "none").values, 1.0)
    np.testing.assert_allclose(detector_weights(kg, rg, "origin").values, 1 / 16)


def test_half_space_matches_direct_double_sum():
    rg, kg = build_grids(GridSpec(1, 2.0, 16))
    w = detector_weights(kg, rg, "half")
    direct = np.zeros(len(kg), complex)
    region = [r for r in rg.points[:, 0] if r >= 0]
    for i, k in enumerate(kg.kvecs[:, 0]):
        for r in region:
            direct[i] += np.exp(1j * k * r)
    direct /= len(rg)
    np.testing.assert_allclose(w.values, direct, atol=1e-14)
    norm = commutator_norm(w)
    double = sum(abs(direct[i]) ** 2 for i in range(len(kg)))
    assert norm == pytest.approx(double, rel=1e-12)
    assert 0 < norm <= 1


def test_isolated_mode_norm_equals_eps():
    spec = GridSpec(3, 2.0, 4)
    eps = isolated_mode_epsilon(spec)
    assert eps == pytest.approx(1 / 64)
    w = isolated_mode_weights(64, [5], eps)
    assert commutator_norm(w) == pytest.approx(eps)


@pytest.mark.parametrize("eps", [0.0, -0.1, 1.5])
def test_isolated_mode_eps_range(eps):
    with pytest.raises(ParameterError):
        isolated_mode_weights(4, [0], eps)


def test_empty_region_rejected():
    rg, kg = build_grids(GridSpec(1, 1.0, 8))
    with pytest.raises(ParameterError):
        detector_weights(kg, rg, np.zeros(8, bool))
    with pytest.raises(ParameterError):
        region_mask(rg, "nowhere")


def test_weights_depend_only_on_region_and_scale_quadratically():
    rg, kg = build_grids(GridSpec(1, 1.0, 8))
    w1 = detector_weights(kg, rg, lambda p: p[:, 0] > 0.1)
    w2 = detector_weights(kg, rg, lambda p: p[:, 0] > 0.1)
    np.testing.assert_array_equal(w1.values, w2.values)
    assert commutator_norm(w1.scaled(2.0)) == pytest.approx(4 * commutator_norm(w1))
