import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wpent import GridMismatchError, ParameterError
from wpent import gaussian as G
from wpent import oracle as O
from wpent.lattice import isolated_mode_weights

seeds = st.integers(0, 2 ** 32 - 1)


def test_vacuum_and_validation():
    v = G.vacuum(3)
    np.testing.assert_array_equal(v.cov, 0.5 * np.eye(6))
    assert v.is_physical() and v.purity() == pytest.approx(1.0)
    with pytest.raises(ParameterError):
        G.CovarianceState(np.zeros(2), np.array([[0.5, 0.1], [0.0, 0.5]]))
    assert not G.CovarianceState(np.zeros(2), 0.1 * np.eye(2)).is_physical()


def test_squeeze_r0_is_identity():
    s = G.random_state(np.random.default_rng(0), 2, max_displacement=1.0)
    t = G.squeeze_mode(s, 1, 0.0)
    np.testing.assert_allclose(t.cov, s.cov, atol=1e-15)


def test_squeeze_r1_moments():
    _, n, m = G.complex_moments(G.squeeze_mode(G.vacuum(1), 0, 1.0))
    assert n[0, 0].real == pytest.approx(np.sinh(1) ** 2, rel=1e-14)
    assert m[0, 0] == pytest.approx(-np.sinh(1) * np.cosh(1), rel=1e-14)
    assert np.sinh(1) ** 2 == pytest.approx(1.3811, abs=1e-4)


def test_squeeze_angle_rotates_the_anomalous_moment():
    _, _, m = G.complex_moments(G.squeeze_mode(G.vacuum(1), 0, 0.7, theta=0.9))
    assert m[0, 0] == pytest.approx(-np.sinh(0.7) * np.cosh(0.7) * np.exp(0.9j), rel=1e-13)


def test_squeeze_mode_out_of_range():
    with pytest.raises(ParameterError):
        G.squeeze_mode(G.vacuum(2), 2, 0.3)


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_transforms_keep_pure_states_pure(seed):
    rng = np.random.default_rng(seed)
    s = G.vacuum(3)
    s = G.squeeze_mode(s, 0, rng.uniform(0, 1.5), rng.uniform(0, 6))
    s = G.two_mode_squeeze(s, G.PairSqueezing(1, 2, rng.uniform(0, 1.5), rng.uniform(0, 6)))
    s = G.beam_splitter(s, (0, 2), rng.uniform())
    s = G.phase_rotate(s, 1, rng.uniform(0, 6))
    assert abs(s.purity() - 1) < 1e-9
    np.testing.assert_allclose(s.symplectic_eigenvalues(), 0.5, atol=1e-9)


def test_two_mode_squeeze_moments():
    s = G.two_mode_squeeze(G.vacuum(2), G.PairSqueezing(0, 1, 0.5))
    _, n, m = G.complex_moments(s)
    assert m[0, 1] == pytest.approx(np.sinh(0.5) * np.cosh(0.5), rel=1e-14)
    assert m[0, 1] == pytest.approx(0.5876, abs=1e-4)
    np.testing.assert_allclose(np.diag(n).real, np.sinh(0.5) ** 2)
    np.testing.assert_allclose(np.diag(m), 0, atol=1e-15)


def test_two_mode_squeeze_r0_and_validation():
    s = G.random_state(np.random.default_rng(1), 2)
    np.testing.assert_allclose(G.two_mode_squeeze(s, G.PairSqueezing(0, 1, 0.0)).cov, s.cov)
    with pytest.raises(ParameterError):
        G.PairSqueezing(1, 1, 0.2)
    with pytest.raises(ParameterError):
        G.PairSqueezing(0, 1, -0.2)


def test_reduced_two_mode_squeezed_state_is_thermal():
    r = 0.8
    red = G.two_mode_squeeze(G.vacuum(2), G.PairSqueezing(0, 1, r)).reduced(1)
    np.testing.assert_allclose(red.cov, G.thermal(1, np.sinh(r) ** 2).cov, atol=1e-14)


def test_beam_splitter_cases():
    s = G.random_state(np.random.default_rng(2), 2, max_displacement=0.5)
    t = G.beam_splitter(s, (0, 1), 1.0)
    np.testing.assert_allclose(t.cov, s.cov)
    np.testing.assert_allclose(G.beam_splitter(G.vacuum(2), (0, 1), 0.3).cov, 0.5 * np.eye(4),
                               atol=1e-15)
    sq = G.squeeze_mode(G.vacuum(2), 0, 0.6)
    out = G.beam_splitter(sq, (0, 1), 0.5)
    assert np.max(np.abs(out.cov[:2, 2:])) > 0.1
    for tau in (-0.1, 1.1):
        with pytest.raises(ParameterError):
            G.beam_splitter(s, (0, 1), tau)


@settings(max_examples=30, deadline=None)
@given(seeds, st.floats(0, 1))
def test_beam_splitter_conserves_photon_number(seed, tau):
    s = G.random_state(np.random.default_rng(seed), 3, max_displacement=1.0)
    before = np.trace(G.complex_moments(s)[1]).real
    after = np.trace(G.complex_moments(G.beam_splitter(s, (2, 0), tau))[1]).real
    assert abs(before - after) <= 1e-12 * max(1.0, before)


def test_collective_moments_vacuum():
    m = G.collective_moments(G.vacuum(4), np.arange(4) + 1j)
    assert m == (0, 0, 0)


def test_collective_moments_two_squeezed_isolated():
    eps, r1, r2 = 0.01, 0.4, 0.9
    s = G.squeezed_profile_state(G.SqueezingProfile([r1, 0.0, r2]))
    w = isolated_mode_weights(3, [0, 2], eps)
    m = G.collective_moments(s, w)
    S1, C1, S2, C2 = np.sinh(r1), np.cosh(r1), np.sinh(r2), np.cosh(r2)
    assert m.a2 == pytest.approx(-eps * (S1 * C1 + S2 * C2), rel=1e-13)
    assert m.adag_a == pytest.approx(eps * (S1 ** 2 + S2 ** 2), rel=1e-13)


def test_collective_moments_entangled_pair():
    eps, r = 0.02, 0.7
    s = G.two_mode_squeeze(G.vacuum(2), G.PairSqueezing(0, 1, r))
    m = G.collective_moments(s, isolated_mode_weights(2, [0, 1], eps))
    assert m.a2 == pytest.approx(2 * eps * np.cosh(r) * np.sinh(r), rel=1e-13)
    assert m.adag_a == pytest.approx(2 * eps * np.sinh(r) ** 2, rel=1e-13)


def test_collective_moments_support_mismatch():
    with pytest.raises(GridMismatchError):
        G.collective_moments(G.vacuum(3), np.ones(2))


@settings(max_examples=30, deadline=None)
@given(seeds, st.floats(0.1, 5.0))
def test_collective_moments_quadratic_in_weights_and_linear_in_cov(seed, scale):
    rng = np.random.default_rng(seed)
    s = G.random_state(rng, 3)
    w = rng.normal(size=3) + 1j * rng.normal(size=3)
    m1, m2 = G.collective_moments(s, w), G.collective_moments(s, scale * w)
    assert m2.a2 == pytest.approx(scale ** 2 * m1.a2, rel=1e-12)
    assert m2.adag_a == pytest.approx(scale ** 2 * m1.adag_a, rel=1e-12)
    t = G.random_state(rng, 3)
    mix = G.CovarianceState(np.zeros(6), 0.5 * (s.cov + t.cov))
    ms, mt, mm = (G.collective_moments(x, w) for x in (s, t, mix))
    assert mm.a2 == pytest.approx(0.5 * (ms.a2 + mt.a2), rel=1e-12, abs=1e-14)


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_collective_moments_match_bruteforce(seed):
    rng = np.random.default_rng(seed)
    s = G.random_state(rng, 3, max_displacement=1.0)
    w = rng.normal(size=3) + 1j * rng.normal(size=3)
    m, b = G.collective_moments(s, w), O.moments_bruteforce(s, w)
    assert m.mean == pytest.approx(b.mean, rel=1e-12, abs=1e-14)
    assert m.adag_a == pytest.approx(b.adag_a, rel=1e-12)
    assert m.a2 == pytest.approx(b.a2, rel=1e-12, abs=1e-14)


@settings(max_examples=15, deadline=None)
@given(seeds)
def test_hz_moments_match_bruteforce_wick(seed):
    rng = np.random.default_rng(seed)
    s = G.random_state(rng, 3, max_displacement=1.0)
    w1 = rng.normal(size=3) + 1j * rng.normal(size=3)
    w2 = rng.normal(size=3) + 1j * rng.normal(size=3)
    m4, m21 = G.hz_moments(s, w1, w2)
    b = O.moments_bruteforce(s, w1, w2)
    assert m4 == pytest.approx(b.m4, rel=1e-10)
    assert m21 == pytest.approx(b.m21, rel=1e-10, abs=1e-13)


def test_hz_moments_match_truncated_fock():
    F = O.FockSpace(2, 12)
    psi = F.two_mode_squeeze(F.displace(F.vacuum(), 0, 0.3 + 0.2j), 0, 1, 0.25)
    s = G.two_mode_squeeze(G.displace(G.vacuum(2), 0, 0.3 + 0.2j), G.PairSqueezing(0, 1, 0.25))
    f = F.moments(psi, [1, 0], [0, 1])
    m4, m21 = G.hz_moments(s, [1, 0], [0, 1])
    assert m4 == pytest.approx(f.m4, rel=1e-6)
    assert m21 == pytest.approx(f.m21, rel=1e-6)


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_state_from_moments_inverts_complex_moments(seed):
    s = G.random_state(np.random.default_rng(seed), 3, max_displacement=1.0)
    back = G.state_from_moments(*G.complex_moments(s))
    np.testing.assert_allclose(back.cov, s.cov, atol=1e-12)
    np.testing.assert_allclose(back.mean, s.mean, atol=1e-12)


def test_collective_state_for_normalized_weights_is_physical():
    rng = np.random.default_rng(5)
    s = G.random_state(rng, 4)
    w = rng.normal(size=4) + 1j * rng.normal(size=4)
    w /= np.linalg.norm(w)
    c = G.collective_state(s, w)
    assert c.is_physical()
    m = G.collective_moments(s, w)
    ref = G.state_from_moments([m.mean], [[m.adag_a]], [[m.a2]])
    np.testing.assert_allclose(c.cov, ref.cov, atol=1e-12)
