import numpy as np
import pytest
from scipy.optimize import minimize_scalar

from wpent import ParameterError
from wpent import gaussian as G
from wpent import oracle as O
from wpent import scenarios as Sc
from wpent import singlephoton as S
from wpent.lattice import GridSpec, build_grids, radial_weights

ATOM = S.AtomParams(1.0, 0.01, 0.05)


def test_time_series_validation():
    with pytest.raises(ParameterError):
        Sc.TimeSeries(np.array([0.0, 0.0]), {})
    with pytest.raises(ParameterError):
        Sc.TimeSeries(np.array([0.0, 1.0]), {"x": np.zeros(3)})
    with pytest.raises(ParameterError):
        Sc.default_time_grid(0.01, n_points=1)


def test_two_cavity_columns_and_first_row():
    ts = Sc.run_two_cavity(*Sc.default_cavity_pair())
    assert ts.names == ["gamma_t", "omega_t", "lambda_hz_raw", "lambda_hz_scaled",
                        "lambda_sph_raw", "lambda_sph_scaled"]
    assert ts.times.size == 2000 and ts["gamma_t"][-1] == pytest.approx(10.0)
    assert all(ts[k][0] == 0.0 for k in ts.names)
    assert np.all(ts["lambda_hz_raw"] <= 0)


def test_two_cavity_scaled_series_is_coupling_independent():
    p1, p2 = Sc.default_cavity_pair(g=0.05)
    q1, q2 = Sc.default_cavity_pair(g=0.2)
    t = np.linspace(0, 800, 301)
    a = Sc.run_two_cavity(p1, p2, t)["lambda_hz_scaled"]
    b = Sc.run_two_cavity(q1, q2, t)["lambda_hz_scaled"]
    np.testing.assert_allclose(a, b, rtol=1e-10, atol=1e-14)


def test_two_cavity_rejects_unnormalized_pair():
    p = S.CavityParams(1.0, 0.01, 0.05, 1.0)
    with pytest.raises(ParameterError):
        Sc.run_two_cavity(p, p)


def test_two_cavity_hz_matches_collective_oracle():
    p1, p2 = Sc.default_cavity_pair()
    t = 150.0
    rg, kg = build_grids(GridSpec(1, 2.2 * t, 512))
    pair = S.two_cavity_state(p1, p2, t, kg, radial=True)
    w = radial_weights(kg, rg, p1.k_res)
    J1, J2 = S.apply_collective(pair, w, 0), S.apply_collective(pair, w, 1)
    ref = -abs(J1) ** 2 * abs(J2) ** 2
    got = Sc.run_two_cavity(p1, p2, [0.0, t])["lambda_hz_raw"][-1]
    assert got == pytest.approx(ref, rel=3e-3)


def test_spontaneous_minimum_against_independent_search():
    ts = Sc.run_spontaneous(ATOM)
    # locate the minimum of -exp(-gamma t)|J|^2 with J from radial quadrature
    f = lambda t: -np.exp(-ATOM.gamma * t) * abs(O.j_numeric_radial(ATOM, t)) ** 2
    t0 = ts.metadata["argmin_gamma_t"] / ATOM.gamma
    res = minimize_scalar(f, bounds=(t0 - 4.0, t0 + 4.0), method="bounded",
                          options={"xatol": 1e-6})
    closed = lambda t: Sc.run_spontaneous(ATOM, [0.0, t])["mu_hz"][-1]
    assert closed(res.x) == pytest.approx(res.fun, rel=1e-6)
    # a sampled minimum sits at or above the continuous one
    assert res.fun - 1e-9 <= ts.metadata["min_mu_hz"] <= res.fun * (1 - 1e-3)
    assert abs(ts.metadata["argmin_gamma_t"] - ATOM.gamma * res.x) < 15 / 2000
    assert 0.5 < ts.metadata["argmin_gamma_t"] < 2.0


def test_superradiance_single_atom_matches_spontaneous():
    e = S.EnsembleParams(np.zeros((1, 3)), [0, 0, 1.0], ATOM.gamma / 2, 1.0, ATOM.g)
    t = np.linspace(0, 1200, 401)
    sr = Sc.run_superradiance(e, t)
    np.testing.assert_allclose(sr["mu_hz"], sr["mu_hz_printed"], rtol=1e-14)
    np.testing.assert_allclose(sr["mu_hz"], Sc.run_spontaneous(ATOM, t)["mu_hz"], rtol=1e-14)


def test_superradiance_colocated_scaling():
    t = np.linspace(0, 800, 201)
    one = Sc.run_superradiance(Sc.colocated_ensemble(1), t)
    ten = Sc.run_superradiance(Sc.colocated_ensemble(10), t)
    assert ten.metadata["zeta_sq"] == 10
    np.testing.assert_allclose(ten["mu_hz_printed"], 10 * one["mu_hz_printed"], rtol=1e-13)
    np.testing.assert_allclose(ten["mu_hz"], 100 * one["mu_hz"], rtol=1e-13)


def test_superradiance_derived_column_matches_sparse_state():
    e = Sc.random_ensemble(4, seed=3, side_wavelengths=2.0)
    t = 1 / (2 * e.gamma_n)
    atom = e.equivalent_atom()
    rg, kg = build_grids(GridSpec(1, 2.2 * t, 1024))
    zeta = S.coherence_zeta(e)
    # source amplitudes beta e^{ik0.r_j} / sqrt(N), field in the collective emission shape
    src = np.exp(-e.gamma_n * t) * np.exp(1j * e.positions @ e.k0) / np.sqrt(e.n_atoms)
    field = S.cavity_amplitudes(S.CavityParams(atom.omega_eg, atom.gamma, atom.g), t, kg,
                                radial=True).reservoir[0] * zeta
    _, m_sa = O.single_excitation_moments(src, field, None,
                                          radial_weights(kg, rg, atom.k_res).values, spin=True)
    mu_oracle = -abs(m_sa) ** 2
    got = Sc.run_superradiance(e, [0.0, t])["mu_hz"][-1]
    assert got == pytest.approx(mu_oracle, rel=2e-3)


def test_superradiance_minimum_moves_earlier_with_rate():
    argmins = []
    for gn in (0.005, 0.01, 0.02):
        e = Sc.colocated_ensemble(5, gamma_n=gn)
        ts = Sc.run_superradiance(e, np.linspace(0, 8 / gn, 4000))
        argmins.append(ts.times[np.argmin(ts["mu_hz"])])
    assert argmins[0] > argmins[1] > argmins[2]


def test_wp_nonclassicality_unsqueezed_is_classical():
    rep = Sc.run_wp_nonclassicality(G.SqueezingProfile([0.0, 0.0, 0.0]))
    assert rep["lambda_sm"].value == 0.5 and not rep["lambda_sm"].flag
    assert not rep["bs"].flag


def test_wp_nonclassicality_flat_profile():
    r, M = 0.4, 5
    rep = Sc.run_wp_nonclassicality(G.SqueezingProfile(np.full(M, r)), "profile")
    Sh, Ch = np.sinh(r), np.cosh(r)
    assert rep["lambda_sm"].value == pytest.approx(0.5 + M * (Sh ** 2 - Sh * Ch), rel=1e-12)


def test_wp_nonclassicality_pair_value():
    rep = Sc.run_wp_nonclassicality(G.PairSqueezing(0, 1, 1.0), eps=0.01)
    assert rep["lambda_sm"].value == pytest.approx(0.49135, abs=1e-5)
    assert rep["lambda_sm"].flag and rep["bs"].flag
    with pytest.raises(ParameterError):
        Sc.run_wp_nonclassicality(G.PairSqueezing(0, 1, 1.0), "profile")
    with pytest.raises(TypeError):
        Sc.run_wp_nonclassicality([0.1, 0.2])


def test_efield_map_rows():
    p1, p2 = Sc.default_cavity_pair()
    m = Sc.run_efield_onset(p1, p2, [0.0, 10.0], [0.0, 5.0, 20.0])
    rows = m.rows()
    assert rows.shape == (12, 5)
    assert np.all(np.diff(rows[:, 0]) >= 0)
    zero = rows[:, 0] < np.maximum(rows[:, 1], rows[:, 2])
    assert np.all(rows[zero, 3] == 0) and np.all(rows[~zero, 3] < 0)
    assert np.all((rows[:, 4] >= -1) & (rows[:, 4] <= 0))
