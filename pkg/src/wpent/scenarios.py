"""End-to-end runs of the emission and squeezing setups.

Each runner builds moments from the closed-form amplitudes and passes them
through the witness functionals, so the series are exactly what a detector
model on the collective modes would report.
"""

from dataclasses import dataclass, field

import numpy as np

from . import gaussian as G
from . import witnesses as W
from .exceptions import ParameterError
from .lattice import isolated_mode_weights, profile_weights
from .singlephoton import (AtomParams, CavityParams, EnsembleParams, coherence_zeta,
                           coherence_zeta_sq, j_closed, j_plateau, validate_pair)


@dataclass(frozen=True)
class TimeSeries:
    times: np.ndarray
    columns: dict  # name -> 1-D array, same length as times
    units: dict = field(default_factory=dict)  # name -> unit label
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        if t.ndim != 1 or t.size == 0:
            raise ParameterError("a time series needs a non-empty 1-D time grid")
        if np.any(np.diff(t) <= 0):
            raise ParameterError("times must be strictly increasing")
        cols = {k: np.asarray(v) for k, v in self.columns.items()}
        for k, v in cols.items():
            if v.shape != t.shape:
                raise ParameterError(f"column {k!r} has {v.shape[0]} rows, expected {t.size}")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "columns", cols)

    def __getitem__(self, name):
        return self.columns[name]

    @property
    def names(self):
        return list(self.columns)


def default_time_grid(rate, span=10.0, n_points=2000):
    """``n_points`` times covering rate * t in [0, span]."""
    if n_points < 2 or span <= 0:
        raise ParameterError("time grid needs >= 2 points and a positive span")
    return np.linspace(0.0, span / rate, n_points)


def default_cavity_pair(omega=1.0, g=0.05):
    a0 = 1 / np.sqrt(2)
    p = CavityParams(omega, 1e-2 * omega, g, a0)
    return p, CavityParams(omega, 1e-2 * omega, g, a0)


# ------------------------------------------------------------------ two cavities


def run_two_cavity(p1: CavityParams, p2: CavityParams, tgrid=None, tol=W.DEFAULT_TOL) -> TimeSeries:
    """lambda_HZ and lambda_SPH of the two emitted wavepackets.

    ``*_scaled`` columns divide by the product of the t -> infinity values
    |J1|^2 |J2|^2, which removes every coupling prefactor.
    """
    validate_pair(p1, p2)
    t = default_time_grid(p1.gamma) if tgrid is None else np.asarray(tgrid, dtype=float)
    J1, J2 = np.atleast_1d(j_closed(p1, t)), np.atleast_1d(j_closed(p2, t))
    hz = np.empty(t.size)
    sph = np.empty(t.size)
    for i, (a, b) in enumerate(zip(J1, J2)):
        # A1|psi> = J1|0>, A2|psi> = J2|0>; no two-photon component
        hz[i] = W.lambda_hz(0.0, np.conj(b) * a, tol).value
        n = np.array([[abs(a) ** 2, np.conj(a) * b], [np.conj(b) * a, abs(b) ** 2]])
        sph[i] = W.lambda_sph(W.two_mode_partition(n), tol).value
    scale = abs(j_plateau(p1)) ** 2 * abs(j_plateau(p2)) ** 2
    cols = {
        "gamma_t": p1.gamma * t,
        "omega_t": p1.omega * t,
        "lambda_hz_raw": hz,
        "lambda_hz_scaled": hz / scale,
        "lambda_sph_raw": sph,
        "lambda_sph_scaled": sph / scale,
    }
    units = {k: "1" for k in cols}
    meta = {"scenario": "two_cavity", "plateau_scale": scale,
            "params": [_params_dict(p1), _params_dict(p2)]}
    return TimeSeries(t, cols, units, meta)


# ------------------------------------------------------------------ emitters vs ensemble


def run_spontaneous(p: AtomParams, tgrid=None) -> TimeSeries:
    """mu_HZ(t) between an atom and its emitted wavepacket."""
    t = default_time_grid(p.gamma, span=15.0) if tgrid is None else np.asarray(tgrid, dtype=float)
    beta = np.exp(-p.gamma * t / 2)
    J = np.atleast_1d(j_closed(p, t))
    # S- A |psi> = 0 and <S+ A> = conj(beta) J
    mu = np.array([W.mu_hz(0.0, np.conj(b) * j).value for b, j in zip(beta, J)])
    i = int(np.argmin(mu))
    cols = {"gamma_t": p.gamma * t, "omega_t": p.omega_eg * t, "mu_hz": mu}
    meta = {"scenario": "spontaneous", "params": _params_dict(p),
            "min_mu_hz": float(mu[i]), "argmin_gamma_t": float(p.gamma * t[i])}
    return TimeSeries(t, cols, {k: "1" for k in cols}, meta)


def colocated_ensemble(n_atoms, gamma_n=0.01, omega_eg=1.0, g=0.05) -> EnsembleParams:
    k0 = np.array([0.0, 0.0, omega_eg])
    return EnsembleParams(np.zeros((n_atoms, 3)), k0, gamma_n, omega_eg, g)


def random_ensemble(n_atoms, seed, side_wavelengths=10.0, gamma_n=0.01, omega_eg=1.0,
                    g=0.05) -> EnsembleParams:
    """Atoms uniform in a cube of side ``side_wavelengths`` * lambda0."""
    k0 = np.array([0.0, 0.0, omega_eg])
    lam0 = 2 * np.pi / omega_eg
    rng = np.random.default_rng(seed)
    pos = rng.uniform(-0.5, 0.5, size=(n_atoms, 3)) * side_wavelengths * lam0
    return EnsembleParams(pos, k0, gamma_n, omega_eg, g)


def run_superradiance(e: EnsembleParams, tgrid=None, seed=None) -> TimeSeries:
    """mu_HZ between a timed-Dicke ensemble and its emitted wavepacket.

    ``mu_hz`` is evaluated from the state's moments: <S+ A> = conj(exp(-gamma_n t)
    zeta) * J_A zeta, hence a |zeta|^4 factor. ``mu_hz_printed`` is the
    |zeta|^2 form; both coincide when |zeta| = 1.
    """
    t = default_time_grid(2 * e.gamma_n, span=15.0) if tgrid is None else np.asarray(tgrid, float)
    zeta = coherence_zeta(e)
    zsq = coherence_zeta_sq(e)
    JA = np.atleast_1d(j_closed(e.equivalent_atom(), t))
    decay = np.exp(-e.gamma_n * t)
    mu = np.array([W.mu_hz(0.0, np.conj(d * zeta) * j * zeta).value for d, j in zip(decay, JA)])
    printed = -decay ** 2 * zsq * np.abs(JA) ** 2
    i = int(np.argmin(mu))
    cols = {"gamma_t": 2 * e.gamma_n * t, "omega_t": e.omega_eg * t,
            "mu_hz": mu, "mu_hz_printed": printed}
    meta = {"scenario": "superradiance", "n_atoms": e.n_atoms, "zeta_sq": zsq,
            "gamma_n": e.gamma_n, "seed": seed, "min_mu_hz": float(mu[i]),
            "argmin_gamma_t": float(2 * e.gamma_n * t[i])}
    return TimeSeries(t, cols, {k: "1" for k in cols}, meta)


# ------------------------------------------------------------------ wavepacket squeezing


def run_wp_nonclassicality(source, preset="isolated", eps=0.01, tol=W.DEFAULT_TOL) -> dict:
    """lambda_sm and the beam-splitter test for a squeezed or pair-entangled WP.

    Parameters
    ----------
    source : SqueezingProfile or PairSqueezing
    preset : {"isolated", "profile"}
        ``"isolated"`` gives each squeezed (or paired) mode weight sqrt(eps);
        ``"profile"`` gives every mode unit weight (profile input only).
    """
    if isinstance(source, G.PairSqueezing):
        if preset != "isolated":
            raise ParameterError("pair squeezing uses the isolated-mode preset")
        M = max(source.k1, source.k2) + 1
        s = G.two_mode_squeeze(G.vacuum(M), source)
        w = isolated_mode_weights(M, [source.k1, source.k2], eps)
    elif isinstance(source, G.SqueezingProfile):
        M = source.r.size
        s = G.squeezed_profile_state(source)
        if preset == "isolated":
            w = isolated_mode_weights(M, np.arange(M), eps)
        elif preset == "profile":
            w = profile_weights(M)
        else:
            raise ParameterError(f"unknown weights preset {preset!r}")
    else:
        raise TypeError("source must be SqueezingProfile or PairSqueezing")
    mom = G.collective_moments(s, w)
    return {
        "lambda_sm": W.lambda_sm(mom, tol),
        "bs": W.bs_nonclassicality(s, w, tol),
    }


# ------------------------------------------------------------------ field onset


@dataclass(frozen=True)
class EFieldMap:
    z1: np.ndarray
    z2: np.ndarray
    t: np.ndarray
    raw: np.ndarray  # indexed [z1, z2, t]
    normalized: np.ndarray

    def rows(self):
        """Long-format rows (t, z1, z2, raw, normalized), t slowest."""
        Z1, Z2, T = np.meshgrid(self.z1, self.z2, self.t, indexing="ij")
        order = np.lexsort((Z2.ravel(), Z1.ravel(), T.ravel()))
        return np.column_stack([T.ravel(), Z1.ravel(), Z2.ravel(),
                                self.raw.ravel(), self.normalized.ravel()])[order]


def run_efield_onset(p1: CavityParams, p2: CavityParams, z_grid, t_grid,
                     volume1=1.0, volume2=1.0) -> EFieldMap:
    z = np.asarray(z_grid, dtype=float)
    t = np.asarray(t_grid, dtype=float)
    Z1, Z2, T = np.meshgrid(z, z, t, indexing="ij")
    raw = W.efield_hz(p1, p2, Z1, Z2, T, volume1, volume2)
    norm = W.efield_hz(p1, p2, Z1, Z2, T, normalized=True)
    return EFieldMap(z, z, t, raw, norm)


def _params_dict(p):
    out = {}
    for k, v in vars(p).items():
        if isinstance(v, complex) or np.iscomplexobj(v):
            out[k] = [float(np.real(v)), float(np.imag(v))]
        elif isinstance(v, (tuple, list, np.ndarray)):
            out[k] = [float(x) for x in np.ravel(v)]
        else:
            out[k] = float(v)
    return out
