"""Single-excitation emission: cavities, one atom, and a timed-Dicke ensemble.

All amplitudes follow the interaction-picture Wigner-Weisskopf solution

    d_k(t) = g b0 (1 - exp(i (w_k - w0) t - rate t / 2)) / ((w_k - w0) + i rate / 2)

for an emitter of frequency ``w0`` and energy decay rate ``rate`` (cavity and
atom use the same sign convention). The collective integral of the emitted
wavepacket is

    J(t) = (2 b0 K g / c) (1 - e^x + x e^x) / alpha^2,   x = alpha c t,
    alpha c = -(i w0 + rate / 2),

which does not depend on the quantization volume.
"""

from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .exceptions import GridMismatchError, ParameterError
from .lattice import SPEED_OF_LIGHT, KGrid, ModeWeights


def _check_times(t):
    t = np.asarray(t, dtype=float)
    if np.any(~np.isfinite(t)) or np.any(t < 0):
        raise ParameterError("time must be finite and non-negative")
    return t


@dataclass(frozen=True)
class CavityParams:
    """One leaky cavity: resonance, energy damping, coupling at resonance, a_i(0)."""

    omega: float
    gamma: float
    g: float
    a0: complex = 1.0

    def __post_init__(self):
        if not (np.isfinite(self.omega) and self.omega > 0):
            raise ParameterError(f"cavity omega must be > 0, got {self.omega}")
        if not (np.isfinite(self.gamma) and self.gamma > 0):
            raise ParameterError(f"cavity gamma must be > 0, got {self.gamma}")
        if not np.isfinite(self.g):
            raise ParameterError("cavity coupling g must be finite")

    @property
    def k_res(self):
        return self.omega / SPEED_OF_LIGHT

    @property
    def alpha(self):
        return -(1j * self.omega + self.gamma / 2) / SPEED_OF_LIGHT


@dataclass(frozen=True)
class AtomParams:
    """Two-level atom initially excited; ``gamma`` is the energy decay rate."""

    omega_eg: float
    gamma: float
    g: float
    r0: tuple = (0.0, 0.0, 0.0)

    def __post_init__(self):
        if not (np.isfinite(self.omega_eg) and self.omega_eg > 0):
            raise ParameterError(f"omega_eg must be > 0, got {self.omega_eg}")
        if not (np.isfinite(self.gamma) and self.gamma > 0):
            raise ParameterError(f"atomic gamma must be > 0, got {self.gamma}")
        if not np.isfinite(self.g):
            raise ParameterError("atomic coupling g must be finite")

    @property
    def k_res(self):
        return self.omega_eg / SPEED_OF_LIGHT

    @property
    def alpha(self):
        return -(1j * self.omega_eg + self.gamma / 2) / SPEED_OF_LIGHT


@dataclass(frozen=True)
class EnsembleParams:
    """N atoms in a timed-Dicke state exp(i k0.r_j) / sqrt(N).

    ``gamma_n`` is the collective amplitude decay rate: each beta_j decays as
    exp(-gamma_n t), i.e. it plays the role of Gamma/2 of a single atom.
    """

    positions: np.ndarray
    k0: np.ndarray
    gamma_n: float
    omega_eg: float
    g: float

    def __post_init__(self):
        pos = np.atleast_2d(np.asarray(self.positions, dtype=float))
        k0 = np.asarray(self.k0, dtype=float).ravel()
        if pos.shape[0] < 1 or pos.shape[1] != k0.size:
            raise ParameterError("positions must be (N, d) with N >= 1 and d = len(k0)")
        if not (np.isfinite(self.gamma_n) and self.gamma_n > 0):
            raise ParameterError(f"gamma_n must be > 0, got {self.gamma_n}")
        if not (np.isfinite(self.omega_eg) and self.omega_eg > 0):
            raise ParameterError(f"omega_eg must be > 0, got {self.omega_eg}")
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "k0", k0)

    @property
    def n_atoms(self):
        return self.positions.shape[0]

    def equivalent_atom(self) -> AtomParams:
        """Single atom whose Gamma/2 equals gamma_n."""
        return AtomParams(self.omega_eg, 2 * self.gamma_n, self.g)


Emitter = Union[CavityParams, AtomParams]


def _emitter(p: Emitter):
    """(b0, frequency, energy rate) of an emitter."""
    if isinstance(p, CavityParams):
        return complex(p.a0), p.omega, p.gamma
    if isinstance(p, AtomParams):
        return 1.0 + 0j, p.omega_eg, p.gamma
    raise TypeError(f"expected CavityParams or AtomParams, got {type(p).__name__}")


@dataclass(frozen=True)
class SingleExcitationState:
    """Snapshot of a one-excitation state at time ``t``.

    ``source`` holds the emitter amplitudes (b_i, beta or beta_j) and
    ``reservoir`` one row of mode amplitudes per reservoir on ``kgrid``.
    """

    source: np.ndarray
    reservoir: np.ndarray
    t: float
    kgrid: KGrid = field(repr=False, default=None)

    def __post_init__(self):
        object.__setattr__(self, "source", np.atleast_1d(np.asarray(self.source, dtype=complex)))
        object.__setattr__(self, "reservoir", np.atleast_2d(np.asarray(self.reservoir, dtype=complex)))

    def norm(self, mode_density=1.0) -> float:
        """sum |source|^2 + sum_k mode_density |d_k|^2."""
        res = np.sum(np.asarray(mode_density) * np.abs(self.reservoir) ** 2)
        return float(np.sum(np.abs(self.source) ** 2) + res)


def mode_amplitude(p: Emitter, omega_k, t):
    """Wigner-Weisskopf reservoir amplitude d(omega_k, t) (no spatial phase)."""
    b0, w0, rate = _emitter(p)
    t = _check_times(t)
    det = np.asarray(omega_k, dtype=float) - w0
    den = det + 0.5j * rate
    return p.g * b0 * -np.expm1(1j * den * t) / den


def _mode_frequencies(kgrid: KGrid, radial: bool):
    if radial:
        if kgrid.spec.dimension != 1:
            raise ParameterError("radial dispersion needs a 1-D k-grid")
        return SPEED_OF_LIGHT * kgrid.kvecs[:, 0]
    return SPEED_OF_LIGHT * kgrid.norms


def cavity_amplitudes(p: CavityParams, t: float, kgrid: KGrid, radial=False) -> SingleExcitationState:
    """b(t) = exp(-gamma t/2) a(0) and d_k(t) on every grid mode.

    With ``radial=True`` the 1-D grid is read as a signed radial wavenumber
    with omega_k = c k (outgoing-wave, pole-approximated reduction).
    """
    t = float(_check_times(t))
    b = np.exp(-p.gamma * t / 2) * p.a0
    d = mode_amplitude(p, _mode_frequencies(kgrid, radial), t)
    return SingleExcitationState([b], d, t, kgrid)


def two_cavity_state(p1: CavityParams, p2: CavityParams, t: float, kgrid: KGrid,
                     radial=False) -> SingleExcitationState:
    """Both cavities and their (independent) reservoirs on a shared grid."""
    validate_pair(p1, p2)
    s1 = cavity_amplitudes(p1, t, kgrid, radial)
    s2 = cavity_amplitudes(p2, t, kgrid, radial)
    return SingleExcitationState(
        np.concatenate([s1.source, s2.source]),
        np.vstack([s1.reservoir, s2.reservoir]),
        s1.t, kgrid,
    )


def validate_pair(p1: CavityParams, p2: CavityParams, atol=1e-9):
    tot = abs(p1.a0) ** 2 + abs(p2.a0) ** 2
    if abs(tot - 1.0) > atol:
        raise ParameterError(f"|a1(0)|^2 + |a2(0)|^2 must be 1, got {tot}")


def atom_amplitudes(p: AtomParams, t: float, kgrid: KGrid) -> SingleExcitationState:
    """beta(t) = exp(-Gamma t/2) and gamma_k(t) including exp(-i k.r0)."""
    t = float(_check_times(t))
    beta = np.exp(-p.gamma * t / 2)
    r0 = np.zeros(kgrid.spec.dimension)
    r0[: min(3, r0.size)] = np.asarray(p.r0, dtype=float)[: r0.size]
    phase = np.exp(-1j * kgrid.kvecs @ r0)
    d = phase * mode_amplitude(p, _mode_frequencies(kgrid, False), t)
    return SingleExcitationState([beta], d, t, kgrid)


def _profile(p: Emitter, r, t, volume):
    b0, _, _ = _emitter(p)
    r = np.asarray(r, dtype=float)
    t = _check_times(t)
    if np.any(r <= 0):
        raise ParameterError("the radial profile is singular at r = 0; use r > 0")
    if volume <= 0:
        raise ParameterError("volume must be positive")
    amp = volume * b0 * p.k_res * p.g / (2 * np.pi * SPEED_OF_LIGHT * r)
    inside = r <= SPEED_OF_LIGHT * t
    return np.where(inside, amp * np.exp(p.alpha * r), 0.0 + 0j)


def spatial_profile_cavity(p: CavityParams, r, t, volume=1.0):
    """I(r, t) = V b0 K g / (2 pi c r) exp(alpha r) Theta(ct - r)."""
    if not isinstance(p, CavityParams):
        raise TypeError("spatial_profile_cavity needs CavityParams")
    return _profile(p, r, t, volume)


def spatial_profile_atom(p: AtomParams, r_s, t, volume=1.0):
    """Same form as the cavity profile with r_s = |r - r0| and b0 = 1."""
    if not isinstance(p, AtomParams):
        raise TypeError("spatial_profile_atom needs AtomParams")
    return _profile(p, r_s, t, volume)


def _shape(x):
    """1 - e^x + x e^x, with a series near x = 0 to avoid cancellation."""
    x = np.asarray(x, dtype=complex)
    shape = x.shape
    x = np.atleast_1d(x)
    out = 1 - np.exp(x) + x * np.exp(x)
    small = np.abs(x) < 0.1
    if np.any(small):
        xs = x[small]
        term = np.ones_like(xs)
        acc = np.zeros_like(xs)
        fact = 1.0
        for n in range(1, 16):
            fact *= n
            term = term * xs
            if n >= 2:
                acc = acc + term * (n - 1) / fact
        out[small] = acc
    return out.reshape(shape)


def j_closed(p: Emitter, t):
    """Collective integral J(t) of the emitted wavepacket (vectorized in t)."""
    b0, _, _ = _emitter(p)
    t = _check_times(t)
    a = p.alpha
    pref = 2 * b0 * p.k_res * p.g / SPEED_OF_LIGHT
    out = pref * _shape(a * SPEED_OF_LIGHT * t) / a ** 2
    return out[()] if out.ndim == 0 else out


def j_plateau(p: Emitter) -> complex:
    """lim_{t -> inf} J(t) = 2 b0 K g / (c alpha^2)."""
    b0, _, _ = _emitter(p)
    return complex(2 * b0 * p.k_res * p.g / (SPEED_OF_LIGHT * p.alpha ** 2))


def coherence_zeta(e: EnsembleParams) -> complex:
    """zeta = sum_j exp(i k0.r_j) / sqrt(N)."""
    return complex(np.sum(np.exp(1j * e.positions @ e.k0)) / np.sqrt(e.n_atoms))


def coherence_zeta_sq(e: EnsembleParams) -> float:
    """|zeta|^2 computed as |sum_j exp(i k0.r_j)|^2 / N (exact for colocated atoms)."""
    s = np.sum(np.exp(1j * e.positions @ e.k0))
    return float((s.real ** 2 + s.imag ** 2) / e.n_atoms)


def j_superradiant(e: EnsembleParams, t):
    """J_SR(t) = J_A(t; Gamma/2 -> gamma_n) * zeta."""
    return j_closed(e.equivalent_atom(), t) * coherence_zeta(e)


def apply_collective(state: SingleExcitationState, weights: ModeWeights, reservoir=0) -> complex:
    """Vacuum coefficient of A|psi>: sum_k w_k d_k for one reservoir."""
    d = state.reservoir[reservoir]
    if d.size != len(weights):
        raise GridMismatchError(
            f"state has {d.size} reservoir modes but weights cover {len(weights)}"
        )
    return complex(np.dot(weights.values, d))
