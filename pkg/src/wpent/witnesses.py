"""Entanglement and nonclassicality witnesses evaluated from moments.

Every functional here takes expectation values (or a covariance matrix built
from them), never a state object, so the single-excitation and Gaussian
backends share one implementation of each formula.

Sign conventions: a report's ``flag`` is True when the value lies below its
threshold by more than ``tol`` (0 for the correlation witnesses, 1/2 for
``lambda_sm``). Boundary cases are reported as not witnessed.
"""

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import gaussian as G
from .exceptions import ParameterError
from .singlephoton import SPEED_OF_LIGHT, CavityParams

DEFAULT_TOL = 1e-10

_J2 = np.array([[0.0, 1.0], [-1.0, 0.0]])


@dataclass(frozen=True)
class WitnessReport:
    name: str
    value: float
    flag: bool
    moments: dict = field(default_factory=dict)


@dataclass(frozen=True)
class FourPartition:
    """V = [[A, C], [C^T, B]] for quadratures (X1, P1, X2, P2)."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray

    def __post_init__(self):
        for name in ("A", "B", "C"):
            blk = np.asarray(getattr(self, name), dtype=float)
            if blk.shape != (2, 2):
                raise ParameterError(f"block {name} must be 2x2")
            object.__setattr__(self, name, blk)
        for name in ("A", "B"):
            blk = getattr(self, name)
            if not np.allclose(blk, blk.T, atol=1e-12, rtol=0):
                raise ParameterError(f"diagonal block {name} is not symmetric")

    @classmethod
    def from_matrix(cls, V) -> "FourPartition":
        V = np.asarray(V, dtype=float)
        if V.shape != (4, 4):
            raise ParameterError("expected a 4x4 covariance matrix")
        if not np.allclose(V, V.T, atol=1e-12, rtol=0):
            raise ParameterError("covariance matrix is not symmetric")
        return cls(V[:2, :2], V[2:, 2:], V[:2, 2:])

    @classmethod
    def from_state(cls, s: G.CovarianceState) -> "FourPartition":
        if s.n_modes != 2:
            raise ParameterError("a four-partition needs exactly two modes")
        return cls.from_matrix(s.cov)

    def matrix(self) -> np.ndarray:
        return np.block([[self.A, self.C], [self.C.T, self.B]])


def _negative(name, value, tol, moments, threshold=0.0):
    return WitnessReport(name, float(value), bool(value < threshold - tol), moments)


def lambda_hz(m4, m21, tol=DEFAULT_TOL) -> WitnessReport:
    """<A2^dag A2 A1^dag A1> - |<A2^dag A1>|^2."""
    m4 = float(np.real(m4))
    if m4 < -tol:
        raise ParameterError(f"fourth-order moment must be >= 0, got {m4}")
    return _negative("HZ", m4 - abs(m21) ** 2, tol, {"m4": m4, "m21": complex(m21)})


def lambda_dgcz(V4: FourPartition, alpha=1.0, beta=1.0, tol=DEFAULT_TOL) -> WitnessReport:
    """Var(alpha X1 + beta X2) + Var(alpha P1 - beta P2) - (alpha^2 + beta^2)."""
    if alpha == 0 and beta == 0:
        raise ParameterError("alpha and beta cannot both vanish")
    V = V4.matrix()
    var_u = alpha ** 2 * V[0, 0] + beta ** 2 * V[2, 2] + 2 * alpha * beta * V[0, 2]
    var_v = alpha ** 2 * V[1, 1] + beta ** 2 * V[3, 3] - 2 * alpha * beta * V[1, 3]
    value = var_u + var_v - (alpha ** 2 + beta ** 2)
    return _negative("DGCZ", value, tol, {"var_u": var_u, "var_v": var_v})


def lambda_sph(V4: FourPartition, tol=DEFAULT_TOL) -> WitnessReport:
    A, B, C = V4.A, V4.B, V4.C
    dA, dB, dC = np.linalg.det(A), np.linalg.det(B), np.linalg.det(C)
    tr = np.trace(A @ _J2 @ C @ _J2 @ B @ _J2 @ C.T @ _J2)
    value = dA * dB + (0.25 - abs(dC)) ** 2 - tr - 0.25 * (dA + dB)
    mom = {"detA": dA, "detB": dB, "detC": dC, "trace": tr}
    return _negative("SPH", float(value), tol, {k: float(v) for k, v in mom.items()})


def mu_hz(m_ssaa, m_sa, tol=DEFAULT_TOL) -> WitnessReport:
    """<S+ S- A^dag A> - |<S+ A>|^2."""
    m_ssaa = float(np.real(m_ssaa))
    if m_ssaa < -tol:
        raise ParameterError(f"<S+S-A^dag A> must be >= 0, got {m_ssaa}")
    return _negative("muHZ", m_ssaa - abs(m_sa) ** 2, tol,
                     {"m_ssaa": m_ssaa, "m_sa": complex(m_sa)})


class SpinMoments(NamedTuple):
    s_plus: complex  # <S+>
    s_plus_s_minus: float  # <S+ S->
    s_minus_s_plus: float  # <S- S+>


def mu_dgcz_varsum(spin: SpinMoments, field_moments: G.CollectiveMoments, s_plus_a=0j) -> float:
    """Var(Sx + X) + Var(Sy - P) for a spin ensemble and a normalized field mode.

    ``s_plus_a`` is the raw <S+ A>. No separability threshold is applied.
    """
    spin_var = 0.5 * (spin.s_plus_s_minus + spin.s_minus_s_plus) - abs(spin.s_plus) ** 2
    n_c = field_moments.adag_a - abs(field_moments.mean) ** 2
    cross = s_plus_a - spin.s_plus * field_moments.mean
    return float(spin_var + 1.0 + 2.0 * n_c + 2.0 * np.sqrt(2.0) * np.real(cross))


def collective_covariance(moments: G.CollectiveMoments) -> np.ndarray:
    """2x2 (X, P) covariance of a normalized collective mode."""
    return G.state_from_moments([moments.mean], [[moments.adag_a]], [[moments.a2]]).cov


def lambda_sm(moments: G.CollectiveMoments, tol=DEFAULT_TOL) -> WitnessReport:
    """1/2 + <dA^dag dA> - |<dA^2>| with displacement removed."""
    if moments.adag_a < -tol:
        raise ParameterError(f"<A^dag A> must be >= 0, got {moments.adag_a}")
    n_c = moments.adag_a - abs(moments.mean) ** 2
    m_c = moments.a2 - moments.mean ** 2
    value = 0.5 + n_c - abs(m_c)
    return _negative("lambda_sm", value, tol, moments._asdict(), threshold=0.5)


def bs_nonclassicality(s: G.CovarianceState, w, tol=DEFAULT_TOL) -> WitnessReport:
    """Mix the collective mode with vacuum on a 50:50 splitter and test the outputs."""
    mom = G.collective_moments(s, w)
    coll = G.state_from_moments([mom.mean], [[mom.adag_a]], [[mom.a2]])
    out = G.beam_splitter(G.product(coll, G.vacuum(1)), (0, 1), 0.5)
    rep = lambda_sph(FourPartition.from_state(out), tol)
    return WitnessReport("BS-SPH", rep.value, rep.flag, {**rep.moments, **mom._asdict()})


def two_mode_partition(n, m=None, amean=None) -> FourPartition:
    """Four-partition of two normalized collective modes from their moments."""
    n = np.asarray(n, dtype=complex)
    m = np.zeros((2, 2), complex) if m is None else m
    amean = np.zeros(2, complex) if amean is None else amean
    return FourPartition.from_state(G.state_from_moments(amean, n, m))


def _efield_shape(p1, p2, z1, z2, t):
    z1, z2, t = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (z1, z2, t)))
    if np.any(z1 < 0) or np.any(z2 < 0) or np.any(t < 0):
        raise ParameterError("z1, z2 and t must be >= 0")
    ct = SPEED_OF_LIGHT * t
    env = np.exp(-p1.gamma * np.abs(z1 - ct) / (2 * SPEED_OF_LIGHT)) * np.exp(
        -p2.gamma * np.abs(z2 - ct) / (2 * SPEED_OF_LIGHT))
    inside = (ct >= z1) & (ct >= z2)
    return np.where(inside, -env, 0.0)


def efield_prefactor(p1: CavityParams, p2: CavityParams, volume1=1.0, volume2=1.0) -> float:
    """4 gamma1 gamma2 sqrt(K1 K2 / (V1 V2)), with g^2 D = gamma / pi."""
    if volume1 <= 0 or volume2 <= 0:
        raise ParameterError("quantization volumes must be positive")
    return 4 * p1.gamma * p2.gamma * np.sqrt(p1.k_res * p2.k_res / (volume1 * volume2))


def efield_hz(p1: CavityParams, p2: CavityParams, z1, z2, t, volume1=1.0, volume2=1.0,
              normalized=False):
    """Field-level HZ correlation of two cavities emitting along z.

    Zero outside either light cone (Theta(0) = 1). With ``normalized=True``
    the prefactor is divided out, so the value lies in [-1, 0] and reaches
    -1 on the light cones.
    """
    shape = _efield_shape(p1, p2, z1, z2, t)
    if not normalized:
        shape = efield_prefactor(p1, p2, volume1, volume2) * shape
    return shape[()] if shape.ndim == 0 else shape
