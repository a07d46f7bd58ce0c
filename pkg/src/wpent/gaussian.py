"""Multimode Gaussian states in the (x1, p1, x2, p2, ...) ordering.

Quadratures are x = (a + a^dagger)/sqrt(2), p = i(a^dagger - a)/sqrt(2), so
the vacuum covariance is identity/2. The single-mode squeeze maps
a -> cosh(r) a - exp(i theta) sinh(r) a^dagger; on vacuum with theta = 0 this
gives <a^2> = -sinh(r)cosh(r) and <a^dagger a> = sinh(r)^2.
"""

from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .exceptions import GridMismatchError, ParameterError
from .lattice import ModeWeights


def symplectic_form(n_modes):
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


@dataclass(frozen=True)
class CovarianceState:
    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float).ravel()
        cov = np.asarray(self.cov, dtype=float)
        if mean.size % 2 or cov.shape != (mean.size, mean.size):
            raise ParameterError("mean must have length 2M and cov shape (2M, 2M)")
        if not np.allclose(cov, cov.T, atol=1e-12, rtol=0):
            raise ParameterError("covariance matrix is not symmetric")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", 0.5 * (cov + cov.T))

    @property
    def n_modes(self):
        return self.mean.size // 2

    def symplectic_eigenvalues(self):
        ev = np.abs(np.linalg.eigvals(1j * symplectic_form(self.n_modes) @ self.cov))
        return np.sort(ev)[::2]

    def is_physical(self, tol=1e-9):
        return bool(np.all(self.symplectic_eigenvalues() >= 0.5 - tol))

    def purity(self):
        """1 / (2^M sqrt(det cov)); equals 1 for pure states."""
        return float(1.0 / (2 ** self.n_modes * np.sqrt(np.linalg.det(self.cov))))

    def reduced(self, modes):
        idx = np.ravel([[2 * m, 2 * m + 1] for m in np.atleast_1d(modes)])
        return CovarianceState(self.mean[idx], self.cov[np.ix_(idx, idx)])


def vacuum(n_modes) -> CovarianceState:
    return CovarianceState(np.zeros(2 * n_modes), 0.5 * np.eye(2 * n_modes))


def thermal(n_modes, nbar) -> CovarianceState:
    nbar = np.broadcast_to(np.asarray(nbar, dtype=float), (n_modes,))
    if np.any(nbar < 0):
        raise ParameterError("thermal occupation must be >= 0")
    return CovarianceState(np.zeros(2 * n_modes), np.diag(np.repeat(nbar + 0.5, 2)))


def product(*states: CovarianceState) -> CovarianceState:
    mean = np.concatenate([s.mean for s in states])
    cov = np.zeros((mean.size, mean.size))
    i = 0
    for s in states:
        n = s.mean.size
        cov[i:i + n, i:i + n] = s.cov
        i += n
    return CovarianceState(mean, cov)


def _check_modes(s, modes):
    for m in modes:
        if not 0 <= m < s.n_modes:
            raise ParameterError(f"mode {m} out of range for {s.n_modes} modes")


def apply_symplectic(s: CovarianceState, S_sub, modes) -> CovarianceState:
    """Apply a symplectic acting on ``modes`` (identity elsewhere)."""
    modes = list(modes)
    _check_modes(s, modes)
    idx = np.ravel([[2 * m, 2 * m + 1] for m in modes])
    S = np.eye(s.mean.size)
    S[np.ix_(idx, idx)] = S_sub
    return CovarianceState(S @ s.mean, S @ s.cov @ S.T)


def squeeze_mode(s: CovarianceState, mode, r, theta=0.0) -> CovarianceState:
    if r < 0:
        raise ParameterError("squeezing parameter must be >= 0")
    c, sh = np.cosh(r), np.sinh(r)
    ct, st = np.cos(theta), np.sin(theta)
    S = np.array([[c - sh * ct, -sh * st], [-sh * st, c + sh * ct]])
    return apply_symplectic(s, S, [mode])


def phase_rotate(s: CovarianceState, mode, phi) -> CovarianceState:
    """a -> exp(i phi) a."""
    c, sn = np.cos(phi), np.sin(phi)
    return apply_symplectic(s, np.array([[c, -sn], [sn, c]]), [mode])


def displace(s: CovarianceState, mode, alpha) -> CovarianceState:
    _check_modes(s, [mode])
    mean = s.mean.copy()
    mean[2 * mode] += np.sqrt(2) * np.real(alpha)
    mean[2 * mode + 1] += np.sqrt(2) * np.imag(alpha)
    return CovarianceState(mean, s.cov)


@dataclass(frozen=True)
class SqueezingProfile:
    """Per-mode squeezing r_k >= 0 and angle theta_k."""

    r: np.ndarray
    theta: Optional[np.ndarray] = None

    def __post_init__(self):
        r = np.atleast_1d(np.asarray(self.r, dtype=float))
        th = np.zeros_like(r) if self.theta is None else np.broadcast_to(
            np.asarray(self.theta, dtype=float), r.shape).copy()
        if np.any(r < 0) or np.any(~np.isfinite(r)):
            raise ParameterError("squeezing parameters must be finite and >= 0")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "theta", th)

    @property
    def sinh(self):
        return np.sinh(self.r)

    @property
    def cosh(self):
        return np.cosh(self.r)


@dataclass(frozen=True)
class PairSqueezing:
    """Two-mode squeeze exp(beta a1^dag a2^dag - h.c.), beta = r exp(i phi)."""

    k1: int
    k2: int
    r: float
    phi: float = 0.0

    def __post_init__(self):
        if self.k1 == self.k2:
            raise ParameterError("two-mode squeezing needs two distinct modes")
        if self.r < 0:
            raise ParameterError("pair squeezing strength must be >= 0")


def squeezed_profile_state(profile: SqueezingProfile) -> CovarianceState:
    s = vacuum(profile.r.size)
    for k, (r, th) in enumerate(zip(profile.r, profile.theta)):
        if r:
            s = squeeze_mode(s, k, r, th)
    return s


def two_mode_squeeze(s: CovarianceState, pair: PairSqueezing) -> CovarianceState:
    """a1 -> C a1 + exp(i phi) S a2^dagger and a2 -> C a2 + exp(i phi) S a1^dagger."""
    c, sh = np.cosh(pair.r), np.sinh(pair.r)
    cp, sp = np.cos(pair.phi), np.sin(pair.phi)
    # x1' = C x1 + S (cp x2 + sp p2), p1' = C p1 + S (sp x2 - cp p2); symmetric in 1 <-> 2
    blk = sh * np.array([[cp, sp], [sp, -cp]])
    S = np.block([[c * np.eye(2), blk], [blk, c * np.eye(2)]])
    return apply_symplectic(s, S, [pair.k1, pair.k2])


def beam_splitter(s: CovarianceState, modes, tau) -> CovarianceState:
    """a -> sqrt(tau) a + sqrt(1-tau) b, b -> -sqrt(1-tau) a + sqrt(tau) b."""
    if not 0.0 <= tau <= 1.0:
        raise ParameterError(f"transmittance must lie in [0, 1], got {tau}")
    a, b = modes
    if a == b:
        raise ParameterError("beam splitter needs two distinct modes")
    t, r = np.sqrt(tau), np.sqrt(1.0 - tau)
    S = np.block([[t * np.eye(2), r * np.eye(2)], [-r * np.eye(2), t * np.eye(2)]])
    return apply_symplectic(s, S, [a, b])


def passive_symplectic(U) -> np.ndarray:
    """Symplectic (xpxp) of the passive transform a -> U a."""
    U = np.asarray(U, dtype=complex)
    n = U.shape[0]
    S = np.zeros((2 * n, 2 * n))
    S[0::2, 0::2] = U.real
    S[0::2, 1::2] = -U.imag
    S[1::2, 0::2] = U.imag
    S[1::2, 1::2] = U.real
    return S


def complex_moments(s: CovarianceState):
    """Raw <a_j>, <a_j^dagger a_k> and <a_j a_k> from mean and covariance."""
    sym = s.cov + np.outer(s.mean, s.mean)
    xx, pp = sym[0::2, 0::2], sym[1::2, 1::2]
    xp, px = sym[0::2, 1::2], sym[1::2, 0::2]
    amean = (s.mean[0::2] + 1j * s.mean[1::2]) / np.sqrt(2)
    n = (xx + pp + 1j * xp - 1j * px) / 2 - 0.5 * np.eye(s.n_modes)
    m = (xx - pp + 1j * xp + 1j * px) / 2
    return amean, n, m


class CollectiveMoments(NamedTuple):
    mean: complex  # <A>
    adag_a: float  # <A^dagger A>
    a2: complex  # <A^2>


def _weights(s, w):
    vals = w.values if isinstance(w, ModeWeights) else np.asarray(w, dtype=complex)
    if vals.size != s.n_modes:
        raise GridMismatchError(f"weights cover {vals.size} modes, state has {s.n_modes}")
    return vals


def collective_moments(s: CovarianceState, w) -> CollectiveMoments:
    """<A>, <A^dagger A>, <A^2> for A = sum_k w_k a_k."""
    w = _weights(s, w)
    amean, n, m = complex_moments(s)
    return CollectiveMoments(
        complex(w @ amean),
        float(np.real(w.conj() @ n @ w)),
        complex(w @ m @ w),
    )


def quadrature_map(w) -> np.ndarray:
    """Rows (X_A, P_A) of A = sum_k w_k a_k as combinations of (x_k, p_k)."""
    w = np.asarray(w, dtype=complex)
    L = np.zeros((2, 2 * w.size))
    L[0, 0::2], L[0, 1::2] = w.real, -w.imag
    L[1, 0::2], L[1, 1::2] = w.imag, w.real
    return L


def collective_state(s: CovarianceState, *weights) -> CovarianceState:
    """Exact Gaussian state of the collective quadratures (X_A, P_A) per weight set."""
    L = np.vstack([quadrature_map(_weights(s, w)) for w in weights])
    return CovarianceState(L @ s.mean, L @ s.cov @ L.T)


def _isserlis4(mu, kappa):
    """E[z0 z1 z2 z3] for jointly Gaussian variables with means mu, pair cumulants kappa."""
    tot = mu[0] * mu[1] * mu[2] * mu[3]
    for i in range(4):
        for j in range(i + 1, 4):
            k, l = [x for x in range(4) if x not in (i, j)]
            tot += kappa[i][j] * mu[k] * mu[l]
    tot += kappa[0][1] * kappa[2][3] + kappa[0][2] * kappa[1][3] + kappa[0][3] * kappa[1][2]
    return tot


def hz_moments(s: CovarianceState, w1, w2):
    """<A2^dag A2 A1^dag A1> and <A2^dag A1> by normally ordered Wick expansion."""
    w1, w2 = _weights(s, w1), _weights(s, w2)
    amean, n, m = complex_moments(s)
    dn = n - np.outer(amean.conj(), amean)
    dm = m - np.outer(amean, amean)
    mu1, mu2 = w1 @ amean, w2 @ amean

    def nn(a, b):  # <dA_a^dag dA_b>
        return a.conj() @ dn @ b

    def mm(a, b):  # <dA_a dA_b>
        return a @ dm @ b

    # normal order A2^dag A1^dag A2 A1; the reordering leaves [A2, A1^dag] A2^dag A1
    mu = [np.conj(mu2), np.conj(mu1), mu2, mu1]
    k = [[0] * 4 for _ in range(4)]
    k[0][1] = np.conj(mm(w2, w1))
    k[0][2] = nn(w2, w2)
    k[0][3] = nn(w2, w1)
    k[1][2] = nn(w1, w2)
    k[1][3] = nn(w1, w1)
    k[2][3] = mm(w2, w1)
    m21 = nn(w2, w1) + np.conj(mu2) * mu1
    comm = complex(w2 @ w1.conj())
    m4 = _isserlis4(mu, k) + comm * m21
    return float(np.real(m4)), complex(m21)


def random_state(rng, n_modes, max_squeeze=1.0, max_thermal=0.5, max_displacement=0.0):
    """Random physical Gaussian state: thermal noise, local squeezes, a passive mix."""
    nbar = rng.uniform(0, max_thermal, n_modes)
    s = thermal(n_modes, nbar)
    for k in range(n_modes):
        s = squeeze_mode(s, k, rng.uniform(0, max_squeeze), rng.uniform(0, 2 * np.pi))
    z = rng.normal(size=(n_modes, n_modes)) + 1j * rng.normal(size=(n_modes, n_modes))
    q, r = np.linalg.qr(z)
    U = q * (np.diag(r) / np.abs(np.diag(r)))
    S = passive_symplectic(U)
    s = CovarianceState(S @ s.mean, S @ s.cov @ S.T)
    for k in range(n_modes):
        if max_displacement:
            s = displace(s, k, rng.uniform(0, max_displacement) * np.exp(2j * np.pi * rng.uniform()))
    return s


def state_from_moments(amean, n, m) -> CovarianceState:
    """Inverse of :func:`complex_moments`, assuming [a_j, a_k^dagger] = delta_jk.

    Works for any set of canonical modes, e.g. normalized collective modes
    whose moments came from another backend.
    """
    amean = np.atleast_1d(np.asarray(amean, dtype=complex))
    n = np.atleast_2d(np.asarray(n, dtype=complex))
    m = np.atleast_2d(np.asarray(m, dtype=complex))
    K = amean.size
    if n.shape != (K, K) or m.shape != (K, K):
        raise ParameterError("moment arrays have inconsistent sizes")
    sym = np.zeros((2 * K, 2 * K))
    eye = np.eye(K)
    sym[0::2, 0::2] = m.real + n.real + eye / 2
    sym[1::2, 1::2] = -m.real + n.real + eye / 2
    sym[0::2, 1::2] = m.imag + n.imag
    sym[1::2, 0::2] = (m.imag + n.imag).T
    mean = np.empty(2 * K)
    mean[0::2] = np.sqrt(2) * amean.real
    mean[1::2] = np.sqrt(2) * amean.imag
    return CovarianceState(mean, sym - np.outer(mean, mean))
