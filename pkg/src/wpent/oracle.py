"""Brute-force cross-checks for the closed forms.

Nothing here calls the closed-form J or the vectorized moment routines it is
meant to check. Routes used: Gauss-Legendre quadrature of the radial profile,
explicit double sums on a discrete grid, direct ODE integration of the
amplitude equations, ordered-operator Wick sums, and truncated Fock algebra.
"""

import itertools
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.integrate import solve_ivp
from scipy.sparse.linalg import expm_multiply

from . import gaussian as G
from .exceptions import IntegrationError, ParameterError, QuadratureError
from .singlephoton import (SPEED_OF_LIGHT, AtomParams, EnsembleParams,
                           SingleExcitationState, _emitter, _profile)

# ---------------------------------------------------------------- quadrature


@dataclass(frozen=True)
class QuadratureSpec:
    nodes: int = 64  # starting node count
    order: int = 16  # Gauss-Legendre nodes per panel
    rtol: float = 1e-13
    max_nodes: int = 1 << 20

    def __post_init__(self):
        if self.nodes < 64:
            raise ParameterError("radial quadrature needs at least 64 nodes")
        if self.nodes % self.order:
            raise ParameterError("nodes must be a multiple of the panel order")


def _composite_gl(f, a, b, nodes, order):
    x, wt = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(a, b, nodes // order + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    pts = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    w = (half[:, None] * wt[None, :]).ravel()
    return np.sum(w * f(pts))


def radial_integral(p, t, nodes, order=16, volume=1.0):
    """(1/V) int_0^{ct} 4 pi r^2 I(r, t) dr at a fixed node count."""
    if t == 0:
        return 0j
    return _composite_gl(lambda r: 4 * np.pi * r ** 2 * _profile(p, r, t, volume) / volume,
                         0.0, SPEED_OF_LIGHT * t, nodes, order)


def j_numeric_radial(p, t, quad: QuadratureSpec = QuadratureSpec(), volume=1.0):
    """Adaptive node doubling until successive estimates agree to ``quad.rtol``.

    Raises
    ------
    QuadratureError
        If the node budget runs out first; carries the last residual.
    """
    if t < 0:
        raise ParameterError("time must be non-negative")
    if t == 0:
        return 0j
    n = quad.nodes
    prev = radial_integral(p, t, n, quad.order, volume)
    residual = np.inf
    while True:
        n *= 2
        if n > quad.max_nodes:
            raise QuadratureError("radial quadrature did not converge", residual)
        cur = radial_integral(p, t, n, quad.order, volume)
        residual = abs(cur - prev)
        if abs(cur - prev) <= quad.rtol * abs(cur) + 1e-300:
            return complex(cur)
        prev = cur


def radial_convergence(p, t, node_counts, reference, order=16):
    """Absolute errors of fixed-node radial quadrature against ``reference``."""
    return np.array([abs(radial_integral(p, t, n, order) - reference) for n in node_counts])


def j_numeric_ksum(p, t, n_points=256, extent=None):
    """Double sum over a 1-D signed radial grid.

    J = (i K / pi) sum_r dr |r| sum_k dk exp(-i k r) d(k, t), with
    omega_k = c k and d(k, t) written out from the Wigner-Weisskopf solution.
    The box is 2.2 ct unless ``extent`` is given.
    """
    b0, w0, rate = _emitter(p)
    if t < 0:
        raise ParameterError("time must be non-negative")
    if t == 0:
        return 0j
    L = 2.2 * SPEED_OF_LIGHT * t if extent is None else float(extent)
    j = np.arange(n_points) - n_points // 2
    r = j * L / n_points
    k = 2 * np.pi * j / L
    dr, dk = L / n_points, 2 * np.pi / L
    det = SPEED_OF_LIGHT * k - w0
    d = p.g * b0 * (1 - np.exp(1j * det * t - rate * t / 2)) / (det + 0.5j * rate)
    total = 0j
    for rv in r:
        total += dr * abs(rv) * np.sum(dk * np.exp(-1j * k * rv) * d)
    return complex(1j * p.k_res / np.pi * total)


def j_numeric_superradiant(e: EnsembleParams, t, quad: QuadratureSpec = QuadratureSpec()):
    """Sum of per-atom retarded profiles, each integrated radially about its atom.

    The retarded factor uses the amplitude decay rate gamma_n of beta_j.
    """
    atom = AtomParams(e.omega_eg, 2 * e.gamma_n, e.g)
    total = 0j
    for rj in e.positions:
        total += np.exp(1j * e.k0 @ rj) / np.sqrt(e.n_atoms) * j_numeric_radial(atom, t, quad)
    return complex(total)


# ---------------------------------------------------------------- ODE


@dataclass(frozen=True)
class ODEResult:
    times: np.ndarray
    b: np.ndarray  # emitter amplitude per time
    reservoir: np.ndarray  # (len(times), M) interaction-picture amplitudes
    detunings: np.ndarray
    couplings: np.ndarray
    bandwidth: float

    @property
    def norm(self):
        return np.abs(self.b) ** 2 + np.sum(np.abs(self.reservoir) ** 2, axis=1)

    def state(self, i=-1) -> SingleExcitationState:
        return SingleExcitationState([self.b[i]], self.reservoir[i], float(self.times[i]))


def amplitudes_ode(p, t, n_modes=400, bandwidth=None, coupling=None,
                   rtol=1e-11, atol=1e-12) -> ODEResult:
    """Integrate the emitter plus M discrete modes without the Markov approximation.

    Modes sit at midpoint-spaced detunings over ``bandwidth`` (default 80 gamma)
    centred on resonance, each with coupling sqrt(gamma delta / (2 pi)) so the
    flat density of states reproduces the decay rate. ``coupling`` overrides
    the per-mode coupling (0 decouples the emitter).
    """
    b0, _, rate = _emitter(p)
    times = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(times < 0) or np.any(np.diff(times) <= 0):
        raise ParameterError("times must be non-negative and increasing")
    if n_modes < 1:
        raise ParameterError("need at least one reservoir mode")
    bw = 80.0 * rate if bandwidth is None else float(bandwidth)
    delta = bw / n_modes
    det = -bw / 2 + (np.arange(n_modes) + 0.5) * delta
    gk = np.full(n_modes, np.sqrt(rate * delta / (2 * np.pi)) if coupling is None else coupling)

    def rhs(_, y):
        b, d = y[0], y[1:]
        out = np.empty_like(y)
        out[0] = -1j * np.dot(gk, d)
        out[1:] = -1j * (det * d + gk * b)
        return out

    y0 = np.zeros(n_modes + 1, dtype=complex)
    y0[0] = b0
    sol = solve_ivp(rhs, (0.0, times[-1]), y0, method="DOP853", t_eval=times,
                    rtol=rtol, atol=atol)
    if sol.status < 0:
        raise IntegrationError(f"amplitude integration failed: {sol.message}")
    y = sol.y.T
    # rotating frame -> interaction picture
    res = y[:, 1:] * np.exp(1j * det[None, :] * times[:, None])
    return ODEResult(times, y[:, 0], res, det, gk, bw)


# ---------------------------------------------------------------- Gaussian moments


def _ordered_moments(s: G.CovarianceState):
    """<xi_i xi_j> as operator products (not symmetrized), quadrature order xpxp."""
    return s.cov + np.outer(s.mean, s.mean) + 0.5j * G.symplectic_form(s.n_modes)


def _ladder(k, dagger):
    """Coefficients of a_k or a_k^dagger on the quadratures (x_k, p_k)."""
    return (k, 1 / np.sqrt(2), (-1j if dagger else 1j) / np.sqrt(2))


def _pair(Q, u, v):
    """<u v> for ladder operators u, v given ordered quadrature moments Q."""
    (ku, cx, cp), (kv, dx, dp) = u, v
    return (cx * dx * Q[2 * ku, 2 * kv] + cx * dp * Q[2 * ku, 2 * kv + 1]
            + cp * dx * Q[2 * ku + 1, 2 * kv] + cp * dp * Q[2 * ku + 1, 2 * kv + 1])


def _single(s, u):
    k, cx, cp = u
    return cx * s.mean[2 * k] + cp * s.mean[2 * k + 1]


def _ordered4(s, Q, ops):
    """<o1 o2 o3 o4> for a Gaussian state by expanding o = <o> + d o and pairing."""
    mu = [_single(s, o) for o in ops]
    c = {}
    for i, j in itertools.combinations(range(4), 2):
        c[i, j] = _pair(Q, ops[i], ops[j]) - mu[i] * mu[j]
    tot = mu[0] * mu[1] * mu[2] * mu[3]
    for i, j in itertools.combinations(range(4), 2):
        k, l = [x for x in range(4) if x not in (i, j)]
        tot += c[i, j] * mu[k] * mu[l]
    tot += c[0, 1] * c[2, 3] + c[0, 2] * c[1, 3] + c[0, 3] * c[1, 2]
    return tot


@dataclass(frozen=True)
class BruteMoments:
    mean: complex
    adag_a: float
    a2: complex
    m4: float = None  # <A2^dag A2 A1^dag A1> when a second weight set is given
    m21: complex = None  # <A2^dag A1>


def moments_bruteforce(s: G.CovarianceState, w, w2=None) -> BruteMoments:
    """Explicit mode loops over ordered quadrature products."""
    w = np.asarray(getattr(w, "values", w), dtype=complex)
    M = s.n_modes
    if w.size != M:
        raise ParameterError("weights do not match the number of modes")
    Q = _ordered_moments(s)
    a = [_ladder(k, False) for k in range(M)]
    ad = [_ladder(k, True) for k in range(M)]
    mean = sum(w[k] * _single(s, a[k]) for k in range(M))
    n = a2 = 0j
    for j in range(M):
        for k in range(M):
            n += np.conj(w[j]) * w[k] * _pair(Q, ad[j], a[k])
            a2 += w[j] * w[k] * _pair(Q, a[j], a[k])
    if w2 is None:
        return BruteMoments(complex(mean), float(n.real), complex(a2))
    v = np.asarray(getattr(w2, "values", w2), dtype=complex)
    m4 = m21 = 0j
    sup1, sup2 = np.flatnonzero(w), np.flatnonzero(v)
    for i in sup2:
        for k in sup1:
            m21 += np.conj(v[i]) * w[k] * _pair(Q, ad[i], a[k])
    for i, j, k, l in itertools.product(sup2, sup2, sup1, sup1):
        coef = np.conj(v[i]) * v[j] * np.conj(w[k]) * w[l]
        m4 += coef * _ordered4(s, Q, (ad[i], a[j], ad[k], a[l]))
    return BruteMoments(complex(mean), float(n.real), complex(a2), float(m4.real), complex(m21))


# ---------------------------------------------------------------- truncated Fock


class FockSpace:
    """Truncated Fock space: at most 3 modes and dimension (n_max + 1)^M <= 2197."""

    MAX_DIM = 13 ** 3

    def __init__(self, n_modes, n_max):
        if not 1 <= n_modes <= 3:
            raise ParameterError("truncated Fock oracle supports 1 to 3 modes")
        if n_max < 1 or (n_max + 1) ** n_modes > self.MAX_DIM:
            raise ParameterError(f"(n_max + 1)^M must lie in 2..{self.MAX_DIM}")
        self.n_modes, self.n_max = n_modes, n_max
        d = n_max + 1
        a1 = sp.diags(np.sqrt(np.arange(1, d)), 1, format="csr")
        eye = sp.identity(d, format="csr")
        self.a = []
        for k in range(n_modes):
            op = sp.identity(1, format="csr")
            for j in range(n_modes):
                op = sp.kron(op, a1 if j == k else eye, format="csr")
            self.a.append(op)
        self.dim = d ** n_modes

    def vacuum(self):
        v = np.zeros(self.dim, dtype=complex)
        v[0] = 1.0
        return v

    def basis(self, occupations):
        idx = 0
        for n in occupations:
            idx = idx * (self.n_max + 1) + n
        v = np.zeros(self.dim, dtype=complex)
        v[idx] = 1.0
        return v

    def collective(self, w):
        w = np.asarray(w, dtype=complex)
        return sum(w[k] * self.a[k] for k in range(self.n_modes))

    def squeeze(self, psi, mode, r, theta=0.0):
        """exp((xi^* a^2 - xi a^dag^2) / 2), xi = r exp(i theta)."""
        a = self.a[mode]
        xi = r * np.exp(1j * theta)
        gen = 0.5 * (np.conj(xi) * (a @ a) - xi * (a.T @ a.T))
        return expm_multiply(gen, psi)

    def two_mode_squeeze(self, psi, k1, k2, r, phi=0.0):
        """exp(beta a1^dag a2^dag - beta^* a1 a2), beta = r exp(i phi)."""
        a1, a2 = self.a[k1], self.a[k2]
        beta = r * np.exp(1j * phi)
        gen = beta * (a1.T @ a2.T) - np.conj(beta) * (a1 @ a2)
        return expm_multiply(gen, psi)

    def displace(self, psi, mode, alpha):
        a = self.a[mode]
        return expm_multiply(alpha * a.T - np.conj(alpha) * a, psi)

    @staticmethod
    def expect(psi, op):
        return complex(np.vdot(psi, op @ psi))

    def moments(self, psi, w, w2=None) -> BruteMoments:
        A = self.collective(w)
        Ad = A.conj().T
        nrm = np.vdot(psi, psi).real
        mean = self.expect(psi, A) / nrm
        n = self.expect(psi, Ad @ A).real / nrm
        a2 = self.expect(psi, A @ A) / nrm
        if w2 is None:
            return BruteMoments(mean, n, a2)
        B = self.collective(w2)
        Bd = B.conj().T
        m4 = self.expect(psi, Bd @ B @ Ad @ A).real / nrm
        m21 = self.expect(psi, Bd @ A) / nrm
        return BruteMoments(mean, n, a2, m4, m21)


# ---------------------------------------------------------------- sparse one-excitation algebra


def _lower(state, weights):
    out = {}
    for occ, amp in state.items():
        for k, n in enumerate(occ):
            if n and weights[k] != 0:
                new = occ[:k] + (n - 1,) + occ[k + 1:]
                out[new] = out.get(new, 0j) + weights[k] * np.sqrt(n) * amp
    return out


def _inner(u, v):
    return sum(np.conj(amp) * v.get(occ, 0j) for occ, amp in u.items())


def single_excitation_moments(source, reservoir, w1, w2, spin=False):
    """Exact moments of a one-excitation state by explicit Fock-basis algebra.

    Modes are ordered (sources..., reservoir modes...). With ``spin=False``
    the two collective modes are A1 = sum w1 a and A2 = sum w2 a over all
    modes, and the result is (<A2^dag A2 A1^dag A1>, <A2^dag A1>). With
    ``spin=True`` ``w1`` is ignored, S- lowers the source excitations and the
    result is (<S+ S- A^dag A>, <S+ A>) for A = sum w2 a.
    """
    source = np.atleast_1d(np.asarray(source, dtype=complex))
    reservoir = np.atleast_1d(np.asarray(reservoir, dtype=complex)).ravel()
    n_s, n_m = source.size, source.size + reservoir.size
    state = {}
    for k, amp in enumerate(np.concatenate([source, reservoir])):
        if amp != 0:
            occ = [0] * n_m
            occ[k] = 1
            state[tuple(occ)] = complex(amp)
    pad = lambda w: np.concatenate([np.zeros(n_s), np.asarray(w, dtype=complex)])
    if spin:
        lo1 = np.concatenate([np.ones(n_s), np.zeros(reservoir.size)])
        lo2 = pad(w2)
    else:
        lo1, lo2 = pad(w1), pad(w2)
    # <X2^dag X2 X1^dag X1> = || X2 X1 psi ||^2 for commuting X1, X2
    both = _lower(_lower(state, lo1), lo2)
    m4 = float(np.real(_inner(both, both)))
    m21 = _inner(_lower(state, lo2), _lower(state, lo1))
    if spin:
        m21 = np.conj(m21)  # <A^dag S-> -> <S+ A>
    return m4, complex(m21)


# ---------------------------------------------------------------- spins


def _spin_ops(n_atoms, n_field):
    """S+, S- on N two-level atoms (|g> = index 0) tensored with a truncated field."""
    sp1 = sp.csr_matrix(np.array([[0.0, 0.0], [1.0, 0.0]]))  # |e><g|
    eye2 = sp.identity(2, format="csr")
    S_plus = sp.csr_matrix((2 ** n_atoms, 2 ** n_atoms))
    for j in range(n_atoms):
        op = sp.identity(1, format="csr")
        for i in range(n_atoms):
            op = sp.kron(op, sp1 if i == j else eye2, format="csr")
        S_plus = S_plus + op
    d = n_field + 1
    a = sp.diags(np.sqrt(np.arange(1, d)), 1, format="csr")
    Sp = sp.kron(S_plus, sp.identity(d), format="csr")
    A = sp.kron(sp.identity(2 ** n_atoms), a, format="csr")
    return Sp, A


def ground_vacuum(n_atoms, n_field=4):
    v = np.zeros(2 ** n_atoms * (n_field + 1), dtype=complex)
    v[0] = 1.0
    return v


def varsum_pauli(psi, n_atoms, n_field=4):
    """Var(Sx + X) + Var(Sy - P) evaluated with explicit matrices.

    Also returns the moments (<S+>, <S+S->, <S-S+>, <A>, <A^dag A>, <S+ A>) for
    comparison with the moment-based evaluator.
    """
    Sp, A = _spin_ops(n_atoms, n_field)
    Sm, Ad = Sp.conj().T, A.conj().T
    Sx, Sy = (Sp + Sm) / 2, (Sp - Sm) / 2j
    X, P = (A + Ad) / np.sqrt(2), (A - Ad) / (1j * np.sqrt(2))
    psi = np.asarray(psi, dtype=complex)
    psi = psi / np.linalg.norm(psi)

    def var(op):
        m = np.vdot(psi, op @ psi)
        return np.vdot(psi, op @ (op @ psi)).real - abs(m) ** 2

    ev = lambda op: complex(np.vdot(psi, op @ psi))
    total = var(Sx + X) + var(Sy - P)
    moments = {
        "s_plus": ev(Sp), "s_plus_s_minus": ev(Sp @ Sm).real, "s_minus_s_plus": ev(Sm @ Sp).real,
        "a": ev(A), "adag_a": ev(Ad @ A).real, "s_plus_a": ev(Sp @ A),
    }
    return float(total), moments


# ---------------------------------------------------------------- PPT


def ppt_check(V4) -> float:
    """Smallest symplectic eigenvalue after flipping P2; below 1/2 means entangled."""
    V = V4.matrix() if hasattr(V4, "matrix") else np.asarray(V4, dtype=float)
    T = np.diag([1.0, 1.0, 1.0, -1.0])
    Vt = T @ V @ T
    ev = np.abs(np.linalg.eigvals(1j * G.symplectic_form(2) @ Vt))
    return float(np.min(ev))
