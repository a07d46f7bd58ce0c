"""Periodic position/momentum grids and collective-mode weights.

The collective annihilator of a wavepacket is the normalized spatial sum

    A = (1/N_r) sum_{r in region} a(r),    a(r) = sum_k exp(i k.r) a_k,

so that A = sum_k w_k a_k with w_k = (1/N_r) sum_{r in region} exp(i k.r).
Over the full periodic box only the zero mode survives and [A, A^dagger] = 1.

Natural units are used throughout (c = hbar = eps0 = 1).
"""

from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np

from .exceptions import ParameterError

SPEED_OF_LIGHT = 1.0


@dataclass(frozen=True)
class GridSpec:
    """Uniform periodic box in 1 or 3 dimensions.

    ``extent`` is either one length used for every axis or one length per axis.
    """

    dimension: int
    extent: Union[float, Sequence[float]]
    points_per_axis: int

    def __post_init__(self):
        if self.dimension not in (1, 3):
            raise ParameterError(f"dimension must be 1 or 3, got {self.dimension}")
        if int(self.points_per_axis) != self.points_per_axis or self.points_per_axis < 2:
            raise ParameterError(
                f"points_per_axis must be an integer >= 2, got {self.points_per_axis}"
            )
        lengths = self.lengths
        if lengths.shape != (self.dimension,) or np.any(~np.isfinite(lengths)) or np.any(lengths <= 0):
            raise ParameterError(f"extent must be positive per axis, got {self.extent}")

    @property
    def lengths(self) -> np.ndarray:
        ext = np.atleast_1d(np.asarray(self.extent, dtype=float))
        if ext.size == 1:
            ext = np.repeat(ext, self.dimension)
        return ext

    @property
    def volume(self) -> float:
        return float(np.prod(self.lengths))

    @property
    def n_points(self) -> int:
        return int(self.points_per_axis) ** self.dimension

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.lengths / self.points_per_axis))


@dataclass(frozen=True)
class RGrid:
    points: np.ndarray  # (N_r, d)
    spec: GridSpec

    def __len__(self):
        return self.points.shape[0]


@dataclass(frozen=True)
class KGrid:
    """Wavevectors of a periodic box.

    ``dk_volume`` is the k-space cell (2 pi)^d / V, i.e. the weight that turns
    a mode sum into V/(2 pi)^d times an integral.
    """

    kvecs: np.ndarray  # (N_k, d)
    spec: GridSpec
    dk_volume: float = field(default=0.0)

    def __len__(self):
        return self.kvecs.shape[0]

    @property
    def norms(self) -> np.ndarray:
        return np.linalg.norm(self.kvecs, axis=1)

    def is_symmetric(self, atol=1e-12) -> bool:
        """True if -k is on the grid (modulo a reciprocal vector) for every k."""
        recip = 2 * np.pi / self.spec.lengths
        idx = np.rint(self.kvecs / recip).astype(np.int64)
        n = self.spec.points_per_axis
        wrapped = {tuple(np.mod(row, n)) for row in idx}
        return all(tuple(np.mod(-row, n)) in wrapped for row in idx) and np.allclose(
            idx * recip, self.kvecs, atol=atol
        )


@dataclass(frozen=True)
class ModeWeights:
    """Complex weights w_k with A = sum_k w_k a_k."""

    values: np.ndarray
    region: str = "custom"

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        if vals.ndim != 1:
            raise ParameterError("weights must be a 1-D array")
        if not np.all(np.isfinite(vals)):
            raise ParameterError("weights must be finite")
        object.__setattr__(self, "values", vals)

    def __len__(self):
        return self.values.size

    def scaled(self, factor) -> "ModeWeights":
        return ModeWeights(self.values * factor, self.region)


def _axis(n, length):
    j = np.arange(n) - n // 2
    return j * (length / n), j * (2 * np.pi / length)


def build_grids(spec: GridSpec):
    """Return commensurate ``(RGrid, KGrid)`` for ``spec``.

    Both axes run over indices -n//2 .. n - n//2 - 1, so r = 0 and k = 0 are
    grid points and sum_r exp(i (k - k').r) / N_r = delta_{k k'}.
    """
    rs, ks = [], []
    for length in spec.lengths:
        r, k = _axis(spec.points_per_axis, length)
        rs.append(r)
        ks.append(k)
    rpts = np.stack([g.ravel() for g in np.meshgrid(*rs, indexing="ij")], axis=1)
    kpts = np.stack([g.ravel() for g in np.meshgrid(*ks, indexing="ij")], axis=1)
    dk = (2 * np.pi) ** spec.dimension / spec.volume
    return RGrid(rpts, spec), KGrid(kpts, spec, dk)


def phase_matrix(kgrid: KGrid, points: np.ndarray) -> np.ndarray:
    """exp(i k.r) with rows indexed by k and columns by r."""
    return np.exp(1j * (kgrid.kvecs @ np.atleast_2d(points).T))


def to_position(kgrid: KGrid, rgrid: RGrid, amplitudes) -> np.ndarray:
    """a(r) = sum_k exp(i k.r) a_k."""
    return phase_matrix(kgrid, rgrid.points).T @ np.asarray(amplitudes, dtype=complex)


def to_momentum(kgrid: KGrid, rgrid: RGrid, field_r) -> np.ndarray:
    """a_k = (1/N_r) sum_r exp(-i k.r) a(r); inverse of :func:`to_position`."""
    ph = phase_matrix(kgrid, rgrid.points)
    return ph.conj() @ np.asarray(field_r, dtype=complex) / len(rgrid)


Region = Union[str, np.ndarray, Callable[[np.ndarray], np.ndarray]]


def region_mask(rgrid: RGrid, region: Region) -> np.ndarray:
    """Boolean mask over r-points.

    Strings: ``"full"``, ``"origin"`` (the single cell at r = 0) and ``"half"``
    (first coordinate >= 0). Otherwise a boolean array or a callable on the
    (N_r, d) point array.
    """
    pts = rgrid.points
    if isinstance(region, str):
        if region == "full":
            mask = np.ones(len(rgrid), dtype=bool)
        elif region == "origin":
            mask = np.all(pts == 0.0, axis=1)
        elif region == "half":
            mask = pts[:, 0] >= 0.0
        else:
            raise ParameterError(f"unknown region {region!r}")
    elif callable(region):
        mask = np.asarray(region(pts), dtype=bool)
    else:
        mask = np.asarray(region, dtype=bool)
    if mask.shape != (len(rgrid),):
        raise ParameterError("region mask does not match the r-grid")
    if not mask.any():
        raise ParameterError("detector region is empty")
    return mask


def detector_weights(kgrid: KGrid, rgrid: RGrid, region: Region = "full",
                     normalization: str = "grid") -> ModeWeights:
    """Collective weights w_k for a detector covering ``region``.

    Parameters
    ----------
    normalization : {"grid", "region", "none"}
        Divide the phase sum by the total number of r-points (default; the
        discrete (1/V) integral), by the number of points in the region, or
        not at all.
    """
    if kgrid.spec != rgrid.spec:
        raise ParameterError("k-grid and r-grid come from different specs")
    mask = region_mask(rgrid, region)
    raw = phase_matrix(kgrid, rgrid.points[mask]).sum(axis=1)
    if normalization == "grid":
        raw = raw / len(rgrid)
    elif normalization == "region":
        raw = raw / mask.sum()
    elif normalization != "none":
        raise ParameterError(f"unknown normalization {normalization!r}")
    label = region if isinstance(region, str) else "custom"
    return ModeWeights(raw, label)


def commutator_norm(weights: ModeWeights) -> float:
    """[A, A^dagger] = sum_k |w_k|^2."""
    return float(np.sum(np.abs(weights.values) ** 2))


def isolated_mode_weights(n_modes: int, modes, eps: float) -> ModeWeights:
    """Weight sqrt(eps) on each listed mode and zero elsewhere.

    This is the single-point prescription |sum_r exp(i k.r)|^2 = eps for a mode
    whose continuum contribution would otherwise vanish; the usual choice is
    eps = (Delta r)^d / V, see :func:`isolated_mode_epsilon`.
    """
    if not 0.0 < eps <= 1.0:
        raise ParameterError(f"eps must lie in (0, 1], got {eps}")
    vals = np.zeros(n_modes, dtype=complex)
    modes = np.atleast_1d(modes)
    if np.any(modes < 0) or np.any(modes >= n_modes):
        raise ParameterError("isolated mode index out of range")
    vals[modes] = np.sqrt(eps)
    return ModeWeights(vals, "isolated")


def isolated_mode_epsilon(spec: GridSpec) -> float:
    return spec.cell_volume / spec.volume


def profile_weights(n_modes: int) -> ModeWeights:
    """Unit weight on every mode (collapsed double spatial sum)."""
    return ModeWeights(np.ones(n_modes, dtype=complex), "profile")


def radial_weights(kgrid: KGrid, rgrid: RGrid, k_res: float) -> ModeWeights:
    """Ball weights for a 1-D radially reduced outgoing-wave grid.

    For an isotropic emitter with mode density frozen at the resonance
    wavenumber ``k_res``, (1/V) int d^3r sum_k d_k exp(i k.r) reduces to
    sum_k w_k d_k over a signed radial wavenumber with

        w_k = (i k_res / pi) dk sum_r dr |r| exp(-i k r).

    The r-sum runs over the symmetric box; using |r| keeps the periodic
    weight continuous at r = 0, which gives second-order convergence.
    """
    if kgrid.spec.dimension != 1 or rgrid.spec.dimension != 1:
        raise ParameterError("radial weights need a 1-D grid")
    if k_res <= 0:
        raise ParameterError("k_res must be positive")
    r = rgrid.points[:, 0]
    dr = rgrid.spec.cell_volume
    dk = kgrid.dk_volume
    kern = np.exp(-1j * np.outer(kgrid.kvecs[:, 0], r)) @ (np.abs(r) * dr)
    return ModeWeights(1j * k_res / np.pi * dk * kern, "radial")
