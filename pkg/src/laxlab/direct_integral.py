"""Discretized direct-integral Hilbert space L2(R; C^d) on a periodic time grid.

A state is a family of auxiliary-space vectors psi_t, one per grid node,
stored as an (n_points, d) complex array.  The squared norm is the Riemann
sum of the fiber norms, int ||psi_t||^2 dt.  The spectral representation is
the discrete Fourier transform with kernel exp(-i*sigma*t); under it the
free evolution (translation in t) is multiplication by exp(-i*sigma*tau).

The grid is periodic: translation is circular.  Scenarios must keep the
support of evolving states away from the grid edges; `check_support_margin`
raises a warning when a state gets within a few nodes of the boundary.
"""

import warnings
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

__all__ = [
    "TimeGrid",
    "AuxSpace",
    "LpVector",
    "SpectralVector",
    "GridMismatchError",
    "SupportMarginWarning",
    "inner_product",
    "norm",
    "to_spectral",
    "from_spectral",
    "translate",
    "support_margin",
    "check_support_margin",
]


class GridMismatchError(ValueError):
    """Raised when two vectors do not share grid and auxiliary dimension."""


class SupportMarginWarning(UserWarning):
    """State support is too close to the periodic grid boundary."""


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid t_k = t_min + k*spacing, k = 0 .. n_points-1 (periodic)."""

    t_min: float
    t_max: float
    n_points: int

    def __post_init__(self):
        if self.t_max <= self.t_min:
            raise ValueError("t_max must exceed t_min")
        n = self.n_points
        if n < 8 or (n & (n - 1)) != 0:
            raise ValueError("n_points must be a power of two, at least 8")

    @property
    def spacing(self):
        return (self.t_max - self.t_min) / self.n_points

    @cached_property
    def times(self):
        t = self.t_min + self.spacing * np.arange(self.n_points)
        t.flags.writeable = False
        return t

    @cached_property
    def sigmas(self):
        """Fourier-dual frequencies (angular), in FFT ordering."""
        s = 2.0 * np.pi * np.fft.fftfreq(self.n_points, d=self.spacing)
        s.flags.writeable = False
        return s

    def node_of(self, t):
        """Index of the grid node closest to time t."""
        return int(round((t - self.t_min) / self.spacing)) % self.n_points


@dataclass(frozen=True)
class AuxSpace:
    """Auxiliary Hilbert space attached to each grid node."""

    dimension: int

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("auxiliary dimension must be >= 1")


def _as_values(values, grid, aux):
    v = np.asarray(values, dtype=complex)
    if v.shape != (grid.n_points, aux.dimension):
        raise ValueError(
            f"values must have shape {(grid.n_points, aux.dimension)}, got {v.shape}"
        )
    if not np.all(np.isfinite(v)):
        raise ValueError("values must be finite")
    v = v.copy()
    v.flags.writeable = False
    return v


@dataclass(frozen=True)
class LpVector:
    """A state in the translation representation: fiber psi_t per node."""

    grid: TimeGrid
    aux: AuxSpace
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "values", _as_values(self.values, self.grid, self.aux))

    def with_values(self, values):
        return LpVector(self.grid, self.aux, values)


@dataclass(frozen=True)
class SpectralVector:
    """The Fourier-dual picture: fiber psi_hat(sigma) per dual node."""

    grid: TimeGrid
    aux: AuxSpace
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "values", _as_values(self.values, self.grid, self.aux))

    @property
    def sigmas(self):
        return self.grid.sigmas


def _check_compatible(f, g):
    if f.grid != g.grid or f.aux != g.aux:
        raise GridMismatchError("vectors live on different grids or aux spaces")


def inner_product(f, g):
    """Riemann-sum scalar product sum_k <f_k, g_k> * spacing.

    Conjugate-linear in the first argument, linear in the second.
    """
    _check_compatible(f, g)
    return complex(np.vdot(f.values, g.values) * f.grid.spacing)


def norm(f):
    if isinstance(f, SpectralVector):
        w = 1.0 / (f.grid.n_points * f.grid.spacing)
        return float(np.sqrt(np.sum(np.abs(f.values) ** 2) * w))
    return float(np.sqrt(np.sum(np.abs(f.values) ** 2) * f.grid.spacing))


def to_spectral(f):
    """psi_hat(sigma) = sum_k exp(-i*sigma*t_k) psi_k * spacing."""
    grid = f.grid
    phase = np.exp(-1j * grid.sigmas * grid.t_min)
    vhat = np.fft.fft(f.values, axis=0) * grid.spacing * phase[:, None]
    return SpectralVector(grid, f.aux, vhat)


def from_spectral(fhat):
    """Inverse of `to_spectral`; round-trip is exact to rounding."""
    grid = fhat.grid
    phase = np.exp(1j * grid.sigmas * grid.t_min)
    v = np.fft.ifft(fhat.values * phase[:, None], axis=0) / grid.spacing
    return LpVector(grid, fhat.aux, v)


def translate(f, tau):
    """Free evolution U0(tau): (U0(tau) f)_t = f_{t - tau} (circular).

    Grid-multiple tau is served by an exact index roll; anything else goes
    through multiplication by exp(-i*sigma*tau) in the spectral picture.
    """
    grid = f.grid
    steps = tau / grid.spacing
    k = round(steps)
    if abs(steps - k) < 1e-9:
        return LpVector(grid, f.aux, np.roll(f.values, k % grid.n_points, axis=0))
    fhat = to_spectral(f)
    shifted = fhat.values * np.exp(-1j * grid.sigmas * tau)[:, None]
    return from_spectral(SpectralVector(grid, f.aux, shifted))


def support_margin(f, rel_threshold=1e-8):
    """Distance (in nodes) of the significant support from the grid edges.

    Significance is relative to the largest fiber amplitude.  Returns
    n_points when the state is identically zero.
    """
    amp = np.max(np.abs(f.values), axis=1)
    peak = amp.max()
    if peak == 0.0:
        return f.grid.n_points
    idx = np.nonzero(amp > rel_threshold * peak)[0]
    return int(min(idx[0], f.grid.n_points - 1 - idx[-1]))


def check_support_margin(f, min_nodes=4, rel_threshold=1e-8):
    """Warn when the support margin drops below `min_nodes`."""
    m = support_margin(f, rel_threshold)
    if m < min_nodes:
        warnings.warn(
            f"state support within {m} nodes of the periodic boundary "
            f"(< {min_nodes}); translation wrap-around may contaminate results",
            SupportMarginWarning,
            stacklevel=2,
        )
    return m
