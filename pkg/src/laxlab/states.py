"""Probe and packet builders used by scenarios and invariant suites."""

import numpy as np

from .direct_integral import AuxSpace, LpVector, TimeGrid, norm

__all__ = [
    "gaussian_packet",
    "node_state",
    "random_state",
    "random_smooth_state",
]


def gaussian_packet(grid, aux, center, width, carrier=0.0, aux_vec=None, normalize=True):
    """Gaussian amplitude exp(-(t-c)^2/(2 w^2)) * exp(i*carrier*t) on a fixed
    auxiliary direction (defaults to the first basis vector)."""
    t = grid.times
    if aux_vec is None:
        u = np.zeros(aux.dimension, dtype=complex)
        u[0] = 1.0
    else:
        u = np.asarray(aux_vec, dtype=complex)
        u = u / np.linalg.norm(u)
    env = np.exp(-((t - center) ** 2) / (2.0 * width**2)) * np.exp(1j * carrier * t)
    vec = LpVector(grid, aux, env[:, None] * u[None, :])
    if normalize:
        vec = LpVector(grid, aux, vec.values / norm(vec))
    return vec


def node_state(grid, aux, node, aux_vec=None):
    """Delta-like state concentrated on a single grid node."""
    values = np.zeros((grid.n_points, aux.dimension), dtype=complex)
    if aux_vec is None:
        values[node, 0] = 1.0
    else:
        values[node, :] = np.asarray(aux_vec, dtype=complex)
    return LpVector(grid, aux, values)


def random_state(grid, aux, rng, normalize=True):
    """Complex white-noise state on the full grid."""
    shape = (grid.n_points, aux.dimension)
    v = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    vec = LpVector(grid, aux, v)
    if normalize:
        vec = LpVector(grid, aux, vec.values / norm(vec))
    return vec


def random_smooth_state(grid, aux, rng, sigma_width=None, normalize=True):
    """Band-limited random state: white spectral noise under a Gaussian
    envelope of width `sigma_width` (default: a quarter of the Nyquist
    frequency).  Useful when wave-operator probes must be smooth."""
    n, d = grid.n_points, aux.dimension
    sig = grid.sigmas
    if sigma_width is None:
        sigma_width = 0.25 * np.max(np.abs(sig))
    env = np.exp(-(sig**2) / (2.0 * sigma_width**2))
    coeff = (rng.standard_normal((n, d)) + 1j * rng.standard_normal((n, d))) * env[:, None]
    v = np.fft.ifft(coeff, axis=0)
    vec = LpVector(grid, aux, v)
    if normalize:
        vec = LpVector(grid, aux, vec.values / norm(vec))
    return vec
