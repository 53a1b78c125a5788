"""Oscillatory and panel quadrature helpers.

The workhorse is a Filon scheme on adaptive panels: on each panel the
slowly varying amplitude f is replaced by its Legendre interpolant and the
moments  int_-1^1 P_k(x) exp(-i*theta*x) dx = 2*(-i)^k j_k(theta)  are used
exactly (spherical Bessel j_k).  The quadrature error therefore depends
only on how well f is interpolated, uniformly in the oscillation rate, so
one panel set serves every t in a Fourier-type integral
int f(w) exp(-i*w*t) dw.
"""

import numpy as np
from numpy.polynomial import legendre as npleg
from scipy.special import spherical_jn

__all__ = [
    "legendre_coefficients",
    "filon_panel_moments",
    "adaptive_panels",
    "fourier_integral",
    "gauss_panels",
]

_GL_CACHE = {}


def _gauss_rule(m):
    if m not in _GL_CACHE:
        x, w = np.polynomial.legendre.leggauss(m)
        _GL_CACHE[m] = (x, w)
    return _GL_CACHE[m]


def legendre_coefficients(fvals, degree):
    """Legendre coefficients of the degree-`degree` interpolant.

    `fvals` holds f at the (degree+1)-point Gauss-Legendre nodes, with any
    trailing panel axes: shape (degree+1, ...) -> coefficients (degree+1, ...).
    The Gauss projection is exact for polynomials of this degree.
    """
    x, w = _gauss_rule(degree + 1)
    P = npleg.legvander(x, degree)  # (nodes, degree+1)
    tail = (1,) * (fvals.ndim - 1)
    wf = w.reshape((-1,) + tail) * fvals
    coeffs = np.tensordot(P.T, wf, axes=(1, 0))
    scale = (2 * np.arange(degree + 1) + 1) / 2.0
    return scale.reshape((-1,) + tail) * coeffs


def filon_panel_moments(theta, degree):
    """Moments M_k = int_-1^1 P_k(x) exp(-i*theta*x) dx for k = 0..degree."""
    theta = np.asarray(theta, dtype=float)
    out = np.empty((degree + 1,) + theta.shape, dtype=complex)
    for k in range(degree + 1):
        out[k] = 2.0 * (-1j) ** k * spherical_jn(k, theta)
    return out


def adaptive_panels(f, edges, tol, degree=10, max_depth=48):
    """Refine panel `edges` until the Legendre tail of f is below tolerance.

    The per-panel error estimate is h*(|a_m| + |a_{m-1}|); a panel whose
    estimated integral mass is already below its share of `tol` is accepted
    without refinement (this stops endpoint singularities like sqrt(w) from
    splitting forever once their contribution is negligible).
    Returns the refined, sorted edge array.
    """
    edges = np.asarray(edges, dtype=float)
    total = edges[-1] - edges[0]
    stack = [(edges[i], edges[i + 1], 0) for i in range(len(edges) - 1)]
    accepted = []
    x, _ = _gauss_rule(degree + 1)
    while stack:
        a, b, depth = stack.pop()
        h = b - a
        nodes = 0.5 * (a + b) + 0.5 * h * x
        coeffs = legendre_coefficients(f(nodes), degree)
        err = h * (np.abs(coeffs[-1]) + np.abs(coeffs[-2]))
        share = tol * max(h / total, 1e-6)
        mass = h * np.sum(np.abs(coeffs)) / (degree + 1)
        if err <= share or depth >= max_depth or mass <= share:
            accepted.append((a, b))
        else:
            mid = 0.5 * (a + b)
            stack.append((a, mid, depth + 1))
            stack.append((mid, b, depth + 1))
    accepted.sort()
    pts = [accepted[0][0]] + [p[1] for p in accepted]
    return np.asarray(pts)


def fourier_integral(f, edges, t, degree=10):
    """int f(w) exp(-i*w*t) dw over the panel set, vectorized over t.

    f must map an ndarray of abscissae to an ndarray of (complex) values.
    Returns an array shaped like t.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    edges = np.asarray(edges, dtype=float)
    a = edges[:-1]
    b = edges[1:]
    half = 0.5 * (b - a)
    center = 0.5 * (a + b)
    x, _ = _gauss_rule(degree + 1)
    nodes = center[None, :] + half[None, :] * x[:, None]  # (nodes, panels)
    fv = f(nodes.ravel()).reshape(nodes.shape)
    coeffs = legendre_coefficients(fv, degree)  # (degree+1, panels)
    theta = t[:, None] * half[None, :]  # (t, panels)
    moments = filon_panel_moments(theta, degree)  # (degree+1, t, panels)
    panel_vals = np.einsum("kp,ktp->tp", coeffs, moments) * half[None, :]
    phase = np.exp(-1j * center[None, :] * t[:, None])
    return np.sum(panel_vals * phase, axis=1)


def gauss_panels(f, edges, nodes_per_panel=24):
    """Plain composite Gauss-Legendre integral of f over the panel edges."""
    edges = np.asarray(edges, dtype=float)
    a = edges[:-1]
    b = edges[1:]
    half = 0.5 * (b - a)
    center = 0.5 * (a + b)
    x, w = _gauss_rule(nodes_per_panel)
    pts = center[None, :] + half[None, :] * x[:, None]
    fv = f(pts.ravel()).reshape(pts.shape)
    return np.einsum("j,jp,p->", w, fv, half)
