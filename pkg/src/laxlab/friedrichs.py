"""Exactly solvable resonance machinery for a discrete level in a continuum.

A level at energy e0 couples to a continuum through |g(w)|^2.  Everything
flows from the level-shift function

    Sigma(z) = int |g(w)|^2 / (z - w) dw

and its continuation through the continuum cut onto the second sheet,
Sigma_II(z) = Sigma(z) - 2*pi*i*|g(z)|^2 (with |g|^2 analytically
extended).  The reduced resolvent 1/(z - e0 - Sigma(z)) supplies the
spectral weight of the level, the second-sheet zero of z - e0 - Sigma_II(z)
is the resonance pole, and the survival amplitude is computed two ways:
direct oscillatory quadrature of the spectral weight, and the pole residue
plus an integral along the ray from the branch point into the lower
half plane.

Two coupling families are provided, both with closed-form sheets:

* ``FlatCoupling(gamma)``        |g(w)|^2 = gamma/(2*pi) on the whole line
* ``HalfLineSqrtCoupling(lam, omega_c)``
                                 |g(w)|^2 = lam^2*sqrt(w)*exp(-w/omega_c), w >= 0
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq
from scipy.special import exp1, wofz

from .quadrature import adaptive_panels, fourier_integral, gauss_panels

__all__ = [
    "FlatCoupling",
    "HalfLineSqrtCoupling",
    "FriedrichsModel",
    "SelfEnergyEval",
    "ResonancePole",
    "BranchCutError",
    "UnsupportedContinuationError",
    "ConvergenceError",
    "self_energy",
    "find_resonance_pole",
    "spectral_weight",
    "survival_amplitude",
    "decay_probability",
]


class BranchCutError(ValueError):
    """First-sheet evaluation requested on the continuum cut."""


class UnsupportedContinuationError(ValueError):
    """The coupling does not admit an analytic second-sheet extension."""


class ConvergenceError(RuntimeError):
    """Root search failed; carries the iterate trace."""

    def __init__(self, message, trace):
        super().__init__(message)
        self.trace = list(trace)


@dataclass(frozen=True)
class FlatCoupling:
    """|g|^2 constant on the whole real line; Wigner-Weisskopf limit."""

    gamma: float

    def __post_init__(self):
        if self.gamma <= 0:
            raise ValueError("gamma must be positive")

    support = (-np.inf, np.inf)

    def g2(self, w):
        return np.full_like(np.asarray(w, dtype=float), self.gamma / (2 * np.pi))

    def g2_analytic(self, z):
        return np.full_like(np.asarray(z, dtype=complex), self.gamma / (2 * np.pi))

    def sigma_first(self, z):
        z = np.asarray(z, dtype=complex)
        if np.any(z.imag == 0):
            raise BranchCutError("flat coupling: every real z lies on the cut")
        return np.where(z.imag > 0, -0.5j * self.gamma, 0.5j * self.gamma)

    def sigma_second(self, z):
        # Continuation from the upper rim; constant below the cut.
        z = np.asarray(z, dtype=complex)
        return np.full_like(z, -0.5j * self.gamma)

    def sigma_below(self, w):
        """Boundary value Sigma(w - i0) on the cut."""
        return np.full_like(np.asarray(w, dtype=complex), 0.5j * self.gamma)


@dataclass(frozen=True)
class HalfLineSqrtCoupling:
    """Threshold coupling |g|^2 = lam^2*sqrt(w)*exp(-w/omega_c) on w >= 0.

    Closed form: with zeta = z/omega_c and b = sqrt(-zeta) (principal),

        Sigma(z) = lam^2 * sqrt(omega_c) * ( -sqrt(pi) - pi*zeta*w(i b)/b )

    where w is the Faddeeva function, so e^(b^2) erfc(b) = w(i b).
    """

    lam: float
    omega_c: float

    def __post_init__(self):
        if self.lam <= 0 or self.omega_c <= 0:
            raise ValueError("lam and omega_c must be positive")

    @property
    def support(self):
        return (0.0, np.inf)

    def g2(self, w):
        w = np.asarray(w, dtype=float)
        out = np.zeros_like(w)
        pos = w > 0
        out[pos] = self.lam**2 * np.sqrt(w[pos]) * np.exp(-w[pos] / self.omega_c)
        return out

    def g2_analytic(self, z):
        z = np.asarray(z, dtype=complex)
        return self.lam**2 * np.sqrt(z) * np.exp(-z / self.omega_c)

    def _phi(self, zeta):
        b = np.sqrt(-zeta)
        return -np.sqrt(np.pi) - np.pi * zeta * wofz(1j * b) / b

    def sigma_first(self, z):
        z = np.asarray(z, dtype=complex)
        on_cut = (z.imag == 0) & (z.real >= 0)
        if np.any(on_cut):
            raise BranchCutError("z on the continuum cut [0, inf)")
        return self.lam**2 * self.omega_c**0.5 * self._phi(z / self.omega_c)

    def sigma_second(self, z):
        z = np.asarray(z, dtype=complex)
        first = self.lam**2 * self.omega_c**0.5 * self._phi(z / self.omega_c)
        jump = -2j * np.pi * self.g2_analytic(z)
        return np.where(z.imag > 0, first, first + jump)

    def sigma_below(self, w):
        """Boundary value Sigma(w - i0) for real w, evaluated exactly.

        Approaching the cut from below sends -z/omega_c onto the upper rim
        of the negative axis, i.e. b -> i*sqrt(w/omega_c); then
        w(i b) = w(-sqrt(w/omega_c)) keeps the Faddeeva argument real, where
        it is stable.  Off the support (w <= 0) this is just Sigma itself.
        """
        w = np.asarray(w, dtype=float)
        out = np.empty(w.shape, dtype=complex)
        scale = self.lam**2 * self.omega_c**0.5
        zero = w == 0.0
        out[zero] = -scale * np.sqrt(np.pi)
        neg = w < 0.0
        if np.any(neg):
            out[neg] = scale * self._phi(w[neg].astype(complex) / self.omega_c)
        pos = w > 0.0
        if np.any(pos):
            zeta = w[pos] / self.omega_c
            root = np.sqrt(zeta)
            phi = -np.sqrt(np.pi) - np.pi * zeta * wofz(-root) / (1j * root)
            out[pos] = scale * phi
        return out


@dataclass(frozen=True)
class FriedrichsModel:
    """Discrete level e0 coupled to a continuum by one of the families."""

    e0: float
    coupling: object

    def __post_init__(self):
        if isinstance(self.coupling, HalfLineSqrtCoupling) and self.e0 <= 0:
            raise ValueError("e0 must be embedded in the continuum (e0 > 0)")


@dataclass(frozen=True)
class SelfEnergyEval:
    z: complex
    sigma: complex
    sheet: str


@dataclass(frozen=True)
class ResonancePole:
    position: complex
    residue: complex


def self_energy(model, z, sheet="first"):
    """Evaluate Sigma on the requested sheet at a single complex point."""
    c = model.coupling
    if sheet == "first":
        sigma = complex(c.sigma_first(complex(z)))
    elif sheet == "second":
        if not hasattr(c, "sigma_second"):
            raise UnsupportedContinuationError(
                "coupling has no analytic second-sheet extension"
            )
        sigma = complex(c.sigma_second(complex(z)))
    else:
        raise ValueError("sheet must be 'first' or 'second'")
    return SelfEnergyEval(z=complex(z), sigma=sigma, sheet=sheet)


def _dispersion_second(model, z):
    return z - model.e0 - model.coupling.sigma_second(z)


def find_resonance_pole(model, guess=None, tol=1e-10, max_iter=100):
    """Newton search for the second-sheet zero of z - e0 - Sigma_II(z).

    The derivative is taken by a central difference of the analytic closed
    form (step 1e-6 scaled); when that degenerates the step falls back to a
    secant update.  Converged when |z - e0 - Sigma_II(z)| < tol.
    """
    c = model.coupling
    if not hasattr(c, "sigma_second"):
        raise UnsupportedContinuationError(
            "coupling has no analytic second-sheet extension"
        )
    if guess is None:
        g2_at = float(c.g2(np.asarray([model.e0]))[0])
        z = complex(model.e0, -np.pi * g2_at)
    else:
        z = complex(guess)

    trace = [z]
    prev = None
    for _ in range(max_iter):
        f = complex(_dispersion_second(model, z))
        if abs(f) < tol:
            h = 1e-6 * (1.0 + abs(z))
            dsig = (c.sigma_second(z + h) - c.sigma_second(z - h)) / (2 * h)
            residue = 1.0 / (1.0 - complex(dsig))
            return ResonancePole(position=z, residue=residue)
        h = 1e-6 * (1.0 + abs(z))
        df = (_dispersion_second(model, z + h) - _dispersion_second(model, z - h)) / (2 * h)
        if abs(df) > 1e-12:
            step = f / df
        elif prev is not None and abs(f - prev[1]) > 0:
            step = f * (z - prev[0]) / (f - prev[1])
        else:
            step = f  # last resort: derivative ~ 1 for weak coupling
        prev = (z, f)
        z = z - complex(step)
        trace.append(z)
    raise ConvergenceError(
        f"pole search did not converge in {max_iter} iterations", trace
    )


def _bound_state(model):
    """Real root of x - e0 - Sigma(x) below the continuum, if any.

    Only relevant for half-line couplings at strong coupling; returns
    (position, weight) or None.
    """
    c = model.coupling
    lo_support = c.support[0]
    if not np.isfinite(lo_support):
        return None

    def disp(x):
        return x - model.e0 - float(np.real(c.sigma_first(complex(x, 0.0))))

    # disp is strictly increasing below the support, so a root exists iff
    # disp is still positive just under the threshold
    x_hi = lo_support - 1e-9
    f_hi = disp(x_hi)
    if f_hi <= 0:
        return None  # dispersive term cannot bring it back down below threshold
    x_lo = x_hi - 1.0
    for _ in range(80):
        if disp(x_lo) < 0:
            break
        x_lo *= 2.0
    else:
        return None
    root = brentq(disp, x_lo, x_hi, xtol=1e-14)
    h = 1e-6 * (1.0 + abs(root))
    dsig = np.real(
        (c.sigma_first(complex(root + h, 0.0)) - c.sigma_first(complex(root - h, 0.0)))
        / (2 * h)
    )
    weight = 1.0 / (1.0 - float(dsig))
    return float(root), float(weight)


def spectral_weight(model, w):
    """Weight of the level state: (1/pi) Im [1/(w - i0 - e0 - Sigma(w - i0))].

    Zero off the continuum support (any bound-state point mass is handled
    separately inside `survival_amplitude`).
    """
    c = model.coupling
    w = np.asarray(w, dtype=float)
    lo, hi = c.support
    inside = (w > lo) & (w < hi)
    out = np.zeros_like(w)
    if np.any(inside):
        sig = c.sigma_below(w[inside])
        denom = w[inside] - model.e0 - sig
        out[inside] = np.imag(1.0 / denom) / np.pi
    return out


# ---------------------------------------------------------------------------
# spectral-quadrature route


@lru_cache(maxsize=32)
def _weight_edges(model):
    """Adaptive panel edges for the spectral weight of `model`.

    Seed panels are refined around the resonance, Re(pole) +- 10*|Im(pole)|,
    then graded out to where the weight is negligible; the flat family keeps
    a finite core and hands its Lorentzian tails to the closed-form
    correction in `_flat_tails`.
    """
    c = model.coupling
    pole = find_resonance_pole(model)
    center = pole.position.real
    width = max(abs(pole.position.imag), 1e-12)

    def w_of(x):
        return spectral_weight(model, x)

    if isinstance(c, FlatCoupling):
        omega_cap = 200.0 * max(1.0, c.gamma)
        lo, hi = center - omega_cap, center + omega_cap
        seeds = [lo]
        for r in (100.0, 40.0, 20.0, 10.0, 5.0, 2.0, 1.0, 0.0):
            seeds.append(center - r * width * 10.0 if r else center)
        seeds.extend(center + r * width * 10.0 for r in (1.0, 2.0, 5.0, 10.0, 20.0, 40.0, 100.0))
        seeds.append(hi)
        edges = np.unique(np.clip(np.asarray(seeds), lo, hi))
    else:
        oc = c.omega_c
        hi = oc * 45.0 + center
        lo = 0.0
        seeds = [0.0]
        seeds.extend(10.0 ** np.arange(-8, 0) * oc)
        win_lo = max(center - 10.0 * width, 1e-3 * oc)
        win_hi = center + 10.0 * width
        seeds.extend(np.linspace(win_lo, win_hi, 9))
        grow = win_hi
        while grow < hi:
            grow *= 1.6
            seeds.append(min(grow, hi))
        edges = np.unique(np.asarray([s for s in seeds if lo <= s <= hi] + [hi]))
    return adaptive_panels(w_of, edges, tol=2e-12, degree=10)


def _flat_tails(model, t, omega_cap):
    """Closed-form Lorentzian tails of the flat weight beyond the core.

    Uses int_U^inf exp(-i*u*t)/u^2 du = exp(-i*U*t)/U - i*t*E1(i*U*t); the
    residual of (w - its 1/u^2 asymptote) integrates below 1e-10 for the
    core half-width used here.
    """
    gamma = model.coupling.gamma
    e0 = model.e0
    t = np.asarray(t, dtype=float)
    U = omega_cap  # same half-width on both sides of e0
    out = np.empty(t.shape, dtype=complex)
    zero = t == 0
    if np.any(zero):
        out[zero] = (gamma / (2 * np.pi)) * (2.0 / U)
    pos = ~zero
    if np.any(pos):
        tp = t[pos]
        right = np.exp(-1j * U * tp) / U - 1j * tp * exp1(1j * U * tp)
        tail = right + np.conj(right)
        out[pos] = (gamma / (2 * np.pi)) * np.exp(-1j * e0 * tp) * tail
    return out


def _survival_spectral(model, t):
    edges = _weight_edges(model)
    amp = fourier_integral(lambda x: spectral_weight(model, x), edges, t, degree=10)
    if isinstance(model.coupling, FlatCoupling):
        omega_cap = 200.0 * max(1.0, model.coupling.gamma)
        amp = amp + _flat_tails(model, t, omega_cap)
    bound = _bound_state(model)
    if bound is not None:
        xb, wb = bound
        amp = amp + wb * np.exp(-1j * xb * np.asarray(t, dtype=float))
    return amp


# ---------------------------------------------------------------------------
# pole + background route


def _background_integrand(model, s):
    """-i * g^2(-i s) / (a * b) with a, b the two sheet denominators."""
    c = model.coupling
    z = -1j * np.asarray(s, dtype=complex)
    a = z - model.e0 - c.sigma_first(z)
    b = z - model.e0 - c.sigma_second(z)
    return -1j * c.g2_analytic(z) / (a * b)


def _background(model, t):
    """Branch-cut ray integral int_0^inf phi(s) exp((i/omega_c - t) s) ds.

    The first stretch uses the substitution s = u^2 (killing the sqrt(s)
    threshold factor) on panels graded by the decay scale 1/sqrt(t); the
    remainder uses composite Gauss-Legendre panels no wider than a third of
    the exp(i s/omega_c) chirp period, truncated where exp(-s t) or the
    algebraic decay pushes the integrand below 1e-14, with a two-term
    integration-by-parts correction for the truncated chirped tail.
    """
    c = model.coupling
    oc = c.omega_c
    t = float(t)

    s1 = 4.0
    out = 0.0 + 0.0j

    # threshold stretch via s = u**2
    ustar = 1.0 / np.sqrt(max(t, 1e-30)) if t > 0 else np.sqrt(s1)
    u_hi = np.sqrt(s1)
    u_edges = [0.0]
    u = min(ustar, u_hi)
    while u < u_hi:
        u_edges.append(u)
        u *= 2.0
    u_edges.append(u_hi)
    u_edges = np.unique(np.asarray(u_edges))

    def f_u(u):
        s = u * u
        return 2.0 * u * _background_integrand(model, s) * np.exp(-s * t)

    out += gauss_panels(f_u, u_edges, nodes_per_panel=24)

    # remainder in s, chirp-resolved panels
    s_needed = s1 + (45.0 / t if t > 0 else np.inf)
    s2 = min(max(s1, s_needed), 1.5e3)
    if s2 > s1:
        step = 2.0 * np.pi * oc / 3.0
        n_panels = max(1, int(np.ceil((s2 - s1) / step)))
        s_edges = np.linspace(s1, s2, n_panels + 1)

        def f_s(s):
            return _background_integrand(model, s) * np.exp(-s * t)

        out += gauss_panels(f_s, s_edges, nodes_per_panel=24)

    # truncated chirped tail: integrand = phi(s) * exp(mu s), mu = i/oc - t
    if t * s2 < 40.0:
        mu = 1j / oc - t

        def phi(s):
            return _background_integrand(model, s) * np.exp(-1j * s / oc)

        h = 1e-3 * s2
        p0 = complex(phi(np.asarray([s2]))[0])
        dp = complex(
            (phi(np.asarray([s2 + h]))[0] - phi(np.asarray([s2 - h]))[0]) / (2 * h)
        )
        out += -np.exp(mu * s2) * (p0 / mu + dp / mu**2)
    return out


def _survival_pole_background(model, t):
    t = np.asarray(t, dtype=float)
    pole = find_resonance_pole(model)
    amp = pole.residue * np.exp(-1j * pole.position * t)
    if isinstance(model.coupling, FlatCoupling):
        # no branch point: the deformed contour picks up only the pole
        return amp
    bg = np.asarray([_background(model, tv) for tv in np.atleast_1d(t)])
    return amp + bg.reshape(t.shape)


def survival_amplitude(model, t, method="spectral_quadrature"):
    """A(t) = (psi, exp(-i H t) psi) for the level state; t >= 0.

    Methods: ``spectral_quadrature`` integrates the spectral weight against
    exp(-i w t); ``pole_plus_background`` sums the second-sheet pole residue
    term and the branch-cut ray integral.  Scalar t in, scalar out.
    """
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t_arr < 0):
        raise ValueError("t must be nonnegative")
    if method == "spectral_quadrature":
        amp = _survival_spectral(model, t_arr)
    elif method == "pole_plus_background":
        amp = _survival_pole_background(model, t_arr)
    else:
        raise ValueError("unknown method: " + repr(method))
    if np.isscalar(t) or np.ndim(t) == 0:
        return complex(amp[0])
    return amp


def decay_probability(model, t, method="spectral_quadrature"):
    """p(t) = |A(t)|^2, normalized so that p(0) = 1 exactly.

    The normalization by the computed |A(0)|^2 fixes the unit-mass
    convention and removes the residual quadrature mass error, which would
    otherwise contaminate the short-time 1 - p(t) ~ t^2 regime.
    """
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t_arr < 0):
        raise ValueError("t must be nonnegative")
    a = survival_amplitude(model, t_arr, method=method)
    a0 = survival_amplitude(model, 0.0, method=method)
    p = np.abs(a / a0) ** 2
    if np.isscalar(t) or np.ndim(t) == 0:
        return float(p[0])
    return p
