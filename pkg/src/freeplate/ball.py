"""Fundamental mode of the free plate under tension on a d-dimensional ball.

The first nonzero eigenvalue omega of Delta^2 u - tau Delta u = omega u with
natural boundary conditions has an l = 1 mode u = R(r) Y_1 with radial part

    R(r) = j_1(a r) + gamma i_1(b r),    b^2 - a^2 = tau,  omega = a^2 b^2.

gamma enforces the second-derivative boundary condition R''(radius) = 0; the
wavenumber a is the smallest root of the scalar residual of the remaining
natural condition (secular_V below). This module solves for the mode and
exposes the linear-in-tension eigenvalue bounds and the membrane comparison
constant.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .specfun import first_zero_j1prime, ultra_i, ultra_j

RESIDUAL_TOL = 1e-9


@dataclass(frozen=True)
class BallMode:
    """Solved fundamental mode: dimension, tension, radius, wavenumbers,
    coupling constant, and eigenvalue."""

    d: int
    tau: float
    radius: float
    a: float
    b: float
    gamma: float
    omega: float

    def __post_init__(self):
        if not (isinstance(self.d, int) and self.d >= 2):
            raise ValueError("dimension d must be an integer >= 2")
        if not (self.tau > 0 and self.radius > 0):
            raise ValueError("tau and radius must be positive")
        if abs(self.b**2 - self.a**2 - self.tau) > 1e-9 * (1.0 + self.tau):
            raise ValueError("wavenumbers do not satisfy b^2 - a^2 = tau")
        if abs(self.omega - self.a**2 * self.b**2) > 1e-9 * self.omega:
            raise ValueError("omega does not equal a^2 b^2")
        if self.gamma <= 0:
            raise ValueError("gamma must be positive")
        if not 0 < self.a * self.radius < first_zero_j1prime(self.d):
            raise ValueError("a radius must lie in (0, first zero of j_1')")


def _check_wavenumber(a, tau, d, radius):
    if not tau > 0:
        raise ValueError("tau must be positive")
    if not radius > 0:
        raise ValueError("radius must be positive")
    amax = first_zero_j1prime(d) / radius
    a = np.asarray(a, dtype=float)
    if np.any(a <= 0) or np.any(a >= amax):
        raise ValueError(f"wavenumber a must lie in (0, {amax:.6g})")
    return a


def _gamma_vec(a, tau, d, radius):
    b = np.sqrt(a * a + tau)
    za, zb = a * radius, b * radius
    j1pp = ultra_j(1, d, za, deriv=2)
    i1pp = ultra_i(1, d, zb, deriv=2)
    return -(a * a) * j1pp / (b * b * i1pp)


def _secular_vec(a, tau, d, radius):
    b = np.sqrt(a * a + tau)
    za, zb = a * radius, b * radius
    gamma = _gamma_vec(a, tau, d, radius)
    j1 = ultra_j(1, d, za)
    i1 = ultra_i(1, d, zb)
    j1p = ultra_j(1, d, za, deriv=1)
    i1p = ultra_i(1, d, zb, deriv=1)
    val = j1 + gamma * i1
    slope = a * j1p + gamma * b * i1p
    return (tau + (d - 1) / radius**2) * slope - (d - 1) / radius**3 * val \
        + a**3 * j1p - gamma * b**3 * i1p


def gamma_of(a, tau, d, radius=1.0):
    """Coupling constant gamma = -a^2 j_1''(aR) / (b^2 i_1''(bR)), b^2 = a^2 + tau.

    Strictly positive on 0 < aR < first zero of j_1', because j_1'' < 0 there
    and i_1'' > 0 everywhere; makes R''(radius) vanish identically.
    """
    a = _check_wavenumber(a, tau, d, radius)
    return float(_gamma_vec(a, tau, d, radius))


def secular_V(a, tau, d, radius=1.0):
    """Residual of the remaining natural boundary condition at r = radius
    for the l = 1 mode with gamma chosen by gamma_of.

    Closed form (validated in the tests against a finite-difference
    application of the boundary operator on the sphere):
        (tau + (d-1)/R^2) R'(R) - ((d-1)/R^3) R(R)
        + a^3 j_1'(aR) - gamma b^3 i_1'(bR).
    """
    a = _check_wavenumber(a, tau, d, radius)
    return float(_secular_vec(a, tau, d, radius))


def _residual_scales(mode):
    """Natural scales and residuals of the two boundary conditions."""
    d, R = mode.d, mode.radius
    a, b, gamma, tau = mode.a, mode.b, mode.gamma, mode.tau
    t1 = a * a * ultra_j(1, d, a * R, deriv=2)
    t2 = gamma * b * b * ultra_i(1, d, b * R, deriv=2)
    m_res, m_scale = abs(t1 + t2), abs(t1) + abs(t2)
    j1 = ultra_j(1, d, a * R)
    i1 = ultra_i(1, d, b * R)
    j1p = ultra_j(1, d, a * R, deriv=1)
    i1p = ultra_i(1, d, b * R, deriv=1)
    terms = [(tau + (d - 1) / R**2) * (a * j1p + gamma * b * i1p),
             -(d - 1) / R**3 * (j1 + gamma * i1),
             a**3 * j1p, -gamma * b**3 * i1p]
    v_res, v_scale = abs(sum(terms)), sum(abs(t) for t in terms)
    return m_res, m_scale, v_res, v_scale


def boundary_residuals(mode):
    """Relative residuals of the moment and shear boundary conditions,
    each scaled by the sum of magnitudes of its terms."""
    m_res, m_scale, v_res, v_scale = _residual_scales(mode)
    return m_res / m_scale, v_res / v_scale


def fundamental_tone(tau, d, radius=1.0):
    """Solve for the fundamental mode of the ball: smallest positive root of
    secular_V in (0, ainf/radius), refined to relative tolerance 1e-12."""
    if not (isinstance(d, int) and d >= 2):
        raise ValueError("dimension d must be an integer >= 2")
    if not (np.isfinite(tau) and tau > 0):
        raise ValueError("tau must be positive")
    if not (np.isfinite(radius) and radius > 0):
        raise ValueError("radius must be positive")
    amax = first_zero_j1prime(d) / radius
    grid = amax * np.linspace(1e-6, 1.0 - 1e-10, 1600)
    vals = _secular_vec(grid, tau, d, radius)
    sgn = np.sign(vals)
    flips = np.nonzero(sgn[:-1] * sgn[1:] < 0)[0]
    if flips.size == 0:
        raise RuntimeError(
            "no sign change of the secular function in (0, ainf/radius); "
            f"scan trace: {grid.size} points on ({grid[0]:.6g}, {grid[-1]:.6g}), "
            f"V range [{vals.min():.6g}, {vals.max():.6g}], "
            f"endpoints V={vals[0]:.6g} and V={vals[-1]:.6g} "
            f"(tau={tau:g}, d={d}, radius={radius:g})")
    i = flips[0]
    a = brentq(lambda t: float(_secular_vec(np.float64(t), tau, d, radius)),
               grid[i], grid[i + 1], xtol=1e-14 * amax, rtol=1e-13)
    b = math.sqrt(a * a + tau)
    gamma = float(_gamma_vec(np.float64(a), tau, d, radius))
    mode = BallMode(d=d, tau=float(tau), radius=float(radius), a=float(a),
                    b=b, gamma=gamma, omega=a * a * b * b)
    m_res, m_scale, v_res, v_scale = _residual_scales(mode)
    if m_res > RESIDUAL_TOL * m_scale or v_res > RESIDUAL_TOL * v_scale:
        raise RuntimeError(
            f"boundary residuals exceed tolerance: M {m_res:.3g}/{m_scale:.3g}, "
            f"V {v_res:.3g}/{v_scale:.3g}")
    return mode


@lru_cache(maxsize=None)
def membrane_C(d):
    """Hessian-to-mass ratio of the free-membrane fundamental mode of the
    unit ball, C(B) = int |D^2 v|^2 / int v^2 for v = j_1(ainf r) Y_1.

    Reduces to 1D integrals with weight r^(d-1):
        numerator integrand  (rho'')^2 + 3(d-1) ((rho - r rho')/r^2)^2,
        rho(r) = j_1(ainf r), (rho - r rho')/r^2 = ainf^2 j_2(ainf r)/(ainf r).
    """
    ainf = first_zero_j1prime(d)

    def hess(r):
        rpp = ainf**2 * ultra_j(1, d, ainf * r, deriv=2)
        ratio = ainf**2 * ultra_j(2, d, ainf * r) / (ainf * r)
        return (rpp**2 + 3 * (d - 1) * ratio**2) * r ** (d - 1)

    def mass(r):
        return ultra_j(1, d, ainf * r) ** 2 * r ** (d - 1)

    num, num_err = quad(hess, 0.0, 1.0, epsabs=1e-14, epsrel=1e-10, limit=200)
    den, den_err = quad(mass, 0.0, 1.0, epsabs=1e-14, epsrel=1e-10, limit=200)
    return num / den


def tone_bounds(tau, d):
    """Linear-in-tension bounds for the unit ball: (lower, upper_coord,
    upper_membrane) = (tau mu, tau (d+2), C(B) + tau mu) with mu = ainf^2.

    The coordinate upper bound uses int_B |x|^2 dx = |B| d/(d+2).
    """
    mu = first_zero_j1prime(d) ** 2
    return tau * mu, tau * (d + 2), membrane_C(d) + tau * mu


def infinite_tension_ratio(d, tau_list):
    """omega_1(tau)/tau along an increasing list of positive tensions; the
    ratio approaches mu = ainf^2 from above, squeezed by mu + C(B)/tau."""
    taus = [float(t) for t in tau_list]
    if any(t <= 0 for t in taus):
        raise ValueError("tensions must be positive")
    if any(t2 <= t1 for t1, t2 in zip(taus, taus[1:])):
        raise ValueError("tensions must be increasing")
    return [fundamental_tone(t, d).omega / t for t in taus]
