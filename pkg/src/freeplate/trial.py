"""Radial trial profile for the quotient bound.

The profile rho equals the solved ball mode's radial part on [0, 1] and
continues linearly beyond r = 1. This module evaluates rho, its
derivatives, the quotient-numerator integrand N[rho], and runs the
pointwise scans (concavity of rho, partial monotonicity of N) that the
isoperimetric argument relies on.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import polynomial as npoly

from .ball import BallMode
from .report import VerificationReport
from .specfun import ultra_i, ultra_j

ENDPOINT_TOL = 1e-10
_EQ_SLACK = 1e-12


@dataclass(frozen=True)
class TrialProfile:
    """Radial trial function built from a unit-ball mode.

    Parameters
    ----------
    mode : BallMode
        Solved fundamental mode of the unit ball (radius must be 1).
    small_r_threshold : float, optional
        Below this radius the profile and its derived ratios are evaluated
        by explicit power series, avoiding 0/0 in (rho - r rho')/r^2.
    """

    mode: BallMode
    small_r_threshold: float = 1e-3

    def __post_init__(self):
        if self.mode.radius != 1.0:
            raise ValueError("trial profile requires a unit-ball mode (radius 1)")
        if not 0.0 < self.small_r_threshold <= 0.1:
            raise ValueError("small_r_threshold must lie in (0, 0.1]")


@lru_cache(maxsize=32)
def _series_coeffs(profile):
    # rho(r) = sum_k A_k r^(1+2k) with
    # A_k = c_k ((-1)^k a^(1+2k) + gamma b^(1+2k)),
    # c_k = 1 / (2^(s+1+2k) k! Gamma(s+k+2)), s = (d-2)/2
    m = profile.mode
    s = (m.d - 2) / 2.0
    zb = m.b * profile.small_r_threshold
    nterms = min(80, max(10, int(2.0 * zb) + 10))
    c0 = math.exp(-(s + 1.0) * math.log(2.0) - math.lgamma(s + 2.0))
    ca = c0 * m.a
    cb = c0 * m.b
    A = np.empty(nterms)
    for k in range(nterms):
        A[k] = ca + m.gamma * cb
        ca *= -m.a * m.a / (4.0 * (k + 1) * (s + k + 2.0))
        cb *= m.b * m.b / (4.0 * (k + 1) * (s + k + 2.0))
    k = np.arange(nterms, dtype=float)
    return {
        "rho": A,                              # rho = r * P(r^2; .)
        "d1": (1.0 + 2.0 * k) * A,             # rho' = P(r^2; .)
        "d2": (2.0 * k * (1.0 + 2.0 * k) * A)[1:],   # rho'' = r * P(r^2; .)
        "q": (-2.0 * k * A)[1:],               # (rho - r rho')/r^2 = r * P(r^2; .)
    }


@lru_cache(maxsize=32)
def _edge_values(profile):
    # value and slope of the mode at r = 1; the linear extension is
    # rho(r) = c0 + slope * r with c0 = rho(1) - rho'(1)
    m = profile.mode
    r1 = ultra_j(1, m.d, m.a) + m.gamma * ultra_i(1, m.d, m.b)
    rp1 = (m.a * ultra_j(1, m.d, m.a, deriv=1)
           + m.gamma * m.b * ultra_i(1, m.d, m.b, deriv=1))
    return r1, rp1


def _validate_r(r):
    arr = np.asarray(r, dtype=float)
    if arr.size and (np.any(np.isnan(arr)) or np.any(arr < 0)):
        raise ValueError("r must be nonnegative and finite")
    return arr


def _eval_pieces(profile, r):
    # returns rho, rho', rho'', q = (rho - r rho')/r^2, p = rho/r, all
    # finite at r = 0 through the series branch (q -> 0, p -> rho'(0))
    m = profile.mode
    thr = profile.small_r_threshold
    r1, rp1 = _edge_values(profile)
    c0 = r1 - rp1
    out = {name: np.empty_like(r) for name in ("rho", "d1", "d2", "q", "p")}

    tiny = r < thr
    mid = (~tiny) & (r < 1.0)
    far = r >= 1.0

    if np.any(tiny):
        cs = _series_coeffs(profile)
        t = r[tiny]
        t2 = t * t
        out["rho"][tiny] = t * npoly.polyval(t2, cs["rho"])
        out["d1"][tiny] = npoly.polyval(t2, cs["d1"])
        out["d2"][tiny] = t * npoly.polyval(t2, cs["d2"])
        out["q"][tiny] = t * npoly.polyval(t2, cs["q"])
        out["p"][tiny] = npoly.polyval(t2, cs["rho"])
    if np.any(mid):
        t = r[mid]
        za = m.a * t
        zb = m.b * t
        j1 = ultra_j(1, m.d, za)
        i1 = ultra_i(1, m.d, zb)
        out["rho"][mid] = j1 + m.gamma * i1
        out["d1"][mid] = (m.a * ultra_j(1, m.d, za, deriv=1)
                          + m.gamma * m.b * ultra_i(1, m.d, zb, deriv=1))
        out["d2"][mid] = (m.a**2 * ultra_j(1, m.d, za, deriv=2)
                          + m.gamma * m.b**2 * ultra_i(1, m.d, zb, deriv=2))
        # j_1 - z j_1' = z j_2 and i_1 - z i_1' = -z i_2 turn the defect
        # (rho - r rho')/r^2 into a cancellation-free combination
        out["q"][mid] = (m.a**2 * ultra_j(2, m.d, za) / za
                         - m.gamma * m.b**2 * ultra_i(2, m.d, zb) / zb)
        out["p"][mid] = m.a * j1 / za + m.gamma * m.b * i1 / zb
    if np.any(far):
        t = r[far]
        out["rho"][far] = c0 + rp1 * t
        out["d1"][far] = rp1
        out["d2"][far] = 0.0
        out["q"][far] = c0 / (t * t)
        out["p"][far] = c0 / t + rp1
    return out


def rho(profile, r, deriv=0):
    """Evaluate the trial profile or one of its first two derivatives.

    Parameters
    ----------
    profile : TrialProfile
    r : float or array_like
        Radii, >= 0.
    deriv : int, optional
        Derivative order, 0, 1 or 2.

    Returns
    -------
    float or ndarray
        rho^(deriv)(r); beyond r = 1 the profile is linear, so the second
        derivative is 0 there.
    """
    if deriv not in (0, 1, 2):
        raise ValueError("deriv must be 0, 1 or 2")
    arr = _validate_r(r)
    pieces = _eval_pieces(profile, np.atleast_1d(arr))
    vals = pieces[("rho", "d1", "d2")[deriv]]
    return float(vals[0]) if arr.ndim == 0 else vals


def numerator_integrand(profile, r):
    """Radial integrand N[rho] of the quotient-bound numerator.

    N = (rho'')^2 + 3(d-1)(rho - r rho')^2 / r^4 + tau (rho')^2
        + tau (d-1) rho^2 / r^2,
    with the analytic limit tau * d * rho'(0)^2 at r = 0.

    Parameters
    ----------
    profile : TrialProfile
    r : float or array_like
        Radii, >= 0.

    Returns
    -------
    float or ndarray
    """
    arr = _validate_r(r)
    m = profile.mode
    pc = _eval_pieces(profile, np.atleast_1d(arr))
    vals = (pc["d2"] ** 2 + 3.0 * (m.d - 1) * pc["q"] ** 2
            + m.tau * pc["d1"] ** 2 + m.tau * (m.d - 1) * pc["p"] ** 2)
    return float(vals[0]) if arr.ndim == 0 else vals


def h_decrease_quantity(profile, r):
    """Quantity (6/r^2)(rho - r rho') + 3 rho'' + tau rho.

    Its positivity on (0, 1] makes h(r) = 3(rho - r rho')^2/r^4
    + tau rho^2/r^2 decreasing, the step that needs the gamma chain.
    """
    arr = _validate_r(r)
    pc = _eval_pieces(profile, np.atleast_1d(arr))
    vals = 6.0 * pc["q"] + 3.0 * pc["d2"] + profile.mode.tau * pc["rho"]
    return float(vals[0]) if arr.ndim == 0 else vals


def _h_values(profile, r):
    pc = _eval_pieces(profile, r)
    return 3.0 * pc["q"] ** 2 + profile.mode.tau * pc["p"] ** 2


def concavity_scan(profile, grid_size=4096):
    """Check rho'' < 0 strictly inside (0, 1) and 0 at the endpoints.

    Also checks the mechanism behind it: the fourth derivative of the
    radial part is positive on (0, 1], so rho'' is strictly convex and
    can only vanish at the ends.

    Parameters
    ----------
    profile : TrialProfile
    grid_size : int, optional
        Number of interior grid points, at least 1000.

    Returns
    -------
    VerificationReport
        One-sided report; worst_margin > 0 means every subcheck passed
        with that much room.
    """
    if grid_size < 1000:
        raise ValueError("grid_size must be at least 1000")
    m = profile.mode
    checks = []

    rs = np.linspace(0.0, 1.0, grid_size + 2)[1:-1]
    neg = -rho(profile, rs, deriv=2)
    i = int(np.argmin(neg))
    checks.append((float(neg[i]), (rs[i],)))

    # endpoints: rho''(0) = 0 by the odd series, rho''(1-) = 0 by the
    # construction of gamma; both as equalities at ENDPOINT_TOL
    end0 = abs(rho(profile, 0.0, deriv=2))
    end1 = abs(m.a**2 * ultra_j(1, m.d, m.a, deriv=2)
               + m.gamma * m.b**2 * ultra_i(1, m.d, m.b, deriv=2))
    checks.append((ENDPOINT_TOL - end0, (0.0,)))
    checks.append((ENDPOINT_TOL - end1, (1.0,)))

    rs4 = np.linspace(0.0, 1.0, grid_size + 1)[1:]
    r4 = (m.a**4 * ultra_j(1, m.d, m.a * rs4, deriv=4)
          + m.gamma * m.b**4 * ultra_i(1, m.d, m.b * rs4, deriv=4))
    i = int(np.argmin(r4))
    checks.append((float(r4[i]), (rs4[i],)))

    margin, point = min(checks, key=lambda c: c[0])
    return VerificationReport.one_sided(
        f"profile-concavity[d={m.d};tau={m.tau:g}]", margin, point,
        f"{grid_size} interior pts; endpoints; 4th deriv on (0;1]", 0.0)


def partial_monotonicity_scan(profile, inner_grid=None, outer_grid=None,
                              r_max=10.0):
    """Check that N[rho] inside the unit ball exceeds N[rho] outside.

    Verifies min over the inner grid of N > max over the outer grid, and
    the three ingredients separately: (rho'')^2 positive inside and zero
    outside, tau (rho')^2 non-increasing, and h(r) = 3(rho - r rho')^2/r^4
    + tau rho^2/r^2 decreasing. Also checks that rho^2 increases (the
    denominator side) and that the h-decrease quantity is positive on
    (0, 1].

    Parameters
    ----------
    profile : TrialProfile
    inner_grid, outer_grid : array_like, optional
        Strictly inside (0, 1) and within [1, r_max]; defaults are 4096
        points each, the outer grid starting just outside the ball.
    r_max : float, optional
        Outer reach of the scan, at least 3.

    Returns
    -------
    VerificationReport
    """
    if r_max < 3.0:
        raise ValueError("r_max must be at least 3")
    if inner_grid is None:
        inner_grid = np.linspace(0.0, 1.0, 4098)[1:-1]
    if outer_grid is None:
        outer_grid = np.linspace(1.0 + 1e-9, r_max, 4096)
    inner = _validate_r(inner_grid)
    outer = _validate_r(outer_grid)
    if inner.size == 0 or np.any(inner <= 0) or np.any(inner >= 1):
        raise ValueError("inner grid must lie strictly inside (0, 1)")
    if outer.size == 0 or np.any(outer < 1) or np.any(outer > r_max):
        raise ValueError("outer grid must lie within [1, r_max]")
    m = profile.mode
    checks = []

    n_in = numerator_integrand(profile, inner)
    n_out = numerator_integrand(profile, outer)
    i, j = int(np.argmin(n_in)), int(np.argmax(n_out))
    checks.append((float(n_in[i] - n_out[j]), (inner[i], outer[j])))

    d2_in = rho(profile, inner, deriv=2)
    i = int(np.argmin(d2_in**2))
    checks.append((float(d2_in[i] ** 2), (inner[i],)))
    d2_out_max = float(np.max(rho(profile, outer, deriv=2) ** 2))
    checks.append((_EQ_SLACK - d2_out_max, (outer[0],)))

    combined = np.concatenate([inner, outer])
    grad = m.tau * rho(profile, combined, deriv=1) ** 2
    drops = grad[:-1] - grad[1:]
    i = int(np.argmin(drops))
    checks.append((float(drops[i]) + _EQ_SLACK * float(np.max(grad)),
                   (combined[i],)))

    h = _h_values(profile, combined)
    drops = h[:-1] - h[1:]
    i = int(np.argmin(drops))
    checks.append((float(drops[i]), (combined[i],)))

    den = rho(profile, combined) ** 2
    rises = den[1:] - den[:-1]
    i = int(np.argmin(rises))
    checks.append((float(rises[i]), (combined[i],)))
    checks.append((float(np.min(den[inner.size:]) - np.max(den[:inner.size])),
                   (inner[-1], outer[0])))

    quant = h_decrease_quantity(profile, np.append(inner, 1.0))
    i = int(np.argmin(quant))
    checks.append((float(quant[i]), (np.append(inner, 1.0)[i],)))

    margin, point = min(checks, key=lambda c: c[0])
    return VerificationReport.one_sided(
        f"numerator-monotone[d={m.d};tau={m.tau:g}]", margin, point,
        f"inner {inner.size} pts in (0;1); outer {outer.size} pts up to "
        f"{r_max:g}", 0.0)
