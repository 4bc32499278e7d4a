"""Grid certification of the auxiliary inequalities behind the quotient
bound: sign patterns of the radial Bessel functions, cubic bounds on their
second derivatives, the coupling-constant chain for small and large
tension, and the two polynomials whose positivity closes the small-tension
case.
"""

import math

import numpy as np
from numpy.polynomial import polynomial as npoly

from . import trial
from .ball import fundamental_tone
from .report import VerificationReport
from .specfun import first_zero_j1prime, series_coeff_dk, ultra_i, ultra_j

P3_CRITICAL_REF = 79.0
Q_CRITICAL_REF = 177.8
DEFAULT_GRID = 4096
_NOISE_FLOOR = 1e-12


def poly_P(x, d):
    """Cubic-in-x polynomial controlling the small-tension coupling bound.

    P(x, d) = 24 d^4 + 60 d^3 - 120 d^2 - 432 d
              + x (-40 d^3 - 119 d^2 - 6 d + 432)
              + x^2 (43 d^2 + 113 d + 54)
              + x^3 (-15 d - 30)

    Evaluated by Horner's rule in x; exact for integer arguments within
    double range.
    """
    p0 = 24 * d**4 + 60 * d**3 - 120 * d**2 - 432 * d
    p1 = -40 * d**3 - 119 * d**2 - 6 * d + 432
    p2 = 43 * d**2 + 113 * d + 54
    p3 = -15 * d - 30
    return p0 + x * (p1 + x * (p2 + x * p3))


def poly_P_critical_points(d):
    """Real roots of dP/dx(x, d), by the quadratic formula."""
    p1 = -40 * d**3 - 119 * d**2 - 6 * d + 432
    p2 = 43 * d**2 + 113 * d + 54
    p3 = -15 * d - 30
    disc = (2 * p2) ** 2 - 12 * p3 * p1
    if disc < 0:
        return ()
    root = math.sqrt(disc)
    return tuple(sorted(((-2 * p2 - root) / (6 * p3),
                         (-2 * p2 + root) / (6 * p3))))


def p_lower_bound(d):
    """Lower bound for P(. , d) on [0, 3]: each term of P is replaced by
    its minimum over x in [0, 3], leaving the quartic
    24 d^4 - 60 d^3 - 477 d^2 - 855 d - 810. Exact for integer d."""
    return 24 * d**4 - 60 * d**3 - 477 * d**2 - 855 * d - 810


def p_lower_bound_prime(d):
    return 96 * d**3 - 180 * d**2 - 954 * d - 855


def verify_P_nonneg(d_range=range(3, 31), grid_size=DEFAULT_GRID):
    """Check P(x, d) >= 0 on [0, 3(d+2)/(d+5)] for each d in d_range.

    The grid minimum is combined with exact evaluation at the interior
    critical points of the cubic.

    Returns
    -------
    VerificationReport
        worst_point = (x, d) of the smallest value seen.
    """
    d_list = [int(d) for d in d_range]
    if not d_list or min(d_list) < 3 or max(d_list) > 100:
        raise ValueError("d_range must be a nonempty subset of [3, 100]")
    worst = (math.inf, (0.0, 0.0))
    scale = 0.0
    for d in d_list:
        xmax = 3.0 * (d + 2) / (d + 5)
        xs = np.linspace(0.0, xmax, grid_size + 1)
        xs = np.append(xs, [c for c in poly_P_critical_points(d)
                            if 0.0 <= c <= xmax])
        vals = poly_P(xs, float(d))
        scale = max(scale, float(np.max(np.abs(vals))))
        i = int(np.argmin(vals))
        if vals[i] < worst[0]:
            worst = (float(vals[i]), (float(xs[i]), float(d)))
    if len(d_list) == 1:
        lemma_id = f"P-nonneg[d={d_list[0]}]"
    else:
        lemma_id = f"P-nonneg[d={min(d_list)}..{max(d_list)}]"
    return VerificationReport.one_sided(
        lemma_id, worst[0], worst[1],
        f"{grid_size + 1} pts on [0;3(d+2)/(d+5)] plus critical pts",
        -1e-9 * (1.0 + scale))


def poly_Q(x):
    """Quartic whose positivity on [0, 12/7] settles the two-dimensional
    coupling bound; the membrane tone of the disk enters as a coefficient.

    Q(x) = (1 - 3x/(2 mu))(mu - x)(36 - 5x)(12 + 4x)
           - (36 mu + (6 mu - 36) x)(12 - 7x),   mu = ainf(2)^2.
    """
    mu = first_zero_j1prime(2) ** 2
    return ((1.0 - 3.0 * x / (2.0 * mu)) * (mu - x) * (36.0 - 5.0 * x)
            * (12.0 + 4.0 * x)
            - (36.0 * mu + (6.0 * mu - 36.0) * x) * (12.0 - 7.0 * x))


def _q_over_x_coeffs():
    # expand Q and strip the root at x = 0
    mu = first_zero_j1prime(2) ** 2
    q = npoly.polymul([1.0, -1.5 / mu], [mu, -1.0])
    q = npoly.polymul(q, [36.0, -5.0])
    q = npoly.polymul(q, [12.0, 4.0])
    q = npoly.polysub(q, npoly.polymul([36.0 * mu, 6.0 * mu - 36.0],
                                       [12.0, -7.0]))
    return q[1:]


def poly_Q_critical_points():
    """Real roots of (Q(x)/x)', by the quadratic formula."""
    c = _q_over_x_coeffs()
    disc = (2.0 * c[2]) ** 2 - 12.0 * c[3] * c[1]
    if disc < 0:
        return ()
    root = math.sqrt(disc)
    return tuple(sorted((float((-2.0 * c[2] - root) / (6.0 * c[3])),
                         float((-2.0 * c[2] + root) / (6.0 * c[3])))))


def spot_values():
    """Reference numbers from the polynomial analyses.

    Returns
    -------
    dict
        Exact integer evaluations of the quartic lower bound g and its
        derivative at d = 7 and d = 5, plus the interior critical points
        of the two polynomial checks: for P(., 3) its own critical point
        and value; for the quartic Q the minimiser of Q(x)/x, with both Q
        and Q/x evaluated there.
    """
    c3 = [x for x in poly_P_critical_points(3) if 0.0 <= x <= 15.0 / 8.0][0]
    cq = [x for x in poly_Q_critical_points() if 0.0 < x <= 12.0 / 7.0][0]
    gq = float(npoly.polyval(cq, _q_over_x_coeffs()))
    return {
        "g-at-7": p_lower_bound(7),
        "g-prime-at-5": p_lower_bound_prime(5),
        "P3-critical-point": c3,
        "P3-critical-value": poly_P(c3, 3.0),
        "Q-critical-point": cq,
        "Q-critical-value": float(poly_Q(cq)),
        "Q-over-x-minimum": gq,
    }


def verify_Q_positive(grid_size=DEFAULT_GRID):
    """Check Q(x)/x > 0 on (0, 12/7], grid plus exact critical points."""
    xmax = 12.0 / 7.0
    xs = np.linspace(0.0, xmax, grid_size + 1)[1:]
    xs = np.append(xs, [c for c in poly_Q_critical_points()
                        if 0.0 < c <= xmax])
    vals = poly_Q(xs) / xs
    i = int(np.argmin(vals))
    return VerificationReport.one_sided(
        "Q-positive", float(vals[i]), (float(xs[i]),),
        f"{grid_size} pts on (0;12/7] plus critical pts", 0.0)


def verify_ij_bounds(d, grid_size=DEFAULT_GRID):
    """Check the cubic Taylor-style bounds on the second derivatives:

    -d1 z + d2 z^3 >= j_1''(z) on [0, sqrt(3(d+2)/(d+5))] and
     d1 z + (6/5) d2 z^3 >= i_1''(z) on [0, sqrt(3)],

    with equality at z = 0. The tolerance absorbs the float noise floor of
    the near-equality region next to 0.
    """
    if d < 2:
        raise ValueError("d must be at least 2")
    d1 = series_coeff_dk(1, d)
    d2 = series_coeff_dk(2, d)
    checks = []
    zj = np.linspace(0.0, math.sqrt(3.0 * (d + 2) / (d + 5)),
                     grid_size + 1)[1:]
    mj = (-d1 * zj + d2 * zj**3) - ultra_j(1, d, zj, deriv=2)
    i = int(np.argmin(mj))
    checks.append((float(mj[i]), (1.0, zj[i])))
    zi = np.linspace(0.0, math.sqrt(3.0), grid_size + 1)[1:]
    mi = (d1 * zi + 1.2 * d2 * zi**3) - ultra_i(1, d, zi, deriv=2)
    i = int(np.argmin(mi))
    checks.append((float(mi[i]), (2.0, zi[i])))
    margin, point = min(checks, key=lambda c: c[0])
    scale = max(float(np.max(np.abs(mj))), float(np.max(np.abs(mi))))
    return VerificationReport.one_sided(
        f"ij-bounds[d={d}]", margin, point,
        f"{grid_size} pts per bound; open at the z=0 equality",
        -_NOISE_FLOOR * (1.0 + scale))


def verify_bessel_signs(d):
    """Grid-check the five sign facts j_l > 0 (l = 1..5), j_1' > 0,
    j_2' > 0, j_1'' < 0 and j_1'''' > 0 on their intervals up to the
    first zero of j_1'. worst_point records (item, l, z)."""
    if d < 2:
        raise ValueError("d must be at least 2")
    n = 10**4
    ainf = first_zero_j1prime(d)
    closed = np.linspace(0.0, ainf, n + 1)[1:]
    open_right = np.linspace(0.0, ainf, n + 1)[1:-1]
    checks = []
    for l in range(1, 6):
        vals = ultra_j(l, d, closed)
        i = int(np.argmin(vals))
        checks.append((float(vals[i]), (1.0, float(l), closed[i])))
    vals = ultra_j(1, d, open_right, deriv=1)
    i = int(np.argmin(vals))
    checks.append((float(vals[i]), (2.0, 1.0, open_right[i])))
    vals = ultra_j(2, d, closed, deriv=1)
    i = int(np.argmin(vals))
    checks.append((float(vals[i]), (3.0, 2.0, closed[i])))
    vals = -ultra_j(1, d, closed, deriv=2)
    i = int(np.argmin(vals))
    checks.append((float(vals[i]), (4.0, 1.0, closed[i])))
    vals = ultra_j(1, d, closed, deriv=4)
    i = int(np.argmin(vals))
    checks.append((float(vals[i]), (5.0, 1.0, closed[i])))
    margin, point = min(checks, key=lambda c: c[0])
    return VerificationReport.one_sided(
        f"bessel-signs[d={d}]", margin, point,
        f"5 items; {n} pts on (0;ainf] (item 2 open right)", 0.0)


def gamma_star(a, d):
    """Rational lower threshold for the coupling constant:
    gamma* = (3(d+2) - a^2 (d+5)) / ((3 + a^2)(d + 2))."""
    return (3.0 * (d + 2) - a * a * (d + 5)) / ((3.0 + a * a) * (d + 2))


def _small_tau_checks(tau_grid, d):
    # gamma >= gamma* plus the wavenumber regime bounds
    #   d a^2/(d - a^2) > b^2 > (d+2) a^2/(d+2-a^2)
    # over the small-tension regime tau <= 9/(d+5)
    checks = []
    for tau in tau_grid:
        m = fundamental_tone(float(tau), d)
        a2, b2 = m.a**2, m.b**2
        checks.append((m.gamma - gamma_star(m.a, d), (tau, m.a), "gamma"))
        checks.append((b2 - (d + 2) * a2 / (d + 2 - a2), (tau, m.a), "b2-low"))
        checks.append((d * a2 / (d - a2) - b2, (tau, m.a), "b2-high"))
    return checks


def _large_tau_checks(tau_grid, d):
    checks = []
    for tau in tau_grid:
        m = fundamental_tone(float(tau), d)
        checks.append((tau - 3.0 * m.a**2 / (d + 2), (tau, m.a), "large-tau"))
    return checks


def default_small_tau_grid(d, n=64):
    edge = 9.0 / (d + 5)
    return np.logspace(math.log10(edge) - 3.0, math.log10(edge), n)


def default_large_tau_grid(d, n=64):
    edge = 9.0 / (d + 5)
    return np.logspace(math.log10(edge), 2.0, n + 1)[1:]


def verify_gamma_chain(tau_grid=None, d=2):
    """Check gamma >= gamma* for tau <= 9/(d+5), the complementary
    inequality tau - 3a^2/(d+2) > 0 for tau > 9/(d+5), and the wavenumber
    regime bounds, with every mode solved from scratch.

    Parameters
    ----------
    tau_grid : array_like, optional
        Small-tension sample, within (0, 9/(d+5)]; defaults to 64
        log-spaced points over three decades up to the regime edge.
    d : int
        Dimension, >= 2.

    Returns
    -------
    VerificationReport
    """
    edge = 9.0 / (d + 5)
    if tau_grid is None:
        tau_grid = default_small_tau_grid(d)
    tau_grid = np.asarray(tau_grid, dtype=float)
    if tau_grid.size == 0 or np.any(tau_grid <= 0) or np.any(tau_grid > edge):
        raise ValueError("tau_grid must lie within (0, 9/(d+5)]")
    checks = (_small_tau_checks(tau_grid, d)
              + _large_tau_checks(default_large_tau_grid(d), d))
    margin, point, _ = min(checks, key=lambda c: c[0])
    return VerificationReport.one_sided(
        f"gamma-chain[d={d}]", margin, point,
        f"{tau_grid.size} small-tension pts; 64 large-tension pts", 0.0)


def _reduce(lemma_id, entries, grid_spec):
    # entries: (margin, point) pairs; emit the worst as one report
    margin, point = min(entries, key=lambda c: c[0])
    return VerificationReport.one_sided(lemma_id, margin, point, grid_spec,
                                        0.0)


def full_suite(d, trial_tau_grid=None, include_global=True,
               grid_size=DEFAULT_GRID):
    """Run every lemma check for one dimension, one report per lemma.

    Parameters
    ----------
    d : int
        Dimension, >= 2.
    trial_tau_grid : array_like, optional
        Tension values for the profile scans; defaults to 8 log-spaced
        points in [1e-3, 100].
    include_global : bool, optional
        Also emit the dimension-independent rows (the polynomial lemmas
        over their full ranges and the scalar binomial estimate).

    Returns
    -------
    list of VerificationReport
    """
    if trial_tau_grid is None:
        trial_tau_grid = np.logspace(-3.0, 2.0, 8)
    reports = [verify_bessel_signs(d), verify_ij_bounds(d, grid_size)]
    if d >= 3:
        reports.append(verify_P_nonneg([d], grid_size))

    small = _small_tau_checks(default_small_tau_grid(d), d)
    reports.append(_reduce(f"gamma-lower-bound[d={d}]",
                           [(m, p) for m, p, _ in small],
                           "64 log-spaced tension pts up to 9/(d+5)"))
    large = _large_tau_checks(default_large_tau_grid(d), d)
    reports.append(_reduce(f"large-tension[d={d}]",
                           [(m, p) for m, p, _ in large],
                           "64 log-spaced tension pts above 9/(d+5)"))

    conc, mono, denom, hquant = [], [], [], []
    inner = np.linspace(0.0, 1.0, grid_size + 2)[1:-1]
    outer = np.linspace(1.0 + 1e-9, 10.0, grid_size)
    combined = np.concatenate([inner, outer])
    for tau in trial_tau_grid:
        prof = trial.TrialProfile(fundamental_tone(float(tau), d))
        rep = trial.concavity_scan(prof, grid_size)
        conc.append((rep.worst_margin, (tau,) + rep.worst_point))
        rep = trial.partial_monotonicity_scan(prof, inner, outer)
        mono.append((rep.worst_margin, (tau,) + rep.worst_point))
        den = trial.rho(prof, combined) ** 2
        rises = den[1:] - den[:-1]
        i = int(np.argmin(rises))
        denom.append((float(rises[i]), (tau, combined[i])))
        quant = trial.h_decrease_quantity(prof, np.append(inner, 1.0))
        i = int(np.argmin(quant))
        hquant.append((float(quant[i]), (tau, np.append(inner, 1.0)[i])))
    tau_spec = (f"{len(trial_tau_grid)} tension pts in "
                f"[{trial_tau_grid[0]:g};{trial_tau_grid[-1]:g}]")
    reports.append(_reduce(f"profile-concavity[d={d}]", conc,
                           f"{tau_spec}; {grid_size} radial pts"))
    reports.append(_reduce(f"numerator-monotone[d={d}]", mono,
                           f"{tau_spec}; {grid_size} inner and outer pts"))
    reports.append(_reduce(f"denominator-increase[d={d}]", denom,
                           f"{tau_spec}; {2 * grid_size} radial pts"))
    reports.append(_reduce(f"h-decrease-condition[d={d}]", hquant,
                           f"{tau_spec}; {grid_size} pts on (0;1]"))

    if include_global:
        reports.append(verify_P_nonneg(range(3, 31), grid_size))
        reports.append(verify_Q_positive(grid_size))

        xs = np.linspace(0.0, 1.0, grid_size + 2)[1:-1]
        vals = (1.0 - xs) ** 1.5 - (1.0 - 1.5 * xs)
        i = int(np.argmin(vals))
        reports.append(VerificationReport.one_sided(
            "binomial-three-halves", float(vals[i]), (xs[i],),
            f"{grid_size} pts on (0;1)", 0.0))
    return reports
