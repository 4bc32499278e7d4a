import math

import numpy as np
import pytest

from freeplate import ball
from freeplate.specfun import first_zero_j1prime, ultra_i, ultra_j

from oracles import (fd_boundary_V, fd_hessian_sq_norm_vec, mp_ultra,
                     rayleigh_ritz_tone, uniform_ball_samples)


def secular_term_scale(a, tau, d, radius):
    """Sum of absolute values of the four closed-form terms; the natural
    magnitude against which the boundary residual is measured."""
    b = math.sqrt(a * a + tau)
    g = ball.gamma_of(a, tau, d, radius)
    j1 = ultra_j(1, d, a * radius)
    i1 = ultra_i(1, d, b * radius)
    j1p = ultra_j(1, d, a * radius, deriv=1)
    i1p = ultra_i(1, d, b * radius, deriv=1)
    return (abs((tau + (d - 1) / radius**2) * (a * j1p + g * b * i1p))
            + abs((d - 1) / radius**3 * (j1 + g * i1))
            + abs(a**3 * j1p) + abs(g * b**3 * i1p))


def test_gamma_definition_rearranged():
    for d, tau, a, R in ((2, 1.0, 0.9, 1.0), (3, 0.3, 1.2, 1.0),
                         (5, 4.0, 0.4, 1.0), (2, 1.0, 1.1, 1.5)):
        g = ball.gamma_of(a, tau, d, R)
        b = math.sqrt(a * a + tau)
        t1 = a * a * ultra_j(1, d, a * R, deriv=2)
        t2 = g * b * b * ultra_i(1, d, b * R, deriv=2)
        assert abs(t1 + t2) <= 1e-13 * (abs(t1) + abs(t2))


def test_gamma_positive():
    for a in (0.5, 1.0, 1.5):
        assert ball.gamma_of(a, 1.0, 2, 1.0) > 0


def test_gamma_against_series_oracle():
    d, tau, a = 3, 1.0, 1.0
    b = math.sqrt(a * a + tau)
    expected = -a * a * mp_ultra("j", 1, d, a, 2) / (b * b * mp_ultra("i", 1, d, b, 2))
    assert ball.gamma_of(a, tau, d) == pytest.approx(expected, rel=1e-12)


def test_secular_zero_at_solved_root():
    mode = ball.fundamental_tone(1.0, 2)
    scale = secular_term_scale(mode.a, mode.tau, mode.d, mode.radius)
    assert abs(ball.secular_V(mode.a, 1.0, 2)) <= 1e-10 * scale


def test_secular_single_sign_change():
    for d in (2, 3):
        ainf = first_zero_j1prime(d)
        grid = np.linspace(0.05, ainf - 0.05, 4000)
        for tau in (0.1, 1.0, 10.0):
            vals = ball._secular_vec(grid, tau, d, 1.0)
            sgn = np.sign(vals)
            flips = np.count_nonzero(sgn[:-1] * sgn[1:] < 0)
            assert flips == 1


def test_secular_closed_form_matches_fd_operator():
    # anti-derivation-error check: apply the raw boundary operator
    #   V u = tau u_r - r^-2 Delta_S(u_r - u/r) - (Delta u)_r
    # by finite differences on the sphere and compare with the closed form,
    # normalized by the operator's natural term-sum magnitude
    rng = np.random.default_rng(99)
    for _ in range(20):
        d = int(rng.integers(2, 6))
        tau = float(rng.uniform(0.2, 5.0))
        R = float(rng.choice([1.0, 1.37]))
        a = float(rng.uniform(0.15, 0.95) * first_zero_j1prime(d) / R)
        b = math.sqrt(a * a + tau)
        g = ball.gamma_of(a, tau, d, R)
        fd = fd_boundary_V(lambda r: ultra_j(1, d, a * r) + g * ultra_i(1, d, b * r),
                           R, d, tau)
        cf = ball.secular_V(a, tau, d, R)
        assert abs(fd - cf) <= 1e-6 * secular_term_scale(a, tau, d, R)


def test_tone_within_linear_bounds():
    for d in (2, 3, 4):
        mu = first_zero_j1prime(d) ** 2
        for tau in (0.1, 1.0, 10.0, 100.0):
            omega = ball.fundamental_tone(tau, d).omega
            assert tau * mu < omega < tau * (d + 2)


def test_tone_against_rayleigh_ritz_oracle():
    mode = ball.fundamental_tone(1.0, 2)
    assert mode.omega == pytest.approx(rayleigh_ritz_tone(2, 1.0), rel=1e-6)


def test_tone_scaling_law():
    for d in (2, 3):
        for tau in (0.5, 5.0):
            w = ball.fundamental_tone(tau, d, 1.0).omega
            for s in (0.5, 2.0):
                w_s = ball.fundamental_tone(tau / s**2, d, s).omega
                assert abs(w - s**4 * w_s) / w <= 1e-9


def test_tone_bounds_values():
    lower, upper_coord, upper_membrane = ball.tone_bounds(1.0, 2)
    assert lower == pytest.approx(3.390, abs=1e-3)
    assert upper_coord == 4.0
    assert upper_membrane == pytest.approx(ball.membrane_C(2) + lower, rel=1e-14)


def test_tone_bounds_vanish_with_tension():
    for d in (2, 3):
        lower, upper_coord, upper_membrane = ball.tone_bounds(1e-12, d)
        assert lower < 1e-10 and upper_coord < 1e-10
        assert upper_membrane == pytest.approx(ball.membrane_C(d), rel=1e-10)


def test_membrane_constant_positive_and_bounding():
    for d in (2, 3, 4):
        assert ball.membrane_C(d) > 0
    mu = first_zero_j1prime(2) ** 2
    C = ball.membrane_C(2)
    for tau in (0.1, 1.0, 10.0):
        assert ball.fundamental_tone(tau, 2).omega <= C + tau * mu


def test_membrane_constant_against_monte_carlo():
    # Cartesian check: C(B) = int |D^2 v|^2 / int v^2 for the membrane mode
    # v = j_1(ainf r) x_1/r, with the Hessian taken by finite differences in
    # Cartesian coordinates at uniform ball samples
    d = 2
    ainf = first_zero_j1prime(d)

    def v(X):
        r = np.sqrt(np.einsum("ij,ij->i", X, X))
        return ultra_j(1, d, ainf * r) * X[:, 0] / np.where(r == 0, 1.0, r)

    X = uniform_ball_samples(np.random.default_rng(42), 1_000_000, d)
    mc_ratio = fd_hessian_sq_norm_vec(v, X).mean() / (v(X) ** 2).mean()
    assert mc_ratio == pytest.approx(ball.membrane_C(d), rel=1e-3)


def test_infinite_tension_ratio():
    mu2 = first_zero_j1prime(2) ** 2
    C2 = ball.membrane_C(2)
    (r4,) = ball.infinite_tension_ratio(2, [1e4])
    assert mu2 <= r4 <= mu2 + C2 / 1e4
    (r3,) = ball.infinite_tension_ratio(2, [1e3])
    assert r3 >= mu2
    mu3 = first_zero_j1prime(3) ** 2
    (r5,) = ball.infinite_tension_ratio(3, [1e5])
    assert r5 - mu3 <= ball.membrane_C(3) / 1e5 + 1e-8


def test_tone_monotone_and_concave_in_tension():
    taus = np.logspace(-2, 4, 25)
    for d in (2, 3):
        omegas = np.array([ball.fundamental_tone(t, d).omega for t in taus])
        assert np.all(np.diff(omegas) > 0)
        slopes = np.diff(omegas) / np.diff(taus)
        assert np.all(np.diff(slopes) < 1e-10 * slopes[:-1])


def test_wavenumber_regime_bounds():
    for d in range(2, 8):
        tau_small = np.logspace(-3, math.log10(9 / (d + 5)), 12)
        for tau in tau_small:
            m = ball.fundamental_tone(float(tau), d)
            assert m.a**2 < 3 * (d + 2) / (d + 5)
            assert m.b**2 <= 3.0
        for tau in np.logspace(-2, 3, 12):
            m = ball.fundamental_tone(float(tau), d)
            a2 = m.a**2
            assert m.tau > a2**2 / (d + 2 - a2)
            if a2 < d:
                assert m.tau < a2**2 / (d - a2)


def test_mode_invariant_matrix():
    for d in range(2, 8):
        ainf = first_zero_j1prime(d)
        for tau in (1e-2, 1.0, 1e3):
            m = ball.fundamental_tone(tau, d)
            assert abs(m.b**2 - m.a**2 - tau) <= 1e-12 * (1 + tau)
            assert m.omega == pytest.approx(m.a**2 * m.b**2, rel=1e-14)
            assert m.gamma > 0
            assert 0 < m.a * m.radius < ainf
            m_res, m_scale, v_res, v_scale = ball._residual_scales(m)
            assert m_res <= 1e-9 * m_scale
            assert v_res <= 1e-9 * v_scale


def test_error_contracts():
    with pytest.raises(ValueError):
        ball.fundamental_tone(-1.0, 2)
    with pytest.raises(ValueError):
        ball.fundamental_tone(0.0, 2)
    with pytest.raises(ValueError):
        ball.fundamental_tone(float("nan"), 2)
    with pytest.raises(ValueError):
        ball.fundamental_tone(1.0, 2, radius=-2.0)
    with pytest.raises(ValueError):
        ball.gamma_of(5.0, 1.0, 2)      # beyond the first zero of j_1'
    with pytest.raises(ValueError):
        ball.gamma_of(0.5, -1.0, 2)
    with pytest.raises(ValueError):
        ball.secular_V(-0.5, 1.0, 2)
