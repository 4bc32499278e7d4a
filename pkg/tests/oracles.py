"""Independent oracles used by the test suite.

Every routine here recomputes its target quantity from scratch (mpmath
series at high precision, finite differences, or a spectral discretization)
without calling into the package's own special-function kernels, so package
results are checked against genuinely independent arithmetic.
"""

import math

import mpmath as mp
import numpy as np
from numpy.polynomial import chebyshev as ncheb
from scipy.linalg import eigh

mp.mp.dps = 40


def mp_ultra(kind, l, d, z, deriv=0, terms=60):
    """High-precision ultraspherical Bessel value by direct series.

    j_l(z) = sum_k (-1)^k z^(l+2k) / (2^(s+l+2k) k! Gamma(s+l+k+1)),
    s = (d-2)/2; i_l is the same series with all positive signs. The
    deriv-th derivative is taken term by term. Returns a float.
    """
    sign = -1 if kind == "j" else 1
    s = mp.mpf(d - 2) / 2
    z = mp.mpf(z)
    total = mp.mpf(0)
    for k in range(terms):
        m = l + 2 * k
        if m < deriv:
            continue
        coeff = mp.mpf(1) / (mp.power(2, s + m) * mp.factorial(k) * mp.gamma(s + l + k + 1))
        fall = mp.mpf(1)
        for q in range(deriv):
            fall *= m - q
        if z == 0:
            if m == deriv:
                total += sign**k * coeff * fall
            continue
        total += sign**k * coeff * fall * mp.power(z, m - deriv)
    return float(total)


def first_sign_change(f, lo, hi, n):
    """Locate the first sign change of f on [lo, hi] with an n-point grid.

    Returns (z_left, z_right) bracketing the change, or None.
    """
    zs = np.linspace(lo, hi, n)
    vals = np.array([f(z) for z in zs])
    sign = np.sign(vals)
    idx = np.nonzero(sign[:-1] * sign[1:] < 0)[0]
    if idx.size == 0:
        return None
    i = idx[0]
    return zs[i], zs[i + 1]


def rayleigh_ritz_tone(d, tau, nbasis=40, nodes=160):
    """Lowest generalized eigenvalue of the plate quotient on the ball
    restricted to u = f(r) x_1/r, discretized with f_k(r) = r T_k(2r-1).

    Uses the closed-form Cartesian sums for such u,
        sum |u|^2 = f^2,  sum |Du|^2 = (d-1) f^2/r^2 + f'^2,
        sum |D^2 u|^2 = f''^2 + 3(d-1)(f - r f')^2 / r^4,
    which for this basis reduce to polynomials:
        f/r = T,  (f - r f')/r^2 = -2 T',  f' = T + 2 r T',  f'' = 4T' + 4rT''
    (primes on T with respect to its own argument x = 2r - 1). All integrals
    use Gauss-Legendre nodes with the r^(d-1) weight, so nothing here shares
    code with the package's Bessel evaluation or secular solve.
    """
    x_gl, w_gl = np.polynomial.legendre.leggauss(nodes)
    r = 0.5 * (x_gl + 1.0)
    w = 0.5 * w_gl * r ** (d - 1)
    x = 2.0 * r - 1.0

    T = np.empty((nbasis, nodes))
    T1 = np.empty((nbasis, nodes))
    T2 = np.empty((nbasis, nodes))
    for k in range(nbasis):
        c = np.zeros(k + 1)
        c[k] = 1.0
        T[k] = ncheb.chebval(x, c)
        T1[k] = ncheb.chebval(x, ncheb.chebder(c, 1)) if k >= 1 else 0.0
        T2[k] = ncheb.chebval(x, ncheb.chebder(c, 2)) if k >= 2 else 0.0

    f = r * T
    fp = T + 2.0 * r * T1
    fpp = 4.0 * T1 + 4.0 * r * T2
    ratio = -2.0 * T1          # (f - r f')/r^2
    f_over_r = T

    A = (fpp * w) @ fpp.T \
        + 3.0 * (d - 1) * (ratio * w) @ ratio.T \
        + tau * ((fp * w) @ fp.T + (d - 1) * (f_over_r * w) @ f_over_r.T)
    B = (f * w) @ f.T
    A = 0.5 * (A + A.T)
    B = 0.5 * (B + B.T)
    vals = eigh(A, B, eigvals_only=True)
    return float(vals[0])


def _richardson_d1(g, t, h):
    """First derivative of g at t by central differences with one
    Richardson step (error O(h^4))."""
    d1 = (g(t + h) - g(t - h)) / (2.0 * h)
    d2 = (g(t + h / 2) - g(t - h / 2)) / h
    return (4.0 * d2 - d1) / 3.0


def _fd_laplacian(u, x, h):
    """Cartesian Laplacian of scalar field u at point x, one Richardson step."""
    def lap(hh):
        total = 0.0
        for i in range(x.size):
            e = np.zeros_like(x)
            e[i] = hh
            total += u(x + e) - 2.0 * u(x) + u(x - e)
        return total / hh**2
    return (4.0 * lap(h / 2) - lap(h)) / 3.0


def fd_boundary_V(radial_part, R, d, tau, h_lap=2e-3, h_r=1e-2):
    """Finite-difference application of the natural boundary operator

        V u = tau u_r - r^-2 Delta_S(u_r - u/r) - (Delta u)_r

    at radius R to u(x) = radial_part(|x|) x_1/|x|, divided by the angular
    factor x_1/|x| at the evaluation point.

    u_r and (Delta u)_r are radial derivatives along the ray through a
    generic sphere point; Delta_S g is obtained by extending g from the
    sphere as the degree-zero homogeneous field g(R x/|x|) and taking R^2
    times its Cartesian Laplacian (the radial part of the extension
    vanishes). Only textbook calculus enters, so this is an independent
    check of any closed-form reduction of V.
    """
    def u(x):
        r = float(np.linalg.norm(x))
        return radial_part(r) * x[0] / r

    raw = np.arange(1, d + 1, dtype=float)
    p_hat = raw / np.linalg.norm(raw)
    p = R * p_hat

    def u_r_at(x):
        x = np.asarray(x, dtype=float)
        ray = x / np.linalg.norm(x)
        return _richardson_d1(lambda t: u(x + t * ray), 0.0, h_r)

    u_r = u_r_at(p)

    def lap_u_at_radius(r):
        return _fd_laplacian(u, r * p_hat, h_lap)

    lap_u_r = _richardson_d1(lap_u_at_radius, R, h_r)

    def w_extended(x):
        x = np.asarray(x, dtype=float)
        y = R * x / np.linalg.norm(x)
        return u_r_at(y) - u(y) / R

    delta_s_w = R**2 * _fd_laplacian(w_extended, p, 5e-3)

    value = tau * u_r - delta_s_w / R**2 - lap_u_r
    return value / p_hat[0]


def fd_hessian_sq_norm_vec(field, X, h=1e-3):
    """Squared Frobenius norm of the Hessian of a scalar field at each row
    of X (shape (n, d)), by Richardson-extrapolated central differences.

    field maps an (n, d) array to an (n,) array; nothing is assumed about
    radial structure, so this checks Cartesian identities independently.
    """
    X = np.asarray(X, dtype=float)
    n, d = X.shape
    out = np.zeros(n)

    def second(i, j, hh):
        ei = np.zeros(d); ei[i] = hh
        ej = np.zeros(d); ej[j] = hh
        if i == j:
            return (field(X + ei) - 2.0 * field(X) + field(X - ei)) / hh**2
        return (field(X + ei + ej) - field(X + ei - ej)
                - field(X - ei + ej) + field(X - ei - ej)) / (4.0 * hh**2)

    for i in range(d):
        for j in range(i, d):
            H = (4.0 * second(i, j, h / 2) - second(i, j, h)) / 3.0
            out += H**2 if i == j else 2.0 * H**2
    return out


def fd_gradient_sq_norm_vec(field, X, h=1e-4):
    """Squared gradient norm of a scalar field at each row of X, by
    Richardson-extrapolated central differences."""
    X = np.asarray(X, dtype=float)
    n, d = X.shape
    out = np.zeros(n)
    for i in range(d):
        e = np.zeros(d); e[i] = 1.0
        d1 = (field(X + h * e) - field(X - h * e)) / (2.0 * h)
        d2 = (field(X + (h / 2) * e) - field(X - (h / 2) * e)) / h
        out += ((4.0 * d2 - d1) / 3.0) ** 2
    return out


def uniform_ball_samples(rng, n, d, radius=1.0):
    """n uniform samples in the d-ball by rejection from the bounding box."""
    out = np.empty((n, d))
    have = 0
    while have < n:
        cand = rng.uniform(-radius, radius, size=(2 * (n - have) + 64, d))
        keep = cand[np.einsum("ij,ij->i", cand, cand) <= radius**2]
        take = min(keep.shape[0], n - have)
        out[have:have + take] = keep[:take]
        have += take
    return out


def fd_gradient(field, x, h=1e-4):
    """Gradient of scalar field at x, Richardson-extrapolated central FD."""
    x = np.asarray(x, dtype=float)
    g = np.empty_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = 1.0
        g[i] = _richardson_d1(lambda t: field(x + t * e), 0.0, h)
    return g


def fd_hessian(field, x, h=1e-3):
    """Hessian of scalar field at x by Richardson-extrapolated central FD."""
    x = np.asarray(x, dtype=float)
    n = x.size
    H = np.empty((n, n))

    def second(i, j, hh):
        ei = np.zeros(n); ei[i] = hh
        ej = np.zeros(n); ej[j] = hh
        if i == j:
            return (field(x + ei) - 2.0 * field(x) + field(x - ei)) / hh**2
        return (field(x + ei + ej) - field(x + ei - ej)
                - field(x - ei + ej) + field(x - ei - ej)) / (4.0 * hh**2)

    for i in range(n):
        for j in range(i, n):
            v = (4.0 * second(i, j, h / 2) - second(i, j, h)) / 3.0
            H[i, j] = H[j, i] = v
    return H


def mp_quartic_min(dps=30):
    """Interior minimiser of Q(x)/x on (0, 12/7) and the minimum value,
    recomputed at high precision with mpmath alone (mu from mpmath's
    Bessel derivative zero). Returns (c, min) as floats.
    """
    with mp.workdps(dps):
        mu = mp.findroot(lambda z: mp.besselj(1, z, derivative=1),
                         mp.mpf("1.8")) ** 2

        def q_over_x(x):
            q = ((1 - 3 * x / (2 * mu)) * (mu - x) * (36 - 5 * x)
                 * (12 + 4 * x)
                 - (36 * mu + (6 * mu - 36) * x) * (12 - 7 * x))
            return q / x

        c = mp.findroot(lambda x: mp.diff(q_over_x, x), mp.mpf("1.4"))
        return float(c), float(q_over_x(c))
