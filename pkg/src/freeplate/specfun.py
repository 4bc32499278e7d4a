"""Ultraspherical Bessel functions and their derivatives.

j_l(z) = z^(-s) J_(s+l)(z) and i_l(z) = z^(-s) I_(s+l)(z) with s = (d-2)/2,
for integer dimension d >= 2 and integer order 0 <= l <= 8, together with
derivatives through fourth order, the series coefficients d_k of the
expansions of j_1'' and i_1'', and the first nontrivial zero of j_1'.

The underlying kernels are implemented in this module (ascending series for
moderate arguments, a normalized backward-recurrence scheme for large ones),
so no external special-function library is involved and every digit is
covered by the test oracles.
"""

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

SMALL_Z = 0.5          # power-series evaluation at or below this argument
_SERIES_KERNEL_MAX = 6.0   # ascending-series J kernel up to here, backward
                           # recurrence above
_J_Z_MAX = 1.0e3       # supported argument range of the two kernels;
_I_Z_MAX = 690.0       # the i_l series exceeds double range beyond this
MAX_ORDER = 8
MAX_DERIV = 4


@dataclass(frozen=True)
class UltraBesselParams:
    """Order/dimension pair with the derived kernel order shift s = (d-2)/2."""

    l: int
    d: int
    s: float = field(init=False)

    def __post_init__(self):
        if not (isinstance(self.l, int) and 0 <= self.l <= MAX_ORDER):
            raise ValueError(f"order l must be an integer in [0, {MAX_ORDER}]")
        if not (isinstance(self.d, int) and self.d >= 2):
            raise ValueError("dimension d must be an integer >= 2")
        object.__setattr__(self, "s", (self.d - 2) / 2.0)


@dataclass(frozen=True)
class SeriesCoeff:
    """Coefficient d_k = (2k+1) / ((k-1)! Gamma(k+1+d/2)) 2^(1-2k-d/2)."""

    k: int
    d: int
    value: float = field(init=False)

    def __post_init__(self):
        if not (isinstance(self.k, int) and self.k >= 1):
            raise ValueError("index k must be an integer >= 1")
        if not (isinstance(self.d, int) and self.d >= 2):
            raise ValueError("dimension d must be an integer >= 2")
        k, d = self.k, self.d
        if k + 1 + d / 2 < 170:
            value = (2 * k + 1) / (math.factorial(k - 1) * math.gamma(k + 1 + d / 2)) \
                * 2.0 ** (1 - 2 * k - d / 2)
        else:
            value = (2 * k + 1) * math.exp(
                -math.lgamma(k) - math.lgamma(k + 1 + d / 2)
                + (1 - 2 * k - d / 2) * math.log(2.0))
        object.__setattr__(self, "value", value)


def series_coeff_dk(k, d):
    """Series coefficient d_k, positive for every k >= 1, d >= 2."""
    return SeriesCoeff(k, d).value


def _series_eval(kind, l, d, deriv, z):
    """Term-differentiated ascending series for the deriv-th derivative of
    j_l (alternating signs) or i_l (positive signs) at z >= 0.

    The series for j_l is sum_k (-1)^k z^(l+2k) / (2^(s+l+2k) k! G(s+l+k+1));
    differentiation multiplies term k by the falling factorial of l+2k. Terms
    are built by ratio updates so nothing overflows for z within kernel range.
    """
    s = (d - 2) / 2.0
    sign = -1.0 if kind == "j" else 1.0
    z = np.asarray(z, dtype=float)
    if z.size == 0:
        return np.empty(0)
    k0 = max(0, -((l - deriv) // 2))     # smallest k with l + 2k >= deriv
    m0 = l + 2 * k0
    lognorm = -(s + m0) * math.log(2.0) - math.lgamma(k0 + 1) - math.lgamma(s + l + k0 + 1)
    fall = 1.0
    for q in range(deriv):
        fall *= m0 - q
    term = (sign**k0 * fall * math.exp(lognorm)) * np.power(z, m0 - deriv)
    total = term.copy()
    zz = z * z / 4.0
    nterms = int(0.8 * float(np.max(z))) + 60
    for k in range(k0, k0 + nterms):
        m = l + 2 * k
        ratio_num = 1.0
        ratio_den = 1.0
        if deriv:
            ratio_num = (m + 2.0) * (m + 1.0)
            ratio_den = (m + 2.0 - deriv) * (m + 1.0 - deriv)
        term = term * (sign * zz) * (ratio_num / (ratio_den * (k + 1.0) * (s + l + k + 1.0)))
        total += term
    return total


def _j_chain_backward(s, n_orders, z):
    """Ultraspherical j_l(z) for l = 0..n_orders-1 at large arguments.

    Backward (Miller) recurrence on the kernel orders nu = nu0 + j, seeded
    far above the largest needed order, normalized with the identity
    (z/2)^nu0 = sum_k w_k J_(nu0+2k)(z), w_0 = G(nu0+1),
    w_k = (nu0+2k) G(nu0+k) / k!. Arguments are processed in octave buckets
    so the start order stays proportionate to the bucket's arguments.
    """
    z = np.asarray(z, dtype=float)
    s_int = int(math.floor(s + 1e-12))
    nu0 = s - s_int                      # 0 for even d, 1/2 for odd d
    out = np.empty((n_orders, z.size))
    lo = _SERIES_KERNEL_MAX
    remaining = np.ones(z.size, dtype=bool)
    while remaining.any():
        mask = remaining & (z <= 2.0 * lo)
        lo *= 2.0
        if not mask.any():
            continue
        remaining &= ~mask
        zb = z[mask]
        M = s_int + n_orders + int(np.max(zb)) + 50
        fp = np.zeros(zb.size)           # f at order nu0 + (j+1)
        fc = np.full(zb.size, 1e-155)    # f at order nu0 + j
        vals = np.zeros((n_orders, zb.size))
        norm = np.zeros(zb.size)
        # w_k built by ratio updates, consumed from k = M//2 downward would
        # reorder the recurrence; instead precompute w_k for k = 0..M//2
        w = np.empty(M // 2 + 1)
        w[0] = math.gamma(nu0 + 1.0)
        if w.size > 1:
            w[1] = (nu0 + 2.0) * math.gamma(nu0 + 1.0)
            for k in range(1, w.size - 1):
                w[k + 1] = w[k] * ((nu0 + 2 * k + 2) * (nu0 + k)) / ((nu0 + 2 * k) * (k + 1))
        for j in range(M, -1, -1):
            if j % 2 == 0:
                norm += w[j // 2] * fc
            if s_int <= j < s_int + n_orders:
                vals[j - s_int] = fc
            fp, fc = fc, (2.0 * (nu0 + j) / zb) * fc - fp
            big = np.abs(fc) > 1e250
            if big.any():
                fc[big] *= 1e-250
                fp[big] *= 1e-250
                norm[big] *= 1e-250
                vals[:, big] *= 1e-250
        # j_l = z^(-s) J_(s+l) = z^(-s) (z/2)^nu0 vals / norm
        scale = np.power(zb, -float(s_int)) * 2.0 ** (-nu0) / norm
        out[:, mask] = vals * scale
    return out


def _kernel_chain(kind, l, d, n_orders, z):
    """Ultraspherical values of orders l..l+n_orders-1 at z > 0 (array)."""
    s = (d - 2) / 2.0
    out = np.empty((n_orders, z.size))
    if kind == "i":
        for m in range(n_orders):
            out[m] = _series_eval("i", l + m, d, 0, z)
        return out
    near = z <= _SERIES_KERNEL_MAX
    if near.any():
        zn = z[near]
        for m in range(n_orders):
            out[m, near] = _series_eval("j", l + m, d, 0, zn)
    if (~near).any():
        far = _j_chain_backward(s, l + n_orders, z[~near])
        out[:, ~near] = far[l:l + n_orders]
    return out


def _deriv_table(kind, l, d, deriv, z):
    """deriv-th derivative of the order-l function at z > SMALL_Z.

    Repeated exact application of w' = (m/z) w -/+ w_(m+1) expanded with the
    Leibniz rule:
        T[k+1][m] = (l+m) sum_i C(k,i) (-1)^i i! z^-(i+1) T[k-i][m]
                    + sign T[k][m+1].
    """
    sign = -1.0 if kind == "j" else 1.0
    vals = _kernel_chain(kind, l, d, deriv + 1, z)
    T = [[vals[m] for m in range(deriv + 1)]]
    inv = 1.0 / z
    for k in range(deriv):
        row = []
        for m in range(deriv - k):
            acc = np.zeros_like(z)
            for i in range(k + 1):
                acc += (math.comb(k, i) * (-1.0) ** i * math.factorial(i)) * inv ** (i + 1) \
                    * T[k - i][m]
            row.append((l + m) * acc + sign * T[k][m + 1])
        T.append(row)
    return T[deriv][0]


def _ultra(kind, l, d, z, deriv):
    params = UltraBesselParams(l, d)     # validates l, d
    if not (isinstance(deriv, int) and 0 <= deriv <= MAX_DERIV):
        raise ValueError(f"deriv must be an integer in [0, {MAX_DERIV}]")
    arr = np.asarray(z, dtype=float)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    if not np.all(np.isfinite(arr)):
        raise ValueError("z must be finite")
    if np.any(arr < 0):
        raise ValueError("z must be nonnegative")
    zmax = _J_Z_MAX if kind == "j" else _I_Z_MAX
    if np.any(arr > zmax):
        raise OverflowError(f"{kind}_l argument beyond kernel range ({zmax:g})")
    out = np.empty(arr.shape)
    small = arr <= SMALL_Z
    if small.any():
        out[small] = _series_eval(kind, l, d, deriv, arr[small])
    if (~small).any():
        out[~small] = _deriv_table(kind, params.l, d, deriv, arr[~small])
    return float(out[0]) if scalar else out


def ultra_j(l, d, z, deriv=0):
    """deriv-th derivative of j_l(z) in dimension d, for z >= 0.

    Power series below SMALL_Z; kernel evaluation plus exact derivative
    recurrences above. Accepts scalar or array z.
    """
    return _ultra("j", l, d, z, deriv)


def ultra_i(l, d, z, deriv=0):
    """deriv-th derivative of i_l(z) in dimension d, for z >= 0.

    Same scheme as ultra_j with the modified recurrence signs; i_l and all
    of its derivatives are positive for z > 0.
    """
    return _ultra("i", l, d, z, deriv)


@lru_cache(maxsize=None)
def first_zero_j1prime(d):
    """First z > 0 with j_1'(z) = 0, to relative tolerance 1e-12.

    Bracketed by a fixed-step scan of (0, 20] with step 0.05, then refined;
    raises if the scan window contains no sign change.
    """
    zs = np.arange(0.05, 20.0 + 1e-9, 0.05)
    vals = ultra_j(1, d, zs, deriv=1)
    sgn = np.sign(vals)
    flips = np.nonzero(sgn[:-1] * sgn[1:] < 0)[0]
    if flips.size == 0:
        raise RuntimeError(
            f"no sign change of j_1' in the scan window (0, 20], step 0.05, d={d}")
    i = flips[0]
    root = brentq(lambda t: ultra_j(1, d, t, deriv=1), zs[i], zs[i + 1],
                  xtol=1e-15, rtol=1e-13)
    return float(root)
