"""Bessel functions J0/J1, quadratic Gauss sums, and the Bessel/cosine
series representations of the circle-problem error term.

Accuracy policy for `bessel_j`: ascending power series below z = 18
(accumulated in 80-bit extended precision, since plain doubles lose too
many digits to cancellation once z > ~12), Hankel asymptotic expansion
above.  Absolute error is <= 1e-10 for 0 <= z <= 1e6 against the integral
oracle; beyond z ~ 1e6 the *phase* z mod 2pi of the oscillation slowly
loses accuracy to argument rounding (about eps * z radians), although the
shrinking amplitude keeps the absolute error small.  This degradation is
inherent to double-precision arguments and is not silently hidden: it is
documented here and in the README.

The cosine sums (`hardy_partial`, `truncated_p`) need oscillation phases
2 pi sqrt(x n) accurate to ~1e-10 even when sqrt(x n) ~ 1e6, which naive
double arithmetic cannot deliver; both use a compensated split of
sqrt(x n) into integer and fractional parts with a Newton correction
(exact while x*n < 2^53), plus exact (fsum) accumulation of the slowly
decaying, heavily cancelling terms.

All operations are pure.
"""

from __future__ import annotations

import math
from math import gcd

import numpy as np

from .arith import ArithTables

BESSEL_SWITCH = 18.0   # both branches agree to ~1.5e-13 here
_SERIES_TERMS = 60
_ASYM_TERMS = 30


def _bessel_series(order: int, z: np.ndarray) -> np.ndarray:
    """Ascending power series in 80-bit extended precision (z < ~20)."""
    z = z.astype(np.longdouble)
    q = -(z * z) / 4.0
    term = np.ones_like(z) if order == 0 else z / 2.0
    total = term.copy()
    for k in range(1, _SERIES_TERMS):
        term = term * q / (k * (k + order))
        total += term
    return total.astype(np.float64)


def _bessel_asymptotic(order: int, z: np.ndarray) -> np.ndarray:
    """Hankel expansion sqrt(2/(pi z)) (P cos(chi) - Q sin(chi)), chi = z - (2*order+1)pi/4.

    The phase shift by pi/4 (or 3pi/4) is applied through exact
    trigonometric identities instead of subtracting from z, so no extra
    argument rounding is introduced.
    """
    mu = 4.0 * order * order
    w = 1.0 / (8.0 * z)
    P = np.ones_like(z)
    Q = np.zeros_like(z)
    a = np.ones_like(z)
    for k in range(1, _ASYM_TERMS + 1):
        a = a * (mu - (2.0 * k - 1.0) ** 2) / k * w
        rem = k % 4
        if rem == 0:
            P += a
        elif rem == 1:
            Q += a
        elif rem == 2:
            P -= a
        else:
            Q -= a
    c, s = np.cos(z), np.sin(z)
    rsqrt2 = 1.0 / math.sqrt(2.0)
    if order == 0:
        cos_chi = (c + s) * rsqrt2      # cos(z - pi/4)
        sin_chi = (s - c) * rsqrt2
    else:
        cos_chi = (s - c) * rsqrt2      # cos(z - 3pi/4)
        sin_chi = -(c + s) * rsqrt2
    return np.sqrt(2.0 / (np.pi * z)) * (P * cos_chi - Q * sin_chi)


def bessel_j(order: int, z):
    """J_order(z) for order in {0, 1}, z >= 0 scalar or array.

    Absolute error <= 1e-10 for z <= 1e6 (see module docstring for the
    behaviour beyond).
    """
    if order not in (0, 1):
        raise ValueError(f"order must be 0 or 1, got {order}")
    scalar = np.isscalar(z)
    zz = np.atleast_1d(np.asarray(z, dtype=np.float64))
    if (zz < 0).any():
        raise ValueError("bessel_j requires z >= 0")
    out = np.empty_like(zz)
    small = zz < BESSEL_SWITCH
    if small.any():
        out[small] = _bessel_series(order, zz[small])
    large = ~small
    if large.any():
        out[large] = _bessel_asymptotic(order, zz[large])
    return float(out[0]) if scalar else out


def bessel_oracle(order: int, z: float) -> float:
    """Independent check of bessel_j via the integral representation.

    J_n(z) = (1/pi) int_0^pi cos(n theta - z sin theta) d theta, evaluated
    by composite 16-point Gauss-Legendre quadrature with panel count scaled
    to z (integrand bandwidth ~ z), trustworthy to ~1e-12 for z <= 1e3.
    """
    if order not in (0, 1):
        raise ValueError(f"order must be 0 or 1, got {order}")
    if z < 0:
        raise ValueError("bessel_oracle requires z >= 0")
    panels = max(8, int(math.ceil(z / 2.0)) + 4)
    nodes, weights = np.polynomial.legendre.leggauss(16)
    edges = np.linspace(0.0, math.pi, panels + 1)
    mid = (edges[:-1] + edges[1:]) / 2.0
    half = (edges[1:] - edges[:-1]) / 2.0
    theta = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
    w = (half[:, None] * weights[None, :]).ravel()
    return float(np.dot(w, np.cos(order * theta - z * np.sin(theta))) / math.pi)


def gauss_sum_sq(k: int, h: int) -> complex:
    """Square of the quadratic Gauss sum: (sum_{x=1}^{k} e(h x^2 / k))^2.

    Direct O(k) evaluation; the residues h x^2 mod k are reduced in integer
    arithmetic before touching floating point, so each phase is exact to an
    ulp.  Classical values: 0 when k = 2 (mod 4) and chi(k) * k when
    k = 1 (mod 4).  Requires gcd(h, k) = 1.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if gcd(h, k) != 1:
        raise ValueError(f"gauss_sum_sq requires gcd(h, k) = 1, got h={h}, k={k}")
    x = np.arange(1, k + 1, dtype=np.int64)
    residues = (h * (x * x % k)) % k
    inner = np.exp(2j * np.pi * residues / k).sum()
    return complex(inner * inner)


def _split_phase_cos(x: float, n: np.ndarray, shift: float) -> np.ndarray:
    """cos(2 pi sqrt(x n) + shift) with compensated phase reduction.

    p = x*n is exact in doubles while below 2^53; sqrt(p) is split into its
    integer part (which drops out of the phase modulo 2 pi exactly) and a
    fractional part refined by one Newton step, leaving the reduced phase
    accurate to ~1e-15 regardless of the size of sqrt(p).
    """
    p = x * n
    if p[-1] >= 2.0**53:
        raise ValueError("x*n exceeds 2^53; phase reduction would lose integer exactness")
    s0 = np.sqrt(p)
    corr = (p - s0 * s0) / (2.0 * s0)     # exact residual: Sterbenz subtraction
    frac = (s0 - np.floor(s0)) + corr
    return np.cos(2.0 * np.pi * frac + shift)


def hardy_partial(tables: ArithTables, x: float, N: int) -> float:
    """N-th partial sum of the Bessel series for P(x):

        sqrt(x) * sum_{n<=N} r(n) n^(-1/2) J1(2 pi sqrt(x n)).

    The full series converges to P(x) boundedly but not absolutely, so
    partial sums oscillate; callers monitor the residual against p_of_x
    rather than asserting a rate.
    """
    if x < 1:
        raise ValueError(f"x must be >= 1, got {x}")
    if N < 0 or N > tables.limit:
        raise ValueError(f"N={N} outside table range [0, {tables.limit}]")
    if N == 0:
        return 0.0
    n = np.arange(1, N + 1, dtype=np.float64)
    rn = tables.r[1 : N + 1].astype(np.float64)
    keep = rn != 0
    n, rn = n[keep], rn[keep]
    z = 2.0 * np.pi * np.sqrt(x * n)
    terms = rn / np.sqrt(n) * bessel_j(1, z)
    return math.sqrt(x) * math.fsum(terms)


def truncated_p(tables: ArithTables, x: float, N: int) -> float:
    """Truncated cosine-sum approximation to P(x):

        -(x^(1/4) / pi) * sum_{n<=N} r(n) n^(-3/4) cos(2 pi sqrt(x n) + pi/4),

    valid for x >= 2 and 2 <= N; the caller interprets the difference from
    p_of_x(x) as the truncation error, whose envelope decays like
    x^(1/2+eps) N^(-1/2).  Terms are accumulated in ascending n with exact
    (fsum) summation; phases use the compensated reduction above.
    """
    if x < 2:
        raise ValueError(f"x must be >= 2, got {x}")
    if N < 2 or N > tables.limit:
        raise ValueError(f"N={N} outside allowed range [2, {tables.limit}]")
    n = np.arange(1, N + 1, dtype=np.float64)
    rn = tables.r[1 : N + 1].astype(np.float64)
    keep = rn != 0
    n, rn = n[keep], rn[keep]
    cosv = _split_phase_cos(x, n, math.pi / 4.0)
    terms = rn * n**-0.75 * cosv
    return -(x**0.25 / math.pi) * math.fsum(terms)
