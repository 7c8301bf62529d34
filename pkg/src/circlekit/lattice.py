"""Exact error terms of the circle and divisor problems.

``P(x)``  = (primed count of lattice points in the disk of radius sqrt(x))
            - pi x + 1, where the primed sum halves the final term r(x)
            when x is an integer.
``Delta(x)`` = primed divisor summatory function - x (log x + 2 gamma - 1) - 1/4.

Both are step-plus-smooth functions; between consecutive integers P is
affine with slope -pi and jumps by r(n) at n, so extremes of |P| live at
one-sided limits of integers.  The mean square of P over [0, X] is computed
exactly (to rounding) from the closed-form integral of the quadratic
polynomial on each unit interval.

All operations are read-only over an immutable `StepProfile` and are safe
to call concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .arith import ArithTables

# Euler's constant to 30 significant digits (double rounds it at 16).
EULER_GAMMA = 0.577215664901532860606512090082

CIRCLE = "circle"
DIVISOR = "divisor"

_CHUNK = 1 << 22  # block length for chunked reductions; fixed order keeps runs reproducible


@dataclass(frozen=True)
class StepProfile:
    """Cumulative sums of an arithmetic function f in {r, d}.

    ``partial[n] = sum_{m<=n} f(m)`` with ``partial[0] = 0``; int64 and
    non-decreasing (f >= 0).  Immutable and shareable across threads.
    """

    kind: str            # CIRCLE (f = r) or DIVISOR (f = d)
    limit: int
    partial: np.ndarray  # int64, length limit + 1

    def jump(self, n: int) -> int:
        """f(n) = partial[n] - partial[n-1]."""
        return int(self.partial[n] - self.partial[n - 1])


@dataclass(frozen=True)
class ErrorTermSample:
    """One evaluation of P(x) or Delta(x)."""

    x: float
    value: float
    kind: str


def step_profile(tables: ArithTables, kind: str) -> StepProfile:
    """Build the summatory profile of r (kind=CIRCLE) or d (kind=DIVISOR)."""
    if kind == CIRCLE:
        values = tables.r
    elif kind == DIVISOR:
        values = tables.d
    else:
        raise ValueError(f"unknown profile kind {kind!r}")
    partial = np.zeros(tables.limit + 1, dtype=np.int64)
    np.cumsum(values[1:], dtype=np.int64, out=partial[1:])
    partial.flags.writeable = False
    return StepProfile(kind=kind, limit=tables.limit, partial=partial)


def _primed_partial(profile: StepProfile, x: float) -> float:
    """sum'_{n<=x} f(n): the final term is halved when x is an integer."""
    if x < 1 or x > profile.limit:
        raise ValueError(f"x={x} outside profile domain [1, {profile.limit}]")
    k = int(math.floor(x))
    s = float(profile.partial[k])
    if x == k:
        s -= profile.jump(k) / 2.0
    return s


def p_of_x(profile: StepProfile, x: float) -> float:
    """Circle-problem error term P(x) = sum'_{n<=x} r(n) - pi x + 1."""
    if profile.kind != CIRCLE:
        raise ValueError("p_of_x needs a CIRCLE profile")
    return _primed_partial(profile, x) - math.pi * x + 1.0


def p_gauss_oracle(x: float) -> float:
    """Independent oracle for P(x): count lattice points directly.

    Enumerates (a, b) != (0, 0) with a^2 + b^2 <= x by looping over a and
    counting b via isqrt, then returns count - pi x + 1.  Exact at the
    integer-count level; meant for non-integer x (the primed halving at
    integers is deliberately not replicated) and for x small enough that
    the O(sqrt(x)) loop is cheap.
    """
    if x < 0:
        raise ValueError(f"x must be >= 0, got {x}")
    m = math.floor(x)          # a^2 + b^2 <= x iff a^2 + b^2 <= floor(x)
    count = -1                 # excludes the origin
    a_max = math.isqrt(m) if m >= 0 else -1
    for a in range(-a_max, a_max + 1):
        count += 2 * math.isqrt(m - a * a) + 1
    return count - math.pi * x + 1.0


def delta_of_x(profile: StepProfile, x: float) -> float:
    """Divisor-problem error term Delta(x) = sum'_{n<=x} d(n) - x(log x + 2 gamma - 1) - 1/4."""
    if profile.kind != DIVISOR:
        raise ValueError("delta_of_x needs a DIVISOR profile")
    return (
        _primed_partial(profile, x)
        - x * (math.log(x) + 2.0 * EULER_GAMMA - 1.0)
        - 0.25
    )


def mean_square_p(profile: StepProfile, X: float) -> float:
    """Exact integral of P^2 over [0, X].

    On [n, n+1) the integrand is the square of the affine function
    S_n + 1 - pi x, so each unit interval contributes a closed-form cubic
    difference; no quadrature is involved.  Chunked summation with a fixed
    reduction order keeps results reproducible run to run.
    """
    if profile.kind != CIRCLE:
        raise ValueError("mean_square_p needs a CIRCLE profile")
    if X < 0 or X > profile.limit:
        raise ValueError(f"X={X} outside profile domain [0, {profile.limit}]")
    nf = int(math.floor(X))
    pieces = []
    for lo in range(0, nf, _CHUNK):
        hi = min(lo + _CHUNK, nf)
        n = np.arange(lo, hi, dtype=np.float64)
        a = profile.partial[lo:hi].astype(np.float64) + 1.0
        left = a - np.pi * n          # P at the left edge of [n, n+1)
        right = left - np.pi          # P just below the right edge
        pieces.append(float(np.sum(left**3 - right**3)))
    total = math.fsum(pieces) / (3.0 * math.pi)
    if X > nf:
        a = float(profile.partial[nf]) + 1.0
        left = a - math.pi * nf
        right = a - math.pi * X
        total += (left**3 - right**3) / (3.0 * math.pi)
    return total


def q_of_x(profile: StepProfile, X: float, c32: float) -> float:
    """Mean-square remainder Q(X) = int_0^X P^2 - c32 * X^(3/2).

    ``c32`` is (1/(3 pi^2)) * sum r^2(n) n^(-3/2), supplied by the caller
    (see `laplace.series_constant`); the classical bound is Q(X) = O(X log^2 X).
    """
    return mean_square_p(profile, X) - c32 * X**1.5


@dataclass(frozen=True)
class PointwiseRow:
    x: float
    value: float
    ratio_quarter: float   # |value| / x^(1/4)
    ratio_huxley: float    # |value| / x^(23/73)


@dataclass(frozen=True)
class PointwiseReport:
    """Scan of the error term over a log grid plus every integer jump.

    ``max_abs`` is taken over both one-sided limits at every integer up to
    x_max (where the extremes of the step function live) as well as the
    sampled grid.  The x^(1/4) ratio should stay away from 0 (omega-result);
    the x^(23/73) ratio should grow at most polylogarithmically (best known
    pointwise bound).
    """

    kind: str
    x_max: float
    rows: list[PointwiseRow]
    max_abs: float
    argmax: float
    max_ratio_quarter: float
    max_ratio_huxley: float


def _error_at_jumps(profile: StepProfile, n_hi: int):
    """Left and right one-sided limits of the error term at 1..n_hi."""
    n = np.arange(1, n_hi + 1, dtype=np.float64)
    s_right = profile.partial[1 : n_hi + 1].astype(np.float64)
    s_left = profile.partial[0:n_hi].astype(np.float64)
    if profile.kind == CIRCLE:
        main = np.pi * n - 1.0
    else:
        main = n * (np.log(n) + 2.0 * EULER_GAMMA - 1.0) + 0.25
    return n, s_left - main, s_right - main


def error_sample(profile: StepProfile, x: float) -> ErrorTermSample:
    """Evaluate the profile's error term (P or Delta) at one point."""
    value = p_of_x(profile, x) if profile.kind == CIRCLE else delta_of_x(profile, x)
    return ErrorTermSample(x=float(x), value=value, kind=profile.kind)


def pointwise_report(profile: StepProfile, x_max: float, samples: int) -> PointwiseReport:
    """Sample the error term and report the extremal ratios up to x_max."""
    if samples < 1:
        raise ValueError(f"samples must be >= 1, got {samples}")
    if x_max < 1 or x_max > profile.limit:
        raise ValueError(f"x_max={x_max} outside profile domain [1, {profile.limit}]")
    n_hi = int(math.floor(x_max))
    n, left, right = _error_at_jumps(profile, n_hi)
    absval = np.maximum(np.abs(left), np.abs(right))
    i = int(np.argmax(absval))
    max_abs = float(absval[i])
    argmax = float(n[i])
    rq = absval / n**0.25
    rh = absval / n ** (23.0 / 73.0)
    rows = []
    for x in np.geomspace(1.0, float(x_max), samples):
        s = error_sample(profile, float(x))
        rows.append(
            PointwiseRow(
                x=s.x,
                value=s.value,
                ratio_quarter=abs(s.value) / x**0.25,
                ratio_huxley=abs(s.value) / x ** (23.0 / 73.0),
            )
        )
    return PointwiseReport(
        kind=profile.kind,
        x_max=float(x_max),
        rows=rows,
        max_abs=max_abs,
        argmax=argmax,
        max_ratio_quarter=float(rq.max()),
        max_ratio_huxley=float(rh.max()),
    )
