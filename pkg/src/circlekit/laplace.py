"""Laplace transforms of the squared error terms and their asymptotics.

The central quantity is

    L_P(T) = int_0^infty P^2(x) exp(-x/T) dx
           = (1/4) (T/pi)^(3/2) * sum_{n>=1} r^2(n) n^(-3/2)  -  T  + R(T),

whose remainder R(T) this module measures across a geometric range of T;
the analogous divisor transform L_D(T) carries main term
(1/8) (T/pi)^(3/2) * sum d^2(n) n^(-3/2) followed by
T (A1 log^2 T + A2 log T + A3) with A1 = -1/(4 pi^2), which `fit_a1`
recovers empirically.

Integration is exact where possible: P is affine on every unit interval,
so P^2 exp(-x/T) has an elementary antiderivative per interval, evaluated
in local coordinates (x = n + s, s in [0, 1)) with the interval moments
int_0^1 s^k exp(-s/T) ds precomputed in high precision -- the naive
antiderivative difference cancels catastrophically when T >> 1.  The
divisor integrand is not polynomial, so each unit interval gets fixed-order
Gauss-Legendre quadrature with an order-doubling self-check (the first
interval is subdivided dyadically because x log x has unbounded derivatives
at 0).

Truncation policy: integrate until the crude-envelope tail bound

    int_{x_max}^infty (3 sqrt(x))^2 exp(-x/T) dx = 9 T (x_max + T) exp(-x_max/T)

drops below rel_tol times the running total.  The envelope |error| <=
3 sqrt(x) is verified over every processed block (it holds with margin;
the observed sup of |P(x)|/sqrt(x) is ~2.4), and the resulting
truncation_bound is reported, never silently absorbed.

Interval sums are chunked and reduced in a fixed ascending order, so runs
are bit-reproducible in a given build.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath as mp
import numpy as np

from .errors import CapacityError
from .lattice import CIRCLE, DIVISOR, EULER_GAMMA, StepProfile

R_SQUARED = "r_squared"
D_SQUARED = "d_squared"

DEFAULT_REL_TOL = 1e-6
_ENVELOPE_COEF = 3.0      # |P(x)|, |Delta(x)| <= 3 sqrt(x) on every checked range
_QUAD_ORDER = 12
_QUAD_SELF_CHECK = 1e-12


@dataclass(frozen=True)
class SeriesConstant:
    """Partial sum of sum f(n)^2 n^(-3/2) for f in {r, d} with a tail bound.

    ``value`` is the partial sum over n <= terms_used; ``tail_bound`` is an
    upper estimate of the omitted tail obtained by partial summation against
    the measured envelope sum_{n<=x} f^2(n) <= C_hat x log x (C_hat is the
    observed maximum over the sieve range times a safety factor of 2; its
    use beyond the sieve range is the one extrapolation step, stated here
    rather than hidden).  For a fixed table, increasing terms_used never
    increases the bound.
    """

    kind: str
    terms_used: int
    value: float
    tail_bound: float


@dataclass(frozen=True)
class LaplaceEstimate:
    """One row of a transform scan: residual = integral - main_term."""

    T: float
    integral: float
    truncation_bound: float
    main_term: float
    residual: float

    @property
    def ratio_t23(self) -> float:
        """|residual| / T^(2/3), the scale the remainder estimate predicts."""
        return abs(self.residual) / self.T ** (2.0 / 3.0)


def _f_squared(values: np.ndarray, lo: int, hi: int) -> np.ndarray:
    return values[lo:hi].astype(np.float64) ** 2


def series_constant(tables, kind: str, terms: int) -> SeriesConstant:
    """Partial sum of sum_{n<=terms} f(n)^2 n^(-3/2) with compensated accumulation."""
    if kind == R_SQUARED:
        values = tables.r
    elif kind == D_SQUARED:
        values = tables.d
    else:
        raise ValueError(f"unknown series kind {kind!r}")
    if terms < 1 or terms > tables.limit:
        raise ValueError(f"terms={terms} outside table range [1, {tables.limit}]")
    chunk = 1 << 22
    pieces = []
    for lo in range(1, terms + 1, chunk):
        hi = min(lo + chunk, terms + 1)
        f2 = _f_squared(values, lo, hi)
        n = np.arange(lo, hi, dtype=np.float64)
        pieces.append(math.fsum(f2 * n**-1.5))
    value = math.fsum(pieces)

    # Envelope constant over the full sieve range (not just `terms`):
    # C_hat = 2 * max_{2<=n<=limit} F(n) / (n log n), F = cumsum f^2.
    n_all = np.arange(2, tables.limit + 1, dtype=np.float64)
    F = np.cumsum(values[1:].astype(np.float64) ** 2)
    c_hat = 2.0 * float(np.max(F[1:] / (n_all * np.log(n_all))))
    # tail <= int_X^inf t^(-3/2) dF <= 3 C_hat (log X + 2) / sqrt(X); the
    # looser form without the -F(X) X^(-3/2) sharpening is monotone in X.
    tail_bound = 3.0 * c_hat * (math.log(terms) + 2.0) / math.sqrt(terms)
    return SeriesConstant(kind=kind, terms_used=terms, value=value, tail_bound=tail_bound)


def series_limit(kind: str) -> float:
    """Full value of sum f(n)^2 n^(-3/2) from the Euler product of its
    generating Dirichlet series, evaluated in high precision:

        sum r^2(n) n^(-s) = 16 zeta(s)^2 L(s, chi4)^2 / ((1 + 2^(-s)) zeta(2s))
        sum d^2(n) n^(-s) = zeta(s)^4 / zeta(2s)

    at s = 3/2.  Both identities follow by matching Euler factors of the
    multiplicative functions (r/4)^2 and d^2; the toolkit cross-validates
    these values against the sieved partial sums plus their tail bounds.
    Needed wherever the remainder under study (O(T^(2/3)) scale) is far
    smaller than the partial-sum truncation bias of any sievable range.
    """
    with mp.workdps(30):
        s = mp.mpf(3) / 2
        if kind == R_SQUARED:
            beta = 4**-s * (mp.zeta(s, mp.mpf(1) / 4) - mp.zeta(s, mp.mpf(3) / 4))
            val = 16 * mp.zeta(s) ** 2 * beta**2 / ((1 + 2**-s) * mp.zeta(2 * s))
        elif kind == D_SQUARED:
            val = mp.zeta(s) ** 4 / mp.zeta(2 * s)
        else:
            raise ValueError(f"unknown series kind {kind!r}")
        return float(val)


def _interval_moments(T: float) -> tuple[float, float, float]:
    """m_k = int_0^1 s^k exp(-s/T) ds for k = 0, 1, 2, in high precision.

    For large T these are tiny differences of near-equal exponentials, so
    they are formed once per call with mpmath rather than in doubles.
    """
    with mp.workdps(40):
        lam = 1 / mp.mpf(T)
        E = mp.e**-lam
        m0 = (1 - E) / lam
        m1 = (1 - E * (1 + lam)) / lam**2
        m2 = (2 - E * (2 + 2 * lam + lam**2)) / lam**3
        return float(m0), float(m1), float(m2)


def _tail_bound(T: float, x: float) -> float:
    return 9.0 * T * (x + T) * math.exp(-x / T)


def _check_envelope(errs_over_sqrt: float, x_lo: int, x_hi: int, kind: str) -> None:
    if errs_over_sqrt > _ENVELOPE_COEF:
        raise RuntimeError(
            f"{kind} envelope |error| <= {_ENVELOPE_COEF} sqrt(x) violated on "
            f"[{x_lo}, {x_hi}] (observed ratio {errs_over_sqrt:.3f}); "
            "tail bounds would be unjustified"
        )


def _integrate_to_tolerance(profile: StepProfile, T: float, rel_tol: float, block_fn):
    """Accumulate block_fn(lo, hi) over unit intervals until the crude tail
    bound at the right edge falls below rel_tol * |total|.

    Returns (total, truncation_bound, x_max).  Raises CapacityError naming
    the required limit when the profile is too short.
    """
    if T < 1:
        raise ValueError(f"T must be >= 1, got {T}")
    if rel_tol <= 0:
        raise ValueError(f"rel_tol must be positive, got {rel_tol}")
    limit = profile.limit
    block = max(64, int(math.ceil(T)))
    pieces: list[float] = []
    x = 0
    total = 0.0
    while True:
        hi = min(x + block, limit)
        if hi > x:
            pieces.append(block_fn(x, hi))
            total = math.fsum(pieces)
            x = hi
        bound = _tail_bound(T, x)
        if total > 0.0 and bound < rel_tol * total:
            return total, bound, x
        if x >= limit:
            need = x
            while _tail_bound(T, need) >= rel_tol * max(total, 1.0):
                need += block
            raise CapacityError(
                f"profile limit {limit} too small for T={T} at rel_tol={rel_tol}; "
                f"required limit ~{need}",
                required_limit=need,
            )


def laplace_p2(
    profile: StepProfile, T: float, rel_tol: float = DEFAULT_REL_TOL
) -> tuple[float, float]:
    """int_0^infty P^2(x) exp(-x/T) dx by exact per-interval integration.

    Returns (integral, truncation_bound).  On [n, n+1) with b = P(n+) the
    integrand is (b - pi s)^2 exp(-n/T) exp(-s/T) in local coordinates, so
    each interval contributes exp(-n/T) (b^2 m0 - 2 pi b m1 + pi^2 m2).
    """
    if profile.kind != CIRCLE:
        raise ValueError("laplace_p2 needs a CIRCLE profile")
    m0, m1, m2 = _interval_moments(T)

    def block(lo: int, hi: int) -> float:
        n = np.arange(lo, hi, dtype=np.float64)
        b = profile.partial[lo:hi].astype(np.float64) + 1.0 - np.pi * n
        if hi > 1:
            j_lo = max(lo, 1)
            jn = np.arange(j_lo, hi + 1, dtype=np.float64)
            right = profile.partial[j_lo : hi + 1].astype(np.float64) + 1.0 - np.pi * jn
            left = profile.partial[j_lo - 1 : hi].astype(np.float64) + 1.0 - np.pi * jn
            worst = float(
                np.max(np.maximum(np.abs(right), np.abs(left)) / np.sqrt(jn))
            )
            _check_envelope(worst, j_lo, hi, "circle")
        vals = (b * b * m0 - 2.0 * np.pi * b * m1 + (np.pi * np.pi) * m2) * np.exp(-n / T)
        return float(np.sum(vals))

    total, bound, _ = _integrate_to_tolerance(profile, T, rel_tol, block)
    return total, bound


def laplace_main_p(c_r, T: float) -> float:
    """Main term (1/4) (T/pi)^(3/2) c_r - T of the circle transform.

    ``c_r`` is a SeriesConstant of kind r_squared, or a bare float carrying
    the series value (e.g. from `series_limit`).
    """
    value = _series_value(c_r, R_SQUARED)
    return 0.25 * (T / math.pi) ** 1.5 * value - T


def laplace_main_d(c_d, T: float) -> float:
    """Leading term (1/8) (T/pi)^(3/2) c_d of the divisor transform."""
    value = _series_value(c_d, D_SQUARED)
    return 0.125 * (T / math.pi) ** 1.5 * value


def _series_value(c, expected_kind: str) -> float:
    if isinstance(c, SeriesConstant):
        if c.kind != expected_kind:
            raise ValueError(f"series constant has kind {c.kind!r}, need {expected_kind!r}")
        return c.value
    return float(c)


@dataclass(frozen=True)
class ResidualScan:
    rows: list[LaplaceEstimate]
    slope: float     # least-squares slope of log |residual| against log T


def residual_scan_p(
    profile: StepProfile, c_r, T_list, rel_tol: float = DEFAULT_REL_TOL
) -> ResidualScan:
    """Residuals of the circle transform over ascending T plus their log-log slope."""
    Ts = list(T_list)
    if Ts != sorted(Ts):
        raise ValueError("T_list must be ascending")
    if not Ts:
        raise ValueError("T_list must be non-empty")
    rows = []
    for T in Ts:
        integral, trunc = laplace_p2(profile, T, rel_tol)
        main = laplace_main_p(c_r, T)
        rows.append(
            LaplaceEstimate(
                T=float(T),
                integral=integral,
                truncation_bound=trunc,
                main_term=main,
                residual=integral - main,
            )
        )
    if len(rows) >= 2:
        lt = np.log([r.T for r in rows])
        lr = np.log([max(abs(r.residual), 1e-300) for r in rows])
        slope = float(np.polyfit(lt, lr, 1)[0])
    else:
        slope = float("nan")
    return ResidualScan(rows=rows, slope=slope)


def _divisor_main(x: np.ndarray) -> np.ndarray:
    return x * (np.log(x) + 2.0 * EULER_GAMMA - 1.0) + 0.25


def _d2_first_interval(D0: float, T: float, nodes, weights) -> float:
    """int_0^1 (D0 - main(x))^2 exp(-x/T) dx on a dyadic graded mesh.

    x log x has unbounded derivatives at 0, so a single Gauss panel loses
    ~1e-9 relative accuracy here; panels [2^-j-1, 2^-j] restore spectral
    convergence and the leftover [0, 2^-52] stub is integrated as the
    constant (D0 - 1/4)^2.
    """
    edges = [2.0**-j for j in range(53)]
    total = (D0 - 0.25) ** 2 * edges[-1]    # exp(-x/T) ~ 1 below 2^-52
    for j in range(52):
        a, b = edges[j + 1], edges[j]
        mid, half = (a + b) / 2.0, (b - a) / 2.0
        x = mid + half * nodes
        f = (D0 - _divisor_main(x)) ** 2 * np.exp(-x / T)
        total += half * float(np.dot(weights, f))
    return total


def laplace_d2(
    profile: StepProfile, T: float, rel_tol: float = DEFAULT_REL_TOL
) -> tuple[float, float]:
    """int_0^infty Delta^2(x) exp(-x/T) dx; returns (integral, truncation_bound).

    Per unit interval the integrand is smooth but not polynomial, so each
    gets fixed-order Gauss-Legendre quadrature; the whole computation runs
    at order 12 and again at order 24 and must agree to 1e-12 relative,
    otherwise it aborts rather than return a silently degraded value.
    """
    if profile.kind != DIVISOR:
        raise ValueError("laplace_d2 needs a DIVISOR profile")

    def make_block(order: int):
        nodes, weights = np.polynomial.legendre.leggauss(order)
        s = (nodes + 1.0) / 2.0
        w = weights / 2.0

        def block(lo: int, hi: int) -> float:
            n = np.arange(lo, hi, dtype=np.float64)
            Dn = profile.partial[lo:hi].astype(np.float64)
            j_lo = max(lo, 1)
            jn = np.arange(j_lo, hi + 1, dtype=np.float64)
            main_j = _divisor_main(jn)
            right = profile.partial[j_lo : hi + 1].astype(np.float64) - main_j
            left = profile.partial[j_lo - 1 : hi].astype(np.float64) - main_j
            worst = float(np.max(np.maximum(np.abs(right), np.abs(left)) / np.sqrt(jn)))
            _check_envelope(worst, j_lo, hi, "divisor")
            start = 0
            extra = 0.0
            if lo == 0:
                extra = _d2_first_interval(float(Dn[0]), T, nodes, weights)
                start = 1
            if hi - lo > start:
                x = n[start:, None] + s[None, :]
                f = (Dn[start:, None] - _divisor_main(x)) ** 2 * np.exp(-x / T)
                extra += float(np.sum(f @ w))
            return extra

        return block

    v_lo, trunc, x_max = _integrate_to_tolerance(profile, T, rel_tol, make_block(_QUAD_ORDER))
    # Order-doubling self-check over exactly the same [0, x_max] range.
    block_hi = make_block(2 * _QUAD_ORDER)
    step = max(64, int(math.ceil(T)))
    v_hi = math.fsum(block_hi(lo, min(lo + step, x_max)) for lo in range(0, x_max, step))
    if abs(v_hi - v_lo) > _QUAD_SELF_CHECK * max(1.0, abs(v_hi)):
        raise RuntimeError(
            f"quadrature self-check failed for T={T}: order {_QUAD_ORDER} and "
            f"{2 * _QUAD_ORDER} differ by {abs(v_hi - v_lo):.3e} (> {_QUAD_SELF_CHECK} rel)"
        )
    return v_hi, trunc


def fit_log_quadratic(x_values, y_values) -> tuple[float, float, float]:
    """Least-squares coefficients (a, b, c) of y ~ a log^2 x + b log x + c."""
    xs = np.asarray(list(x_values), dtype=np.float64)
    ys = np.asarray(list(y_values), dtype=np.float64)
    if xs.size < 3:
        raise ValueError(f"need at least 3 points to fit a log-quadratic, got {xs.size}")
    L = np.log(xs)
    A = np.vstack([L**2, L, np.ones_like(L)]).T
    coef, *_ = np.linalg.lstsq(A, ys, rcond=None)
    return float(coef[0]), float(coef[1]), float(coef[2])


@dataclass(frozen=True)
class A1Fit:
    a1: float
    a2: float
    a3: float
    rows: list[tuple[float, float]]   # (T, y(T)/T)


A1_EXPECTED = -1.0 / (4.0 * math.pi**2)


def fit_a1(profile: StepProfile, c_d, T_list, rel_tol: float = DEFAULT_REL_TOL) -> A1Fit:
    """Fit the log^2 T coefficient of the divisor transform's secondary term.

    Computes y(T) = laplace_d2(T) - (1/8) (T/pi)^(3/2) c_d, then fits
    y(T)/T against {log^2 T, log T, 1}.  The leading fitted coefficient
    estimates A1 = -1/(4 pi^2) ~ -0.02533; recovering it requires c_d
    accurate well beyond any sievable partial sum, i.e. `series_limit`.
    """
    Ts = list(T_list)
    if len(Ts) < 3:
        raise ValueError(f"need at least 3 transform points to fit, got {len(Ts)}")
    ys = []
    for T in Ts:
        integral, _ = laplace_d2(profile, T, rel_tol)
        ys.append((integral - laplace_main_d(c_d, T)) / T)
    a1, a2, a3 = fit_log_quadratic(Ts, ys)
    return A1Fit(a1=a1, a2=a2, a3=a3, rows=list(zip(map(float, Ts), ys)))


# ---------------------------------------------------------------------------
# Weight functions of the correlation-to-transform argument


def _sqrt_gap_sq(t: float, h: float) -> float:
    """(sqrt(t+h) - sqrt(t))^2 without cancellation: h^2 / (sqrt(t+h) + sqrt(t))^2."""
    return (h / (math.sqrt(t + h) + math.sqrt(t))) ** 2 if h else 0.0


def _weight_f_raw(t: float, h: float, T: float) -> float:
    root = math.sqrt(t * (t + h))
    brace = -_sqrt_gap_sq(t, h) + (3.0 * (2.0 * t + h) + 2.0 * root) / (
        16.0 * math.pi**2 * root * T
    )
    return brace * t**-0.75 * (t + h) ** -0.75


def _check_weight_domain(t: float, h: float, T: float) -> None:
    if h < 0:
        raise ValueError(f"h must be >= 0, got {h}")
    if not h * h <= t:
        raise ValueError(f"weight functions need h^2 <= t, got h={h}, t={t}")
    if t > float(T) ** 10:
        raise ValueError(f"weight functions need t <= T^10, got t={t}, T={T}")


def weight_f(t: float, h: float, T: float) -> float:
    """Smoothing weight pairing the correlation sums with the transform:

        f(t, h) = ( -(sqrt(t+h) - sqrt(t))^2
                    + (3 (2t+h) + 2 sqrt(t(t+h))) / (16 pi^2 sqrt(t(t+h)) T) )
                  * t^(-3/4) (t+h)^(-3/4)

    on the domain h^2 <= t <= T^10.
    """
    _check_weight_domain(t, h, T)
    return _weight_f_raw(t, h, T)


def _exponent(t: float, h: float, T: float) -> float:
    return math.pi**2 * T * _sqrt_gap_sq(t, h)


def _exponent_derivative(t: float, h: float, T: float) -> float:
    # d/dt (sqrt(t+h) - sqrt(t))^2 = -(sqrt(t+h) - sqrt(t))^2 / sqrt(t(t+h))
    return -math.pi**2 * T * _sqrt_gap_sq(t, h) / math.sqrt(t * (t + h))


def _f_derivative(t: float, h: float, T: float) -> float:
    dt = t * 1e-6
    d1 = (_weight_f_raw(t + dt, h, T) - _weight_f_raw(t - dt, h, T)) / (2.0 * dt)
    d2 = (_weight_f_raw(t + dt / 2, h, T) - _weight_f_raw(t - dt / 2, h, T)) / dt
    return (4.0 * d2 - d1) / 3.0    # Richardson step on the central difference


def weight_u(t: float, h: float, T: float) -> float:
    """u(t, h) = d/dt [ exp(-pi^2 T (sqrt(t+h) - sqrt(t))^2) f(t, h) ].

    Differentiated as exp(-E) (f' - E' f) with E' analytic and f' a
    Richardson-refined central difference; the exponential factor may
    underflow to zero for strongly damped arguments (use
    `weight_u_log_ratio` in that regime).
    """
    _check_weight_domain(t, h, T)
    inner = _f_derivative(t, h, T) - _exponent_derivative(t, h, T) * _weight_f_raw(t, h, T)
    return math.exp(-_exponent(t, h, T)) * inner


def _envelope_log(t: float, h: float, T: float) -> float:
    """log of exp(-2 T h^2 / t) (h^2 t^(-7/2) + T^-1 t^(-5/2) + T h^4 t^(-9/2))."""
    poly = h * h * t**-3.5 + t**-2.5 / T + T * h**4 * t**-4.5
    return -2.0 * T * h * h / t + math.log(poly)


def weight_u_log_ratio(t: float, h: float, T: float) -> float:
    """log( |u(t, h)| / envelope ), computed without under/overflow.

    The comparison envelope is exp(-2 T h^2/t) (h^2 t^(-7/2) + T^(-1)
    t^(-5/2) + T h^4 t^(-9/2)); a bounded log-ratio across a grid is the
    numeric content of the integration-by-parts estimate.
    """
    _check_weight_domain(t, h, T)
    inner = _f_derivative(t, h, T) - _exponent_derivative(t, h, T) * _weight_f_raw(t, h, T)
    if inner == 0.0:
        return float("-inf")
    return -_exponent(t, h, T) + math.log(abs(inner)) - _envelope_log(t, h, T)


def weight_u_bound_check(t: float, h: float, T: float, c_cap: float = 100.0) -> bool:
    """True when |u(t, h)| <= c_cap * envelope at this point (log-space compare)."""
    return weight_u_log_ratio(t, h, T) <= math.log(c_cap)


def exp_power_peak(alpha: float) -> float:
    """max over x >= 0 of exp(-x) x^alpha, attained at x = alpha: exp(-alpha) alpha^alpha."""
    if alpha <= 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    return math.exp(-alpha) * alpha**alpha
