import math

import numpy as np
import pytest

from circlekit import lattice
from circlekit.lattice import (
    CIRCLE,
    DIVISOR,
    EULER_GAMMA,
    delta_of_x,
    mean_square_p,
    p_gauss_oracle,
    p_of_x,
    pointwise_report,
    q_of_x,
    step_profile,
)


def test_p_of_x_basic_values(circle_4k):
    # r(1) + r(2) = 8 nonzero lattice points inside radius sqrt(2.5)
    assert p_of_x(circle_4k, 2.5) == pytest.approx(8 + 1 - 2.5 * math.pi, abs=1e-14)
    # integer x: the final term r(x) is halved
    assert p_of_x(circle_4k, 1.0) == pytest.approx(4 / 2 - math.pi + 1, abs=1e-14)
    # sum_{n<=10} r(n) = 36, r(10) = 8 halved at the endpoint
    assert p_of_x(circle_4k, 10.0) == pytest.approx(36 - 4 + 1 - 10 * math.pi, abs=1e-13)


def test_p_right_limit_at_10_is_unhalved_count(circle_4k):
    # Straddling the halving convention: the lattice count through n = 10
    # is 36, so just above x = 10 the error term is 37 - 10 pi; the
    # enumeration oracle at x = 10 counts the full circle and agrees.
    right_limit = float(circle_4k.partial[10]) + 1.0 - math.pi * 10.0
    assert right_limit == pytest.approx(37 - 10 * math.pi, abs=1e-13)
    assert abs(p_gauss_oracle(10.0) - right_limit) <= 1e-12


def test_p_oracle_examples():
    assert p_gauss_oracle(0.5) == pytest.approx(1 - 0.5 * math.pi, abs=1e-14)
    assert p_gauss_oracle(2.5) == pytest.approx(9 - 2.5 * math.pi, abs=1e-14)


def test_p_matches_oracle_at_random_noninteger_x(circle_4k):
    rng = np.random.default_rng(2024)
    xs = rng.uniform(1.0, 4000.0, size=100)
    xs = xs[np.floor(xs) != xs]
    for x in xs:
        assert p_of_x(circle_4k, float(x)) == p_gauss_oracle(float(x))


def test_p_domain_error(circle_4k):
    with pytest.raises(ValueError):
        p_of_x(circle_4k, 4001.0)
    with pytest.raises(ValueError):
        p_of_x(circle_4k, 0.5)


def test_p_affine_between_jumps(circle_4k):
    # slope is exactly -pi between consecutive integers
    for x in (7.2, 123.4, 3999.1):
        v1 = p_of_x(circle_4k, x)
        v2 = p_of_x(circle_4k, x + 0.3)
        assert v2 - v1 == pytest.approx(-0.3 * math.pi, abs=1e-9)


def test_p_jump_size(circle_4k, tables_4k):
    # crossing integer n the error term jumps by r(n)
    for n in (5, 25, 1000):
        below = p_of_x(circle_4k, n - 1e-9)
        above = p_of_x(circle_4k, n + 1e-9)
        assert above - below == pytest.approx(float(tables_4k.r[n]), abs=1e-5)
        # primed convention sits halfway
        assert p_of_x(circle_4k, float(n)) == pytest.approx((below + above) / 2, abs=1e-5)


def test_delta_values(divisor_4k):
    # d(1) = 1, d(2) = 2 halved at the integer endpoint
    expect_2 = 1 + 2 / 2 - 2 * (math.log(2) + 2 * EULER_GAMMA - 1) - 0.25
    assert delta_of_x(divisor_4k, 2.0) == pytest.approx(expect_2, abs=1e-14)
    assert expect_2 == pytest.approx(0.0548429793, abs=1e-9)
    # only d(1) contributes below x = 2
    expect_15 = 1 - 1.5 * (math.log(1.5) + 2 * EULER_GAMMA - 1) - 0.25
    assert delta_of_x(divisor_4k, 1.5) == pytest.approx(expect_15, abs=1e-14)
    assert expect_15 == pytest.approx(-0.0898446569, abs=1e-9)


def test_delta_jump_structure(divisor_4k, tables_4k):
    for n in (6, 100, 3600):
        below = delta_of_x(divisor_4k, n - 1e-9)
        above = delta_of_x(divisor_4k, n + 1e-9)
        assert above - below == pytest.approx(float(tables_4k.d[n]), abs=1e-4)


def test_kind_guards(circle_4k, divisor_4k):
    with pytest.raises(ValueError):
        delta_of_x(circle_4k, 2.0)
    with pytest.raises(ValueError):
        p_of_x(divisor_4k, 2.0)
    with pytest.raises(ValueError):
        mean_square_p(divisor_4k, 2.0)


def test_mean_square_closed_forms(circle_4k):
    assert mean_square_p(circle_4k, 0.0) == 0.0
    # int_0^1 (1 - pi x)^2 dx
    assert mean_square_p(circle_4k, 1.0) == pytest.approx(
        1 - math.pi + math.pi**2 / 3, rel=1e-14
    )
    # plus int_1^2 (5 - pi x)^2 dx, antiderivative -(5 - pi x)^3 / (3 pi)
    second = ((5 - math.pi) ** 3 - (5 - 2 * math.pi) ** 3) / (3 * math.pi)
    assert mean_square_p(circle_4k, 2.0) == pytest.approx(
        1 - math.pi + math.pi**2 / 3 + second, rel=1e-14
    )


def _p_squared_quadrature(profile, lo: float, hi: float) -> float:
    """Independent integral of P^2 over [lo, hi]: 4-point Gauss-Legendre per
    piece between breakpoints, exact for the piecewise-quadratic integrand."""
    nodes, weights = np.polynomial.legendre.leggauss(4)

    def p_sq(x: float) -> float:
        return (1 - math.pi * x) ** 2 if x < 1 else p_of_x(profile, x) ** 2

    edges = sorted({lo, hi} | {float(n) for n in range(math.ceil(lo), math.floor(hi) + 1)})
    total = 0.0
    for a, b in zip(edges, edges[1:]):
        mid, half = (a + b) / 2.0, (b - a) / 2.0
        total += half * sum(w * p_sq(mid + half * t) for t, w in zip(nodes, weights))
    return total


def test_mean_square_against_quadrature(circle_4k):
    for X in (0.7, 2.0, 37.6):
        assert mean_square_p(circle_4k, X) == pytest.approx(
            _p_squared_quadrature(circle_4k, 0.0, X), rel=1e-12
        )


def test_mean_square_monotone_and_additive(circle_4k):
    xs = [0.0, 0.5, 1.0, 7.3, 7.9, 50.0, 3999.0]
    vals = [mean_square_p(circle_4k, x) for x in xs]
    assert all(b >= a for a, b in zip(vals, vals[1:]))
    whole = mean_square_p(circle_4k, 100.0)
    first = mean_square_p(circle_4k, 61.7)
    assert whole == pytest.approx(
        first + _p_squared_quadrature(circle_4k, 61.7, 100.0), rel=1e-12
    )


def test_q_of_x(circle_4k):
    assert q_of_x(circle_4k, 0.0, 1.7) == 0.0
    X = 2000.0
    c32 = 1.69
    assert q_of_x(circle_4k, X, c32) == pytest.approx(
        mean_square_p(circle_4k, X) - c32 * X**1.5, rel=1e-12
    )


def test_pointwise_report(circle_4k):
    rep = pointwise_report(circle_4k, 100.0, samples=16)
    assert len(rep.rows) == 16
    assert rep.kind == CIRCLE
    # the maximum must live at a one-sided limit of an integer; compare with
    # a dense brute-force scan
    dense = 0.0
    for n in range(1, 101):
        for x in (n - 1e-9, n + 1e-9):
            dense = max(dense, abs(p_of_x(circle_4k, min(max(x, 1.0), 100.0))))
    assert rep.max_abs >= dense - 1e-5
    assert rep.max_ratio_quarter >= rep.max_abs / 100.0**0.25
    with pytest.raises(ValueError):
        pointwise_report(circle_4k, 100.0, samples=0)


def test_pointwise_report_divisor(divisor_4k):
    rep = pointwise_report(divisor_4k, 500.0, samples=8)
    assert rep.kind == DIVISOR
    assert rep.max_abs > 0
    assert all(r.ratio_quarter >= 0 for r in rep.rows)


def test_step_profile_structure(tables_4k):
    prof = step_profile(tables_4k, CIRCLE)
    assert prof.partial[0] == 0
    assert (np.diff(prof.partial) >= 0).all()
    assert prof.jump(5) == 8
    with pytest.raises(ValueError):
        step_profile(tables_4k, "unknown")
