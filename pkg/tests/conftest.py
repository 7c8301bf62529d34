import numpy as np
import pytest

from circlekit import arith, lattice


@pytest.fixture(scope="session")
def tables_4k():
    return arith.build_tables(4000)


@pytest.fixture(scope="session")
def tables_120k():
    return arith.build_tables(120_000)


@pytest.fixture(scope="session")
def tables_1m():
    # Covers the transform scans (x_max ~ 2.1e5 at T = 8192), the truncated
    # formula at x = 1e6 + 0.5, and correlation grids N = 1e6, h <= 1000.
    return arith.build_tables(1_001_024)


@pytest.fixture(scope="session")
def circle_1m(tables_1m):
    return lattice.step_profile(tables_1m, lattice.CIRCLE)


@pytest.fixture(scope="session")
def divisor_1m(tables_1m):
    return lattice.step_profile(tables_1m, lattice.DIVISOR)


@pytest.fixture(scope="session")
def circle_4k(tables_4k):
    return lattice.step_profile(tables_4k, lattice.CIRCLE)


@pytest.fixture(scope="session")
def divisor_4k(tables_4k):
    return lattice.step_profile(tables_4k, lattice.DIVISOR)


def brute_r(n: int) -> int:
    """Lattice-point count of a^2 + b^2 = n by direct enumeration."""
    import math

    count = 0
    for a in range(-math.isqrt(n), math.isqrt(n) + 1):
        rem = n - a * a
        s = math.isqrt(rem)
        if s * s == rem:
            count += 2 if s > 0 else 1
    return count


def brute_divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]
