import math
from itertools import permutations

import pytest

from momentsieve.combinatorics import (
    double_factorial,
    eulerian,
    eulerian_poly,
    gaussian_constants,
    multinomial,
    pairing_count,
    polylog_neg,
    stirling2,
    touchard,
    touchard_coefficients,
)
from momentsieve.errors import CapacityError, DomainError


def enumerate_matchings(points):
    # oracle: count perfect matchings of labeled points by recursion
    if not points:
        return 1
    first, rest = points[0], points[1:]
    total = 0
    for i in range(len(rest)):
        total += enumerate_matchings(rest[:i] + rest[i + 1 :])
    return total


def enumerate_set_partitions(n, k):
    # oracle: partitions of {1..n} into exactly k nonempty blocks
    def rec(elems):
        if not elems:
            yield []
            return
        first, rest = elems[0], elems[1:]
        for part in rec(rest):
            for i in range(len(part)):
                yield part[:i] + [part[i] + [first]] + part[i + 1 :]
            yield part + [[first]]

    return sum(1 for part in rec(list(range(n))) if len(part) == k)


def ascent_count(perm):
    return sum(1 for a, b in zip(perm, perm[1:]) if a < b)


def test_gaussian_constants_examples():
    g2 = gaussian_constants(2)
    assert g2.moment == 1 and g2.coefficient == 1 and g2.parity == 1
    g4 = gaussian_constants(4)
    assert g4.moment == 3 and g4.coefficient == 3  # 4!/4!! = 24/8
    g3 = gaussian_constants(3)
    assert g3.moment == 0.0 and g3.parity == 0
    # independent Gamma evaluation
    assert abs(g3.coefficient - 6.0 / (2**1.5 * math.gamma(2.5))) < 1e-14
    assert abs(g3.coefficient - 1.595769) < 1e-6


def test_gaussian_even_exact():
    for m in range(2, 171, 2):
        g = gaussian_constants(m)
        assert g.moment == double_factorial(m - 1)
        assert g.coefficient == g.moment


def test_gaussian_coefficient_increasing():
    vals = [gaussian_constants(m).coefficient for m in range(1, 61)]
    assert all(b > a for a, b in zip(vals, vals[1:]))


def test_gaussian_order_cap():
    with pytest.raises(CapacityError):
        gaussian_constants(171)


def test_pairing_count():
    assert pairing_count(2) == 1
    assert pairing_count(4) == enumerate_matchings(list(range(4))) == 3
    assert pairing_count(6) == math.factorial(6) // (math.factorial(3) * 8) == 15
    for m in range(2, 21, 2):
        assert pairing_count(m) == double_factorial(m - 1)
    with pytest.raises(DomainError):
        pairing_count(3)


def test_stirling2():
    assert stirling2(3, 2) == enumerate_set_partitions(3, 2) == 3
    for n in range(9):
        assert stirling2(n, n) == 1
    assert stirling2(5, 0) == 0
    for n in range(1, 9):
        for k in range(n + 1):
            assert stirling2(n, k) == enumerate_set_partitions(n, k)


def test_touchard():
    val, coeffs = touchard(2, 2.0)
    assert coeffs == (0, 1, 1)  # t^2 + t
    assert val == 6.0
    bell3, _ = touchard(3, 1.0)
    assert bell3 == 5.0  # partitions of a 3-element set
    t32, _ = touchard(3, 2.0)
    assert t32 == 22.0 <= 27.0


def test_touchard_coefficients_are_stirling_rows():
    for n in range(21):
        assert touchard_coefficients(n) == tuple(stirling2(n, k) for k in range(n + 1))


def test_touchard_upper_bound():
    for n in range(1, 21):
        for t in (0.0, 0.5, 1.0, 2.0, 5.0):
            val, _ = touchard(n, t)
            assert val <= (t + (n - 1) / 2.0) ** n + 1e-9


def test_eulerian():
    counts = {}
    for perm in permutations(range(3)):
        counts[ascent_count(perm)] = counts.get(ascent_count(perm), 0) + 1
    assert eulerian(3, 1) == counts[1] == 4
    assert eulerian_poly(3, 1.0) == 6.0  # row sum = 3!
    for ell in range(1, 9):
        assert eulerian(ell, 0) == 1


def test_eulerian_row_sums():
    for ell in range(1, 13):
        assert sum(eulerian(ell, j) for j in range(ell + 1)) == math.factorial(ell)


def test_polylog_examples():
    assert abs(polylog_neg(0, 0.5) - 1.0) < 1e-15
    assert abs(polylog_neg(1, 0.5) - 2.0) < 1e-12
    assert abs(polylog_neg(2, 0.5) - 6.0) < 1e-12


def series_polylog(ell, zeta, terms=3000):
    # high-precision series oracle; float terms alone lose digits to
    # cancellation for negative zeta at higher ell
    import mpmath

    with mpmath.workdps(50):
        z = mpmath.mpf(zeta)
        return float(mpmath.fsum(mpmath.mpf(n) ** ell * z**n for n in range(1, terms)))


def test_polylog_closed_vs_series():
    for ell in range(9):
        for step in range(1, 10):
            for sign in (1, -1):
                zeta = sign * step / 10.0
                closed = polylog_neg(ell, zeta)
                series = series_polylog(ell, zeta)
                assert abs(closed - series) <= 1e-10 * max(1.0, abs(series))


def test_polylog_domain():
    with pytest.raises(DomainError):
        polylog_neg(2, 1.0)


def test_multinomial():
    assert multinomial([2, 1]) == 3
    assert multinomial([1, 1, 1]) == 6
    assert multinomial([2, 2]) == 6
    with pytest.raises(CapacityError):
        multinomial([100, 100])
    with pytest.raises(DomainError):
        multinomial([2, -1])
