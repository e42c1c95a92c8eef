import math

import pytest

from momentsieve.errors import CapacityError
from momentsieve.tau import _MODULI, hecke_prime_power, tau_naive, tau_series


def test_leading_coefficients():
    t = tau_series(10)
    assert t[1] == 1
    assert t[2] == -24


def test_against_naive_oracle():
    assert tau_series(10)[1:] == tau_naive(10)[1:]
    assert tau_series(200)[1:] == tau_naive(200)[1:]


def test_multiplicativity():
    t = tau_series(10**4)
    assert t[6] == t[2] * t[3]
    pairs = [(2, 3), (3, 5), (4, 9), (8, 27), (25, 49), (11, 13), (2, 4999)]
    pairs += [(m, n) for m in (5, 7, 9, 16) for n in (11, 13, 121, 169) if math.gcd(m, n) == 1]
    count = 0
    for m, n in pairs:
        if math.gcd(m, n) == 1 and m * n <= 10**4:
            assert t[m * n] == t[m] * t[n], (m, n)
            count += 1
    assert count >= 10


def test_hecke_recurrence_at_two():
    t = tau_series(40)
    for nu in range(6):
        assert hecke_prime_power(t[2], 2, nu) == t[2**nu]


def test_deligne_bound():
    t = tau_series(10**4)
    sieve = [True] * (10**4 + 1)
    for i in range(2, 101):
        if sieve[i]:
            for j in range(i * i, 10**4 + 1, i):
                sieve[j] = False
    for p in range(2, 10**4 + 1):
        if sieve[p]:
            assert t[p] ** 2 <= 4 * p**11


def test_series_cap():
    with pytest.raises(CapacityError):
        tau_series(10**7)
    with pytest.raises(CapacityError):
        tau_series(2000, cap=1000)


def test_ntt_moduli_are_valid():
    # every modulus prime, every declared root primitive
    for mod, root in _MODULI:
        assert all(mod % d for d in range(2, int(mod**0.5) + 1))
        n = mod - 1
        factors = set()
        d = 2
        while d * d <= n:
            while n % d == 0:
                factors.add(d)
                n //= d
            d += 1
        if n > 1:
            factors.add(n)
        for q in factors:
            assert pow(root, (mod - 1) // q, mod) != 1
