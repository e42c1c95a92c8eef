import numpy as np
import pytest

from momentsieve import build_sieve, factorize, primes_up_to
from momentsieve import sieve as sieve_mod
from momentsieve.errors import CapacityError, DomainError


def trial_division_spf(n):
    d = 2
    while d * d <= n:
        if n % d == 0:
            return d
        d += 1
    return n


def trial_division_primes(limit):
    return [n for n in range(2, limit + 1) if trial_division_spf(n) == n]


def test_spf_examples():
    t = build_sieve(10)
    assert int(t.spf[9]) == 3
    assert int(t.spf[7]) == 7
    assert int(build_sieve(100).spf[91]) == trial_division_spf(91) == 7


def test_spf_invariants(table4):
    spf = table4.spf
    for n in range(2, 10**4 + 1):
        p = int(spf[n])
        assert n % p == 0
        assert trial_division_spf(p) == p
        if p != n:
            assert p * p <= n


def test_spf_prime_fixed_points(table4):
    primes = set(trial_division_primes(10**4))
    for n in range(2, 10**4 + 1):
        assert (int(table4.spf[n]) == n) == (n in primes)


def test_factorize_examples(table4):
    assert factorize(12, table4).pairs == ((2, 2), (3, 1))
    assert factorize(1, table4).pairs == ()
    assert factorize(97, table4).pairs == ((97, 1),)


def test_factorize_reconstruction(table5):
    for n in range(1, 10**5 + 1):
        prod = 1
        last_p = 0
        for p, nu in factorize(n, table5).pairs:
            assert p > last_p
            last_p = p
            prod *= p**nu
        assert prod == n


def test_factorize_domain_errors(table4):
    with pytest.raises(DomainError):
        factorize(0, table4)
    with pytest.raises(DomainError):
        factorize(10**4 + 1, table4)


def test_primes_up_to(table4):
    assert list(primes_up_to(10, table4)) == [2, 3, 5, 7]
    assert len(primes_up_to(100, table4)) == 25
    assert len(primes_up_to(1, table4)) == 0
    assert list(primes_up_to(10**4, table4)) == trial_division_primes(10**4)


def test_capacity_cap():
    with pytest.raises(CapacityError):
        build_sieve(2**32)


def test_segmented_matches_direct(monkeypatch):
    direct = build_sieve(50000)
    monkeypatch.setattr(sieve_mod, "SEGMENT_THRESHOLD", 1024)
    seg = sieve_mod.build_sieve(50000, segment_size=4096)
    assert np.array_equal(direct.spf, seg.spf)


def test_omega_gap_average(table6):
    # (1/x) sum (Omega - omega) stays below 0.8; the limit constant
    # sum 1/(p(p-1)) is about 0.7732
    x = 10**6
    total = 0
    primes = primes_up_to(int(x**0.5), table6)
    for p in primes:
        p = int(p)
        q = p * p
        while q <= x:
            total += x // q
            q *= p
    avg = total / x
    assert avg <= 0.8
    assert avg > 0.7  # sanity: the constant is not trivially small
