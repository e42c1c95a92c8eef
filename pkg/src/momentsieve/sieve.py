"""Smallest-prime-factor sieve and factorization over [1, limit].

The table is a single uint32 array (hard cap 2**32); construction switches
to a segmented fill above 2**26 entries so the auxiliary temporaries stay
bounded by the segment size.  The table is immutable after construction and
safe to share across workers.
"""

from dataclasses import dataclass
from math import isqrt

import numpy as np

from .errors import CapacityError, DomainError

HARD_CAP = 2**32 - 1
SEGMENT_THRESHOLD = 1 << 26
DEFAULT_SEGMENT = 1 << 22


@dataclass(frozen=True)
class SieveTable:
    limit: int
    spf: np.ndarray  # spf[n] = smallest prime factor, valid for 2 <= n <= limit

    def is_prime(self, n: int) -> bool:
        return n >= 2 and int(self.spf[n]) == n


@dataclass(frozen=True)
class Factorization:
    n: int
    pairs: tuple  # ((p, nu), ...) with strictly increasing p

    @property
    def omega(self) -> int:
        return len(self.pairs)

    @property
    def big_omega(self) -> int:
        return sum(nu for _, nu in self.pairs)

    @property
    def radical(self) -> int:
        r = 1
        for p, _ in self.pairs:
            r *= p
        return r


def _fill_window(spf, lo, hi, base_primes):
    # mark composites in [lo, hi) against the base primes, then promote
    # the untouched entries (primes) to fixed points
    for p in base_primes:
        p = int(p)
        if p * p >= hi:
            break
        start = max(p * p, ((lo + p - 1) // p) * p)
        view = spf[start:hi:p]
        view[view == 0] = p
    window = spf[max(lo, 2) : hi]
    rem = np.nonzero(window == 0)[0]
    window[rem] = rem + max(lo, 2)


def build_sieve(limit: int, segment_size: int = DEFAULT_SEGMENT) -> SieveTable:
    """Smallest-prime-factor table for 2..limit."""
    if limit < 2:
        raise DomainError(f"sieve limit must be >= 2, got {limit}")
    if limit > HARD_CAP:
        raise CapacityError(f"sieve limit {limit} exceeds the 2**32 entry cap")
    spf = np.zeros(limit + 1, dtype=np.uint32)
    root = isqrt(limit)
    if limit + 1 <= SEGMENT_THRESHOLD:
        for p in range(2, root + 1):
            if spf[p] == 0:
                view = spf[p::p]
                view[view == 0] = p
        window = spf[2:]
        rem = np.nonzero(window == 0)[0]
        window[rem] = rem + 2
    else:
        # base table up to sqrt(limit), then fixed-size windows above it
        for p in range(2, root + 1):
            if spf[p] == 0:
                view = spf[p : root + 1 : p]
                view[view == 0] = p
        idx = np.arange(2, root + 1)
        base_primes = idx[spf[2 : root + 1] == idx]
        lo = root + 1
        while lo <= limit:
            hi = min(lo + segment_size, limit + 1)
            _fill_window(spf, lo, hi, base_primes)
            lo = hi
    spf.setflags(write=False)
    return SieveTable(limit=limit, spf=spf)


def factorize(n: int, table: SieveTable) -> Factorization:
    if n < 1 or n > table.limit:
        raise DomainError(f"factorize: n={n} outside [1, {table.limit}]")
    pairs = []
    spf = table.spf
    m = n
    while m > 1:
        p = int(spf[m])
        nu = 0
        while m % p == 0:
            m //= p
            nu += 1
        pairs.append((p, nu))
    return Factorization(n=n, pairs=tuple(pairs))


def primes_up_to(limit: int, table: SieveTable) -> np.ndarray:
    """Ascending array of primes <= limit."""
    if limit > table.limit:
        raise DomainError(f"primes_up_to: {limit} exceeds table limit {table.limit}")
    if limit < 2:
        return np.empty(0, dtype=np.int64)
    idx = np.arange(2, limit + 1, dtype=np.int64)
    return idx[table.spf[2 : limit + 1] == idx]
