"""Integer polynomials and root counting modulo prime powers.

Root counts are brute-force enumerations below a capacity cap.  For prime
arguments there are closed-form fast paths (degree 1, and degree 2 via the
discriminant's Legendre symbol) used by the scans that touch every prime up
to 10^6; both paths are cross-checked against enumeration in the tests.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, isqrt

import numpy as np

from .errors import CapacityError, DomainError

BRUTE_CAP = 10**6


@dataclass(frozen=True)
class PolySpec:
    """Nonconstant polynomial with integer coefficients, lowest degree first.

    Rational input is cleared by the smallest positive integer multiplier;
    that multiplier is kept so root counting can apply the convention that
    moduli sharing a factor with it count zero roots.  Irreducibility is the
    caller's responsibility.
    """

    coefficients: tuple
    clearing_factor: int = 1
    name: str = field(default="g")

    def __post_init__(self):
        if len(self.coefficients) < 2 or self.coefficients[-1] == 0:
            raise DomainError("polynomial must be nonconstant with nonzero leading coefficient")
        if self.coefficients[0] == 0:
            raise DomainError("polynomial must have g(0) != 0")

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __call__(self, n):
        acc = 0
        for c in reversed(self.coefficients):
            acc = acc * n + c
        return acc

    def eval_mod(self, values: np.ndarray, mod: int) -> np.ndarray:
        acc = np.zeros_like(values)
        for c in reversed(self.coefficients):
            acc = (acc * values + c) % mod
        return acc


def poly_from_coefficients(coeffs, name: str = "g") -> PolySpec:
    """Accepts ints, floats that are exact ints, or Fractions (cleared)."""
    fracs = [Fraction(c) for c in coeffs]
    denom = 1
    for f in fracs:
        denom = denom * f.denominator // gcd(denom, f.denominator)
    ints = tuple(int(f * denom) for f in fracs)
    return PolySpec(coefficients=ints, clearing_factor=denom, name=name)


def roots_mod(g: PolySpec, mod: int) -> np.ndarray:
    """All residues r in [0, mod) with g(r) = 0 (mod mod), by enumeration."""
    if mod > BRUTE_CAP:
        raise CapacityError(f"root enumeration cap {BRUTE_CAP} exceeded by modulus {mod}")
    r = np.arange(mod, dtype=np.int64)
    return r[g.eval_mod(r, mod) == 0]


def poly_root_count(g: PolySpec, p: int, nu: int = 1, cap: int = BRUTE_CAP) -> int:
    """Number of zeros of g in Z/p^nu, with the convention that a modulus
    sharing a factor with the clearing denominator counts zero."""
    if nu < 1:
        raise DomainError("nu must be >= 1")
    if g.clearing_factor % p == 0:
        return 0
    q = p**nu
    if q > cap:
        if _is_unramified(g, p):
            # simple roots lift uniquely to every level
            return poly_root_count(g, p, 1, cap)
        # separable g has an eventually constant count; accept it once two
        # consecutive feasible levels agree
        top = 1
        k = 0
        while top * p <= cap:
            top *= p
            k += 1
        if k >= 3 and len(roots_mod(g, top)) == len(roots_mod(g, top // p)):
            return int(len(roots_mod(g, top)))
        raise CapacityError(f"modulus {q} exceeds enumeration cap {cap}")
    return int(len(roots_mod(g, q)))


def _discriminant_quadratic(g: PolySpec) -> int:
    c, b, a = g.coefficients
    return b * b - 4 * a * c


def _is_unramified(g: PolySpec, p: int) -> bool:
    # sufficient check: p divides neither the leading coefficient nor the
    # discriminant-like resultant witness; exact only for degree <= 2,
    # conservative (enumerate) otherwise
    if g.degree == 1:
        return g.coefficients[1] % p != 0
    if g.degree == 2:
        return (2 * g.coefficients[2] * _discriminant_quadratic(g)) % p != 0
    return False


def jacobi(a: int, n: int) -> int:
    """Jacobi symbol (a/n) for odd n > 0; Legendre symbol when n is prime."""
    if n <= 0 or n % 2 == 0:
        raise DomainError("jacobi needs odd n > 0")
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def root_counts_at_primes(g: PolySpec, primes: np.ndarray, cap: int = BRUTE_CAP) -> np.ndarray:
    """rho_g(p) for every p in `primes`; closed forms for degree <= 2."""
    primes = np.asarray(primes, dtype=np.int64)
    out = np.zeros(len(primes), dtype=np.int64)
    deg = g.degree
    if deg == 1:
        lead = g.coefficients[1]
        out[:] = 1
        bad = np.nonzero(lead % primes == 0)[0]
    elif deg == 2:
        disc = _discriminant_quadratic(g)
        lead = g.coefficients[2]
        bad_mask = ((2 * lead * disc) % primes == 0)
        good = np.nonzero(~bad_mask)[0]
        # (disc/p) in {-1, +1} selects 0 or 2 roots
        out[good] = [1 + jacobi(disc, int(p)) for p in primes[good]]
        bad = np.nonzero(bad_mask)[0]
    else:
        if len(primes) and int(primes.max()) > 31623:
            raise CapacityError("degree > 2 prime scans are capped at 31623")
        bad = np.arange(len(primes))
    for i in bad:
        out[i] = poly_root_count(g, int(primes[i]), 1, cap)
    if g.clearing_factor > 1:
        out[g.clearing_factor % primes == 0] = 0
    return out


def root_sieve_multiplicities(g: PolySpec, x: int, f_rule):
    """Vectorized additive evaluation of n -> f(g(n)) for 1 <= n <= x.

    Factors every g(n) simultaneously: for each prime p up to sqrt(max g),
    the n with p | g(n) lie in the residue classes of the roots of g mod p;
    repeated division extracts multiplicities.  Whatever cofactor survives is
    a single prime > sqrt(max g).  f_rule(p, nu) must accept arrays for p.
    """
    if g.clearing_factor != 1:
        raise DomainError("root sieve needs an integer polynomial (clearing factor 1)")
    n = np.arange(x + 1, dtype=np.int64)
    values = np.zeros(x + 1, dtype=np.int64)
    for c in reversed(g.coefficients):
        values = values * n + c
    if values[1:].min() < 1:
        raise DomainError("root sieve needs g(n) >= 1 for n >= 1")
    gmax = int(values.max())
    if gmax >= 2**62:
        raise CapacityError("g(x) exceeds the 62-bit evaluation range")
    work = values.copy()
    out = np.zeros(x + 1, dtype=np.float64)
    for p in _small_primes(isqrt(gmax)):
        # p | g(n) iff n mod p is a root of g mod p; enumeration covers the
        # degenerate cases (p dividing leading coefficient or all of them)
        for r in roots_mod(g, int(p)):
            idx = np.arange(int(r) if r else p, x + 1, p, dtype=np.int64)
            if len(idx) == 0:
                continue
            v = work[idx]
            mult = np.zeros(len(idx), dtype=np.int64)
            divisible = v % p == 0
            while divisible.any():
                v[divisible] //= p
                mult[divisible] += 1
                divisible = v % p == 0
            work[idx] = v
            for m in np.unique(mult):
                if m == 0:
                    continue
                sel = idx[mult == m]
                out[sel] += f_rule(np.full(len(sel), p, dtype=np.int64), int(m))
    leftover = np.nonzero(work > 1)[0]
    if len(leftover):
        out[leftover] += f_rule(work[leftover], 1)
    out[0] = 0.0
    return out


def _small_primes(limit: int) -> np.ndarray:
    if limit < 2:
        return np.empty(0, dtype=np.int64)
    sieve = np.ones(limit + 1, dtype=bool)
    sieve[:2] = False
    for i in range(2, isqrt(limit) + 1):
        if sieve[i]:
            sieve[i * i :: i] = False
    return np.nonzero(sieve)[0].astype(np.int64)
