"""Exact combinatorial kernel: Gaussian moment constants, perfect-matching
counts, Stirling/Touchard/Eulerian numbers, and negative-order polylogarithms.

Integer results use Python's arbitrary-precision ints; real results fall back
to log-Gamma only where factorials would overflow the double range.
"""

from dataclasses import dataclass
from functools import lru_cache
from math import comb, exp, factorial, lgamma, log, pi, sqrt

from .errors import CapacityError, DomainError

MAX_ORDER = 170  # largest m with m! representable as a double


@dataclass(frozen=True)
class GaussianMoments:
    """Moments of the standard Gaussian at one order.

    moment      m-th Gaussian moment: m!/m!! for even m, 0 for odd m
    coefficient m!/(2^(m/2) Gamma(m/2+1)); equals the moment for even m
    parity      1 if m is even else 0
    """

    order: int
    moment: float
    coefficient: float
    parity: int


def double_factorial(m: int) -> int:
    out = 1
    while m > 1:
        out *= m
        m -= 2
    return out


def gaussian_constants(m: int) -> GaussianMoments:
    if not 1 <= m <= MAX_ORDER:
        raise CapacityError(f"moment order {m} outside [1, {MAX_ORDER}]")
    parity = 1 - (m & 1)
    if parity:
        exact = double_factorial(m - 1)  # m!/m!! = (m-1)!!
        return GaussianMoments(m, exact, exact, 1)
    if m <= 30:
        # Gamma(m/2+1) = Gamma(j+1/2) = sqrt(pi) (2j)! / (4^j j!) with j=(m+1)/2
        j = (m + 1) // 2
        rational = factorial(m) * (4**j) * factorial(j) / factorial(2 * j)
        coeff = rational / (2 ** (m / 2) * sqrt(pi))
    else:
        coeff = exp(lgamma(m + 1) - (m / 2) * log(2.0) - lgamma(m / 2 + 1))
    return GaussianMoments(m, 0.0, coeff, 0)


def pairing_count(m: int) -> int:
    """Perfect matchings of m labeled points: m!/((m/2)! 2^(m/2)) = (m-1)!!"""
    if m % 2:
        raise DomainError(f"pairing_count needs even m, got {m}")
    if m > MAX_ORDER:
        raise CapacityError(f"m={m} too large")
    return factorial(m) // (factorial(m // 2) * 2 ** (m // 2))


@lru_cache(maxsize=None)
def _stirling2_row(n: int) -> tuple:
    if n == 0:
        return (1,)
    prev = _stirling2_row(n - 1)
    row = [0] * (n + 1)
    for k in range(1, n + 1):
        row[k] = k * (prev[k] if k < n else 0) + prev[k - 1]
    return tuple(row)


def stirling2(n: int, k: int) -> int:
    if not (0 <= k <= n <= 64):
        raise DomainError(f"stirling2 needs 0 <= k <= n <= 64, got ({n}, {k})")
    return _stirling2_row(n)[k]


@lru_cache(maxsize=None)
def touchard_coefficients(n: int) -> tuple:
    """Coefficients of the n-th Touchard polynomial via the binomial recurrence
    T_{n+1}(t) = t * sum_i C(n,i) T_i(t); index k holds the t^k coefficient."""
    if n == 0:
        return (1,)
    acc = [0] * (n + 1)
    for i in range(n):
        c = comb(n - 1, i)
        for k, coef in enumerate(touchard_coefficients(i)):
            acc[k + 1] += c * coef
    return tuple(acc)


def touchard(n: int, t: float):
    """Value T_n(t) and the coefficient vector."""
    if not 0 <= n <= 64:
        raise DomainError(f"touchard needs 0 <= n <= 64, got {n}")
    coeffs = touchard_coefficients(n)
    val = 0.0
    for c in reversed(coeffs):
        val = val * t + c
    return val, coeffs


def eulerian(ell: int, j: int) -> int:
    """Permutations of {1..ell} with exactly j ascents (alternating-sum form)."""
    if not (0 <= j <= ell <= 20):
        raise DomainError(f"eulerian needs 0 <= j <= ell <= 20, got ({ell}, {j})")
    if ell == 0:
        return 1 if j == 0 else 0
    return sum((-1) ** a * comb(ell + 1, a) * (j + 1 - a) ** ell for a in range(j + 1))


def eulerian_poly(ell: int, zeta: float) -> float:
    coeffs = [eulerian(ell, j) for j in range(ell + 1)]
    val = 0.0
    for c in reversed(coeffs):
        val = val * zeta + c
    return val


def polylog_neg(ell: int, zeta: float) -> float:
    """Li_{-ell}(zeta) = sum n^ell zeta^n = zeta A_ell(zeta) / (1-zeta)^(ell+1)."""
    if abs(zeta) > 1 - 1e-9:
        raise DomainError(f"polylog_neg needs |zeta| <= 1 - 1e-9, got {zeta}")
    return zeta * eulerian_poly(ell, zeta) / (1.0 - zeta) ** (ell + 1)


def multinomial(parts) -> int:
    parts = list(parts)
    total = sum(parts)
    if any(p < 0 for p in parts):
        raise DomainError("multinomial parts must be nonnegative")
    if total > MAX_ORDER:
        raise CapacityError(f"multinomial size {total} exceeds {MAX_ORDER}")
    out = factorial(total)
    for p in parts:
        out //= factorial(p)
    return out
