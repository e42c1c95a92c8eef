"""Local-factor decomposition of weighted moments: the per-prime centered
model, its completely multiplicative extension, and the divisor-sum
functionals whose closed forms drive the moment expansion.

Everything here works with the additive function rescaled by its prime bound
so |f(p)| <= 1; report-level callers un-rescale.
"""

import itertools
from dataclasses import dataclass
from math import gamma as gamma_fn
from math import log
from typing import NamedTuple

import numpy as np

from .errors import CapacityError, DomainError, SpecificationError
from .functions import AdditiveSpec, WeightSpec
from .reductions import chunked_sum
from .sieve import Factorization, SieveTable, factorize, primes_up_to

MAX_EXPAND_PRIMES = 8
_TINY = 1e-18
_NU_CAP = 4000


@dataclass(frozen=True)
class LocalFactorData:
    """One Euler factor at the declared abscissa.

    local_sum   sum over nu >= 0 of alpha(p^nu) p^(-abscissa nu)
    deficiency  1 - 1/local_sum, in [0, 1)
    power_tail  the nu >= 2 part of local_sum
    """

    prime: int
    local_sum: float
    deficiency: float
    power_tail: float


class TruncatedProduct(NamedTuple):
    value: float
    tail_estimate: float


def _local_sum_scalar(weight: WeightSpec, p: int) -> float:
    if weight.local_factor_rule is not None:
        return float(weight.local_factor_rule(p, weight.constants.abscissa))
    s0 = weight.constants.abscissa
    total = 1.0
    prev_nonzero = None
    nu = 1
    while nu <= _NU_CAP:
        term = float(weight.rule(p, nu)) * float(p) ** (-s0 * nu)
        if term < 0:
            raise SpecificationError(f"weight {weight.name} negative at ({p},{nu})")
        if term > 0:
            if prev_nonzero is not None and term >= prev_nonzero:
                raise SpecificationError(
                    f"local series of {weight.name} diverges at p={p} (term ratio >= 1)"
                )
            if term < _TINY * total:
                total += term
                break
            prev_nonzero = term
        total += term
        nu += 1
    else:
        # near-geometric tail closure for slowly decaying series
        if prev_nonzero is not None:
            ratio = term / prev_nonzero if prev_nonzero else 0.0
            if 0 < ratio < 1:
                total += term * ratio / (1 - ratio)
    return total


def local_factor(weight: WeightSpec, p: int) -> LocalFactorData:
    s = _local_sum_scalar(weight, p)
    alpha_p = float(weight.rule(p, 1))
    return LocalFactorData(
        prime=int(p),
        local_sum=s,
        deficiency=1.0 - 1.0 / s,
        power_tail=s - 1.0 - alpha_p * float(p) ** (-weight.constants.abscissa),
    )


def local_sums_at_primes(weight: WeightSpec, primes: np.ndarray, nu_cap: int = 500) -> np.ndarray:
    """Vectorized local sums over a prime array."""
    primes = np.asarray(primes, dtype=np.int64)
    pf = primes.astype(np.float64)
    if weight.local_factor_rule is not None:
        return np.asarray(weight.local_factor_rule(pf, weight.constants.abscissa), dtype=np.float64)
    s0 = weight.constants.abscissa
    total = np.ones(len(primes))
    prev = np.full(len(primes), np.inf)
    last_ratio = np.zeros(len(primes))
    term = None
    for nu in range(1, nu_cap + 1):
        term = np.asarray(weight.rule(primes, nu), dtype=np.float64) * pf ** (-s0 * nu)
        if np.any(term < 0):
            raise SpecificationError(f"weight {weight.name} produced a negative local term")
        nz = term > 0
        if np.any(nz & (term >= prev)):
            raise SpecificationError(f"local series of {weight.name} diverges (term ratio >= 1)")
        with np.errstate(divide="ignore", invalid="ignore"):
            last_ratio = np.where(nz & np.isfinite(prev), term / np.where(prev > 0, prev, 1.0), last_ratio)
        prev = np.where(nz, term, prev)
        total += term
        if np.all(term < _TINY * total):
            term = None
            break
    if term is not None:
        closing = (0 < last_ratio) & (last_ratio < 1)
        total += np.where(closing, term * last_ratio / (1 - last_ratio), 0.0)
    return total


def compute_Q0(weight: WeightSpec, table: SieveTable, scan_limit: int = 10**4) -> int:
    """Smallest prime bound with local tail sum_{nu>=1} alpha(p^nu) p^(-s0 nu)
    at most 1/2 for every scanned prime beyond it (floor 2)."""
    primes = primes_up_to(min(scan_limit, table.limit), table)
    tails = local_sums_at_primes(weight, primes) - 1.0
    big = np.nonzero(tails > 0.5)[0]
    if len(big) and tails[-1] > 0.25:
        raise SpecificationError(
            f"local tails of {weight.name} not settling below 1/2 within the scan"
        )
    return max(2, int(primes[big[-1]])) if len(big) else 2


def _squarefree_pairs(a: int, table: SieveTable) -> Factorization:
    fac = factorize(a, table)
    if any(nu != 1 for _, nu in fac.pairs):
        raise DomainError(f"{a} is not squarefree")
    return fac


def F_product(weight: WeightSpec, a: int, table: SieveTable) -> float:
    """Product of local deficiencies over the primes dividing squarefree a."""
    fac = _squarefree_pairs(a, table)
    out = 1.0
    for p, _ in fac.pairs:
        out *= local_factor(weight, p).deficiency
    return out


def lambda_tilde(weight: WeightSpec, a: int, table: SieveTable) -> float:
    """Product over p | a of the nu >= 1 local mass."""
    fac = _squarefree_pairs(a, table)
    out = 1.0
    for p, _ in fac.pairs:
        out *= local_factor(weight, p).local_sum - 1.0
    return out


def L_of_a(weight: WeightSpec, a: int, table: SieveTable) -> float:
    """Product over p | a of (loglog(p+1))^theta."""
    fac = _squarefree_pairs(a, table)
    th = weight.constants.local_loglog_power
    out = 1.0
    for p, _ in fac.pairs:
        out *= log(log(p + 1)) ** th
    return out


def lambda_alpha_of_a(weight: WeightSpec, a: int, p_max: int, table: SieveTable) -> TruncatedProduct:
    """Euler-product mean-value constant restricted to n coprime to a,
    truncated at p_max; the tail estimate is the absolute log-drift
    accumulated over the last decade of scanned primes (a truncation scale,
    not a certified bound)."""
    fac = _squarefree_pairs(a, table)
    a_primes = {p for p, _ in fac.pairs}
    if a_primes and max(a_primes) > p_max:
        raise DomainError("a has a prime factor beyond the truncation point")
    consts = weight.constants
    primes = primes_up_to(min(p_max, table.limit), table)
    sums = local_sums_at_primes(weight, primes)
    pf = primes.astype(np.float64)
    base = (1.0 - 1.0 / pf) ** consts.prime_density
    factors = np.where(np.isin(primes, sorted(a_primes)), base, base * sums)
    value = float(np.prod(factors)) / (consts.abscissa * gamma_fn(consts.prime_density))
    decade = primes > p_max / 10
    drift = float(np.sum(np.abs(np.log(np.where(decade, base * sums, 1.0)))))
    return TruncatedProduct(value=value, tail_estimate=drift)


def scaled_prime_value(f: AdditiveSpec, p: int) -> float:
    """f(p) rescaled by the declared prime bound, so magnitudes stay <= 1."""
    return float(f.rule(p, 1)) / f.bound_m


def f_p_value(f: AdditiveSpec, lf: LocalFactorData, n_divisible: bool) -> float:
    """Centered indicator model at one prime (rescaled f)."""
    fs = scaled_prime_value(f, lf.prime)
    return fs * (1.0 - lf.deficiency) if n_divisible else -fs * lf.deficiency


def _as_pairs(q, table):
    # q may be an integer within the table, a Factorization, or (p, nu) pairs
    if isinstance(q, Factorization):
        return q.pairs
    if isinstance(q, (int, np.integer)):
        return factorize(int(q), table).pairs
    return tuple((int(p), int(nu)) for p, nu in q)


def f_q_value(weight: WeightSpec, f: AdditiveSpec, q, n: int, table: SieveTable) -> float:
    """Completely multiplicative extension: product of f_p(n)^nu over p^nu || q.
    Depends on n only through gcd(n, rad q)."""
    out = 1.0
    for p, nu in _as_pairs(q, table):
        lf = local_factor(weight, p)
        out *= f_p_value(f, lf, n % p == 0) ** nu
    return out


def _g_prime_power(fs: float, F: float, nu: int) -> float:
    return fs**nu * F * (1.0 - F) * ((-1.0) ** nu * F ** (nu - 1) + (1.0 - F) ** (nu - 1))


def G_closed(weight: WeightSpec, f: AdditiveSpec, q, table: SieveTable) -> float:
    """Prime-power closed form of the divisor-sum functional, multiplied out."""
    out = 1.0
    for p, nu in _as_pairs(q, table):
        lf = local_factor(weight, p)
        out *= _g_prime_power(scaled_prime_value(f, p), lf.deficiency, nu)
    return out


def G_expand(weight: WeightSpec, f: AdditiveSpec, q, table: SieveTable) -> float:
    """Direct divisor sum over ab | rad q of f_q(a) mu(b) F(s0, ab)."""
    fac_q = _as_pairs(q, table)
    if len(fac_q) > MAX_EXPAND_PRIMES:
        raise CapacityError(f"G_expand capped at {MAX_EXPAND_PRIMES} distinct primes")
    lfs = [local_factor(weight, p) for p, _ in fac_q]
    fss = [scaled_prime_value(f, p) for p, _ in fac_q]
    total = 0.0
    # each prime of rad q goes to a, to b, or to neither
    for assign in itertools.product((0, 1, 2), repeat=len(fac_q)):
        term = 1.0
        mu_b = 1.0
        for (p, nu), lf, fs, where in zip(fac_q, lfs, fss, assign):
            in_a = where == 1
            term *= (fs * (1.0 - lf.deficiency) if in_a else -fs * lf.deficiency) ** nu
            if where == 1 or where == 2:
                term *= lf.deficiency  # F(s0, ab) contribution
            if where == 2:
                mu_b = -mu_b
        total += mu_b * term
    return total


def H_value(weight: WeightSpec, f: AdditiveSpec, q, table: SieveTable) -> float:
    """Multiplicative error-side companion of G; at prime powers
    |f(p)| (F(s0,p) + (loglog(p+1))^theta / p)."""
    th = weight.constants.local_loglog_power
    out = 1.0
    for p, nu in _as_pairs(q, table):
        lf = local_factor(weight, p)
        out *= abs(scaled_prime_value(f, p)) * (lf.deficiency + log(log(p + 1)) ** th / p)
    return out


def omega_zw(fac: Factorization, z: float, w: float) -> int:
    """Distinct prime divisors in (z, w]."""
    if z > w:
        raise DomainError(f"need z <= w, got ({z}, {w})")
    return sum(1 for p, _ in fac.pairs if z < p <= w)


@dataclass(frozen=True)
class DecompositionParams:
    x: int
    m: int
    v: float
    z: float
    w: float
    q0: int

    def __post_init__(self):
        if not (self.q0 < self.z <= self.w <= self.x):
            raise DomainError(
                f"invalid cutoffs: need Q0 < z <= w <= x, got {self.q0}, {self.z}, {self.w}, {self.x}"
            )
        if self.v < 1:
            raise DomainError(f"v must be >= 1, got {self.v}")


def choose_params(weight: WeightSpec, x: int, m: int, table: SieveTable) -> DecompositionParams:
    """Cutoff selection: v proportional to m when the declared density is 1
    (epsilon0 = 1/2, eta0 = 1), else the loglog power schedule floored so
    z >= 100; v is additionally capped to keep z above Q0."""
    if m < 1:
        raise DomainError("m must be >= 1")
    q0 = compute_Q0(weight, table)
    consts = weight.constants
    if consts.prime_density == 1.0:
        v = m / ((1.0 - consts.growth_slack) * 0.5 * 1.0)
    else:
        v = log(log(x)) ** (m * (consts.local_loglog_power + 2.0))
        v = min(v, log(x) / log(100.0))
    v = max(1.2, min(v, log(x) / log(q0 + 2.0)))
    z = x ** (1.0 / v)
    w = x ** (1.0 / log(v + 2.0))
    return DecompositionParams(x=x, m=m, v=v, z=z, w=w, q0=q0)


class ResidualEvaluator:
    """r(n) = (f(n) - A(x))/M - sum over Q0 < p <= z of f_p(n).

    The prime sum collapses to sum of rescaled f(p) over p | n in (Q0, z]
    minus the constant sum of f(p) F(s0, p) over the whole range.
    """

    def __init__(self, weight, f, params, a_x, table):
        self.f = f
        self.params = params
        self.table = table
        self.scaled_a = a_x / f.bound_m
        primes = primes_up_to(int(params.z), table)
        primes = primes[primes > params.q0]
        sums = local_sums_at_primes(weight, primes)
        defic = 1.0 - 1.0 / sums
        fs = f.prime_values(primes) / f.bound_m
        self._center = chunked_sum(fs * defic)
        self._zcut = params.z
        self._q0 = params.q0

    def __call__(self, n: int) -> float:
        fac = factorize(n, self.table)
        kept = sum(
            scaled_prime_value(self.f, p) for p, _ in fac.pairs if self._q0 < p <= self._zcut
        )
        fn = sum(float(self.f.rule(p, nu)) for p, nu in fac.pairs) / self.f.bound_m
        return (fn - self.scaled_a) - (kept - self._center)


def approx_residual(weight, f, n, params, a_x, table) -> float:
    return ResidualEvaluator(weight, f, params, a_x, table)(n)


def second_moment_prime_sum(weight, f, z: float, q0: int, table) -> float:
    """Sum over Q0 < p <= z of the squared-prime closed form
    f(p)^2 F (1 - F); tracks the variance up to small-prime corrections."""
    primes = primes_up_to(int(z), table)
    primes = primes[primes > q0]
    sums = local_sums_at_primes(weight, primes)
    defic = 1.0 - 1.0 / sums
    fs = f.prime_values(primes) / f.bound_m
    return chunked_sum(fs * fs * defic * (1.0 - defic))
