"""Multiplicative weights and additive functions from prime-power rules.

A weight is determined by its values on prime powers together with declared
class constants (the growth and regularity parameters the membership audit
checks).  Rules are plain callables rule(p, nu) -> value; p may be a numpy
array (nu stays scalar), which is what the full-range sieve evaluators and
prime scans rely on.
"""

from dataclasses import dataclass, field, replace
from math import comb, isqrt, log

import numpy as np

from . import tau as tau_mod
from .errors import DomainError, SpecificationError
from .polyroots import (
    PolySpec,
    _is_unramified,
    poly_from_coefficients,
    poly_root_count,
    root_counts_at_primes,
)
from .sieve import Factorization, SieveTable, primes_up_to


@dataclass(frozen=True)
class ClassConstants:
    """Declared constants for the weight-class membership conditions.

    pnt_error_power     log-power saved in the weighted prime number theorem
    prime_density       linear coefficient of sum alpha(p) log p / p^(abscissa-1)
    abscissa            exponent normalizing prime sums (alpha(p)/p^abscissa)
    local_loglog_power  loglog power bounding the local-factor derivative
    growth_slack        per-prime-power growth allowance alpha(p^nu) << p^((slack+abscissa-1)nu)
    tail_power          exponent making the squared/tail prime series converge
    """

    pnt_error_power: float = 0.5
    prime_density: float = 1.0
    abscissa: float = 1.0
    local_loglog_power: float = 0.0
    growth_slack: float = 0.0
    tail_power: float = 0.9
    verified: bool = True


@dataclass(frozen=True)
class WeightSpec:
    name: str
    rule: callable  # (p, nu) -> nonnegative value; p scalar or ndarray
    constants: ClassConstants = field(default_factory=ClassConstants)
    local_factor_rule: callable = None  # (p, abscissa) -> sum_nu alpha(p^nu) p^(-abscissa*nu)
    exception_primes: frozenset = frozenset()
    integer_valued: bool = False
    params: dict = field(default_factory=dict)

    def alpha_primes(self, primes: np.ndarray) -> np.ndarray:
        """Vectorized alpha(p) over a prime array."""
        vals = np.asarray(self.rule(primes, 1), dtype=np.float64)
        if vals.ndim == 0:
            vals = np.full(len(primes), float(vals))
        if np.any(vals < 0):
            raise SpecificationError(f"weight {self.name} produced a negative value")
        return vals


@dataclass(frozen=True)
class AdditiveSpec:
    name: str
    rule: callable  # (p, nu) -> value; p scalar or ndarray
    strongly_additive: bool = True
    bound_m: float = 1.0  # |f(p)| <= bound_m for primes in the working range
    growth_power: float = 0.0  # f(p^nu) = O(nu^growth_power)

    def prime_values(self, primes: np.ndarray) -> np.ndarray:
        vals = np.asarray(self.rule(primes, 1), dtype=np.float64)
        if vals.ndim == 0:
            vals = np.full(len(primes), float(vals))
        return vals


def eval_weight(weight: WeightSpec, fac: Factorization) -> float:
    """Product of the prime-power rule over the factorization; 1 at n=1."""
    out = 1.0
    for p, nu in fac.pairs:
        v = float(weight.rule(p, nu))
        if v < 0:
            raise SpecificationError(f"weight {weight.name} negative at ({p},{nu})")
        out *= v
    return out


def eval_additive(f: AdditiveSpec, fac: Factorization) -> float:
    return float(sum(float(f.rule(p, nu)) for p, nu in fac.pairs))


def contraction(f: AdditiveSpec) -> AdditiveSpec:
    """Strongly additive function agreeing with f at primes."""
    if f.strongly_additive:
        return f
    base = f.rule
    return AdditiveSpec(
        name=f.name + "_contracted",
        rule=lambda p, nu, _r=base: _r(p, 1),
        strongly_additive=True,
        bound_m=f.bound_m,
        growth_power=0.0,
    )


# ---------------------------------------------------------------------------
# full-range sieve evaluation


def weight_values(weight: WeightSpec, limit: int, table: SieveTable) -> np.ndarray:
    """alpha(n) for 0 <= n <= limit (index 0 set to 0) in double precision.

    One slice multiply per prime handles squarefree parts; primes at most
    sqrt(limit) get exact per-multiplicity corrections, so weights with
    internal zeros in their power sequences (e.g. vanishing at p but not at
    p^2) still come out right.
    """
    primes = primes_up_to(limit, table)
    vals = np.ones(limit + 1, dtype=np.float64)
    vals[0] = 0.0
    a1 = weight.alpha_primes(primes)
    root = isqrt(limit)
    n_small = int(np.searchsorted(primes, root, side="right"))
    for i in range(n_small, len(primes)):
        a = a1[i]
        if a != 1.0:
            vals[int(primes[i]) :: int(primes[i])] *= a
    for i in range(n_small):
        p = int(primes[i])
        powers = [1.0]
        q = p
        while q <= limit:
            powers.append(float(weight.rule(p, len(powers))))
            q *= p
        if min(powers[1:]) < 0:
            raise SpecificationError(f"weight {weight.name} negative at p={p}")
        if _zeros_terminal(powers[1:]):
            prev = 1.0
            q = p
            for a in powers[1:]:
                if a == 0.0:
                    vals[q::q] = 0.0
                    break
                ratio = a / prev
                if ratio != 1.0:
                    vals[q::q] *= ratio
                prev = a
                q *= p
        else:
            q = p
            for nu in range(1, len(powers)):
                a = powers[nu]
                if a != 1.0:
                    idx = np.arange(q, limit + 1, q, dtype=np.int64)
                    keep = np.ones(len(idx), dtype=bool)
                    keep[p - 1 :: p] = False  # drop multiples of p^(nu+1)
                    vals[idx[keep]] *= a
                q *= p
    return vals


def _zeros_terminal(seq) -> bool:
    seen_zero = False
    for v in seq:
        if v == 0.0:
            seen_zero = True
        elif seen_zero:
            return False
    return True


def additive_values(f: AdditiveSpec, limit: int, table: SieveTable) -> np.ndarray:
    """f(n) for 0 <= n <= limit (index 0 and 1 are 0)."""
    primes = primes_up_to(limit, table)
    vals = np.zeros(limit + 1, dtype=np.float64)
    f1 = f.prime_values(primes)
    for i in range(len(primes)):
        v = f1[i]
        if v != 0.0:
            p = int(primes[i])
            vals[p::p] += v
    if not f.strongly_additive:
        root = isqrt(limit)
        n_small = int(np.searchsorted(primes, root, side="right"))
        for i in range(n_small):
            p = int(primes[i])
            q = p * p
            nu = 2
            prev = float(f.rule(p, 1))
            while q <= limit:
                cur = float(f.rule(p, nu))
                if cur != prev:
                    vals[q::q] += cur - prev
                prev = cur
                q *= p
                nu += 1
    return vals


# ---------------------------------------------------------------------------
# catalog


def _one_rule(p, nu):
    return np.ones_like(np.asarray(p, dtype=np.float64)) if np.ndim(p) else 1.0


def _geometric_local(p, s0):
    # sum_nu p^(-s0 nu) for the constant-1 weight
    return 1.0 / (1.0 - np.asarray(p, dtype=np.float64) ** (-s0))


def weight_one() -> WeightSpec:
    return WeightSpec(
        name="one",
        rule=_one_rule,
        constants=ClassConstants(),
        local_factor_rule=_geometric_local,
        integer_valued=True,
    )


def weight_mu_squared() -> WeightSpec:
    def rule(p, nu):
        v = 1.0 if nu == 1 else 0.0
        return np.full(np.shape(p), v) if np.ndim(p) else v

    return WeightSpec(
        name="mu2",
        rule=rule,
        constants=ClassConstants(),
        local_factor_rule=lambda p, s0: 1.0 + np.asarray(p, dtype=np.float64) ** (-s0),
        integer_valued=True,
    )


def weight_d_k(k: int = 2, c: float = 1.0) -> WeightSpec:
    if k < 1:
        raise DomainError("d_k needs k >= 1")

    def rule(p, nu, _k=k, _c=c):
        v = float(comb(nu + _k - 1, _k - 1)) ** _c
        return np.full(np.shape(p), v) if np.ndim(p) else v

    local = None
    if c == 1.0:
        def local(p, s0, _k=k):
            return (1.0 - np.asarray(p, dtype=np.float64) ** (-s0)) ** (-_k)

    name = "d_k" if c == 1.0 else "d_k_pow"
    return WeightSpec(
        name=name,
        rule=rule,
        constants=ClassConstants(
            prime_density=float(k) ** c, growth_slack=0.25, verified=(c == 1.0)
        ),
        local_factor_rule=local,
        integer_valued=(c == 1.0),
        params={"k": k} if c == 1.0 else {"k": k, "c": c},
    )


def weight_r2_over_4() -> WeightSpec:
    # quarter count of two-square representations: chi_4 divisor sum
    def rule(p, nu):
        p_arr = np.asarray(p)
        odd_nu = nu % 2
        if np.ndim(p):
            out = np.where(p_arr % 4 == 1, float(nu + 1), 0.0 if odd_nu else 1.0)
            return np.where(p_arr == 2, 1.0, out)
        if p == 2:
            return 1.0
        return float(nu + 1) if p % 4 == 1 else (0.0 if odd_nu else 1.0)

    return WeightSpec(
        name="r2_over_4",
        rule=rule,
        constants=ClassConstants(growth_slack=0.25),
        integer_valued=True,
    )


def weight_kappa_omega(kappa: float = 1.5) -> WeightSpec:
    if kappa <= 0:
        raise DomainError("kappa_omega needs kappa > 0")

    def rule(p, nu, _k=kappa):
        return np.full(np.shape(p), _k) if np.ndim(p) else _k

    return WeightSpec(
        name="kappa_omega",
        rule=rule,
        constants=ClassConstants(prime_density=kappa),
        params={"kappa": kappa},
    )


def weight_kappa_bigomega(kappa: float = 1.5) -> WeightSpec:
    if not 0 < kappa < 2:
        raise DomainError("kappa_bigomega needs kappa in (0, 2)")

    def rule(p, nu, _k=kappa):
        v = _k**nu
        return np.full(np.shape(p), v) if np.ndim(p) else v

    tail_power = 0.9
    exceptions = frozenset(
        int(p) for p in (2, 3) if float(p) ** tail_power <= kappa
    )
    return WeightSpec(
        name="kappa_bigomega",
        rule=rule,
        constants=ClassConstants(
            prime_density=kappa,
            growth_slack=max(0.0, log(kappa) / log(2.0)),
            tail_power=tail_power,
            verified=False,  # defensible defaults; constants not given in the source material
        ),
        exception_primes=exceptions,
        params={"kappa": kappa},
    )


def weight_sigma_lambda(lam: float = 1.0) -> WeightSpec:
    if lam <= 0:
        raise DomainError("sigma_lambda needs lambda > 0")

    def rule(p, nu, _l=lam):
        pl = np.asarray(p, dtype=np.float64) ** _l
        v = (pl ** (nu + 1) - 1.0) / (pl - 1.0)
        return v if np.ndim(p) else float(v)

    return WeightSpec(
        name="sigma_lambda",
        rule=rule,
        constants=ClassConstants(abscissa=lam + 1.0),
        params={"lam": lam},
    )


def weight_phi() -> WeightSpec:
    def rule(p, nu):
        pf = np.asarray(p, dtype=np.float64)
        v = pf**nu - pf ** (nu - 1)
        return v if np.ndim(p) else float(v)

    return WeightSpec(
        name="phi",
        rule=rule,
        constants=ClassConstants(abscissa=2.0),
        integer_valued=True,
    )


def weight_n_lambda(lam: float = 1.0) -> WeightSpec:
    if lam <= -1:
        raise DomainError("n_lambda needs lambda > -1")

    def rule(p, nu, _l=lam):
        v = np.asarray(p, dtype=np.float64) ** (_l * nu)
        return v if np.ndim(p) else float(v)

    return WeightSpec(
        name="n_lambda",
        rule=rule,
        constants=ClassConstants(abscissa=lam + 1.0),
        params={"lam": lam},
    )


def weight_poly_roots(poly: PolySpec = None) -> WeightSpec:
    if poly is None:
        poly = poly_from_coefficients([1, 0, 1], name="x^2+1")

    def rule(p, nu, _g=poly):
        if np.ndim(p):
            base = root_counts_at_primes(_g, p).astype(np.float64)
            if nu == 1:
                return base
            # unramified primes lift their simple roots unchanged; the finitely
            # many ramified ones are enumerated exactly
            out = base
            for i, q in enumerate(np.asarray(p)):
                if not _is_unramified(_g, int(q)):
                    out[i] = float(poly_root_count(_g, int(q), nu))
            return out
        return float(poly_root_count(_g, int(p), nu))

    return WeightSpec(
        name="rho_g",
        rule=rule,
        constants=ClassConstants(),
        integer_valued=True,
        params={"poly": list(poly.coefficients)},
    )


def weight_tau_squared(series_cap: int = tau_mod.DEFAULT_CAP) -> WeightSpec:
    """Squared discriminant coefficients normalized by n^11 (abscissa 1)."""

    def normalized_at_primes(primes: np.ndarray) -> np.ndarray:
        limit = int(np.max(primes)) if len(primes) else 1
        series = tau_mod.tau_series(_canonical_cap(limit, series_cap), cap=series_cap)
        tp = np.array([float(series[int(p)]) for p in primes])
        return tp / np.asarray(primes, dtype=np.float64) ** 5.5

    def rule(p, nu, _cap=series_cap):
        # normalized Hecke recurrence u_nu = tau(p^nu)/p^(5.5 nu): stays O(nu)
        if np.ndim(p):
            u1 = normalized_at_primes(p)
        else:
            series = tau_mod.tau_series(_canonical_cap(int(p), _cap), cap=_cap)
            u1 = float(series[int(p)]) / float(p) ** 5.5
        prev, cur = 1.0, u1
        for _ in range(nu - 1):
            prev, cur = cur, u1 * cur - prev
        return cur**2 if np.ndim(p) else float(cur**2)

    return WeightSpec(
        name="tau2",
        rule=rule,
        constants=ClassConstants(growth_slack=0.5),
        params={"series_cap": series_cap},
    )


def _canonical_cap(needed: int, cap: int) -> int:
    # quantize series lengths so the lru-cached expansions get reused
    size = 1000
    while size < needed:
        size *= 10
    return min(max(size, 1000), max(cap, needed))


def additive_omega() -> AdditiveSpec:
    return AdditiveSpec(name="omega", rule=_one_rule, strongly_additive=True, bound_m=1.0)


def additive_big_omega() -> AdditiveSpec:
    def rule(p, nu):
        return np.full(np.shape(p), float(nu)) if np.ndim(p) else float(nu)

    return AdditiveSpec(
        name="big_omega", rule=rule, strongly_additive=False, bound_m=1.0, growth_power=1.0
    )


WEIGHT_BUILDERS = {
    "one": weight_one,
    "mu2": weight_mu_squared,
    "d_k": weight_d_k,
    "r2_over_4": weight_r2_over_4,
    "kappa_omega": weight_kappa_omega,
    "kappa_bigomega": weight_kappa_bigomega,
    "sigma_lambda": weight_sigma_lambda,
    "phi": weight_phi,
    "n_lambda": weight_n_lambda,
    "rho_g": weight_poly_roots,
    "tau2": weight_tau_squared,
}

ADDITIVE_BUILDERS = {
    "omega": additive_omega,
    "big_omega": additive_big_omega,
    "Omega": additive_big_omega,
}


def catalog_weights(include_tau: bool = True):
    """One representative instance per cataloged weight family."""
    names = [n for n in WEIGHT_BUILDERS if include_tau or n != "tau2"]
    return [WEIGHT_BUILDERS[n]() for n in names]


def weight_from_config(cfg: dict) -> WeightSpec:
    """{"name": "d_k", "k": 3, "overrides": [[p, nu, value], ...]}"""
    cfg = dict(cfg)
    name = cfg.pop("name", None)
    overrides = cfg.pop("overrides", None)
    if name not in WEIGHT_BUILDERS:
        raise DomainError(f"unknown weight {name!r}; catalog: {sorted(WEIGHT_BUILDERS)}")
    if name == "rho_g" and "poly" in cfg:
        w = WEIGHT_BUILDERS[name](poly_from_coefficients(cfg.pop("poly")))
    else:
        w = WEIGHT_BUILDERS[name](**cfg)
    if overrides:
        w = _apply_weight_overrides(w, overrides)
    return w


def additive_from_config(cfg: dict) -> AdditiveSpec:
    cfg = dict(cfg)
    name = cfg.pop("name", None)
    overrides = cfg.pop("overrides", None)
    if name not in ADDITIVE_BUILDERS:
        raise DomainError(f"unknown additive {name!r}; catalog: {sorted(ADDITIVE_BUILDERS)}")
    f = ADDITIVE_BUILDERS[name](**cfg)
    if overrides:
        f = _apply_additive_overrides(f, overrides)
    return f


def _override_table(overrides):
    table = {}
    for p, nu, value in overrides:
        table[(int(p), int(nu))] = float(value)
    return table


def _wrap_rule(base, table):
    def rule(p, nu):
        if np.ndim(p):
            out = np.asarray(base(p, nu), dtype=np.float64)
            if out.ndim == 0:
                out = np.full(np.shape(p), float(out))
            else:
                out = out.copy()
            for (tp, tnu), v in table.items():
                if tnu == nu:
                    out[np.asarray(p) == tp] = v
            return out
        key = (int(p), int(nu))
        if key in table:
            return table[key]
        return base(p, nu)

    return rule


def _apply_weight_overrides(w: WeightSpec, overrides) -> WeightSpec:
    table = _override_table(overrides)
    return replace(
        w,
        name=w.name + "_custom",
        rule=_wrap_rule(w.rule, table),
        local_factor_rule=None,
        integer_valued=False,
        params={**w.params, "overrides": sorted((p, n, v) for (p, n), v in table.items())},
    )


def _apply_additive_overrides(f: AdditiveSpec, overrides) -> AdditiveSpec:
    table = _override_table(overrides)
    strongly = f.strongly_additive and all(nu == 1 for (_, nu) in table)
    return AdditiveSpec(
        name=f.name + "_custom",
        rule=_wrap_rule(f.rule, table),
        strongly_additive=strongly,
        bound_m=max(f.bound_m, max((abs(v) for v in table.values()), default=0.0)),
        growth_power=f.growth_power,
    )
