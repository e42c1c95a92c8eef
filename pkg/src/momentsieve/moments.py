"""Weighted sums, centered moments, Gaussian comparison, CDF/KS statistics,
characteristic functions, and the heavy-prime truncation machinery.

The random model: n <= x drawn with probability alpha(n)/S(x).  Moments of an
additive f are centered at the prime-sum mean A(x), never at the empirical
mean (both are reported).  Every reduction goes through the fixed-chunk
deterministic summation, so worker count never changes a single bit.
"""

from dataclasses import dataclass
from math import erfc, log, sqrt

import numpy as np
from scipy.special import ndtr

from .combinatorics import gaussian_constants
from .errors import DegenerateVarianceError, DomainError, FitError
from .functions import AdditiveSpec, WeightSpec, additive_values, weight_values
from .reductions import DEFAULT_CHUNK, chunked_sum
from .sieve import SieveTable, primes_up_to

LOGLOG_FLOOR = 15.1543  # e^e; loglog(loglog) must stay positive above this


@dataclass(frozen=True)
class MomentReport:
    x: int
    m: int
    s_x: float
    a_x: float
    b_x: float
    b_star_x: float
    weighted_mean: float
    m_xm: float
    predicted: float
    normalized_residual: float

    def to_dict(self) -> dict:
        return {
            "x": self.x,
            "m": self.m,
            "s_x": self.s_x,
            "a_x": self.a_x,
            "b_x": self.b_x,
            "b_star_x": self.b_star_x,
            "weighted_mean": self.weighted_mean,
            "m_xm": self.m_xm,
            "predicted": self.predicted,
            "normalized_residual": self.normalized_residual,
        }


@dataclass(frozen=True)
class CdfReport:
    x: int
    grid: np.ndarray
    cdf: np.ndarray
    phi: np.ndarray
    ks_distance: float

    def to_dict(self) -> dict:
        return {
            "x": self.x,
            "grid": [float(v) for v in self.grid],
            "cdf": [float(v) for v in self.cdf],
            "phi": [float(v) for v in self.phi],
            "ks_distance": self.ks_distance,
        }


@dataclass(frozen=True)
class TruncationSets:
    """Partition of the primes <= x by |f(p)| against eps/K multiples of
    sqrt(B*(x)): light (small values), heavy (intermediate), extreme."""

    x: int
    epsilon: float
    cap_k: float
    b_star_x: float
    light_primes: np.ndarray
    heavy_primes: np.ndarray
    extreme_primes: np.ndarray

    def category(self, p: int) -> str:
        for name, arr in (
            ("light", self.light_primes),
            ("heavy", self.heavy_primes),
            ("extreme", self.extreme_primes),
        ):
            i = np.searchsorted(arr, p)
            if i < len(arr) and arr[i] == p:
                return name
        raise DomainError(f"{p} is not a prime <= {self.x}")


def _require_x(x: int, minimum: int = 2):
    if x < minimum:
        raise DomainError(f"x must be >= {minimum}, got {x}")


def partial_sum_S(weight, x, table, *, values=None, chunk=DEFAULT_CHUNK, workers=1) -> float:
    """S(x) = sum of the weight over 1..x."""
    _require_x(x, 1)
    if values is None:
        values = weight_values(weight, x, table)
    return chunked_sum(values[: x + 1], chunk, workers)


def coprime_sum_S(weight, x, a, table, *, values=None, chunk=DEFAULT_CHUNK, workers=1) -> float:
    """Sum of the weight over n <= x with gcd(n, a) = 1."""
    _require_x(x, 1)
    if a < 1:
        raise DomainError(f"a must be >= 1, got {a}")
    if values is None:
        values = weight_values(weight, x, table)
    mask = np.gcd(np.arange(x + 1, dtype=np.int64), a) == 1
    return chunked_sum(np.where(mask, values[: x + 1], 0.0), chunk, workers)


def _prime_terms(weight, f, x, table, primes=None):
    if primes is None:
        primes = primes_up_to(x, table)
    else:
        primes = primes[primes <= x]
    alpha_p = weight.alpha_primes(primes)
    f_p = f.prime_values(primes)
    inv = np.asarray(primes, dtype=np.float64) ** (-weight.constants.abscissa)
    return primes, alpha_p, f_p, inv


def mean_A(weight, f, x, table, *, primes=None, chunk=DEFAULT_CHUNK, workers=1) -> float:
    """A(x) = sum over p <= x of alpha(p) f(p) / p^abscissa."""
    _require_x(x)
    _, alpha_p, f_p, inv = _prime_terms(weight, f, x, table, primes)
    return chunked_sum(alpha_p * f_p * inv, chunk, workers)


def variance_B(weight, f, x, table, *, primes=None, chunk=DEFAULT_CHUNK, workers=1) -> float:
    """B(x) = sum over p <= x of alpha(p) f(p)^2 / p^abscissa."""
    _require_x(x)
    _, alpha_p, f_p, inv = _prime_terms(weight, f, x, table, primes)
    return chunked_sum(alpha_p * f_p * f_p * inv, chunk, workers)


def b_star(weight, f, x, table, *, beta=None, b=None, chunk=DEFAULT_CHUNK, workers=1) -> float:
    """B(x) when the declared density is 1, else B(x)/(logloglog x)^2."""
    if b is None:
        b = variance_B(weight, f, x, table, chunk=chunk, workers=workers)
    if beta is None:
        beta = weight.constants.prime_density
    if beta == 1.0:
        return b
    if x <= LOGLOG_FLOOR:
        raise DomainError(f"x must exceed e^e = {LOGLOG_FLOOR} for the triple-log normalization")
    return b / log(log(log(x))) ** 2


def predicted_moment(m: int, b: float) -> float:
    """Gaussian main term: C_m * B^(m/2) for even m, 0 for odd m."""
    if m == 0:
        return 1.0
    if b <= 0:
        raise DegenerateVarianceError(f"B must be positive, got {b}")
    g = gaussian_constants(m)
    return float(g.coefficient) * b ** (m / 2) * g.parity


def moment_suite(
    weight,
    f,
    x,
    orders,
    table,
    *,
    w_vals=None,
    f_vals=None,
    chunk=DEFAULT_CHUNK,
    workers=1,
    max_order=12,
):
    """MomentReports for every order in `orders`, sharing one scan.

    Centered powers are accumulated simultaneously by iterated multiplication
    of the cached deviation array.
    """
    _require_x(x)
    orders = sorted(set(int(m) for m in orders))
    if orders and (orders[0] < 0 or orders[-1] > max_order):
        raise DomainError(f"moment orders must lie in [0, {max_order}], got {orders}")
    if w_vals is None:
        w_vals = weight_values(weight, x, table)
    if f_vals is None:
        f_vals = additive_values(f, x, table)
    s = chunked_sum(w_vals[: x + 1], chunk, workers)
    a = mean_A(weight, f, x, table, chunk=chunk, workers=workers)
    b = variance_B(weight, f, x, table, chunk=chunk, workers=workers)
    bs = b_star(weight, f, x, table, b=b)
    top = orders[-1] if orders else 0
    if b <= 0 and top >= 2:
        raise DegenerateVarianceError(f"B({x}) = {b} <= 0 with normalized orders requested")
    dev = f_vals[: x + 1] - a
    dev[0] = 0.0
    cur = np.array(w_vals[: x + 1], dtype=np.float64)
    raw = {}
    for k in range(top + 1):
        if k in orders or k == 1:
            raw[k] = chunked_sum(cur, chunk, workers) / s
        if k < top:
            cur *= dev
    wmean = a + raw.get(1, 0.0)
    reports = []
    for m in orders:
        mm = 1.0 if m == 0 else raw[m]
        if m == 0:
            pred, resid = 1.0, 0.0
        else:
            g = gaussian_constants(m)
            pred = float(g.coefficient) * b ** (m / 2) * g.parity
            resid = (mm - pred) / (float(g.coefficient) * b ** ((m - 1) / 2))
        reports.append(
            MomentReport(
                x=x,
                m=m,
                s_x=s,
                a_x=a,
                b_x=b,
                b_star_x=bs,
                weighted_mean=wmean,
                m_xm=mm,
                predicted=pred,
                normalized_residual=resid,
            )
        )
    return reports


def weighted_moment_M(weight, f, x, m, table, **kw) -> MomentReport:
    return moment_suite(weight, f, x, [m], table, **kw)[0]


def phi_gaussian(v: float) -> float:
    """Standard normal CDF."""
    return 0.5 * erfc(-float(v) / sqrt(2.0))


def _normalized_jumps(weight, f, x, table, w_vals, f_vals, chunk, workers):
    if w_vals is None:
        w_vals = weight_values(weight, x, table)
    if f_vals is None:
        f_vals = additive_values(f, x, table)
    s = chunked_sum(w_vals[: x + 1], chunk, workers)
    a = mean_A(weight, f, x, table, chunk=chunk, workers=workers)
    b = variance_B(weight, f, x, table, chunk=chunk, workers=workers)
    if b <= 0:
        raise DegenerateVarianceError(f"B({x}) = {b} <= 0")
    t = (f_vals[1 : x + 1] - a) / sqrt(b)
    w = w_vals[1 : x + 1]
    order = np.argsort(t, kind="stable")
    t_sorted = t[order]
    cum = np.cumsum(w[order]) / s
    # collapse ties: keep the last cumulative value at each distinct point
    keep = np.empty(len(t_sorted), dtype=bool)
    keep[-1] = True
    keep[:-1] = t_sorted[1:] != t_sorted[:-1]
    points = t_sorted[keep]
    cdf_after = cum[keep]
    return s, a, b, points, cdf_after


def empirical_cdf(
    weight,
    f,
    x,
    grid,
    table,
    *,
    w_vals=None,
    f_vals=None,
    chunk=DEFAULT_CHUNK,
    workers=1,
) -> CdfReport:
    """Weighted distribution of (f(n) - A)/sqrt(B) against the Gaussian.

    The KS distance is the exact sup over the weighted step function (both
    one-sided gaps at every jump), not a grid maximum.
    """
    grid = np.asarray(sorted(float(v) for v in grid))
    _, _, _, points, cdf_after = _normalized_jumps(
        weight, f, x, table, w_vals, f_vals, chunk, workers
    )
    phi_at_points = ndtr(points)
    cdf_before = np.concatenate([[0.0], cdf_after[:-1]])
    ks = float(
        max(np.max(np.abs(phi_at_points - cdf_after)), np.max(np.abs(phi_at_points - cdf_before)))
    )
    idx = np.searchsorted(points, grid, side="right")
    cdf_grid = np.concatenate([[0.0], cdf_after])[idx]
    return CdfReport(x=x, grid=grid, cdf=cdf_grid, phi=ndtr(grid), ks_distance=ks)


def char_function(
    weight, f, x, t, table, *, w_vals=None, f_vals=None, chunk=DEFAULT_CHUNK, workers=1
) -> complex:
    """Weighted characteristic value of the normalized deviation at t."""
    if w_vals is None:
        w_vals = weight_values(weight, x, table)
    if f_vals is None:
        f_vals = additive_values(f, x, table)
    s = chunked_sum(w_vals[: x + 1], chunk, workers)
    a = mean_A(weight, f, x, table, chunk=chunk, workers=workers)
    b = variance_B(weight, f, x, table, chunk=chunk, workers=workers)
    if b <= 0:
        raise DegenerateVarianceError(f"B({x}) = {b} <= 0")
    dev = (f_vals[: x + 1] - a) / sqrt(b)
    dev[0] = 0.0
    val = chunked_sum(w_vals[: x + 1] * np.exp(1j * t * dev), chunk, workers) / s
    return complex(val)


def truncation_sets(weight, f, x, epsilon, cap_k, table, *, b=None) -> TruncationSets:
    if epsilon <= 0 or cap_k <= 0 or cap_k < epsilon:
        raise DomainError("need 0 < epsilon <= K")
    bs = b_star(weight, f, x, table, b=b)
    if bs <= 0:
        raise DegenerateVarianceError(f"B*({x}) = {bs} <= 0")
    primes = primes_up_to(x, table)
    absf = np.abs(f.prime_values(primes))
    lo = epsilon * sqrt(bs)
    hi = cap_k * sqrt(bs)
    light = primes[absf <= lo]
    heavy = primes[(absf > lo) & (absf <= hi)]
    extreme = primes[absf > hi]
    return TruncationSets(
        x=x,
        epsilon=epsilon,
        cap_k=cap_k,
        b_star_x=bs,
        light_primes=light,
        heavy_primes=heavy,
        extreme_primes=extreme,
    )


def truncated_additive(f, x, sets: TruncationSets, z: float, beta: float) -> AdditiveSpec:
    """The truncated strongly additive function: f(p) kept on light primes,
    on heavy primes in (z, x] only when the density differs from 1, and on
    all extreme primes."""
    if sets.x != x:
        raise DomainError("truncation sets were built for a different x")
    allowed = [sets.light_primes, sets.extreme_primes]
    if beta != 1.0:
        hp = sets.heavy_primes
        allowed.append(hp[(hp > z) & (hp <= x)])
    allowed = np.sort(np.concatenate(allowed))
    base = f.rule

    def rule(p, nu, _allowed=allowed, _r=base):
        if np.ndim(p):
            if len(_allowed) == 0:
                return np.zeros(np.shape(p), dtype=np.float64)
            v = np.asarray(_r(p, 1), dtype=np.float64)
            if v.ndim == 0:
                v = np.full(np.shape(p), float(v))
            i = np.minimum(np.searchsorted(_allowed, p), len(_allowed) - 1)
            return np.where(_allowed[i] == p, v, 0.0)
        i = np.searchsorted(_allowed, p)
        if i < len(_allowed) and _allowed[i] == p:
            return float(_r(p, 1))
        return 0.0

    return AdditiveSpec(
        name=f.name + "_truncated",
        rule=rule,
        strongly_additive=True,
        bound_m=f.bound_m,
        growth_power=0.0,
    )


def fit_mertens(weight, x_grid, table, *, chunk=DEFAULT_CHUNK, workers=1):
    """Least-squares slope and intercept of sum_{p<=x} alpha(p)/p^abscissa
    against loglog x; the slope estimates the declared prime density."""
    x_grid = sorted(int(v) for v in x_grid)
    if len(x_grid) < 3:
        raise DomainError("fit_mertens needs at least 3 grid points")
    if x_grid[0] <= LOGLOG_FLOOR:
        raise DomainError(f"grid points must exceed e^e = {LOGLOG_FLOOR}")
    primes = primes_up_to(x_grid[-1], table)
    alpha_p = weight.alpha_primes(primes)
    terms = alpha_p * np.asarray(primes, dtype=np.float64) ** (-weight.constants.abscissa)
    cum = np.cumsum(terms)
    idx = np.searchsorted(primes, x_grid, side="right") - 1
    if np.any(idx < 0):
        raise DomainError("grid point below the first prime")
    sums = cum[idx]
    ll = np.log(np.log(np.asarray(x_grid, dtype=np.float64)))
    if np.ptp(ll) < 1e-9:
        raise FitError("grid too narrow: loglog values coincide")
    slope, intercept = np.polyfit(ll, sums, 1)
    return float(slope), float(intercept)
