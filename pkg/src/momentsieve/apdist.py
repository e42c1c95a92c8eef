"""Moments of f(g(n)) under a multiplicative weight, root-counting prime
sums, and the residue-class discrepancy of the weight.

Values g(n) are never factored through a giant table: for each prime p up to
sqrt(max g), the multiples of p among g(1..x) sit in the residue classes of
the roots of g mod p, so one root sieve extracts every multiplicity at once.
"""

from dataclasses import dataclass
from math import gcd

import numpy as np

from .combinatorics import gaussian_constants
from .decomposition import compute_Q0, local_factor
from .errors import DegenerateVarianceError, DomainError
from .functions import AdditiveSpec, WeightSpec, weight_values
from .polyroots import PolySpec, poly_root_count, root_counts_at_primes, root_sieve_multiplicities
from .reductions import DEFAULT_CHUNK, chunked_sum
from .sieve import SieveTable, factorize, primes_up_to


@dataclass(frozen=True)
class ApMomentReport:
    x: int
    m: int
    a_fg: float
    b_fg: float
    m_fg: float
    predicted: float
    normalized_residual: float

    def to_dict(self) -> dict:
        return {
            "x": self.x,
            "m": self.m,
            "a_fg": self.a_fg,
            "b_fg": self.b_fg,
            "m_fg": self.m_fg,
            "predicted": self.predicted,
            "normalized_residual": self.normalized_residual,
        }


@dataclass(frozen=True)
class DiscrepancyReport:
    x: int
    q: int
    residues: list
    deltas: list
    max_abs: float
    normalizer: float

    def to_dict(self) -> dict:
        return {
            "x": self.x,
            "q": self.q,
            "residues": self.residues,
            "deltas": self.deltas,
            "max_abs": self.max_abs,
            "normalizer": self.normalizer,
        }


def afg_bfg(f: AdditiveSpec, g: PolySpec, x: int, table: SieveTable, *, chunk=DEFAULT_CHUNK):
    """Prime sums sum rho_g(p) f(p)/p and sum rho_g(p) f(p)^2/p up to x."""
    if x < 2:
        raise DomainError(f"x must be >= 2, got {x}")
    primes = primes_up_to(x, table)
    rho = root_counts_at_primes(g, primes).astype(np.float64)
    fp = f.prime_values(primes)
    inv = 1.0 / primes.astype(np.float64)
    a = chunked_sum(rho * fp * inv, chunk)
    b = chunked_sum(rho * fp * fp * inv, chunk)
    return a, b


def composed_values(f: AdditiveSpec, g: PolySpec, x: int) -> np.ndarray:
    """f(g(n)) for 0 <= n <= x via the root sieve."""
    return root_sieve_multiplicities(g, x, f.rule)


def moment_fg_suite(
    weight: WeightSpec,
    f: AdditiveSpec,
    g: PolySpec,
    x: int,
    orders,
    table: SieveTable,
    *,
    w_vals=None,
    fg_vals=None,
    chunk=DEFAULT_CHUNK,
    workers=1,
):
    """Centered moments of f(g(n)) weighted by alpha(n), all orders in one scan."""
    orders = sorted(set(int(m) for m in orders))
    if orders and orders[0] < 0:
        raise DomainError("moment orders must be nonnegative")
    if w_vals is None:
        w_vals = weight_values(weight, x, table)
    if fg_vals is None:
        fg_vals = composed_values(f, g, x)
    a, b = afg_bfg(f, g, x, table, chunk=chunk)
    if b <= 0 and orders and orders[-1] >= 2:
        raise DegenerateVarianceError(f"B_fg({x}) = {b} <= 0")
    s = chunked_sum(w_vals[: x + 1], chunk, workers)
    dev = fg_vals[: x + 1] - a
    dev[0] = 0.0
    cur = np.array(w_vals[: x + 1], dtype=np.float64)
    raw = {}
    top = orders[-1] if orders else 0
    for k in range(top + 1):
        if k in orders:
            raw[k] = chunked_sum(cur, chunk, workers) / s
        if k < top:
            cur *= dev
    out = []
    for m in orders:
        mm = 1.0 if m == 0 else raw[m]
        if m == 0:
            pred, resid = 1.0, 0.0
        else:
            gk = gaussian_constants(m)
            pred = float(gk.coefficient) * b ** (m / 2) * gk.parity
            resid = (mm - pred) / (float(gk.coefficient) * b ** ((m - 1) / 2))
        out.append(
            ApMomentReport(x=x, m=m, a_fg=a, b_fg=b, m_fg=mm, predicted=pred, normalized_residual=resid)
        )
    return out


def moment_fg(weight, f, g, x, m, table, **kw) -> ApMomentReport:
    return moment_fg_suite(weight, f, g, x, [m], table, **kw)[0]


def _euler_phi(q: int, table: SieveTable) -> int:
    out = 1
    for p, nu in factorize(q, table).pairs:
        out *= p ** (nu - 1) * (p - 1)
    return out


def delta_ap(weight, x, q, a, table, *, values=None, chunk=DEFAULT_CHUNK) -> float:
    """Weight mass on the class a mod q minus the coprime average."""
    if q < 1 or q > x:
        raise DomainError(f"need 1 <= q <= x, got q={q}, x={x}")
    if gcd(a, q) != 1:
        raise DomainError(f"residue {a} shares a factor with the modulus {q}")
    if values is None:
        values = weight_values(weight, x, table)
    if q == 1:
        return 0.0
    a = a % q
    residue_sums = {}
    for r in range(q):
        if gcd(r, q) == 1:
            residue_sums[r] = chunked_sum(values[r : x + 1 : q], chunk)
    coprime_total = float(np.sum(list(residue_sums.values())))
    return residue_sums[a] - coprime_total / len(residue_sums)


def discrepancy_report(weight, x, q, table, *, values=None, chunk=DEFAULT_CHUNK) -> DiscrepancyReport:
    if values is None:
        values = weight_values(weight, x, table)
    residues = [r for r in range(1, q + 1) if gcd(r, q) == 1] if q > 1 else [1]
    sums = [chunked_sum(values[(r % q) : x + 1 : q], chunk) for r in residues] if q > 1 else []
    if q == 1:
        deltas = [0.0]
        s_over_phi = chunked_sum(values[: x + 1], chunk)
    else:
        avg = float(np.sum(sums)) / len(sums)
        deltas = [v - avg for v in sums]
        s_over_phi = chunked_sum(values[: x + 1], chunk) / len(residues)
    return DiscrepancyReport(
        x=x,
        q=q,
        residues=residues,
        deltas=deltas,
        max_abs=max(abs(d) for d in deltas),
        normalizer=s_over_phi,
    )


def modified_local(weight, g: PolySpec, q, table: SieveTable, *, q0=None):
    """Survival product over p | q and its root-density damping:
    returns (plain product of (1 - F_p), the same scaled by rho_g(q)/phi(q))."""
    pairs = factorize(q, table).pairs if isinstance(q, (int, np.integer)) else tuple(q)
    if q0 is None:
        q0 = compute_Q0(weight, table)
    floor = max(q0, g.clearing_factor * abs(g.coefficients[0]))
    if any(p <= floor for p, _ in pairs):
        raise DomainError(f"modulus must have least prime factor above {floor}")
    f_bar = 1.0
    rho = 1
    phi = 1
    for p, nu in pairs:
        f_bar *= 1.0 - local_factor(weight, p).deficiency
        rho *= poly_root_count(g, p, nu)
        phi *= p ** (nu - 1) * (p - 1)
    f_tilde = (rho / phi) * f_bar
    return f_bar, f_tilde


def g_tilde1(weight, f: AdditiveSpec, g: PolySpec, q, table: SieveTable, *, q0=None) -> float:
    """Divisor-sum functional of the root-damped model, prime power by
    prime power; vanishes at every prime."""
    pairs = factorize(q, table).pairs if isinstance(q, (int, np.integer)) else tuple(q)
    out = 1.0
    for p, nu in pairs:
        _, ft = modified_local(weight, g, ((p, 1),), table, q0=q0)
        fs = float(f.rule(p, 1)) / f.bound_m
        out *= fs**nu * ft * (1.0 - ft) * ((-1.0) ** nu * ft ** (nu - 1) + (1.0 - ft) ** (nu - 1))
    return out


def average_root_count(g: PolySpec, x: int, table: SieveTable) -> float:
    primes = primes_up_to(x, table)
    return float(np.mean(root_counts_at_primes(g, primes)))
