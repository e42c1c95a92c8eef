"""Exact q-expansion of the modular discriminant and the tau function.

tau(n) is read off q * prod (1-q^n)^24.  The product is assembled from the
cube identity prod (1-q^n)^3 = sum (-1)^k (2k+1) q^(k(k+1)/2) (a sparse
series) raised to the 8th power by three squarings.  Squarings are exact:
each runs as a number-theoretic transform modulo several word-size primes,
and the final coefficients are recovered by CRT, so no rounding ever occurs.
"""

from functools import lru_cache
from math import isqrt

import numpy as np

from .errors import CapacityError, DomainError

DEFAULT_CAP = 10**6

# NTT-friendly primes (c * 2^k + 1) with primitive roots; products of a
# prefix of this list must dominate 2 * limit^6.5 >= 2 * max |tau(n)|.
_MODULI = (
    (2013265921, 31),  # 15 * 2^27 + 1
    (998244353, 3),  # 119 * 2^23 + 1
    (469762049, 3),  # 7 * 2^26 + 1
    (167772161, 3),  # 5 * 2^25 + 1
    (754974721, 11),  # 45 * 2^24 + 1
)


def pentagonal_series(limit: int) -> np.ndarray:
    """Coefficients 0..limit-1 of prod (1-q^n): +-1 at k(3k-1)/2."""
    out = np.zeros(limit, dtype=np.int64)
    k = 0
    while True:
        hit = False
        for e in (k * (3 * k - 1) // 2, k * (3 * k + 1) // 2):
            if e < limit:
                out[e] = (-1) ** k
                hit = True
        if not hit:
            break
        k += 1
    return out


def cube_series(limit: int) -> np.ndarray:
    """Coefficients 0..limit-1 of prod (1-q^n)^3: (-1)^k (2k+1) at k(k+1)/2."""
    out = np.zeros(limit, dtype=np.int64)
    k = 0
    while k * (k + 1) // 2 < limit:
        out[k * (k + 1) // 2] = (-1) ** k * (2 * k + 1)
        k += 1
    return out


@lru_cache(maxsize=8)
def _bitrev(n: int) -> np.ndarray:
    bits = n.bit_length() - 1
    idx = np.arange(n, dtype=np.int64)
    rev = np.zeros(n, dtype=np.int64)
    for _ in range(bits):
        rev = (rev << 1) | (idx & 1)
        idx >>= 1
    return rev


@lru_cache(maxsize=64)
def _twiddles(mod: int, root: int, half: int, invert: bool) -> np.ndarray:
    # powers 0..half-1 of the primitive (2*half)-th root, built by doubling
    order = 2 * half
    w = pow(root, (mod - 1) // order, mod)
    if invert:
        w = pow(w, mod - 2, mod)
    out = np.ones(half, dtype=np.int64)
    have = 1
    wp = w
    while have < half:
        take = min(have, half - have)
        out[have : have + take] = (out[:take] * wp) % mod
        wp = (wp * wp) % mod
        have *= 2
    return out


def _ntt(a: np.ndarray, mod: int, root: int, invert: bool) -> np.ndarray:
    n = len(a)
    a = a[_bitrev(n)]
    length = 2
    while length <= n:
        half = length // 2
        tw = _twiddles(mod, root, half, invert)
        blocks = a.reshape(-1, length)
        left = blocks[:, :half]
        right = (blocks[:, half:] * tw) % mod
        s = (left + right) % mod
        d = (left - right) % mod
        blocks[:, :half] = s
        blocks[:, half:] = d
        length *= 2
    if invert:
        a = (a * pow(n, mod - 2, mod)) % mod
    return a


def _square_mod(a: np.ndarray, out_len: int, mod: int, root: int) -> np.ndarray:
    """First out_len coefficients of (a*a) as polynomials, exactly mod `mod`."""
    size = 1
    while size < 2 * len(a):
        size *= 2
    buf = np.zeros(size, dtype=np.int64)
    buf[: len(a)] = a % mod
    fa = _ntt(buf, mod, root, invert=False)
    fa = (fa * fa) % mod
    res = _ntt(fa, mod, root, invert=True)
    return res[:out_len]


def _crt_pair(r1, m1, r2, m2):
    # m2 may be a composite product of NTT primes; pow(..., -1, m2) handles it
    inv = pow(m1 % m2, -1, m2)
    t = ((r2 - r1) * inv) % m2
    return r1 + m1 * t  # < m1*m2


def _moduli_for(limit: int):
    need = 2 * limit**6 * isqrt(limit) * 2  # > 2 * limit^6.5 >= 2 max|tau|
    prod = 1
    chosen = []
    for mod, root in _MODULI:
        chosen.append((mod, root))
        prod *= mod
        if prod > need:
            return chosen
    raise CapacityError(f"tau coefficients at limit {limit} exceed the CRT range")


def tau_series(limit: int, cap: int = DEFAULT_CAP) -> list:
    """Exact integers tau(1..limit) as a list indexed 0..limit (index 0 unused)."""
    if limit < 1:
        raise DomainError(f"tau_series limit must be >= 1, got {limit}")
    if limit > cap:
        raise CapacityError(f"tau_series limit {limit} exceeds cap {cap}")
    return list(_tau_cached(limit))


@lru_cache(maxsize=4)
def _tau_cached(limit: int) -> tuple:
    cube = cube_series(limit)
    moduli = _moduli_for(limit)
    residues = []
    for mod, root in moduli:
        e6 = _square_mod(cube % mod, limit, mod, root)
        e12 = _square_mod(e6, limit, mod, root)
        e24 = _square_mod(e12, limit, mod, root)
        residues.append(e24)
    # pairwise CRT inside int64 where the products fit, final merge in Python
    merged = []
    sizes = []
    i = 0
    while i < len(moduli):
        if i + 1 < len(moduli) and moduli[i][0] * moduli[i + 1][0] < 2**62:
            m1, m2 = moduli[i][0], moduli[i + 1][0]
            inv = pow(m1 % m2, m2 - 2, m2)
            t = ((residues[i + 1] - residues[i]) * inv) % m2
            merged.append((residues[i] + m1 * t).tolist())
            sizes.append(m1 * m2)
            i += 2
        else:
            merged.append(residues[i].tolist())
            sizes.append(moduli[i][0])
            i += 1
    total = 1
    for s in sizes:
        total *= s
    half_total = total // 2
    out = [0] * (limit + 1)
    columns = list(zip(*merged))
    for n in range(1, limit + 1):
        col = columns[n - 1]
        x, m = col[0], sizes[0]
        for r, s in zip(col[1:], sizes[1:]):
            x = _crt_pair(x, m, r % s, s)
            m *= s
        if x > half_total:
            x -= total
        out[n] = x
    return tuple(out)


def tau_naive(limit: int) -> list:
    """Independent oracle: multiply out q * prod (1-q^n)^24 with Python ints,
    one binomial factor at a time.  Quadratic work, small limits only."""
    if limit > 3000:
        raise CapacityError("tau_naive is an oracle for small limits only")
    coeffs = [1] + [0] * (limit - 1)
    for _rep in range(24):
        for n in range(1, limit):
            # times (1 - q^n), in place: descending e keeps c[e-n] unmodified
            for e in range(limit - 1, n - 1, -1):
                coeffs[e] -= coeffs[e - n]
    out = [0] * (limit + 1)
    for k in range(1, limit + 1):
        out[k] = coeffs[k - 1]
    return out


def hecke_prime_power(tau_p: int, p: int, nu: int) -> int:
    """tau(p^nu) from tau(p) via tau(p^(k+1)) = tau(p) tau(p^k) - p^11 tau(p^(k-1))."""
    if nu == 0:
        return 1
    prev, cur = 1, tau_p
    for _ in range(nu - 1):
        prev, cur = cur, tau_p * cur - p**11 * prev
    return cur
