import math
from itertools import product

import numpy as np
import pytest

from momentsieve import (
    additive_big_omega,
    additive_from_config,
    additive_omega,
    additive_values,
    catalog_weights,
    contraction,
    eval_additive,
    eval_weight,
    factorize,
    primes_up_to,
    weight_d_k,
    weight_from_config,
    weight_mu_squared,
    weight_one,
    weight_poly_roots,
    weight_r2_over_4,
    weight_tau_squared,
    weight_values,
)
from momentsieve.errors import DomainError, SpecificationError
from momentsieve.functions import AdditiveSpec, WeightSpec, ClassConstants


def ordered_tuples_with_product(k, n):
    # oracle for the k-fold divisor function
    count = 0
    divisors = [d for d in range(1, n + 1) if n % d == 0]
    for combo in product(divisors, repeat=k):
        p = 1
        for c in combo:
            p *= c
        if p == n:
            count += 1
    return count


def two_square_representations(n):
    count = 0
    r = int(math.isqrt(n))
    for a in range(-r, r + 1):
        b2 = n - a * a
        if b2 < 0:
            continue
        b = math.isqrt(b2)
        if b * b == b2:
            count += 1 if b == 0 else 2
    return count


def test_eval_weight_examples(table4):
    d3 = weight_d_k(3)
    assert eval_weight(d3, factorize(4, table4)) == ordered_tuples_with_product(3, 4) == 6
    assert eval_weight(weight_mu_squared(), factorize(12, table4)) == 0.0
    r2 = weight_r2_over_4()
    assert eval_weight(r2, factorize(5, table4)) == two_square_representations(5) / 4 == 2


def test_r2_weight_matches_lattice_count(table4):
    r2 = weight_r2_over_4()
    for n in range(1, 200):
        assert eval_weight(r2, factorize(n, table4)) == two_square_representations(n) / 4, n


def test_eval_additive_examples(table4):
    om, Om = additive_omega(), additive_big_omega()
    assert eval_additive(om, factorize(12, table4)) == 2
    assert eval_additive(Om, factorize(12, table4)) == 3
    assert eval_additive(om, factorize(1, table4)) == 0


def test_multiplicativity(table4):
    rng = np.random.default_rng(19)
    for w in catalog_weights(include_tau=False):
        checked = 0
        while checked < 40:
            m = int(rng.integers(2, 100))
            n = int(rng.integers(2, 100))
            if math.gcd(m, n) != 1:
                continue
            lhs = eval_weight(w, factorize(m * n, table4))
            rhs = eval_weight(w, factorize(m, table4)) * eval_weight(w, factorize(n, table4))
            if w.integer_valued:
                assert lhs == rhs, (w.name, m, n)
            else:
                assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(rhs)), (w.name, m, n)
            checked += 1


def test_additivity(table4):
    rng = np.random.default_rng(23)
    for f in (additive_omega(), additive_big_omega()):
        checked = 0
        while checked < 40:
            m = int(rng.integers(2, 100))
            n = int(rng.integers(2, 100))
            if math.gcd(m, n) != 1:
                continue
            assert eval_additive(f, factorize(m * n, table4)) == eval_additive(
                f, factorize(m, table4)
            ) + eval_additive(f, factorize(n, table4))
            checked += 1


def test_dk_at_primes(table4):
    for k in (2, 3, 5):
        w = weight_d_k(k)
        for p in (2, 3, 97, 9973):
            assert eval_weight(w, factorize(p, table4)) == k
        assert w.constants.prime_density == k


def test_tau_weight_bounded_at_primes(table4):
    w = weight_tau_squared()
    ps = primes_up_to(1000, table4)
    vals = w.alpha_primes(ps)
    assert np.all(vals <= 4.0)  # normalized square bound
    assert np.all(vals >= 0.0)


def test_contraction(table4):
    om, Om = additive_omega(), additive_big_omega()
    c = contraction(Om)
    assert c.strongly_additive
    for p, nu in ((2, 1), (2, 5), (7, 3)):
        assert float(c.rule(p, nu)) == float(Om.rule(p, 1)) == 1.0
    assert contraction(om) is om  # idempotent on strongly additive
    assert eval_additive(c, factorize(8, table4)) == 1.0


def test_weight_values_match_pointwise(table4):
    limit = 2500
    for w in catalog_weights(include_tau=False):
        vals = weight_values(w, limit, table4)
        for n in list(range(1, 300)) + [512, 1024, 2048, 2401, 2500]:
            expect = eval_weight(w, factorize(n, table4))
            assert abs(vals[n] - expect) <= 1e-12 * max(1.0, abs(expect)), (w.name, n)


def test_additive_values_match_pointwise(table4):
    for f in (additive_omega(), additive_big_omega()):
        vals = additive_values(f, 3000, table4)
        for n in range(1, 3001):
            assert vals[n] == eval_additive(f, factorize(n, table4))


def test_negative_rule_rejected(table4):
    bad = WeightSpec(name="bad", rule=lambda p, nu: -1.0, constants=ClassConstants())
    with pytest.raises(SpecificationError):
        eval_weight(bad, factorize(2, table4))
    with pytest.raises(SpecificationError):
        bad.alpha_primes(np.array([2, 3, 5]))


def test_config_loading():
    w = weight_from_config({"name": "d_k", "k": 3})
    assert w.params == {"k": 3}
    assert float(w.rule(5, 1)) == 3.0
    f = additive_from_config({"name": "omega"})
    assert f.strongly_additive
    with pytest.raises(DomainError):
        weight_from_config({"name": "nonsense"})
    with pytest.raises(DomainError):
        additive_from_config({"name": "nonsense"})


def test_config_overrides(table4):
    w = weight_from_config({"name": "one", "overrides": [[7, 1, 3.5]]})
    assert eval_weight(w, factorize(7, table4)) == 3.5
    assert eval_weight(w, factorize(14, table4)) == 3.5
    assert eval_weight(w, factorize(5, table4)) == 1.0
    arr = w.rule(np.array([5, 7, 11]), 1)
    assert list(arr) == [1.0, 3.5, 1.0]
    f = additive_from_config({"name": "omega", "overrides": [[13, 1, 10.0]]})
    assert eval_additive(f, factorize(13, table4)) == 10.0
    assert eval_additive(f, factorize(26, table4)) == 11.0


def test_rho_weight_values(table4):
    # x^2 + 1 root counts as a multiplicative weight over a full range
    w = weight_poly_roots()
    vals = weight_values(w, 500, table4)
    for n in range(1, 501):
        roots = sum(1 for r in range(n) if (r * r + 1) % n == 0)
        assert vals[n] == roots, n
