import math

import numpy as np
import pytest

from momentsieve import (
    additive_omega,
    factorize,
    mean_A,
    primes_up_to,
    variance_B,
    weight_d_k,
    weight_mu_squared,
    weight_one,
)
from momentsieve import decomposition as dc
from momentsieve.errors import CapacityError, DomainError
from momentsieve.functions import AdditiveSpec


def random_prime_power_pairs(rng, pool, max_primes=4, max_exp=3):
    k = int(rng.integers(1, max_primes + 1))
    chosen = rng.choice(pool, size=k, replace=False)
    return [(int(p), int(rng.integers(1, max_exp + 1))) for p in sorted(chosen)]


def test_local_factor_examples():
    one = weight_one()
    lf2 = dc.local_factor(one, 2)
    assert abs(lf2.local_sum - 2.0) < 1e-12
    assert abs(lf2.deficiency - 0.5) < 1e-12
    assert abs(lf2.power_tail - 0.5) < 1e-12
    for p in (3, 5, 101, 9973):
        assert abs(dc.local_factor(one, p).deficiency - 1.0 / p) < 1e-12
    mu = dc.local_factor(weight_mu_squared(), 7)
    assert abs(mu.local_sum - (1 + 1 / 7)) < 1e-15
    assert abs(mu.deficiency - 1 / 8) < 1e-15
    assert abs(mu.power_tail) < 1e-15


def test_local_factor_invariants(table4):
    d3 = weight_d_k(3)
    for p in (2, 3, 5, 97):
        lf = dc.local_factor(d3, p)
        assert abs(lf.deficiency - (1.0 - 1.0 / lf.local_sum)) < 1e-15
        assert abs(lf.power_tail - (lf.local_sum - 1.0 - 3.0 / p)) < 1e-12


def test_products(table4):
    one = weight_one()
    assert abs(dc.F_product(one, 6, table4) - 1 / 6) < 1e-14
    assert dc.F_product(one, 1, table4) == 1.0
    assert dc.L_of_a(one, 30, table4) == 1.0  # zero loglog power
    assert abs(dc.lambda_tilde(one, 6, table4) - 1.0 * (1 / 1) * (1 / 2)) < 1e-12
    with pytest.raises(DomainError):
        dc.F_product(one, 12, table4)  # not squarefree


def test_lambda_alpha(table4):
    one = weight_one()
    tp = dc.lambda_alpha_of_a(one, 1, 10**4, table4)
    assert abs(tp.value - 1.0) < 1e-12  # telescoping Euler product
    tp6 = dc.lambda_alpha_of_a(one, 6, 10**4, table4)
    assert abs(tp6.value - (1 / 2) * (2 / 3)) < 1e-12
    assert tp6.tail_estimate >= 0.0
    with pytest.raises(DomainError):
        dc.lambda_alpha_of_a(one, 14, 5, table4)


def test_q0_computed(table4):
    assert dc.compute_Q0(weight_one(), table4) == 2
    assert dc.compute_Q0(weight_d_k(3), table4) == 7
    # everything beyond Q0 has local tail at most 1/2
    d3 = weight_d_k(3)
    for p in primes_up_to(200, table4):
        tail = dc.local_factor(d3, int(p)).local_sum - 1.0
        assert (tail <= 0.5) == (p > 7)


def test_f_p_examples():
    one, om = weight_one(), additive_omega()
    lf2 = dc.local_factor(one, 2)
    assert abs(dc.f_p_value(om, lf2, True) - 0.5) < 1e-14
    assert abs(dc.f_p_value(om, lf2, False) + 0.5) < 1e-14
    zero_at_2 = AdditiveSpec(
        name="z2", rule=lambda p, nu: 0.0 if p == 2 else 1.0, strongly_additive=True, bound_m=1.0
    )
    assert dc.f_p_value(zero_at_2, lf2, True) == 0.0
    assert dc.f_p_value(zero_at_2, lf2, False) == 0.0


def test_f_q_gcd_dependence(table4):
    one, om = weight_one(), additive_omega()
    # q = p^2 with p not dividing n: F^2 f(p)^2
    lf3 = dc.local_factor(one, 3)
    got = dc.f_q_value(one, om, 9, 5, table4)
    assert abs(got - lf3.deficiency**2) < 1e-14
    rng = np.random.default_rng(31)
    pool = primes_up_to(50, table4)
    for _ in range(25):
        pairs = random_prime_power_pairs(rng, pool)
        q = 1
        rad = 1
        for p, nu in pairs:
            q *= p**nu
            rad *= p
        n = int(rng.integers(1, 5000))
        if q <= table4.limit:
            assert dc.f_q_value(one, om, q, n, table4) == dc.f_q_value(
                one, om, q, math.gcd(n, rad), table4
            )


def test_g_closed_examples(table4):
    one, om = weight_one(), additive_omega()
    assert abs(dc.G_closed(one, om, 4, table4) - 0.25) < 1e-14
    assert abs(dc.G_closed(one, om, 8, table4)) < 1e-15
    for p in (3, 5, 11, 101, 997):
        assert abs(dc.G_closed(one, om, p, table4)) < 1e-14
        assert abs(dc.G_expand(one, om, p, table4)) < 1e-14


def test_g_identity_random(table4):
    # divisor-sum identity: expansion equals the prime-power closed form
    d3, om = weight_d_k(3), additive_omega()
    q0 = dc.compute_Q0(d3, table4)
    pool = primes_up_to(2000, table4)
    pool = pool[pool > q0]
    rng = np.random.default_rng(7)
    for _ in range(50):
        pairs = random_prime_power_pairs(rng, pool)
        gc = dc.G_closed(d3, om, pairs, table4)
        ge = dc.G_expand(d3, om, pairs, table4)
        assert abs(gc - ge) < 1e-12, pairs


def test_g_bounds(table4):
    one, om = weight_one(), additive_omega()
    pool = primes_up_to(500, table4)
    pool = pool[pool > 2]
    for p in pool[:40]:
        for nu in range(1, 9):
            g = dc.G_closed(one, om, ((int(p), nu),), table4)
            assert abs(g) <= 0.25 + 1e-15
            if nu % 2 == 0:
                assert g >= 0.0


def test_g_expand_capacity(table4):
    one, om = weight_one(), additive_omega()
    pairs = [(int(p), 1) for p in primes_up_to(30, table4)]
    assert len(pairs) > 8
    with pytest.raises(CapacityError):
        dc.G_expand(one, om, pairs, table4)


def test_h_value(table4):
    one, om = weight_one(), additive_omega()
    for p in (5, 7, 11):
        assert abs(dc.H_value(one, om, p, table4) - 2.0 / p) < 1e-14
    zero = AdditiveSpec(name="z", rule=lambda p, nu: 0.0, strongly_additive=True, bound_m=1.0)
    assert dc.H_value(one, zero, 30, table4) == 0.0
    rng = np.random.default_rng(13)
    for _ in range(20):
        p1 = int(rng.choice([5, 7, 11, 13]))
        p2 = int(rng.choice([17, 19, 23, 29]))
        e1, e2 = int(rng.integers(1, 3)), int(rng.integers(1, 3))
        lhs = dc.H_value(one, om, ((p1, e1), (p2, e2)), table4)
        rhs = dc.H_value(one, om, ((p1, e1),), table4) * dc.H_value(one, om, ((p2, e2),), table4)
        assert abs(lhs - rhs) < 1e-15


def test_omega_zw(table4):
    assert dc.omega_zw(factorize(30, table4), 2, 10) == 2
    assert dc.omega_zw(factorize(8, table4), 10, 100) == 0  # w below least prime factor
    assert dc.omega_zw(factorize(2 * 11 * 101, table4), 10, 100) == 1
    with pytest.raises(DomainError):
        dc.omega_zw(factorize(6, table4), 100, 10)


def test_choose_params(table4):
    one = weight_one()
    params = dc.choose_params(one, 10**4, 2, table4)
    assert params.q0 < params.z <= params.w <= params.x
    assert params.v >= 1.0


def test_residual_zero_function(table5):
    zero = AdditiveSpec(name="z", rule=lambda p, nu: 0.0, strongly_additive=True, bound_m=1.0)
    one = weight_one()
    params = dc.choose_params(one, 10**5, 2, table5)
    ev = dc.ResidualEvaluator(one, zero, params, 0.0, table5)
    for n in (2, 30, 97, 9999):
        assert ev(n) == 0.0


def test_residual_bound_v3_example(table5):
    # pilot-run oracle: at x = 1e5, v = 3, the excess over the (z, w] prime
    # count stays within 2 log(v+2) + 3 for all n <= 1e4 (measured max 1.565)
    one, om = weight_one(), additive_omega()
    x = 10**5
    params = dc.DecompositionParams(
        x=x, m=3, v=3.0, z=x ** (1 / 3.0), w=x ** (1 / math.log(5.0)), q0=2
    )
    a_x = mean_A(one, om, x, table5)
    ev = dc.ResidualEvaluator(one, om, params, a_x, table5)
    worst = max(
        abs(ev(n)) - dc.omega_zw(factorize(n, table5), params.z, params.w)
        for n in range(2, 10**4 + 1)
    )
    assert worst <= 2 * math.log(5.0) + 3


def test_second_moment_prime_sum_tracks_variance(table5):
    # sum of the squared-prime closed form over (Q0, z] equals B(z) up to the
    # small-prime mass plus the local tails
    om = additive_omega()
    for w in (weight_one(), weight_d_k(3)):
        q0 = dc.compute_Q0(w, table5)
        z = 10**4
        lhs = dc.second_moment_prime_sum(w, om, z, q0, table5)
        b_z = variance_B(w, om, z, table5)
        primes = primes_up_to(z, table5)
        small = primes[primes <= q0]
        alpha_small = w.alpha_primes(small) if len(small) else np.array([])
        bound_small = float(np.sum(alpha_small / small.astype(float) ** w.constants.abscissa)) if len(small) else 0.0
        sums = dc.local_sums_at_primes(w, primes)
        alpha_p = w.alpha_primes(primes)
        pf = primes.astype(float)
        psi0 = sums - 1.0 - alpha_p * pf ** (-w.constants.abscissa)
        bound = bound_small + float(np.sum(psi0 + alpha_p**2 * pf ** (-2 * w.constants.abscissa)))
        assert abs(lhs - b_z) <= bound
