"""Weighted moments of additive arithmetic functions under multiplicative
weights: sieving infrastructure, a weight/additive catalog, Gaussian moment
comparisons, local-factor decompositions, class-membership audits, and
polynomial-argument variants.
"""

from .combinatorics import (
    eulerian,
    eulerian_poly,
    gaussian_constants,
    multinomial,
    pairing_count,
    polylog_neg,
    stirling2,
    touchard,
)
from .functions import (
    AdditiveSpec,
    ClassConstants,
    WeightSpec,
    additive_big_omega,
    additive_from_config,
    additive_omega,
    additive_values,
    catalog_weights,
    contraction,
    eval_additive,
    eval_weight,
    weight_d_k,
    weight_from_config,
    weight_kappa_bigomega,
    weight_kappa_omega,
    weight_mu_squared,
    weight_n_lambda,
    weight_one,
    weight_phi,
    weight_poly_roots,
    weight_r2_over_4,
    weight_sigma_lambda,
    weight_tau_squared,
    weight_values,
)
from .moments import (
    CdfReport,
    MomentReport,
    TruncationSets,
    b_star,
    char_function,
    coprime_sum_S,
    empirical_cdf,
    fit_mertens,
    mean_A,
    moment_suite,
    partial_sum_S,
    phi_gaussian,
    predicted_moment,
    truncated_additive,
    truncation_sets,
    variance_B,
    weighted_moment_M,
)
from .polyroots import PolySpec, poly_from_coefficients, poly_root_count, roots_mod
from .sieve import Factorization, SieveTable, build_sieve, factorize, primes_up_to
from .tau import hecke_prime_power, tau_naive, tau_series

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
