"""Beta and Mittag-Leffler moments, limit chains and Gamma-process samplers."""
from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats as sps
from scipy.special import gammaln

from wrtlab.errors import ParameterError
from wrtlab.limits import (
    GGPSpec,
    beta_mixed_moment,
    beta_moment,
    closed_form_Cp,
    estimate_Cp,
    ipggp_index_set,
    ipggp_scale,
    limit_chain_moment,
    limit_chain_spec,
    ml_moment,
    sample_ggp,
    sample_ipggp,
    sample_limit_chain,
    sample_mlmc,
)
from wrtlab.sequences import make_constant_fitness, make_periodic_fitness

SQRT_PI = math.sqrt(math.pi)


# -- closed forms -----------------------------------------------------------


def test_beta_moment_examples():
    assert beta_moment(1, 1, 1) == pytest.approx(0.5)
    assert beta_moment(2, 3, 2) == pytest.approx(0.2)
    assert beta_moment(3.3, 0, 7) == 1.0


def test_beta_mixed_moment_examples():
    assert beta_mixed_moment(1, 1, 1, 1) == pytest.approx(1 / 6)
    assert beta_mixed_moment(2, 1, 1, 0) == pytest.approx(2 / 3)
    assert beta_mixed_moment(1.5, 0, 5, 0) == 1.0
    assert beta_mixed_moment(1.5, 0, 0, 1) == 0.0


def test_ml_moment_examples():
    assert ml_moment(0.5, 0.5, 0) == 1.0
    assert ml_moment(0.5, 0.5, 1) == pytest.approx(SQRT_PI, rel=1e-13)
    assert ml_moment(0.5, 0.5, 2) == pytest.approx(4.0, rel=1e-13)


def test_ml_moment_rejects_bad_parameters():
    with pytest.raises(ParameterError):
        ml_moment(1.0, 0.5, 1)
    with pytest.raises(ParameterError):
        ml_moment(0.5, -0.5, 1)


@given(st.floats(0.1, 20), st.floats(0.0, 20), st.integers(0, 40))
@settings(max_examples=100, deadline=None)
def test_mixed_moment_reduces_to_moment(a, b, p):
    assert beta_mixed_moment(a, b, p, 0) == pytest.approx(beta_moment(a, b, p), rel=1e-12)


@given(st.floats(0.1, 20), st.floats(0.1, 20), st.integers(0, 30), st.integers(0, 30))
@settings(max_examples=100, deadline=None)
def test_mixed_moment_log_gamma_form(a, b, p, q):
    ref = math.exp(gammaln(a + p) + gammaln(b + q) + gammaln(a + b)
                   - gammaln(a) - gammaln(b) - gammaln(a + b + p + q))
    assert beta_mixed_moment(a, b, p, q) == pytest.approx(ref, rel=1e-10)


@given(st.floats(0.05, 0.95), st.floats(0.0, 10), st.integers(1, 60))
@settings(max_examples=100, deadline=None)
def test_ml_moment_ratio_recursion(alpha, theta, p):
    # successive ratio equals (theta/alpha + p) Gamma(theta+(p-1)alpha+1) / Gamma(theta+p alpha+1)
    ratio = ml_moment(alpha, theta, p) / ml_moment(alpha, theta, p - 1)
    ref = (theta / alpha + p) * math.exp(gammaln(theta + (p - 1) * alpha + 1)
                                         - gammaln(theta + p * alpha + 1))
    assert ratio == pytest.approx(ref, rel=1e-10)


# -- limit chain ------------------------------------------------------------


def test_spec_tags():
    assert limit_chain_spec(make_constant_fitness(1, 1, 10)).closed_form == "mlmc"
    s = limit_chain_spec(make_periodic_fitness(1, [0, 1], 10))
    assert s.closed_form == "ipggp"
    assert s.c == pytest.approx(0.5)


def test_chain_moment_examples():
    spec = limit_chain_spec(make_constant_fitness(1, 1, 10))
    assert limit_chain_moment(spec, 1, 1) == pytest.approx(SQRT_PI, rel=1e-12)
    assert limit_chain_moment(spec, 1, 0) == 1.0
    assert limit_chain_moment(spec, 2, 1) == pytest.approx(ml_moment(0.5, 1.5, 1), rel=1e-12)


@pytest.mark.parametrize("a,b", [(1, 1), (0.5, 2), (2, 0.5)])
@pytest.mark.parametrize("k", [1, 2, 5])
@pytest.mark.parametrize("p", [1, 2, 3])
def test_chain_marginals_are_mittag_leffler(a, b, k, p):
    spec = limit_chain_spec(make_constant_fitness(a, b, 10))
    theta = a / (b + 1) + k - 1
    assert limit_chain_moment(spec, k, p) == pytest.approx(ml_moment(1 / (b + 1), theta, p),
                                                            rel=1e-10)


@pytest.mark.parametrize("fitness", [make_constant_fitness(1, 1, 10),
                                     make_periodic_fitness(1, [0, 1], 10),
                                     make_periodic_fitness(0, [2, 1], 10)])
def test_generic_extrapolation_matches_closed_form(fitness):
    spec = limit_chain_spec(fitness)
    for p in (1, 2):
        est, _ = estimate_Cp(fitness, spec.c, p, N=10**6)
        assert est == pytest.approx(closed_form_Cp(spec, p), rel=1e-2)


# -- samplers ---------------------------------------------------------------


def test_chain_ratios_are_betas():
    f = make_constant_fitness(1, 1, 10**4)
    chain = sample_limit_chain(f, 1.0, 5, 10**4, np.random.default_rng(0))
    from wrtlab.sequences import sample_beta_coupling
    betas = sample_beta_coupling(f, 10**4, np.random.default_rng(0)).betas
    np.testing.assert_allclose(chain[:-1] / chain[1:], betas[:4], rtol=1e-12)


def test_chain_first_value_mean():
    rng = np.random.default_rng(1)
    f = make_constant_fitness(1, 1, 10**5)
    m1 = np.array([sample_limit_chain(f, 1.0, 2, 10**5, rng)[0] for _ in range(1000)])
    assert m1.mean() == pytest.approx(SQRT_PI, rel=0.03 + 4 * m1.std() / math.sqrt(1000) / SQRT_PI)


def test_chain_independence_of_future():
    # M_{k+1} should be independent of beta_1..beta_k
    rng = np.random.default_rng(2)
    R = 10**4
    x = sample_mlmc(0.5, 0.5, 4, 10**4, rng, replicates=R)
    beta1 = x[:, 0] / x[:, 1]
    rho = np.corrcoef(beta1, x[:, 1])[0, 1]
    assert abs(rho) < 4 / math.sqrt(R)


@pytest.mark.slow
def test_mlmc_moments():
    rng = np.random.default_rng(3)
    x = sample_mlmc(0.5, 0.5, 3, 10**5, rng, replicates=10**4)
    for p in (1, 2, 3):
        assert np.mean(x[:, 0] ** p) == pytest.approx(ml_moment(0.5, 0.5, p), rel=0.05)
    # backward transition law of the chain
    ratio = x[:, 0] / x[:, 1]
    theta, alpha, k = 0.5, 0.5, 1
    law = sps.beta((theta + k - 1) / alpha + 1, 1 / alpha - 1)
    assert sps.kstest(ratio, law.cdf).pvalue > 1e-3


def test_ggp_examples():
    rng = np.random.default_rng(4)
    g = sample_ggp(GGPSpec(1, 1), 5, rng, size=10**5)
    assert np.all(np.diff(g, axis=1) > 0)
    for k in range(5):
        se = g[:, k].std() / math.sqrt(10**5)
        assert abs(g[:, k].mean() - (k + 1)) < 4 * se
    g = sample_ggp(GGPSpec(2.0, 2.0), 3, rng, size=10**4)
    assert sps.kstest(g[:, 0] ** 2, "expon").pvalue > 1e-3


@pytest.mark.parametrize("z,r", [(0.5, 1.0), (3.0, 2.0), (1.5, 0.7)])
def test_ggp_power_means(z, r):
    rng = np.random.default_rng(5)
    g = sample_ggp(GGPSpec(z, r), 4, rng, size=10**5) ** r
    k = np.arange(1, 5)
    se = g.std(axis=0) / math.sqrt(10**5)
    assert np.all(np.abs(g.mean(axis=0) - (k - 1 + z / r)) < 4 * se)


def test_ipggp_index_sets():
    assert ipggp_index_set([0, 1]) == [2]
    assert ipggp_index_set([3]) == [1, 2, 3]
    assert ipggp_index_set([1, 0, 2]) == [1, 4, 5]
    with pytest.raises(ParameterError):
        ipggp_index_set([0, 0])


def test_ipggp_sparse_pattern_is_constant_on_blocks():
    rng = np.random.default_rng(6)
    x = sample_ipggp(1.0, [0, 1], 8, rng, size=50)
    np.testing.assert_array_equal(x[:, 0], x[:, 1])
    np.testing.assert_array_equal(x[:, 2], x[:, 3])


def test_ipggp_poisson_points():
    # pattern (0, ..., 0, 1) with a = 1: points of intensity (l + 1) t^l
    rng = np.random.default_rng(7)
    ell = 3
    x = sample_ipggp(1.0, [0] * (ell - 1) + [1], 2 * ell, rng, size=10**4)
    first = x[:, 0]
    assert sps.kstest(first ** (ell + 1), "expon").pvalue > 1e-3


@pytest.mark.parametrize("pattern", [[0, 1], [1], [2, 0, 1], [0, 0, 1]])
def test_ipggp_matches_chain_moments(pattern):
    rng = np.random.default_rng(8)
    a = 1.0
    spec = limit_chain_spec(make_periodic_fitness(a, pattern, 10))
    x = sample_ipggp(a, pattern, 6, rng, size=2 * 10**5) * ipggp_scale(pattern)
    for k in range(1, 7):
        target = limit_chain_moment(spec, k, 1)
        assert x[:, k - 1].mean() == pytest.approx(target, rel=0.05)
