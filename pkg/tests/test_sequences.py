"""Weight and fitness sequences, Beta couplings and profile estimation."""
from __future__ import annotations

import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wrtlab.errors import (
    DegenerateCouplingError,
    InsufficientDataError,
    ParameterError,
    RangeError,
)
from wrtlab.sequences import (
    BetaCoupling,
    WeightSequence,
    estimate_profile,
    limit_weights,
    make_constant_fitness,
    make_periodic_fitness,
    make_power_weights,
    read_weights_csv,
    sample_beta_coupling,
    sequence_from_json,
    sequence_to_json,
    weights_from_betas,
    write_weights_csv,
)


# -- power weights ----------------------------------------------------------


def test_power_weights_uniform():
    w = make_power_weights(1, 1, 5)
    np.testing.assert_allclose(w.w, np.ones(5))
    assert w.W[-1] == pytest.approx(5)


def test_power_weights_squares():
    w = make_power_weights(2, 1, 3)
    np.testing.assert_allclose(w.w, [1, 3, 5])
    assert w.W[-1] == pytest.approx(9)


def test_power_weights_half():
    assert make_power_weights(0.5, 2, 2).W[-1] == pytest.approx(2 * math.sqrt(2), rel=1e-14)


@pytest.mark.parametrize("gamma,C", [(0, 1), (-1, 1), (1, 0)])
def test_power_weights_rejects_bad_parameters(gamma, C):
    with pytest.raises(ParameterError):
        make_power_weights(gamma, C, 10)


@given(st.floats(0.05, 3.0), st.floats(0.1, 10.0))
@settings(max_examples=40, deadline=None)
def test_power_weights_exact_cumulative(gamma, C):
    w = make_power_weights(gamma, C, 500)
    n = np.arange(1, 501)
    np.testing.assert_allclose(w.W / (C * n ** gamma), 1.0, rtol=1e-12)


# -- fitness ----------------------------------------------------------------


def test_constant_fitness_cumulative():
    np.testing.assert_allclose(make_constant_fitness(1, 1, 4).A, [1, 2, 3, 4])
    assert make_constant_fitness(0.5, 2, 3).A[-1] == pytest.approx(4.5)
    assert make_constant_fitness(-0.5, 1, 2).A[-1] == pytest.approx(0.5)


def test_constant_fitness_rejects_first_term():
    with pytest.raises(ParameterError):
        make_constant_fitness(-1, 1, 3)


def test_periodic_fitness_examples():
    f = make_periodic_fitness(1, [0, 1], 5)
    np.testing.assert_allclose(f.a, [1, 0, 1, 0, 1])
    assert f.mean_fitness == pytest.approx(0.5)
    np.testing.assert_allclose(make_periodic_fitness(0, [2], 3).a,
                               make_constant_fitness(0, 2, 3).a)
    assert make_periodic_fitness(1, [1, 0, 0], 4).A[-1] == pytest.approx(2)


def test_periodic_fitness_rejects_zero_pattern():
    with pytest.raises(ParameterError):
        make_periodic_fitness(1, [0, 0], 5)


# -- Beta coupling ----------------------------------------------------------


def test_dirac_convention(rng):
    f = make_constant_fitness(1, 0, 10)
    c = sample_beta_coupling(f, 10, rng)
    assert np.all(c.betas == 1.0)
    np.testing.assert_allclose(weights_from_betas(c).W, np.ones(10))


def test_coupling_length(rng):
    assert len(sample_beta_coupling(make_constant_fitness(1, 1, 2), 2, rng).betas) == 1


def test_first_beta_mean(rng):
    f = make_constant_fitness(1, 1, 2)
    b = np.array([sample_beta_coupling(f, 2, rng).betas[0] for _ in range(20000)])
    se = b.std() / math.sqrt(len(b))
    assert abs(b.mean() - 2 / 3) < 4 * se


def test_beta_means_vectorized(rng):
    # empirical means of beta_k against (A_k + k) / (A_k + k + a_{k+1})
    f = make_constant_fitness(0.5, 2, 6)
    draws = np.array([sample_beta_coupling(f, 6, rng).betas for _ in range(20000)])
    A, a = f.A, f.a
    k = np.arange(1, 6)
    target = (A[k - 1] + k) / (A[k - 1] + k + a[k])
    se = draws.std(axis=0) / math.sqrt(len(draws))
    assert np.all(np.abs(draws.mean(axis=0) - target) < 4 * se)


def test_weights_from_betas_examples():
    w = weights_from_betas([1, 1, 1])
    np.testing.assert_allclose(w.W, [1, 1, 1, 1])
    np.testing.assert_allclose(w.w, [1, 0, 0, 0])
    w = weights_from_betas([0.5, 1 / 3])
    np.testing.assert_allclose(w.W, [1, 2, 6])
    np.testing.assert_allclose(w.w, [1, 1, 4])
    assert weights_from_betas([2 / 3]).w[1] == pytest.approx(0.5)


def test_weights_from_betas_rejects_zero():
    with pytest.raises(DegenerateCouplingError):
        weights_from_betas([0.5, 0.0])


@given(st.lists(st.floats(1e-3, 1.0), min_size=1, max_size=60))
@settings(max_examples=60, deadline=None)
def test_beta_round_trip(betas):
    w = weights_from_betas(betas)
    recovered = np.exp(w.log_W[:-1] - w.log_W[1:])
    np.testing.assert_allclose(recovered, betas, rtol=1e-12)
    # cancellation in diff(W) loses digits relative to the scale of W
    assert np.all(np.abs(np.diff(w.W) - w.w[1:]) <= 1e-9 * w.W[1:])


def test_coupling_prefix_stable():
    f = make_constant_fitness(1, 1, 100)
    short = sample_beta_coupling(f, 50, np.random.default_rng(3))
    rng = np.random.default_rng(3)
    c = sample_beta_coupling(f, 20, rng).extend(50, rng)
    np.testing.assert_array_equal(c.betas, short.betas)


def test_log_space_no_overflow(rng):
    f = make_constant_fitness(1, 10, 10**6)
    w = weights_from_betas(sample_beta_coupling(f, 10**6, rng))
    assert np.all(np.isfinite(w.log_W))


# -- profile ----------------------------------------------------------------


def test_profile_power_weights():
    p = estimate_profile(make_power_weights(0.5, 1, 10**4))
    assert abs(p.gamma_hat - 0.5) < 1e-6


@pytest.mark.parametrize("gamma", [0.3, 1.0, 1.7])
def test_profile_recovers_gamma(gamma):
    assert abs(estimate_profile(make_power_weights(gamma, 2.0, 10**4)).gamma_hat - gamma) < 1e-3


def test_profile_beta_weights(rng):
    w = weights_from_betas(sample_beta_coupling(make_constant_fitness(1, 1, 10**5), 10**5, rng))
    assert abs(estimate_profile(w).gamma_hat - 0.5) < 0.03
    w = weights_from_betas(sample_beta_coupling(make_periodic_fitness(1, [0, 1], 10**5), 10**5, rng))
    assert abs(estimate_profile(w).gamma_hat - 1 / 3) < 0.03


def test_profile_fitness_input():
    p = estimate_profile(make_constant_fitness(1, 1, 1000))
    assert p.c_hat == pytest.approx(1.0, rel=1e-2)
    assert p.gamma_hat == pytest.approx(0.5, rel=1e-2)


def test_profile_too_short():
    with pytest.raises(InsufficientDataError):
        estimate_profile(make_power_weights(1, 1, 50))


# -- limit weights ----------------------------------------------------------


def test_limit_weights_trivial_coupling():
    c = BetaCoupling.from_betas(np.ones(999))
    m = limit_weights(c, 1.0, 1000)
    assert m[0] > 0
    assert np.all(m[1:] == 0)


def test_limit_weights_range(rng):
    c = sample_beta_coupling(make_constant_fitness(1, 1, 100), 100, rng)
    with pytest.raises(RangeError):
        limit_weights(c, 1.0, 1000)


def test_limit_weights_mean(rng):
    f = make_constant_fitness(1, 1, 10**4)
    m1 = [limit_weights(sample_beta_coupling(f, 10**4, rng), 1.0, 10**4)[0] for _ in range(2000)]
    assert np.mean(m1) == pytest.approx(math.sqrt(math.pi), rel=0.05)


# -- serialization ----------------------------------------------------------


def test_json_round_trip():
    for seq in [make_power_weights(0.5, 2, 10), make_constant_fitness(0.5, 2, 10),
                make_periodic_fitness(1, [0, 1], 10)]:
        obj = json.loads(json.dumps(sequence_to_json(seq)))
        back = sequence_from_json(obj, 10)
        left = seq.w if isinstance(seq, WeightSequence) else seq.a
        right = back.w if isinstance(back, WeightSequence) else back.a
        np.testing.assert_allclose(left, right)


def test_beta_sampled_json_reproducible():
    spec = {"kind": "beta_sampled", "fitness": {"kind": "constant_fitness", "a": 1, "b": 1},
            "seed": 7}
    a = sequence_from_json(spec, 200)
    b = sequence_from_json(spec, 200)
    np.testing.assert_array_equal(a.w, b.w)


def test_weights_csv_round_trip(tmp_path):
    w = make_power_weights(2, 1, 5)
    path = tmp_path / "w.csv"
    write_weights_csv(w, path)
    assert path.read_text().splitlines()[0] == "n,w,W"
    np.testing.assert_allclose(read_weights_csv(path).w, w.w)
