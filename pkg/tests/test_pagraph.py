"""(m, alpha) preferential attachment multigraphs and their tree coupling."""
from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats as sps

from wrtlab.errors import ParameterError
from wrtlab.pagraph import (
    certify_pagraph_coupling,
    coupled_degree_limits,
    grow_pa_graph,
    max_degree_exponent,
    merged_degrees_from_pat,
    pagraph_fitness,
    write_edge_csv,
)
from wrtlab.trees import grow_pat


def test_single_arrival_is_noop(rng):
    g = grow_pa_graph([1, 1], 2, 0.0, 1, rng)
    assert g.edges.shape == (0, 2)
    np.testing.assert_array_equal(g.degrees(), [1, 1])


def test_first_edge_uniform_on_seed_edge(rng):
    first = np.array([grow_pa_graph([1, 1], 2, 0.0, 2, rng).edges[0, 1] for _ in range(20000)])
    assert set(first) <= {1, 2}
    assert abs(np.mean(first == 1) - 0.5) < 4 * math.sqrt(0.25 / 20000)


@given(st.lists(st.integers(0, 4), min_size=1, max_size=4), st.integers(1, 4),
       st.floats(-0.9, 3.0), st.integers(1, 200), st.integers(0, 2**32 - 1))
@settings(max_examples=80, deadline=None)
def test_graph_invariants(seed, m, alpha, n, s):
    if any(d + alpha <= 0 for d in seed):
        with pytest.raises(ParameterError):
            grow_pa_graph(seed, m, alpha, n, np.random.default_rng(s))
        return
    g = grow_pa_graph(seed, m, alpha, n, np.random.default_rng(s))
    assert g.edges.shape == (m * (n - 1), 2)
    # edges point from the newcomer to an older vertex, never to itself
    assert np.all(g.edges[:, 1] < g.edges[:, 0])
    deg = g.degrees()
    assert deg.sum() == pytest.approx(sum(seed) + 2 * m * (n - 1))
    md = g.merged_degrees()
    assert md[0] == pytest.approx(deg[:len(seed)].sum())
    assert np.all(md[1:] >= m)


def test_parameter_checks(rng):
    with pytest.raises(ParameterError):
        grow_pa_graph([1, 1], 0, 0.0, 5, rng)
    with pytest.raises(ParameterError):
        grow_pa_graph([1.5], 1, 0.0, 5, rng)
    with pytest.raises(ParameterError):
        grow_pa_graph([0, 1], 1, 0.0, 5, rng)


def test_fitness_examples():
    np.testing.assert_allclose(pagraph_fitness([1, 1], 2, 0.0).values(7), [2, 0, 2, 0, 2, 0, 2])
    np.testing.assert_allclose(pagraph_fitness([1, 1], 1, 0.5).values(4), [3, 1.5, 1.5, 1.5])
    np.testing.assert_allclose(pagraph_fitness([2], 3, 1.0).values(7), [3, 0, 0, 4, 0, 0, 4])
    np.testing.assert_allclose(pagraph_fitness([1, 1], 2, 0.5).values(5), [3, 0, 2.5, 0, 2.5])


def test_merged_degrees_from_tree():
    # m = 2: tree vertices 2,3 form v_2 and 4,5 form v_3
    parent = np.array([0, 1, 1, 2, 3])
    md = merged_degrees_from_pat(parent, [1, 1], 2, 3)
    np.testing.assert_allclose(md, [2 + 2, 2 + 2, 2])


@pytest.mark.parametrize("seed,m,alpha", [
    ([1, 1], 2, 0.0), ([1, 1], 2, 1.0), ([1, 1], 2, 0.5), ([1], 1, 0.0),
    ([1, 1], 3, 0.0), ([1, 2, 1], 2, -0.5), ([2], 3, 1.0),
])
@pytest.mark.parametrize("n", [2, 3])
def test_certificate(seed, m, alpha, n):
    cert = certify_pagraph_coupling(seed, m, alpha, n)
    assert cert.passed, cert.to_json()
    assert cert.max_abs_diff <= 1e-10


def test_certificate_larger():
    assert certify_pagraph_coupling([1, 1], 2, 0.0, 4).passed


def test_certificate_cap():
    with pytest.raises(ParameterError):
        certify_pagraph_coupling([1, 1], 2, 0.0, 5)


def test_merged_law_graph_against_tree():
    # merged seed degree at n = 300 from both constructions
    rng = np.random.default_rng(41)
    seed, m, alpha, n = [1, 1], 2, 1.0, 300
    graph = [grow_pa_graph(seed, m, alpha, n, rng).merged_degrees()[0] for _ in range(3000)]
    fit = pagraph_fitness(seed, m, alpha, 1 + m * (n - 1))
    tree = [merged_degrees_from_pat(grow_pat(fit, 1 + m * (n - 1), rng)[0].parent, seed, m, n)[0]
            for _ in range(3000)]
    assert sps.ks_2samp(graph, tree).pvalue > 1e-3


def test_merged_seed_scaling_m1():
    # m = 1, alpha = 0, seed (1): merged seed degree scales like sqrt(pi n)
    rng = np.random.default_rng(42)
    rep = coupled_degree_limits([1], 1, 0.0, 10**5, 1000, rng, k_max=2)
    assert rep.merged_seed.mean() == pytest.approx(math.sqrt(math.pi), rel=0.05)


def test_symmetric_split_mean(rng):
    rep = coupled_degree_limits([1, 1], 2, 0.0, 2000, 2000, rng, k_max=2)
    assert abs(rep.split[:, 0].mean() - 0.5) < 4 * rep.split[:, 0].std() / math.sqrt(2000)


@pytest.mark.slow
def test_dirichlet_split_moments():
    rng = np.random.default_rng(43)
    seed, alpha = [1, 2, 1], 0.5
    rep = coupled_degree_limits(seed, 2, alpha, 10**4, 10**4, rng, k_max=1)
    mean, var = rep.split_moments()
    R = len(rep.split)
    for j in range(3):
        x = rep.split[:, j]
        assert abs(x.mean() - mean[j]) < 4 * x.std() / math.sqrt(R)
        # standard error of a sample variance, fourth moment estimated
        se_var = math.sqrt(max(np.mean((x - x.mean()) ** 4) - x.var() ** 2, 0) / R)
        assert abs(x.var() - var[j]) < 4 * se_var + 0.02 * var[j]
    # the directly grown graph shows the same split
    direct = np.array([grow_pa_graph(seed, 2, alpha, 10**4, rng).degrees()[:3] for _ in range(2000)])
    frac = direct / direct.sum(axis=1, keepdims=True)
    for j in range(3):
        assert abs(frac[:, j].mean() - mean[j]) < 4 * frac[:, j].std() / math.sqrt(2000)


@pytest.mark.slow
@pytest.mark.parametrize("alpha", [0.0, 1.0])
def test_max_degree_exponent(alpha):
    slope, _ = max_degree_exponent([1, 1], 2, alpha, [10**4, 10**5, 10**6], 10,
                                   np.random.default_rng(44))
    assert abs(slope - 1 / (2 + alpha / 2)) < 0.05


def test_edge_csv(tmp_path, rng):
    g = grow_pa_graph([1, 1], 2, 0.0, 4, rng)
    write_edge_csv(g, tmp_path / "e.csv")
    lines = (tmp_path / "e.csv").read_text().splitlines()
    assert lines[0] == "u,v"
    assert len(lines) == 1 + 6
