"""The ``(m, alpha)`` preferential attachment multigraph.

Starting from a seed graph with degrees ``d_1, ..., d_k``, every arriving
vertex sends ``m`` edges, one after the other, to existing vertices chosen
with probability proportional to ``alpha + deg``.  Degrees are updated after
each edge and the newcomer is not a candidate for its own edges.

The graph is a preferential attachment tree in disguise: with fitnesses
``(w(S), 0^{m-1}, m + alpha, 0^{m-1}, m + alpha, ...)``, where
``w(S) = d_1 + ... + d_k + k alpha``, merging each ``m + alpha`` vertex with
the ``m - 1`` zero-fitness vertices before it (and all seed vertices into
one) gives the graph with merged seed.  Inside the seed, edges are split by
a Pólya urn started at ``d_j + alpha``, whence a Dirichlet split.
"""
from __future__ import annotations

import csv
import math
import time
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

from . import _kernels
from .errors import ParameterError
from .oracle import pat_trace_probability
from .sequences import FitnessSequence, make_constant_fitness, make_periodic_fitness
from .trees import grow_pat

__all__ = [
    "MultiGraph",
    "CoupledDegreeReport",
    "CouplingCertificate",
    "grow_pa_graph",
    "pagraph_fitness",
    "merged_degrees_from_pat",
    "coupled_degree_limits",
    "max_degree_exponent",
    "certify_pagraph_coupling",
    "write_edge_csv",
]

MAX_CERTIFICATION = 4


def _check_params(seed_degrees: Sequence[float], m: int, alpha: float) -> np.ndarray:
    d = np.asarray(seed_degrees, dtype=np.float64)
    if d.ndim != 1 or len(d) == 0:
        raise ParameterError("the seed needs at least one vertex")
    if np.any(d < 0) or np.any(d != np.round(d)):
        raise ParameterError("seed degrees must be nonnegative integers")
    if int(m) != m or m < 1:
        raise ParameterError("m must be a positive integer")
    if not alpha > -m:
        raise ParameterError("alpha must exceed -m")
    if np.any(alpha + d <= 0):
        raise ParameterError("alpha + d_i must be positive for every seed vertex")
    return d


@dataclass(frozen=True, eq=False)
class MultiGraph:
    """Multigraph grown from a seed.

    Vertices ``1..k`` are the seed and arrival ``v_i`` (``i >= 2``) has label
    ``k + i - 1``.  Only the ``m (n - 1)`` edges created by arrivals are
    stored; the seed enters through ``seed_degrees``.
    """

    seed_degrees: np.ndarray
    m: int
    alpha: float
    n: int
    edges: np.ndarray

    @property
    def k(self) -> int:
        return len(self.seed_degrees)

    @property
    def num_vertices(self) -> int:
        return self.k + self.n - 1

    def degrees(self, n: int | None = None) -> np.ndarray:
        """Degrees after ``n`` arrivals counted from ``v_1`` (default: all)."""
        n = self.n if n is None else int(n)
        if not 1 <= n <= self.n:
            raise ParameterError("n out of range")
        V = self.k + n - 1
        e = self.edges[: self.m * (n - 1)]
        deg = np.bincount(e.ravel(), minlength=V + 1)[1:].astype(np.float64)
        deg[: self.k] += self.seed_degrees
        return deg

    def merged_degrees(self, n: int | None = None) -> np.ndarray:
        """Degrees with the seed merged: ``(sum of seed degrees, deg v_2, ...)``."""
        deg = self.degrees(n)
        return np.concatenate([[deg[: self.k].sum()], deg[self.k:]])


def grow_pa_graph(seed_degrees: Sequence[float], m: int, alpha: float, n: int,
                  rng: np.random.Generator) -> MultiGraph:
    """Grow the ``(m, alpha)`` multigraph up to arrival ``v_n``.

    One uniform is consumed per edge.

    Examples
    --------
    >>> g = grow_pa_graph([1, 1], 2, 0.0, 1, np.random.default_rng(0))
    >>> g.edges.shape
    (0, 2)
    """
    d = _check_params(seed_degrees, m, alpha)
    if n < 1:
        raise ParameterError("n must be at least 1")
    m = int(m)
    u = rng.random(m * (n - 1))
    targets = _kernels.pa_graph_grow(d, m, float(alpha), int(n), u)
    k = len(d)
    sources = np.repeat(np.arange(k + 1, k + n), m)
    return MultiGraph(d, m, float(alpha), int(n), np.stack([sources, targets], axis=1))


def pagraph_fitness(seed_degrees: Sequence[float], m: int, alpha: float,
                    n_max: int = 1) -> FitnessSequence:
    """Fitness ``(w(S), 0^{m-1}, m + alpha, 0^{m-1}, m + alpha, ...)``.

    Integer ``alpha`` gives a periodic fitness (``m = 1``: constant fitness).
    """
    d = _check_params(seed_degrees, m, alpha)
    m = int(m)
    wS = float(d.sum() + len(d) * alpha)
    if m == 1:
        return make_constant_fitness(wS, 1 + alpha, n_max)
    pattern = (0,) * (m - 1) + (m + alpha,)
    if float(alpha) == int(alpha):
        return make_periodic_fitness(wS, [int(x) for x in pattern], n_max)
    return FitnessSequence((wS,), pattern, n_max, "explicit")


def _group_of(N: int, m: int) -> np.ndarray:
    """Graph index (1 = merged seed, ``i`` = ``v_i``) of each tree vertex."""
    v = np.arange(1, N + 1)
    g = (v - 2) // m + 2
    g[0] = 1
    return g


def merged_degrees_from_pat(parent: np.ndarray, seed_degrees: Sequence[float],
                            m: int, n: int) -> np.ndarray:
    """Merged graph degrees read off a tree with ``1 + m (n - 1)`` vertices."""
    N = 1 + m * (n - 1)
    parent = np.asarray(parent)[:N]
    g = _group_of(N, m)
    children = np.bincount(g[parent[1:] - 1], minlength=n + 1)[1:].astype(np.float64)
    base = np.full(n, float(m))
    base[0] = float(np.sum(seed_degrees))
    return base + children


@dataclass(frozen=True)
class CoupledDegreeReport:
    """Scaled degrees of the multigraph obtained through the tree coupling.

    ``scaled`` holds ``n^{-1/(2 + alpha/m)}`` times the degrees of the seed
    vertices followed by ``v_2, v_3, ...`` (first ``k_max`` arrivals);
    ``split`` holds the seed fractions, which converge to
    ``Dir(d_1 + alpha, ..., d_k + alpha)``.  ``time_change`` is
    ``m^{m/(2m+alpha)}``, the ratio between graph-scaled and tree-scaled
    degrees.
    """

    n: int
    m: int
    alpha: float
    exponent: float
    time_change: float
    scaled: np.ndarray
    merged_seed: np.ndarray
    split: np.ndarray
    dirichlet: np.ndarray

    def split_moments(self) -> tuple[np.ndarray, np.ndarray]:
        """Mean and variance of ``Dir(d + alpha)``."""
        a = self.dirichlet
        a0 = a.sum()
        mean = a / a0
        return mean, mean * (1 - mean) / (a0 + 1)


def coupled_degree_limits(seed_degrees: Sequence[float], m: int, alpha: float, n: int,
                          replicates: int, rng: np.random.Generator,
                          k_max: int = 10) -> CoupledDegreeReport:
    """Degrees of the multigraph sampled through the preferential attachment tree.

    Every replicate grows a tree with :func:`pagraph_fitness` and
    ``1 + m (n - 1)`` vertices, merges blocks of ``m`` vertices, and splits
    the edges received by the seed among its vertices with a Pólya urn
    started at ``d_j + alpha``.
    """
    d = _check_params(seed_degrees, m, alpha)
    m = int(m)
    k = len(d)
    N = 1 + m * (n - 1)
    fit = pagraph_fitness(d, m, alpha, N)
    exponent = 1.0 / (2.0 + alpha / m)
    scale = n ** -exponent
    k_max = min(k_max, n - 1)
    scaled = np.empty((replicates, k + k_max))
    merged = np.empty(replicates)
    split = np.empty((replicates, k))
    for r in range(replicates):
        tree, _ = grow_pat(fit, N, rng)
        md = merged_degrees_from_pat(tree.parent, d, m, n)
        received = int(round(md[0] - d.sum()))
        counts = d + alpha
        # Pólya urn over the seed vertices, drawn as a Dirichlet-multinomial
        extra = np.zeros(k)
        if k > 1 and received > 0:
            p = rng.dirichlet(counts)
            extra = rng.multinomial(received, p).astype(np.float64)
        elif received > 0:
            extra[0] = received
        seed_deg = d + extra
        merged[r] = md[0] * scale
        split[r] = seed_deg / seed_deg.sum()
        scaled[r, :k] = seed_deg * scale
        scaled[r, k:] = md[1:1 + k_max] * scale
    return CoupledDegreeReport(n, m, float(alpha), exponent,
                               m ** (m / (2 * m + alpha)), scaled, merged, split, d + alpha)


def max_degree_exponent(seed_degrees: Sequence[float], m: int, alpha: float,
                        n_values: Sequence[int], replicates: int,
                        rng: np.random.Generator) -> tuple[float, np.ndarray]:
    """Slope of ``log mean max degree`` against ``log n``.

    One graph per replicate is grown to ``max(n_values)`` and read at every
    smaller ``n`` as well.  Returns the slope and the mean maxima.
    """
    n_values = sorted(int(x) for x in n_values)
    maxima = np.empty((replicates, len(n_values)))
    for r in range(replicates):
        g = grow_pa_graph(seed_degrees, m, alpha, n_values[-1], rng)
        for j, n in enumerate(n_values):
            maxima[r, j] = g.degrees(n).max()
    mean = maxima.mean(axis=0)
    slope = np.polyfit(np.log(n_values), np.log(mean), 1)[0]
    return float(slope), mean


# ---------------------------------------------------------------------------
# Exact certificate
# ---------------------------------------------------------------------------


def _graph_outcomes(d: np.ndarray, m: int, alpha: float, n: int) -> dict:
    """Law of the merged degree sequence by enumerating every edge target."""
    k = len(d)
    out: dict = defaultdict(float)

    def rec(deg: list, live: int, arrival: int, edge: int, prob: float):
        if arrival > n:
            key = (round(sum(deg[:k]), 9),) + tuple(round(x, 9) for x in deg[k:])
            out[key] += prob
            return
        if edge == m:
            deg.append(float(m))
            rec(deg, live + 1, arrival + 1, 0, prob)
            deg.pop()
            return
        total = sum(alpha + x for x in deg[:live])
        for v in range(live):
            p = (alpha + deg[v]) / total
            if p <= 0:
                continue
            deg[v] += 1
            rec(deg, live, arrival, edge + 1, prob * p)
            deg[v] -= 1

    rec([float(x) for x in d], k, 2, 0, 1.0)
    return dict(out)


def _positive_pat_traces(fitness: FitnessSequence, N: int) -> Iterator[tuple]:
    """Traces of size ``N`` that avoid zero-weight parents."""
    a = fitness.values(N)

    def rec(trace: list, deg: list):
        size = len(trace) + 1
        if size == N:
            yield tuple(trace)
            return
        for k in range(1, size + 1):
            if size >= 2 and a[k - 1] + deg[k - 1] <= 0:
                continue
            trace.append(k)
            deg[k - 1] += 1
            yield from rec(trace, deg)
            deg[k - 1] -= 1
            trace.pop()

    yield from rec([], [0] * N)


def _tree_outcomes(fitness: FitnessSequence, d: np.ndarray, m: int, n: int) -> dict:
    """Law of the merged degree sequence from preferential attachment traces."""
    N = 1 + m * (n - 1)
    g = _group_of(N, m)
    out: dict = defaultdict(float)
    for trace in _positive_pat_traces(fitness, N):
        p = pat_trace_probability(fitness, trace)
        if p == 0.0:
            continue
        parent = np.concatenate([[0], trace])
        md = merged_degrees_from_pat(parent, d, m, n)
        key = tuple(round(float(x), 9) for x in md)
        out[key] += p
    return dict(out)


@dataclass
class CouplingCertificate:
    """Comparison of the merged degree laws of the graph and the tree."""

    seed_degrees: list
    m: int
    alpha: float
    n: int
    max_abs_diff: float
    graph_total: float
    tree_total: float
    outcomes: int
    passed: bool
    elapsed: float
    table: dict = field(default_factory=dict, repr=False)

    def to_json(self) -> dict:
        return {"seed_degrees": self.seed_degrees, "m": self.m, "alpha": self.alpha,
                "n": self.n, "max_abs_diff": self.max_abs_diff,
                "graph_total": self.graph_total, "tree_total": self.tree_total,
                "outcomes": self.outcomes, "pass": bool(self.passed),
                "elapsed_seconds": self.elapsed}


def certify_pagraph_coupling(seed_degrees: Sequence[float], m: int, alpha: float,
                             n: int, tol: float = 1e-10) -> CouplingCertificate:
    """Exact check that graph and merged tree give the same merged degrees.

    The graph side enumerates every sequence of edge targets; the tree side
    enumerates preferential attachment traces of size ``1 + m (n - 1)`` with
    :func:`pagraph_fitness` and merges blocks.  Both laws of the merged
    degree sequence must agree to ``tol``.
    """
    d = _check_params(seed_degrees, m, alpha)
    if n < 1 or n > MAX_CERTIFICATION:
        raise ParameterError(f"certification needs 1 <= n <= {MAX_CERTIFICATION}")
    m = int(m)
    t0 = time.perf_counter()
    N = 1 + m * (n - 1)
    fit = pagraph_fitness(d, m, alpha, N)
    graph = _graph_outcomes(d, m, float(alpha), n)
    tree = _tree_outcomes(fit, d, m, n)
    keys = set(graph) | set(tree)
    diff = max((abs(graph.get(key, 0.0) - tree.get(key, 0.0)) for key in keys), default=0.0)
    gt, tt = sum(graph.values()), sum(tree.values())
    passed = bool(diff <= tol and abs(gt - 1) <= tol and abs(tt - 1) <= tol)
    table = {key: (graph.get(key, 0.0), tree.get(key, 0.0)) for key in sorted(keys)}
    return CouplingCertificate([float(x) for x in d], m, float(alpha), n, diff, gt, tt,
                               len(keys), passed, time.perf_counter() - t0, table)


def write_edge_csv(graph: MultiGraph, path: str | Path) -> None:
    """Write the edges created by arrivals as ``u,v`` rows."""
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["u", "v"])
        for u, v in graph.edges:
            out.writerow([int(u), int(v)])
