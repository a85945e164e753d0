"""Growth of weighted recursive trees and preferential attachment trees.

Vertices are labelled by arrival order ``1, ..., n``.  A tree is stored as
its parent array: ``tree.parent[i - 1]`` is the label of the parent of vertex
``i`` and ``tree.parent[0] == 0`` marks the root.  Children are ordered by
arrival, so the newest child is always the right-most one of the plane tree.

Both growth functions consume exactly one uniform per step from the third
vertex on, which makes growth prefix-stable: growing to ``n`` and then
extending to ``n' > n`` with the same generator gives the same tree as
growing to ``n'`` directly.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Sequence

import numpy as np

from . import _kernels
from .errors import ParameterError, RangeError
from .sequences import FitnessSequence, WeightSequence

__all__ = [
    "PlaneTree",
    "GrowthTrace",
    "grow_wrt",
    "extend_wrt",
    "grow_pat",
    "extend_pat",
    "degrees",
    "heights",
    "height",
    "mrca",
    "d_exp",
    "subtree_members",
    "sample_wrt_traces",
    "sample_pat_traces",
    "sample_mixture_traces",
    "write_tree_csv",
    "read_tree_csv",
    "write_trace_csv",
    "read_trace_csv",
]


@dataclass(frozen=True, eq=False)
class GrowthTrace:
    """Parent choices ``(K_2, ..., K_n)``; ``choices[0]`` is always 1."""

    choices: np.ndarray

    def __post_init__(self):
        c = np.ascontiguousarray(self.choices, dtype=np.int64)
        c.setflags(write=False)
        object.__setattr__(self, "choices", c)

    @property
    def n(self) -> int:
        return len(self.choices) + 1

    def as_tuple(self) -> tuple:
        return tuple(int(x) for x in self.choices)

    def __eq__(self, other):
        return isinstance(other, GrowthTrace) and np.array_equal(self.choices, other.choices)

    def __hash__(self):
        return hash(self.as_tuple())


class PlaneTree:
    """Recursive plane tree given by its parent array.

    Parameters
    ----------
    parent : array_like of int
        ``parent[i - 1]`` is the label of the parent of vertex ``i``; the
        first entry must be 0.  Labels satisfy ``parent[i - 1] < i``.

    Notes
    -----
    Instances are treated as immutable; derived arrays (heights, degrees,
    children) are computed once on first use.
    """

    __slots__ = ("parent", "__dict__")

    def __init__(self, parent: Sequence[int], validate: bool = True):
        p = np.ascontiguousarray(parent, dtype=np.int64)
        if validate:
            if p.ndim != 1 or len(p) == 0 or p[0] != 0:
                raise ParameterError("parent array must start with 0 for the root")
            labels = np.arange(2, len(p) + 1)
            if np.any(p[1:] < 1) or np.any(p[1:] >= labels):
                raise ParameterError("need 1 <= parent[i] < i for every i >= 2")
        p.setflags(write=False)
        self.parent = p

    @classmethod
    def from_trace(cls, trace: GrowthTrace) -> "PlaneTree":
        return cls(np.concatenate([[0], trace.choices]), validate=False)

    @property
    def n(self) -> int:
        return len(self.parent)

    def __len__(self) -> int:
        return len(self.parent)

    def __repr__(self) -> str:
        return f"PlaneTree(n={self.n}, height={self.height})"

    @property
    def trace(self) -> GrowthTrace:
        return GrowthTrace(self.parent[1:])

    @cached_property
    def heights(self) -> np.ndarray:
        h = _kernels.heights_from_parents(self.parent)
        h.setflags(write=False)
        return h

    @property
    def height(self) -> int:
        return int(self.heights.max())

    @cached_property
    def degrees(self) -> np.ndarray:
        d = np.bincount(self.parent[1:] - 1, minlength=self.n).astype(np.int64)
        d.setflags(write=False)
        return d

    @cached_property
    def _children_csr(self) -> tuple[np.ndarray, np.ndarray]:
        order = np.argsort(self.parent[1:], kind="stable") + 2
        offsets = np.concatenate([[0], np.cumsum(self.degrees)])
        return offsets, order

    def children(self, k: int) -> np.ndarray:
        """Children of vertex ``k`` from left to right (arrival order)."""
        self._check(k)
        offsets, order = self._children_csr
        return order[offsets[k - 1]:offsets[k]]

    def _check(self, k: int) -> None:
        if not 1 <= k <= self.n:
            raise RangeError(f"vertex {k} outside 1..{self.n}")

    def ulam_harris(self, k: int) -> tuple:
        """Word of child ranks from the root to vertex ``k`` (ranks from 1)."""
        self._check(k)
        word = []
        while k != 1:
            p = int(self.parent[k - 1])
            rank = int(np.searchsorted(self.children(p), k)) + 1
            word.append(rank)
            k = p
        return tuple(reversed(word))


# ---------------------------------------------------------------------------
# Weighted recursive trees
# ---------------------------------------------------------------------------


def _wrt_choices(weights: WeightSequence, m: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Parent of the vertex arriving when the tree has ``m`` vertices.

    Picks the smallest ``k`` with ``W_k > U W_m``, which has probability
    ``w_k / W_m``; zero-weight vertices are never picked.
    """
    if weights.is_finite:
        target = u * weights.W[m - 1]
        k = np.searchsorted(weights.W, target, side="right") + 1
    else:
        with np.errstate(divide="ignore"):
            target = np.log(u) + weights.log_W[m - 1]
        k = np.searchsorted(weights.log_W, target, side="right") + 1
    return np.minimum(k, m)


def grow_wrt(weights: WeightSequence, n: int, rng: np.random.Generator
             ) -> tuple[PlaneTree, GrowthTrace]:
    """Grow a weighted recursive tree with ``n`` vertices.

    The vertex arriving when the tree has ``m`` vertices attaches to ``u_k``
    with probability ``w_k / W_m``.  Choices are independent across steps, so
    all of them are drawn at once by binary search in the cumulative weights.

    Examples
    --------
    >>> from wrtlab.sequences import make_power_weights
    >>> tree, trace = grow_wrt(make_power_weights(1, 1, 10), 2, np.random.default_rng(0))
    >>> trace.as_tuple()
    (1,)
    """
    if n < 1:
        raise ParameterError("n must be at least 1")
    if n > weights.n_max:
        raise RangeError(f"weights only defined up to {weights.n_max}, need {n}")
    u = rng.random(max(n - 2, 0))
    choices = np.concatenate([np.ones(min(n - 1, 1), dtype=np.int64),
                              _wrt_choices(weights, np.arange(2, n), u)])
    trace = GrowthTrace(choices)
    return PlaneTree.from_trace(trace), trace


def extend_wrt(tree: PlaneTree, weights: WeightSequence, n: int,
               rng: np.random.Generator) -> tuple[PlaneTree, GrowthTrace]:
    """Continue the growth of ``tree`` up to ``n`` vertices."""
    if n <= tree.n:
        return tree, tree.trace
    if n > weights.n_max:
        raise RangeError(f"weights only defined up to {weights.n_max}, need {n}")
    start = max(tree.n, 2)
    head = tree.parent[1:]
    if tree.n == 1:
        head = np.ones(1, dtype=np.int64)
    u = rng.random(n - start)
    trace = GrowthTrace(np.concatenate([head, _wrt_choices(weights, np.arange(start, n), u)]))
    return PlaneTree.from_trace(trace), trace


# ---------------------------------------------------------------------------
# Preferential attachment trees
# ---------------------------------------------------------------------------


def _pat_run(a: np.ndarray, parent: np.ndarray, deg: np.ndarray, m0: int, n: int,
             rng: np.random.Generator) -> PlaneTree:
    u = rng.random(n - max(m0, 2)) if n > 2 else np.empty(0)
    _kernels.pat_grow(a, parent, deg, m0, n, u)
    return PlaneTree(parent, validate=False)


def grow_pat(fitness: FitnessSequence, n: int, rng: np.random.Generator
             ) -> tuple[PlaneTree, GrowthTrace]:
    """Grow a preferential attachment tree with fitnesses ``a``.

    The vertex arriving when the tree has ``m >= 2`` vertices attaches to
    ``u_k`` with probability proportional to ``a_k + deg(u_k)``, the total
    being ``A_m + m - 1``.  The second vertex always attaches to the root.
    Sampling weights live in a Fenwick tree, so each step costs
    ``O(log n)``.  Weights are floored at zero, which only matters for a
    negative ``a_1`` before the root has a child (the forced second step).

    Examples
    --------
    >>> from wrtlab.sequences import make_constant_fitness
    >>> tree, _ = grow_pat(make_constant_fitness(1, 0, 6), 6, np.random.default_rng(1))
    >>> tree.degrees.tolist()
    [5, 0, 0, 0, 0, 0]
    """
    if n < 1:
        raise ParameterError("n must be at least 1")
    a = fitness.values(n)
    parent = np.zeros(n, dtype=np.int64)
    deg = np.zeros(n, dtype=np.int64)
    tree = _pat_run(a, parent, deg, 1, n, rng)
    return tree, tree.trace


def extend_pat(tree: PlaneTree, fitness: FitnessSequence, n: int,
               rng: np.random.Generator) -> tuple[PlaneTree, GrowthTrace]:
    """Continue a preferential attachment tree up to ``n`` vertices."""
    if n <= tree.n:
        return tree, tree.trace
    a = fitness.values(n)
    parent = np.zeros(n, dtype=np.int64)
    parent[:tree.n] = tree.parent
    deg = np.zeros(n, dtype=np.int64)
    deg[:tree.n] = tree.degrees
    out = _pat_run(a, parent, deg, tree.n, n, rng)
    return out, out.trace


# ---------------------------------------------------------------------------
# Queries
# ---------------------------------------------------------------------------


def degrees(tree: PlaneTree) -> np.ndarray:
    """Out-degree (number of children) of every vertex, in arrival order."""
    return tree.degrees


def heights(tree: PlaneTree) -> np.ndarray:
    """Graph distance of every vertex to the root."""
    return tree.heights


def height(tree: PlaneTree) -> int:
    """Largest vertex height."""
    return tree.height


def mrca(tree: PlaneTree, i: int, j: int) -> int:
    """Most recent common ancestor of vertices ``i`` and ``j``.

    A vertex counts as its own ancestor, so ``mrca(tree, i, i) == i``.
    """
    tree._check(i)
    tree._check(j)
    p = tree.parent
    while i != j:
        # parents carry smaller labels, so the larger label is never the
        # ancestor of the smaller one
        if i > j:
            i = int(p[i - 1])
        else:
            j = int(p[j - 1])
    return i


def d_exp(tree: PlaneTree, i: int, j: int) -> float:
    """Ultrametric ``exp(-ht(mrca(i, j)))``, zero on the diagonal."""
    if i == j:
        tree._check(i)
        return 0.0
    return math.exp(-int(tree.heights[mrca(tree, i, j) - 1]))


def subtree_members(tree: PlaneTree, k: int) -> np.ndarray:
    """Labels of the vertices in the subtree rooted at ``k`` (``k`` included)."""
    tree._check(k)
    return np.flatnonzero(_kernels.subtree_mask(tree.parent, k)) + 1


# ---------------------------------------------------------------------------
# Many small traces at once
# ---------------------------------------------------------------------------


def sample_wrt_traces(weights: WeightSequence, n: int, replicates: int,
                      rng: np.random.Generator) -> np.ndarray:
    """``replicates`` independent traces of size ``n`` (rows of ``K_2..K_n``)."""
    if n > weights.n_max:
        raise RangeError("weights too short")
    u = rng.random((replicates, max(n - 2, 0)))
    out = np.ones((replicates, n - 1), dtype=np.int64)
    for j in range(n - 2):
        out[:, j + 1] = _wrt_choices(weights, np.full(replicates, j + 2), u[:, j])
    return out


def sample_pat_traces(fitness: FitnessSequence, n: int, replicates: int,
                      rng: np.random.Generator) -> np.ndarray:
    """Independent preferential attachment traces, vectorized over replicates.

    Meant for small ``n`` (the state is a ``replicates x n`` matrix).
    """
    a = fitness.values(n)
    out = np.ones((replicates, max(n - 1, 0)), dtype=np.int64)
    if n <= 2:
        return out
    wt = np.zeros((replicates, n))
    wt[:, 0] = a[0] + 1.0
    wt[:, 1] = a[1]
    rows = np.arange(replicates)
    u = rng.random((replicates, n - 2))
    for m in range(2, n):
        cum = np.cumsum(wt[:, :m], axis=1)
        x = u[:, m - 2] * cum[:, -1]
        k = (cum <= x[:, None]).sum(axis=1)
        k = np.minimum(k, m - 1)
        out[:, m - 1] = k + 1
        wt[rows, k] += 1.0
        wt[:, m] = a[m]
    return out


def sample_mixture_traces(fitness: FitnessSequence, n: int, replicates: int,
                          rng: np.random.Generator) -> np.ndarray:
    """Traces of recursive trees grown with fresh Beta-product weights each.

    Every replicate samples its own ``beta_1, ..., beta_{n-1}`` and then a
    weighted recursive tree with the induced weights.  The result has the
    same law as :func:`sample_pat_traces`.
    """
    out = np.ones((replicates, max(n - 1, 0)), dtype=np.int64)
    if n <= 2:
        return out
    a = fitness.values(n)
    A = np.cumsum(a)
    k = np.arange(1, n)
    x = rng.standard_gamma(np.broadcast_to(A[k - 1] + k, (replicates, n - 1)))
    y = rng.standard_gamma(np.broadcast_to(a[k], (replicates, n - 1)))
    x = np.maximum(x, np.finfo(np.float64).tiny)
    log_beta = np.log(x) - np.log(x + y)
    log_W = np.concatenate([np.zeros((replicates, 1)), -np.cumsum(log_beta, axis=1)], axis=1)
    W = np.exp(log_W)
    u = rng.random((replicates, n - 2))
    for m in range(2, n):
        target = u[:, m - 2] * W[:, m - 1]
        kk = (W[:, :m] <= target[:, None]).sum(axis=1)
        out[:, m - 1] = np.minimum(kk, m - 1) + 1
    return out


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def write_tree_csv(tree: PlaneTree, path: str | Path) -> None:
    """Write the parent list as ``i,parent`` rows (root has empty parent)."""
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["i", "parent"])
        out.writerow([1, ""])
        for i in range(2, tree.n + 1):
            out.writerow([i, int(tree.parent[i - 1])])


def read_tree_csv(path: str | Path) -> PlaneTree:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    parent = [0 if r["parent"] in ("", None) else int(r["parent"]) for r in rows]
    return PlaneTree(parent)


def write_trace_csv(trace: GrowthTrace, path: str | Path) -> None:
    """Write ``step,choice`` rows, ``step`` being the size after the step."""
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["step", "choice"])
        for j, c in enumerate(trace.choices):
            out.writerow([j + 2, int(c)])


def read_trace_csv(path: str | Path) -> GrowthTrace:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return GrowthTrace(np.array([int(r["choice"]) for r in rows], dtype=np.int64))
