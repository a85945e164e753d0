"""Pólya urns: time-dependent reinforcement, nested urns and immigration.

Three urn schemes appear around recursive trees:

* the time-dependent urn, where the ``n``-th draw adds ``s_n`` balls of the
  drawn colour; the mass of a subtree of a weighted recursive tree evolves
  this way with ``s_n = w_n``;
* a family of nested urns, one per vertex, whose downward pass reproduces
  preferential attachment; replacing every urn by coins with a Beta
  distributed bias gives the Beta-product weights;
* the urn with immigration, which adds ``a_n`` white balls at time ``n``;
  its red count is ``a_1 + deg(u_1)`` in a preferential attachment tree.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import _kernels
from .errors import ParameterError
from .sequences import FitnessSequence, sample_beta_coupling
from .trees import GrowthTrace, PlaneTree, grow_pat

__all__ = [
    "UrnTrajectory",
    "run_time_dependent_urn",
    "grow_pat_via_urns",
    "immigration_events",
    "run_immigration_urn",
    "immigration_from_tree",
    "immigration_fluctuation_samples",
    "write_urn_csv",
]


@dataclass(frozen=True, eq=False)
class UrnTrajectory:
    """Red and total mass over time.

    ``red`` and ``total`` are 1-d for a single run and ``(replicates, T)``
    when several runs are stored together; ``times`` is shared.
    """

    times: np.ndarray
    red: np.ndarray
    total: np.ndarray

    @property
    def proportion(self) -> np.ndarray:
        return self.red / self.total

    @property
    def final_proportion(self) -> np.ndarray | float:
        return self.proportion[..., -1]


def _weight_stream(s, start: int, N: int) -> np.ndarray:
    if callable(s):
        vals = np.array([s(n) for n in range(start + 1, start + N + 1)], dtype=np.float64)
    elif np.isscalar(s):
        vals = np.full(N, float(s))
    else:
        vals = np.asarray(s, dtype=np.float64)[:N]
        if len(vals) < N:
            raise ParameterError(f"weight stream has {len(vals)} terms, need {N}")
    if np.any(vals < 0):
        raise ParameterError("weights must be nonnegative")
    return vals


def run_time_dependent_urn(a: float, b: float, start_k: int,
                           s: Sequence[float] | Callable[[int], float] | float,
                           N: int, rng: np.random.Generator,
                           replicates: int | None = None,
                           record: str = "all") -> UrnTrajectory:
    """Time-dependent Pólya urn started at time ``start_k``.

    Parameters
    ----------
    a, b : float
        Initial red and black masses (nonnegative, ``a + b > 0``).
    start_k : int
        Time label of the initial state.
    s : array_like, callable or float
        Reinforcements ``s_{k+1}, ..., s_{k+N}``; a callable receives the
        time ``n`` and a float means a constant stream.
    N : int
        Number of draws.
    replicates : int, optional
        Run this many independent urns at once (vectorized).
    record : {"all", "final"}
        Keep the whole path or only the initial and final states.

    Returns
    -------
    UrnTrajectory
        ``times`` runs from ``start_k`` to ``start_k + N``.
    """
    if a < 0 or b < 0 or not a + b > 0:
        raise ParameterError("need a, b >= 0 with a + b > 0")
    svals = _weight_stream(s, start_k, N)
    shape = () if replicates is None else (replicates,)
    red = np.full(shape, float(a))
    total = np.full(shape, float(a + b))
    keep_all = record == "all"
    reds = [red.copy()]
    tots = [total.copy()]
    for n in range(N):
        u = rng.random(shape)
        is_red = u * total < red
        red = red + np.where(is_red, svals[n], 0.0)
        total = total + svals[n]
        if keep_all:
            reds.append(red.copy())
            tots.append(total.copy())
    if not keep_all:
        reds.append(red)
        tots.append(total)
        times = np.array([start_k, start_k + N])
    else:
        times = np.arange(start_k, start_k + N + 1)
    return UrnTrajectory(times, np.stack(reds, axis=-1), np.stack(tots, axis=-1))


def grow_pat_via_urns(fitness: FitnessSequence, n: int, rng: np.random.Generator,
                      mode: str = "exchangeable") -> tuple[PlaneTree, GrowthTrace]:
    """Preferential attachment tree grown through nested urns.

    The newcomer first decides whether its parent is the newest vertex, then
    the one before, and so on.  Each decision is a draw from the urn of that
    vertex (``mode="exchangeable"``) or a coin with bias ``beta_k`` sampled
    once per vertex (``mode="definetti"``).  Both give the preferential
    attachment law.

    The downward pass costs ``O(m - parent)`` per step, so total work is
    quadratic in ``n`` for sequences where old vertices attract most
    newcomers; use :func:`wrtlab.trees.grow_pat` for large trees.
    """
    if n < 1:
        raise ParameterError("n must be at least 1")
    a = fitness.values(max(n, 2))
    A = np.cumsum(a)
    if mode == "exchangeable":
        betas = np.ones(1)
        definetti = False
    elif mode == "definetti":
        betas = sample_beta_coupling(fitness, max(n, 2), rng).betas
        definetti = True
    else:
        raise ParameterError(f"unknown mode {mode!r}")
    parent = _kernels.nested_urn_grow(a, A, n, np.ascontiguousarray(betas), definetti, rng)
    tree = PlaneTree(parent, validate=False)
    return tree, tree.trace


# ---------------------------------------------------------------------------
# Urn with immigration
# ---------------------------------------------------------------------------


def immigration_events(fitness: FitnessSequence, n: int, rng: np.random.Generator,
                       method: str = "auto") -> np.ndarray:
    """Arrival times ``t <= n`` of the vertices that attach to ``u_1``.

    ``method="skip"`` (constant fitness with ``b > 0``) jumps directly from
    one attachment to the next by inverting a Gamma-ratio survival function;
    ``"step"`` draws one Bernoulli per arrival and works for any fitness.
    ``"auto"`` picks ``skip`` when it applies.
    """
    constant = len(fitness.head) == 1 and len(fitness.pattern) == 1 and fitness.pattern[0] > 0
    if method == "auto":
        method = "skip" if constant else "step"
    if method == "skip":
        if not constant:
            raise ParameterError("the skip sampler needs constant fitness with b > 0")
        return _kernels.immigration_events_skip(fitness.head[0], fitness.pattern[0], n, rng)
    if method == "step":
        return _kernels.immigration_events_step(fitness.values(max(n, 2)), n, rng)
    raise ParameterError(f"unknown method {method!r}")


def _trajectory_from_events(fitness: FitnessSequence, events: np.ndarray, n: int) -> UrnTrajectory:
    times = np.arange(1, n + 1)
    red = fitness.head[0] + np.searchsorted(events, times, side="right").astype(np.float64)
    A = np.cumsum(fitness.values(n))
    total = A + times - 1.0
    return UrnTrajectory(times, red, total)


def run_immigration_urn(fitness: FitnessSequence, n: int, rng: np.random.Generator,
                        method: str = "auto") -> UrnTrajectory:
    """Pólya urn with immigration driven by ``fitness``.

    Starts at time 1 with ``a_1`` red balls; at time ``t`` a drawn ball is
    returned with one copy and ``a_t`` white balls immigrate.  The red count
    is ``R_t = a_1 + deg(u_1)`` of a preferential attachment tree and the
    total is ``A_t + t - 1``.

    ``method="tree"`` grows the whole tree with :func:`wrtlab.trees.grow_pat`
    and reads off the root degree; the other methods simulate the red count
    alone (see :func:`immigration_events`).
    """
    if n < 1:
        raise ParameterError("n must be at least 1")
    if method == "tree":
        tree, _ = grow_pat(fitness, n, rng)
        return immigration_from_tree(tree, fitness)
    return _trajectory_from_events(fitness, immigration_events(fitness, n, rng, method), n)


def immigration_from_tree(tree: PlaneTree, fitness: FitnessSequence) -> UrnTrajectory:
    """Red counts ``a_1 + deg(u_1)`` along the growth of ``tree``."""
    events = np.flatnonzero(tree.parent == 1) + 1
    return _trajectory_from_events(fitness, events, tree.n)


def immigration_fluctuation_samples(fitness: FitnessSequence, c: float, n: int,
                                    horizon_mult: int, replicates: int,
                                    rng: np.random.Generator, method: str = "auto") -> np.ndarray:
    """Standardized distances to the limit of ``D_t = t^{-1/(c+1)} R_t``.

    For every replicate one trajectory is run to ``H = n * horizon_mult`` and
    ``n^{1/(2(c+1))} (D_H - D_n) / sqrt(D_n)`` is returned.  ``D_H`` stands
    in for the limit, so the variance is biased low: the missing part of the
    fluctuations is a fraction ``horizon_mult^{-1/(c+1)}`` of the total
    (0.1 for ``c = 1`` and ``horizon_mult = 100``).
    """
    if not c > 0:
        raise ParameterError("c must be positive")
    if horizon_mult < 10:
        raise ParameterError("horizon_mult must be at least 10")
    H = n * horizon_mult
    e = 1.0 / (c + 1)
    a1 = fitness.head[0]
    out = np.empty(replicates)
    for i in range(replicates):
        ev = immigration_events(fitness, H, rng, method)
        Rn = a1 + np.searchsorted(ev, n, side="right")
        RH = a1 + len(ev)
        Dn = Rn * n ** -e
        DH = RH * H ** -e
        out[i] = n ** (e / 2) * (DH - Dn) / np.sqrt(Dn)
    return out


def write_urn_csv(rows: Sequence[tuple], path: str | Path) -> None:
    """Write ``replicate,n,red,total`` rows."""
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["replicate", "n", "red", "total"])
        for r in rows:
            out.writerow([int(r[0]), int(r[1]), repr(float(r[2])), repr(float(r[3]))])
