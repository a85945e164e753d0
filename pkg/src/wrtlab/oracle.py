"""Exact trace probabilities for small trees.

A trace ``(K_2, ..., K_n)`` lists the parent of every arriving vertex.  Its
probability can be computed in closed form under

* preferential attachment with fitnesses ``a`` (sequential product),
* a recursive tree with deterministic weights ``w``,
* a recursive tree whose weights are the random Beta products of the
  coupling, averaged over the Beta variables.

For the last one, the vertex arriving at size ``m`` picks ``u_k`` with
probability ``beta_{m-1} ... beta_k (1 - beta_{k-1})`` (``beta_0 = 0``), so
a whole trace is a monomial ``prod_j beta_j^{p_j} (1 - beta_j)^{q_j}`` whose
expectation factorizes into Beta mixed moments.  :func:`certify_theorem1`
compares the first and the last route over every trace.
"""
from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import ParameterError
from .limits import beta_mixed_moment
from .sequences import FitnessSequence, WeightSequence

__all__ = [
    "TraceProbability",
    "CertificateReport",
    "enumerate_traces",
    "pat_trace_probability",
    "wrt_mixture_trace_probability",
    "mixture_exponents",
    "wrt_trace_probability",
    "urn_trace_probability",
    "certify_theorem1",
]

MAX_ENUMERATION = 8
MAX_CERTIFICATION = 6


def _as_tuple(trace) -> tuple:
    if hasattr(trace, "as_tuple"):
        return trace.as_tuple()
    return tuple(int(x) for x in trace)


def _check_trace(trace: tuple) -> None:
    for m, k in enumerate(trace, start=1):
        if not 1 <= k <= m:
            raise ParameterError(f"choice {k} invalid when the tree has {m} vertices")


def enumerate_traces(n: int) -> Iterator[tuple]:
    """All ``(n-1)!`` traces of trees with ``n`` vertices.

    Raises
    ------
    ParameterError
        For ``n > 8``; the count grows factorially.
    """
    if n < 1:
        raise ParameterError("n must be at least 1")
    if n > MAX_ENUMERATION:
        raise ParameterError(f"refusing to enumerate {math.factorial(n - 1)} traces (n > {MAX_ENUMERATION})")
    return itertools.product(*[range(1, m + 1) for m in range(1, n)])


@dataclass(frozen=True)
class TraceProbability:
    trace: tuple
    p_pat: float
    p_wrt_mixture: float


def pat_trace_probability(fitness: FitnessSequence, trace) -> float:
    """Probability of ``trace`` under preferential attachment.

    The vertex arriving at size ``m >= 2`` picks ``u_k`` with probability
    ``(a_k + deg(u_k)) / (A_m + m - 1)``; the first step is forced.
    """
    trace = _as_tuple(trace)
    _check_trace(trace)
    n = len(trace) + 1
    a = fitness.values(n)
    deg = [0] * n
    prob = 1.0
    total = a[0]
    for m, k in enumerate(trace, start=1):
        if m >= 2:
            prob *= max(a[k - 1] + deg[k - 1], 0.0) / total
            if prob == 0.0:
                return 0.0
        deg[k - 1] += 1
        total += 1 + a[m]
    return prob


def mixture_exponents(trace) -> tuple[np.ndarray, np.ndarray]:
    """Exponents ``(p_j, q_j)`` of ``beta_j`` and ``1 - beta_j`` in a trace.

    Index ``j`` runs from 1 to ``n - 1`` (stored at ``j - 1``).
    """
    trace = _as_tuple(trace)
    n = len(trace) + 1
    p = np.zeros(max(n - 1, 0), dtype=np.int64)
    q = np.zeros(max(n - 1, 0), dtype=np.int64)
    for m, k in enumerate(trace, start=1):
        # beta_k ... beta_{m-1}
        p[k - 1:m - 1] += 1
        if k >= 2:
            q[k - 2] += 1
    return p, q


def wrt_mixture_trace_probability(fitness: FitnessSequence, trace) -> float:
    """Probability of ``trace`` for a recursive tree with Beta-product weights.

    Averages ``prod_steps w_K / W_m`` over independent
    ``beta_j ~ Beta(A_j + j, a_{j+1})``.
    """
    trace = _as_tuple(trace)
    _check_trace(trace)
    n = len(trace) + 1
    p, q = mixture_exponents(trace)
    a = fitness.values(n)
    A = np.cumsum(a)
    prob = 1.0
    for j in range(1, n):
        prob *= beta_mixed_moment(A[j - 1] + j, a[j], int(p[j - 1]), int(q[j - 1]))
        if prob == 0.0:
            break
    return prob


def wrt_trace_probability(weights: WeightSequence, trace) -> float:
    """``prod_m w_{K_{m+1}} / W_m`` for deterministic weights."""
    trace = _as_tuple(trace)
    _check_trace(trace)
    n = len(trace) + 1
    # the last step reads W_{n-1}, so w_n is never needed
    if n - 1 > weights.n_max:
        raise ParameterError("weights too short for this trace")
    log_p = 0.0
    for m, k in enumerate(trace, start=1):
        lw = weights.log_w[k - 1]
        if lw == -np.inf:
            return 0.0
        log_p += lw - weights.log_W[m - 1]
    return math.exp(log_p)


def urn_trace_probability(fitness: FitnessSequence, trace, mode: str = "exchangeable") -> float:
    """Probability of ``trace`` under the nested-urn construction.

    Urn ``k`` is created when ``u_{k+1}`` arrives with red mass ``A_k + k``
    and total mass ``A_{k+1} + k``.  A newcomer starts at the urn just below
    the current size and moves down while it draws red; a white draw at urn
    ``k`` makes it a child of ``u_{k+1}``.

    ``exchangeable`` follows the urn compositions draw by draw.  ``definetti``
    replaces urn ``k`` by coin flips of a Beta-distributed bias and averages
    over the biases, so it is computed through exponent bookkeeping.
    """
    trace = _as_tuple(trace)
    _check_trace(trace)
    n = len(trace) + 1
    a = fitness.values(n)
    A = np.cumsum(a)
    if mode == "exchangeable":
        red = np.zeros(n)
        tot = np.zeros(n)
        prob = 1.0
        for m, k in enumerate(trace, start=1):
            if m >= 2:
                for j in range(m - 1, k - 1, -1):
                    prob *= red[j - 1] / tot[j - 1]
                    red[j - 1] += 1
                    tot[j - 1] += 1
                if k >= 2:
                    prob *= 1 - red[k - 2] / tot[k - 2]
                    tot[k - 2] += 1
            # the newcomer u_{m+1} opens urn m
            red[m - 1] = A[m - 1] + m
            tot[m - 1] = A[m] + m if m < n else A[m - 1] + m
        return float(prob)
    if mode == "definetti":
        p = np.zeros(n, dtype=np.int64)
        q = np.zeros(n, dtype=np.int64)
        for m, k in enumerate(trace, start=1):
            if m < 2:
                continue
            for j in range(m - 1, k - 1, -1):
                p[j - 1] += 1
            if k >= 2:
                q[k - 2] += 1
        prob = 1.0
        for j in range(1, n):
            prob *= beta_mixed_moment(A[j - 1] + j, a[j], int(p[j - 1]), int(q[j - 1]))
        return prob
    raise ParameterError(f"unknown mode {mode!r}")


@dataclass
class CertificateReport:
    """Outcome of comparing preferential attachment with the Beta mixture."""

    n: int
    fitness: dict
    max_abs_diff: float
    pat_total: float
    mixture_total: float
    passed: bool
    worst_trace: tuple | None
    elapsed: float
    rows: list = field(default_factory=list, repr=False)

    def to_json(self) -> dict:
        return {"max_abs_diff": self.max_abs_diff, "pat_total": self.pat_total,
                "mixture_total": self.mixture_total, "pass": bool(self.passed),
                "n": self.n, "fitness": self.fitness,
                "worst_trace": list(self.worst_trace) if self.worst_trace else None,
                "elapsed_seconds": self.elapsed}


def certify_theorem1(fitness: FitnessSequence, n: int, tol: float = 1e-10) -> CertificateReport:
    """Compare both trace laws over every trace of size ``n <= 6``.

    Passes when every trace agrees to ``tol`` and both columns sum to one
    within ``tol``.  ``worst_trace`` names the trace with the largest gap.
    """
    if n > MAX_CERTIFICATION:
        raise ParameterError(f"certification is capped at n = {MAX_CERTIFICATION}")
    t0 = time.perf_counter()
    rows = []
    worst, worst_trace = -1.0, None
    tp = tm = 0.0
    for trace in enumerate_traces(n):
        pp = pat_trace_probability(fitness, trace)
        pm = wrt_mixture_trace_probability(fitness, trace)
        rows.append(TraceProbability(trace, pp, pm))
        tp += pp
        tm += pm
        d = abs(pp - pm)
        if d > worst:
            worst, worst_trace = d, trace
    passed = bool(worst <= tol and abs(tp - 1) <= tol and abs(tm - 1) <= tol)
    return CertificateReport(n, fitness.to_json(), worst, tp, tm, passed,
                             worst_trace, time.perf_counter() - t0, rows)
