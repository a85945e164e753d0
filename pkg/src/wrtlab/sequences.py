"""Weight and fitness sequences.

Indexing convention used throughout the package: sequences are indexed from 1
in the mathematics and stored in 0-based numpy arrays, so ``w[i - 1]`` holds
:math:`w_i` and ``betas[k - 1]`` holds :math:`\\beta_k`.

A weighted recursive tree is driven by a :class:`WeightSequence` and an affine
preferential attachment tree by a :class:`FitnessSequence`.  The two are linked
by :func:`sample_beta_coupling` followed by :func:`weights_from_betas`: a
recursive tree grown with the random weights

.. math:: W_n = \\prod_{k<n} \\beta_k^{-1},\\qquad
          \\beta_k \\sim \\mathrm{Beta}(A_k + k, a_{k+1})

has the law of the preferential attachment tree with fitnesses ``a``.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Sequence

import numpy as np

from .errors import (
    DegenerateCouplingError,
    InsufficientDataError,
    ParameterError,
    RangeError,
)

__all__ = [
    "WeightSequence",
    "FitnessSequence",
    "BetaCoupling",
    "SequenceProfile",
    "make_power_weights",
    "make_constant_fitness",
    "make_periodic_fitness",
    "make_explicit_fitness",
    "sample_beta_coupling",
    "weights_from_betas",
    "estimate_profile",
    "estimate_Z",
    "limit_weights",
    "sequence_to_json",
    "sequence_from_json",
    "write_weights_csv",
    "read_weights_csv",
]


def _readonly(x: np.ndarray) -> np.ndarray:
    x = np.ascontiguousarray(x, dtype=np.float64)
    x.setflags(write=False)
    return x


# ---------------------------------------------------------------------------
# Weight sequences
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class WeightSequence:
    """Finite prefix ``w_1, ..., w_{n_max}`` of a weight sequence.

    Both the weights and their cumulative sums are kept in linear and in log
    form.  The linear arrays may contain ``inf`` when the sequence grows
    faster than double precision allows (for instance ``w_n = 2^n`` beyond
    ``n = 1023``); algorithms that need to stay finite use :attr:`log_w`,
    :attr:`log_W` and :attr:`ratios`.

    Use the constructors :meth:`from_weights`, :meth:`from_log_weights`,
    :func:`make_power_weights` or :func:`weights_from_betas` rather than the
    raw initializer.

    Attributes
    ----------
    w, W : ndarray
        Weights and cumulative sums, ``W[n - 1] = w_1 + ... + w_n``.
    log_w, log_W : ndarray
        Natural logarithms of the above (``-inf`` for zero weights).
    origin : str
        ``"deterministic"`` or ``"beta-sampled(<seed>)"``.
    spec : dict or None
        JSON-able description allowing the sequence to be extended or
        rebuilt; ``None`` for sequences given as explicit arrays.
    """

    w: np.ndarray
    W: np.ndarray
    log_w: np.ndarray
    log_W: np.ndarray
    origin: str = "deterministic"
    spec: dict | None = None
    coupling: "BetaCoupling | None" = field(default=None, repr=False)

    def __post_init__(self):
        n = len(self.w)
        if n == 0:
            raise ParameterError("a weight sequence needs at least one term")
        if not (len(self.W) == len(self.log_w) == len(self.log_W) == n):
            raise ParameterError("weight arrays have inconsistent lengths")
        if not self.log_w[0] > -np.inf:
            raise ParameterError("w_1 must be positive")
        if np.any(np.isnan(self.log_w)):
            raise ParameterError("weights must be nonnegative numbers")

    # -- constructors -----------------------------------------------------
    @classmethod
    def from_weights(cls, w: Sequence[float], origin: str = "deterministic",
                     spec: dict | None = None) -> "WeightSequence":
        """Build a sequence from explicit nonnegative weights."""
        w = np.asarray(w, dtype=np.float64)
        if w.ndim != 1 or len(w) == 0:
            raise ParameterError("weights must be a nonempty 1-d array")
        if not w[0] > 0 or np.any(w < 0) or not np.all(np.isfinite(w)):
            raise ParameterError("need w_1 > 0 and finite w_n >= 0")
        W = np.cumsum(w)
        with np.errstate(divide="ignore"):
            log_w = np.log(w)
        return cls(_readonly(w), _readonly(W), _readonly(log_w),
                   _readonly(np.log(W)), origin, spec)

    @classmethod
    def from_log_weights(cls, log_w: Sequence[float], origin: str = "deterministic",
                         spec: dict | None = None) -> "WeightSequence":
        """Build a sequence from ``log w_n`` (``-inf`` encodes a zero weight)."""
        log_w = np.asarray(log_w, dtype=np.float64)
        if log_w.ndim != 1 or len(log_w) == 0 or not np.isfinite(log_w[0]):
            raise ParameterError("need a nonempty array with finite log w_1")
        if np.any(np.isnan(log_w)) or np.any(log_w == np.inf):
            raise ParameterError("log weights must be finite or -inf")
        log_W = np.logaddexp.accumulate(log_w)
        with np.errstate(over="ignore"):
            w = np.exp(log_w)
            W = np.exp(log_W)
        return cls(_readonly(w), _readonly(W), _readonly(log_w),
                   _readonly(log_W), origin, spec)

    # -- queries ----------------------------------------------------------
    @property
    def n_max(self) -> int:
        return len(self.w)

    def __len__(self) -> int:
        return len(self.w)

    @property
    def ratios(self) -> np.ndarray:
        """``w_n / W_n`` for every n, computed in log space."""
        return np.exp(self.log_w - self.log_W)

    @property
    def is_finite(self) -> bool:
        """True when the linear cumulative sums do not overflow."""
        return bool(np.isfinite(self.W[-1]))

    def extend(self, n_max: int, rng: np.random.Generator | None = None) -> "WeightSequence":
        """Return a longer sequence whose first terms coincide with this one.

        Power-law sequences are recomputed from their formula.  Beta-sampled
        sequences draw the missing Beta variables from ``rng`` and keep the
        existing ones.  Explicit arrays cannot be extended.
        """
        if n_max <= self.n_max:
            return self
        if self.coupling is not None:
            if rng is None:
                raise ParameterError("extending a sampled sequence needs an rng")
            return weights_from_betas(self.coupling.extend(n_max, rng))
        if self.spec is not None and self.spec.get("kind") == "power":
            return make_power_weights(self.spec["gamma"], self.spec["C"], n_max)
        raise RangeError("this weight sequence has no rule for further terms")

    def truncate(self, n: int) -> "WeightSequence":
        """First ``n`` terms as a new sequence."""
        if not 1 <= n <= self.n_max:
            raise RangeError(f"cannot truncate a length-{self.n_max} sequence to {n}")
        return WeightSequence(_readonly(self.w[:n]), _readonly(self.W[:n]),
                              _readonly(self.log_w[:n]), _readonly(self.log_W[:n]),
                              self.origin, self.spec, None)


def make_power_weights(gamma: float, C: float, n_max: int) -> WeightSequence:
    """Weights with cumulative sums ``W_n = C n^gamma`` exactly.

    Parameters
    ----------
    gamma, C : float
        Positive exponent and constant.
    n_max : int
        Number of terms.

    Returns
    -------
    WeightSequence
        ``w_n = C (n^gamma - (n-1)^gamma)``, evaluated as
        ``-C n^gamma expm1(gamma log1p(-1/n))`` to avoid cancellation.

    Examples
    --------
    >>> make_power_weights(2.0, 1.0, 3).w
    array([1., 3., 5.])
    """
    if not gamma > 0 or not C > 0:
        raise ParameterError("gamma and C must be positive")
    if n_max < 1:
        raise ParameterError("n_max must be at least 1")
    n = np.arange(1, n_max + 1, dtype=np.float64)
    W = C * n ** gamma
    w = np.empty(n_max)
    w[0] = C
    nn = n[1:]
    w[1:] = -W[1:] * np.expm1(gamma * np.log1p(-1.0 / nn))
    log_W = np.log(C) + gamma * np.log(n)
    with np.errstate(divide="ignore"):
        log_w = np.log(w)
    spec = {"kind": "power", "gamma": float(gamma), "C": float(C)}
    return WeightSequence(_readonly(w), _readonly(W), _readonly(log_w),
                          _readonly(log_W), "deterministic", spec)


# ---------------------------------------------------------------------------
# Fitness sequences
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class FitnessSequence:
    """Fitnesses ``a_1, a_2, ...`` of a preferential attachment tree.

    The sequence is described by an explicit head followed by a pattern that
    repeats forever.  Constant fitness ``(a, b, b, ...)`` has head ``(a,)``
    and pattern ``(b,)``; an explicit finite list has an empty pattern and
    cannot be evaluated beyond its length.

    Attributes
    ----------
    head : tuple of float
        ``a_1, ..., a_h``.
    pattern : tuple of float
        Repeating block used for indices ``h + 1, h + 2, ...``.
    n_max : int
        Length of the materialized arrays :attr:`a` and :attr:`A`.
    """

    head: tuple
    pattern: tuple
    n_max: int
    kind: str = "explicit"

    def __post_init__(self):
        head = tuple(float(x) for x in self.head)
        pattern = tuple(float(x) for x in self.pattern)
        object.__setattr__(self, "head", head)
        object.__setattr__(self, "pattern", pattern)
        if len(head) == 0:
            raise ParameterError("fitness needs a first term")
        if not head[0] > -1:
            raise ParameterError("the first fitness must exceed -1")
        if any(x < 0 for x in head[1:] + pattern) or any(
                not math.isfinite(x) for x in head + pattern):
            raise ParameterError("fitnesses after the first must be finite and >= 0")
        if self.n_max < 1:
            raise ParameterError("n_max must be at least 1")
        if not pattern and self.n_max > len(head):
            raise RangeError("an explicit fitness list cannot be longer than given")

    def values(self, n: int) -> np.ndarray:
        """``a_1, ..., a_n`` as an array (works past :attr:`n_max`)."""
        h = len(self.head)
        if n <= h:
            return np.array(self.head[:n], dtype=np.float64)
        if not self.pattern:
            raise RangeError("an explicit fitness list cannot be longer than given")
        reps = -(-(n - h) // len(self.pattern))
        tail = np.tile(np.array(self.pattern, dtype=np.float64), reps)[: n - h]
        return np.concatenate([np.array(self.head, dtype=np.float64), tail])

    @property
    def a(self) -> np.ndarray:
        return self.values(self.n_max)

    @property
    def A(self) -> np.ndarray:
        """Cumulative sums ``A_1, ..., A_{n_max}``."""
        return np.cumsum(self.a)

    @property
    def mean_fitness(self) -> float | None:
        """Limit ``c`` of ``A_n / n`` when the sequence is eventually periodic."""
        if not self.pattern:
            return None
        return float(np.mean(self.pattern))

    @property
    def period_sum(self) -> float | None:
        return float(sum(self.pattern)) if self.pattern else None

    def extend(self, n_max: int) -> "FitnessSequence":
        return FitnessSequence(self.head, self.pattern, max(n_max, self.n_max), self.kind)

    def to_json(self) -> dict:
        if self.kind == "constant_fitness":
            return {"kind": "constant_fitness", "a": self.head[0], "b": self.pattern[0]}
        if self.kind == "periodic_fitness":
            return {"kind": "periodic_fitness", "a": self.head[0],
                    "pattern": list(self.pattern)}
        return {"kind": "explicit_fitness", "head": list(self.head),
                "pattern": list(self.pattern)}


def make_constant_fitness(a: float, b: float, n_max: int) -> FitnessSequence:
    """Fitness ``(a, b, b, ...)`` with ``A_n = a + (n - 1) b``."""
    if not a > -1:
        raise ParameterError("a must exceed -1")
    if not b >= 0:
        raise ParameterError("b must be nonnegative")
    return FitnessSequence((a,), (b,), n_max, "constant_fitness")


def make_periodic_fitness(a: float, pattern: Sequence[int], n_max: int) -> FitnessSequence:
    """Fitness ``(a, b_1, ..., b_l, b_1, ..., b_l, ...)``.

    The pattern entries must be nonnegative integers, not all zero.  The mean
    fitness is ``c = S / l`` with ``S = sum(pattern)``.
    """
    pattern = list(pattern)
    if not pattern:
        raise ParameterError("pattern must be nonempty")
    for b in pattern:
        if b < 0 or float(b) != int(b):
            raise ParameterError("pattern entries must be nonnegative integers")
    if sum(pattern) <= 0:
        raise ParameterError("pattern must contain a nonzero entry")
    if not a > -1:
        raise ParameterError("a must exceed -1")
    return FitnessSequence((a,), tuple(int(b) for b in pattern), n_max, "periodic_fitness")


def make_explicit_fitness(values: Sequence[float], pattern: Sequence[float] = ()) -> FitnessSequence:
    """Fitness given by an explicit head and an optional repeating tail."""
    values = tuple(values)
    n_max = len(values) if not pattern else max(len(values), 1)
    return FitnessSequence(values, tuple(pattern), n_max, "explicit")


# ---------------------------------------------------------------------------
# Beta coupling
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class BetaCoupling:
    """Independent ``beta_k ~ Beta(A_k + k, a_{k+1})`` for ``k < n_max``.

    ``complements`` holds ``1 - beta_k`` computed directly from the Gamma
    draws, so it keeps full relative precision when ``beta_k`` is close to 1.
    A zero shape ``a_{k+1} = 0`` gives ``beta_k = 1`` exactly.
    """

    fitness: FitnessSequence
    betas: np.ndarray
    complements: np.ndarray
    seed: Any = None

    @property
    def n_max(self) -> int:
        return len(self.betas) + 1

    @classmethod
    def from_betas(cls, betas: Sequence[float], fitness: FitnessSequence | None = None) -> "BetaCoupling":
        """Wrap given Beta values, mainly for tests and hand-built examples."""
        b = np.asarray(betas, dtype=np.float64)
        if np.any(b <= 0) or np.any(b > 1):
            if np.any(b == 0):
                raise DegenerateCouplingError("beta_k = 0 makes W infinite")
            raise ParameterError("betas must lie in (0, 1]")
        if fitness is None:
            fitness = FitnessSequence((0.0,), (0.0,), len(b) + 1, "explicit")
        return cls(fitness, _readonly(b), _readonly(1.0 - b))

    def extend(self, n_max: int, rng: np.random.Generator) -> "BetaCoupling":
        """Append Beta variables up to ``n_max`` keeping the existing ones."""
        if n_max <= self.n_max:
            return self
        extra_b, extra_c = _draw_betas(self.fitness, self.n_max, n_max, rng)
        return BetaCoupling(self.fitness.extend(n_max),
                            _readonly(np.concatenate([self.betas, extra_b])),
                            _readonly(np.concatenate([self.complements, extra_c])),
                            self.seed)

    @property
    def log_betas(self) -> np.ndarray:
        """``log beta_k`` accurate both near 0 and near 1."""
        out = np.log(self.betas)
        near_one = self.complements < 0.5
        out[near_one] = np.log1p(-self.complements[near_one])
        return out


def _draw_betas(fitness: FitnessSequence, k_from: int, k_to: int,
                rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Draw ``beta_k`` for ``k_from <= k < k_to`` through interleaved Gammas.

    Interleaving ``(X_k, Y_k)`` keeps the stream prefix-stable: drawing up to
    ``n`` and then extending gives the same values as drawing up to ``n'``.
    """
    a = fitness.values(k_to)
    A = np.cumsum(a)
    k = np.arange(k_from, k_to)
    shape_x = A[k - 1] + k
    shape_y = a[k]
    assert np.all(shape_x > 0), "A_k + k must be positive"
    shapes = np.column_stack([shape_x, shape_y]).ravel()
    g = rng.standard_gamma(shapes).reshape(-1, 2)
    # x can underflow to zero for tiny shapes; clamp rather than redraw so
    # the stream stays prefix-stable.
    x = np.maximum(g[:, 0], np.finfo(np.float64).tiny)
    y = g[:, 1]
    s = x + y
    return x / s, y / s


def sample_beta_coupling(fitness: FitnessSequence, n_max: int,
                         rng: np.random.Generator, seed: Any = None) -> BetaCoupling:
    """Sample ``beta_1, ..., beta_{n_max - 1}`` for the given fitness.

    Parameters
    ----------
    fitness : FitnessSequence
    n_max : int
        Largest tree size the coupling has to support (at least 2).
    rng : numpy.random.Generator
    seed : optional
        Recorded in the resulting weight sequence's origin tag.

    Examples
    --------
    >>> rng = np.random.default_rng(0)
    >>> c = sample_beta_coupling(make_constant_fitness(1, 0, 10), 10, rng)
    >>> bool(np.all(c.betas == 1.0))
    True
    """
    if n_max < 2:
        raise ParameterError("n_max must be at least 2")
    b, comp = _draw_betas(fitness, 1, n_max, rng)
    return BetaCoupling(fitness.extend(n_max), _readonly(b), _readonly(comp), seed)


def weights_from_betas(coupling: BetaCoupling | Sequence[float]) -> WeightSequence:
    """Random weights ``W_n = prod_{k<n} 1/beta_k`` and ``w_n = W_n (1 - beta_{n-1})``.

    Everything is accumulated in log space; ``W_1 = w_1 = 1``.

    Examples
    --------
    >>> weights_from_betas([0.5, 1 / 3]).w.round(12)
    array([1., 1., 4.])
    """
    if not isinstance(coupling, BetaCoupling):
        coupling = BetaCoupling.from_betas(coupling)
    if np.any(coupling.betas <= 0):
        raise DegenerateCouplingError("beta_k = 0 makes W infinite")
    log_W = np.concatenate([[0.0], -np.cumsum(coupling.log_betas)])
    with np.errstate(divide="ignore"):
        log_comp = np.log(coupling.complements)
    log_w = np.concatenate([[0.0], log_W[1:] + log_comp])
    with np.errstate(over="ignore"):
        W = np.exp(log_W)
        w = np.exp(log_w)
    origin = f"beta-sampled({coupling.seed})"
    spec = None
    if coupling.seed is not None:
        spec = {"kind": "beta_sampled", "fitness": coupling.fitness.to_json(),
                "seed": coupling.seed}
    return WeightSequence(_readonly(w), _readonly(W), _readonly(log_w),
                          _readonly(log_W), origin, spec, coupling)


# ---------------------------------------------------------------------------
# Diagnostics
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SequenceProfile:
    """Power-law summary ``W_n ~ C n^gamma`` of a sequence.

    ``residual_exponent`` is a point estimate of the decay rate of the
    relative error of the fit; ``inf`` when no error is visible.  It is a
    diagnostic only and carries no confidence statement.
    """

    gamma_hat: float
    C_hat: float
    residual_exponent: float
    c_hat: float | None = None
    n_used: int = 0


_MIN_PROFILE_LENGTH = 100


def _decay_exponent(n: np.ndarray, dev: np.ndarray) -> float:
    keep = np.abs(dev) > 1e-12
    if keep.sum() < 3:
        return math.inf
    slope = np.polyfit(np.log(n[keep]), np.log(np.abs(dev[keep])), 1)[0]
    return float(-slope)


def estimate_profile(seq: WeightSequence | FitnessSequence) -> SequenceProfile:
    """Fit ``log W_n = log C + gamma log n`` over the upper half of the indices.

    For a :class:`FitnessSequence` the mean fitness ``c`` is estimated by
    averaging ``A_n / n`` over the upper half and ``gamma`` is reported as the
    predicted ``c / (c + 1)``; ``C_hat`` is then undefined (``nan``).

    Raises
    ------
    InsufficientDataError
        If the sequence has fewer than 100 terms.
    """
    n_max = seq.n_max
    if n_max < _MIN_PROFILE_LENGTH:
        raise InsufficientDataError(f"need at least {_MIN_PROFILE_LENGTH} terms, got {n_max}")
    grid = np.unique(np.geomspace(10, n_max // 2, 60).astype(np.int64))
    if isinstance(seq, FitnessSequence):
        A = seq.A
        n = np.arange(n_max // 2, n_max + 1)
        c_hat = float(np.mean(A[n - 1] / n))
        dev = A[grid - 1] / grid - c_hat
        return SequenceProfile(c_hat / (c_hat + 1), math.nan,
                               _decay_exponent(grid.astype(float), dev), c_hat, n_max)
    n = np.arange(n_max // 2, n_max + 1)
    gamma, logC = np.polyfit(np.log(n), seq.log_W[n - 1], 1)
    dev = seq.log_W[grid - 1] - logC - gamma * np.log(grid)
    c_hat = None
    if seq.coupling is not None and seq.coupling.fitness.pattern:
        A = seq.coupling.fitness.A
        c_hat = float(np.mean(A[n - 1] / n))
    return SequenceProfile(float(gamma), float(np.exp(logC)),
                           _decay_exponent(grid.astype(float), dev), c_hat, n_max)


def estimate_Z(weights: WeightSequence, gamma: float, N: int,
               window: tuple[float, float] = (0.5, 1.0)) -> float:
    """Tail average of ``W_n n^{-gamma}`` over ``n`` in ``window * N``."""
    if N > weights.n_max:
        raise RangeError(f"N = {N} exceeds the sequence length {weights.n_max}")
    lo = max(1, int(window[0] * N))
    hi = max(lo, int(window[1] * N))
    n = np.arange(lo, hi + 1)
    return float(np.mean(np.exp(weights.log_W[n - 1] - gamma * np.log(n))))


def limit_weights(coupling: BetaCoupling, c: float, N: int,
                  window: tuple[float, float] = (0.5, 1.0)) -> np.ndarray:
    """Approximate degree-limit weights ``m_n = (c + 1) w_n / Z``, ``n <= N``.

    ``Z`` is the almost sure limit of ``W_n n^{-c/(c+1)}``; it is replaced by
    its tail average over ``[N/2, N]`` (configurable through ``window``), so
    the result carries an error of order ``N^{-eps}`` for some ``eps > 0``.

    Returns
    -------
    ndarray
        ``m_1, ..., m_N``.
    """
    if not c > 0:
        raise ParameterError("c must be positive")
    if N > coupling.n_max:
        raise RangeError(f"N = {N} exceeds the coupling length {coupling.n_max}")
    weights = weights_from_betas(coupling)
    gamma = c / (c + 1)
    Z = estimate_Z(weights, gamma, N, window)
    return (c + 1) / Z * weights.w[:N]


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def sequence_to_json(seq: WeightSequence | FitnessSequence) -> dict:
    """JSON description of a sequence (``kind`` plus parameters)."""
    if isinstance(seq, FitnessSequence):
        return {**seq.to_json(), "n_max": seq.n_max}
    if seq.spec is None:
        return {"kind": "explicit_weights", "w": seq.w.tolist()}
    return {**seq.spec, "n_max": seq.n_max}


def _fitness_from_json(obj: Mapping, n_max: int) -> FitnessSequence:
    kind = obj["kind"]
    if kind == "constant_fitness":
        return make_constant_fitness(obj["a"], obj["b"], n_max)
    if kind == "periodic_fitness":
        return make_periodic_fitness(obj["a"], obj["pattern"], n_max)
    if kind == "explicit_fitness":
        return FitnessSequence(tuple(obj["head"]), tuple(obj.get("pattern", ())), n_max)
    raise ParameterError(f"unknown fitness kind {kind!r}")


def sequence_from_json(obj: Mapping | str, n_max: int | None = None):
    """Rebuild a sequence from :func:`sequence_to_json` output.

    ``beta_sampled`` specs are resampled from their ``seed`` with
    ``numpy.random.default_rng(seed)``, which makes them reproducible.
    """
    if isinstance(obj, str):
        obj = json.loads(obj)
    n = int(n_max if n_max is not None else obj.get("n_max", 0))
    kind = obj["kind"]
    if kind == "power":
        return make_power_weights(obj["gamma"], obj.get("C", 1.0), n)
    if kind == "beta_sampled":
        fitness = _fitness_from_json(obj["fitness"], n)
        seed = obj.get("seed")
        coupling = sample_beta_coupling(fitness, n, np.random.default_rng(seed), seed=seed)
        return weights_from_betas(coupling)
    if kind == "explicit_weights":
        w = obj["w"][:n] if n else obj["w"]
        return WeightSequence.from_weights(w)
    return _fitness_from_json(obj, n)


def write_weights_csv(weights: WeightSequence, path: str | Path) -> None:
    """Write columns ``n,w,W``."""
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["n", "w", "W"])
        for i in range(weights.n_max):
            out.writerow([i + 1, repr(float(weights.w[i])), repr(float(weights.W[i]))])


def read_weights_csv(path: str | Path) -> WeightSequence:
    """Read a file produced by :func:`write_weights_csv`."""
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows or list(rows[0].keys()) != ["n", "w", "W"]:
        raise ParameterError("expected header n,w,W")
    w = [float(r["w"]) for r in rows]
    return WeightSequence.from_weights(w)
