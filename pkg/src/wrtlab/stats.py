"""Statistics of recursive trees.

Profiles and their Laplace transforms, the rate function ``f_gamma`` and
the endpoints ``z_-`` and ``z_+`` that govern profile and height
asymptotics, the measures carried by a tree (weight, degree and uniform),
the classification of the limit of the weight measure, the law of the most
recent common ancestor of two weight-sampled vertices, and degree scaling
diagnostics.

Laplace transforms are evaluated in log-sum-exp form and ``z`` is real.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
from scipy.special import logsumexp

from .errors import DomainError, ParameterError, RangeError
from .sequences import FitnessSequence, WeightSequence
from .trees import PlaneTree, _wrt_choices, sample_wrt_traces

__all__ = [
    "ProfileVector",
    "ProfileAsymptotics",
    "TreeMeasure",
    "MeasureRegime",
    "DegreeScalingReport",
    "profile",
    "f_gamma",
    "solve_z_plus",
    "z_minus",
    "profile_asymptotics",
    "gaussian_profile_prediction",
    "laplace_profile",
    "log_laplace_profile",
    "normalized_N",
    "weighted_laplace",
    "C_n",
    "M_n",
    "martingale_samples",
    "tree_measure",
    "subtree_mass",
    "measure_regime",
    "mrca_law",
    "mrca_truncation_bound",
    "sample_mrca_pairs",
    "expected_height_sum",
    "degree_expectation",
    "degree_scaling_report",
    "write_profile_csv",
]


# ---------------------------------------------------------------------------
# Profile
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ProfileVector:
    """Number of vertices ``L_n(k)`` at each height ``k = 0..height``."""

    counts: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.counts, dtype=np.int64)
        if c.ndim != 1 or len(c) == 0 or c[0] != 1 or c[-1] < 1 or np.any(c < 0):
            raise ParameterError("a profile has one vertex at height 0 and a nonempty top level")
        object.__setattr__(self, "counts", c)

    @property
    def n(self) -> int:
        return int(self.counts.sum())

    @property
    def height(self) -> int:
        return len(self.counts) - 1

    def __len__(self) -> int:
        return len(self.counts)

    def as_tuple(self) -> tuple:
        return tuple(int(x) for x in self.counts)


def profile(tree: PlaneTree) -> ProfileVector:
    """Histogram of vertex heights.

    Examples
    --------
    >>> profile(PlaneTree([0, 1, 1, 1])).as_tuple()
    (1, 3)
    """
    return ProfileVector(np.bincount(tree.heights))


def write_profile_csv(prof: ProfileVector, path: str | Path,
                      prediction: np.ndarray | None = None) -> None:
    """Write ``k,count,prediction`` rows (prediction left empty if absent)."""
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["k", "count", "prediction"])
        for k, c in enumerate(prof.counts):
            pred = "" if prediction is None else repr(float(prediction[k]))
            out.writerow([k, int(c), pred])


# ---------------------------------------------------------------------------
# Rate function and its zeros
# ---------------------------------------------------------------------------


def _check_gamma(gamma: float) -> None:
    if not gamma > 0:
        raise ParameterError("gamma must be positive")


def f_gamma(gamma: float, z):
    """``1 + gamma (e^z - 1 - z e^z)``; equals 1 at ``z = 0``."""
    _check_gamma(gamma)
    z = np.asarray(z, dtype=np.float64)
    ez = np.exp(z)
    out = 1.0 + gamma * (ez - 1.0 - z * ez)
    return float(out) if out.ndim == 0 else out


def solve_z_plus(gamma: float, tol: float = 1e-12) -> float:
    """Positive zero of ``f_gamma``.

    ``f_gamma`` decreases on ``[0, inf)`` from 1 to ``-inf``, so bisection on
    ``[0, Z]`` with ``Z`` doubled until ``f_gamma(Z) < 0`` finds it.

    Examples
    --------
    >>> round(solve_z_plus(1.0), 12)
    1.0
    """
    _check_gamma(gamma)
    if gamma == 1.0:
        return 1.0
    lo, hi = 0.0, 1.0
    while f_gamma(gamma, hi) >= 0:
        lo, hi = hi, 2 * hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if f_gamma(gamma, mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def z_minus(gamma: float) -> float:
    """``log((gamma - 1) / gamma)`` for ``gamma > 1``, otherwise ``-inf``."""
    _check_gamma(gamma)
    if gamma > 1:
        return math.log((gamma - 1) / gamma)
    return -math.inf


@dataclass(frozen=True)
class ProfileAsymptotics:
    """Rate-function data for weights with exponent ``gamma``."""

    gamma: float
    z_plus: float
    z_minus: float

    def phi(self, z):
        """``gamma (e^z - 1)``."""
        return self.gamma * np.expm1(z)

    def f(self, z):
        return f_gamma(self.gamma, z)

    @property
    def height_constant(self) -> float:
        """``gamma e^{z_+}``, the almost sure limit of ``height / log n``."""
        return self.gamma * math.exp(self.z_plus)


def profile_asymptotics(gamma: float) -> ProfileAsymptotics:
    return ProfileAsymptotics(float(gamma), solve_z_plus(gamma), z_minus(gamma))


def gaussian_profile_prediction(n: int, gamma: float, k):
    """Leading Gaussian term of ``L_n(k)``.

    ``n / sqrt(2 pi log n) * exp(-(k - gamma log n)^2 / (2 gamma log n))``.
    Summed over ``k`` this has mass ``sqrt(gamma) n``, so it is only a
    quantitative prediction for ``gamma = 1``.
    """
    _check_gamma(gamma)
    if n < 3:
        raise ParameterError("n must be at least 3")
    L = math.log(n)
    k = np.asarray(k, dtype=np.float64)
    x = (k - gamma * L) / math.sqrt(gamma * L)
    out = n / math.sqrt(2 * math.pi * L) * np.exp(-0.5 * x * x)
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# Laplace transforms
# ---------------------------------------------------------------------------


def log_laplace_profile(tree: PlaneTree, z: float) -> float:
    """``log sum_k L_n(k) e^{z k}``."""
    c = profile(tree).counts
    k = np.arange(len(c))
    return float(logsumexp(z * k, b=c))


def laplace_profile(tree: PlaneTree, z: float) -> float:
    """``sum_k L_n(k) e^{z k}`` (may overflow to ``inf``; see the log version).

    Examples
    --------
    >>> round(laplace_profile(PlaneTree([0, 1, 1, 1]), math.log(2)), 12)
    7.0
    """
    with np.errstate(over="ignore"):
        return float(np.exp(log_laplace_profile(tree, z)))


def normalized_N(tree: PlaneTree, gamma: float, z: float) -> float:
    """``n^{-(1 + phi(z))} sum_k L_n(k) e^{z k}`` with ``phi(z) = gamma (e^z - 1)``."""
    _check_gamma(gamma)
    n = tree.n
    phi = gamma * math.expm1(z)
    return math.exp(log_laplace_profile(tree, z) - (1 + phi) * math.log(n))


def _require(weights: WeightSequence, n: int) -> None:
    if n > weights.n_max:
        raise RangeError(f"weights only defined up to {weights.n_max}, need {n}")


def _log_C(weights: WeightSequence, z: float, n: int) -> float:
    if n < 2:
        return 0.0
    r = weights.ratios[1:n]
    fac = 1.0 + math.expm1(z) * r
    if np.any(fac <= 0):
        raise DomainError("1 + (e^z - 1) w_i / W_i must be positive")
    return float(np.sum(np.log1p(math.expm1(z) * r)))


def C_n(weights: WeightSequence, z: float, n: int | None = None) -> float:
    """``prod_{i=2}^n (1 + (e^z - 1) w_i / W_i)``, computed in log space.

    Examples
    --------
    >>> from wrtlab.sequences import make_power_weights
    >>> round(C_n(make_power_weights(1, 1, 3), math.log(2)), 12)
    2.0
    """
    n = weights.n_max if n is None else n
    _require(weights, n)
    return math.exp(_log_C(weights, z, n))


def _log_weighted_laplace(tree: PlaneTree, weights: WeightSequence, z: float) -> float:
    n = tree.n
    _require(weights, n)
    lw = weights.log_w[:n] - weights.log_W[n - 1]
    return float(logsumexp(lw + z * tree.heights))


def weighted_laplace(tree: PlaneTree, weights: WeightSequence, z: float) -> float:
    """``sum_i (w_i / W_n) e^{z ht(u_i)}``."""
    return math.exp(_log_weighted_laplace(tree, weights, z))


def M_n(tree: PlaneTree, weights: WeightSequence, z: float) -> float:
    """Weighted Laplace transform divided by ``C_n(z)``; a martingale in ``n``."""
    return math.exp(_log_weighted_laplace(tree, weights, z) - _log_C(weights, z, tree.n))


def martingale_samples(weights: WeightSequence, n_values: Sequence[int], z: float,
                       replicates: int, rng: np.random.Generator) -> np.ndarray:
    """``M_n(z)`` along the same growing trees for every ``n`` in ``n_values``.

    Returns an array of shape ``(replicates, len(n_values))``.  Trees are
    grown as a batch of traces up to ``max(n_values)``.
    """
    n_values = [int(n) for n in n_values]
    if min(n_values) < 2:
        raise ParameterError("n must be at least 2")
    N = max(n_values)
    _require(weights, N)
    traces = sample_wrt_traces(weights, N, replicates, rng)
    h = np.zeros((replicates, N), dtype=np.int64)
    rows = np.arange(replicates)
    for i in range(1, N):
        h[:, i] = h[rows, traces[:, i - 1] - 1] + 1
    out = np.empty((replicates, len(n_values)))
    for j, n in enumerate(n_values):
        lw = weights.log_w[:n] - weights.log_W[n - 1]
        out[:, j] = np.exp(logsumexp(lw[None, :] + z * h[:, :n], axis=1) - _log_C(weights, z, n))
    return out


# ---------------------------------------------------------------------------
# Measures on the tree
# ---------------------------------------------------------------------------

_KINDS = {"weight": "weight", "mu": "weight", "degree": "degree", "eta": "degree",
          "uniform": "uniform", "nu": "uniform"}


@dataclass(frozen=True, eq=False)
class TreeMeasure:
    """Probability measure on the vertices ``u_1, ..., u_n``."""

    kind: str
    atoms: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.atoms, dtype=np.float64)
        if np.any(a < 0) or abs(a.sum() - 1.0) > 1e-12:
            raise ParameterError("atoms must be nonnegative and sum to 1")
        object.__setattr__(self, "atoms", a)

    @property
    def n(self) -> int:
        return len(self.atoms)


def tree_measure(tree: PlaneTree, kind: str,
                 weights: WeightSequence | None = None,
                 fitness: FitnessSequence | Sequence[float] | None = None) -> TreeMeasure:
    """Weight, degree or uniform measure on the vertices of ``tree``.

    ``weight`` has atoms ``w_k / W_n``; ``degree`` has atoms
    ``(b_k + deg(u_k)) / (B_n + n - 1)`` with ``b`` given by ``fitness``;
    ``uniform`` has atoms ``1 / n``.
    """
    if kind not in _KINDS:
        raise ParameterError(f"unknown measure kind {kind!r}")
    kind = _KINDS[kind]
    n = tree.n
    if kind == "uniform":
        return TreeMeasure(kind, np.full(n, 1.0 / n))
    if kind == "weight":
        if weights is None:
            raise ParameterError("the weight measure needs weights")
        _require(weights, n)
        return TreeMeasure(kind, np.exp(weights.log_w[:n] - weights.log_W[n - 1]))
    if fitness is None:
        raise ParameterError("the degree measure needs a fitness sequence b")
    if n < 2:
        raise ParameterError("the degree measure needs n >= 2")
    b = fitness.values(n) if isinstance(fitness, FitnessSequence) else np.asarray(fitness, dtype=np.float64)[:n]
    if len(b) < n:
        raise RangeError("fitness sequence too short")
    if b[0] <= -1 or np.any(b[1:] < 0):
        raise ParameterError("need b_1 > -1 and b_k >= 0 for k >= 2")
    mass = b + tree.degrees
    return TreeMeasure(kind, mass / mass.sum())


def subtree_mass(measure: TreeMeasure, tree: PlaneTree, k: int) -> float:
    """Mass of the subtree rooted at ``u_k``."""
    if measure.n != tree.n:
        raise ParameterError("measure and tree sizes differ")
    from ._kernels import subtree_mask
    tree._check(k)
    return float(measure.atoms[subtree_mask(tree.parent, k)].sum())


@dataclass(frozen=True)
class MeasureRegime:
    """Classification of the limit of the weight measure.

    ``regime`` is ``atomic`` (total weight finite), ``diffuse_boundary``
    (infinite total weight and summable squared ratios), ``single_leaf``
    (squared ratios not summable) or ``undetermined``.
    """

    regime: str
    sum_w: float
    sum_ratio_sq: float
    N: int
    details: dict = field(default_factory=dict)


def measure_regime(weights: WeightSequence, N: int | None = None,
                   tail_tol: float = 1e-8, low: float = 0.8, high: float = 1.25) -> MeasureRegime:
    """Heuristic classification from the first ``N`` weights.

    Total weight is declared finite when the second half of the prefix adds
    less than ``tail_tol`` relative mass.  Otherwise the squared ratios
    ``(w_i / W_i)^2`` are summed over the blocks ``(N/4, N/2]`` and
    ``(N/2, N]``; a block ratio below ``low`` means a decaying tail (as for
    ``i^{-s}`` with ``s > 1``), above ``high`` a divergent sum.  Anything in
    between is reported as ``undetermined``.
    """
    N = weights.n_max if N is None else int(N)
    _require(weights, N)
    if N < 16:
        raise ParameterError("need at least 16 terms")
    log_W = weights.log_W
    r2 = weights.ratios[:N] ** 2
    sum_r2 = float(r2.sum())
    with np.errstate(over="ignore"):
        sum_w = float(np.exp(log_W[N - 1]))
    half, quarter = N // 2, N // 4
    if log_W[N - 1] == -np.inf:
        rel_growth = 0.0
    else:
        rel_growth = float(-np.expm1(log_W[half - 1] - log_W[N - 1]))
    d1 = float(r2[quarter:half].sum())
    d2 = float(r2[half:N].sum())
    details = {"relative_growth": rel_growth, "block1": d1, "block2": d2}
    if rel_growth < tail_tol:
        return MeasureRegime("atomic", sum_w, sum_r2, N, details)
    if d2 == 0.0 or (d1 > 0 and d2 / d1 < low):
        regime = "diffuse_boundary"
    elif d1 > 0 and d2 / d1 > high:
        regime = "single_leaf"
    else:
        regime = "undetermined"
    details["block_ratio"] = d2 / d1 if d1 > 0 else math.inf
    return MeasureRegime(regime, sum_w, sum_r2, N, details)


# ---------------------------------------------------------------------------
# Most recent common ancestor
# ---------------------------------------------------------------------------


def mrca_law(weights: WeightSequence, k: int, N: int | None = None) -> float:
    """``P[mrca = u_k]`` in the limit, truncated at ``N``.

    ``p_k = (w_k/W_k)^2 prod_{i=k+1}^N (1 - (w_i/W_i)^2)``.  Truncation makes
    the estimate too large by a factor at most
    ``1 / (1 - sum_{i>N} (w_i/W_i)^2)``; see :func:`mrca_truncation_bound`.

    Raises
    ------
    DomainError
        When the weights are classified as atomic or single-leaf.
    """
    N = weights.n_max if N is None else int(N)
    _require(weights, N)
    if not 1 <= k <= N:
        raise ParameterError("k out of range")
    regime = measure_regime(weights, N).regime
    if regime in ("atomic", "single_leaf"):
        raise DomainError(f"the limit measure is not diffuse ({regime})")
    r2 = weights.ratios[:N] ** 2
    if k == 1:
        head = 1.0
    else:
        head = r2[k - 1]
    if head == 0.0:
        return 0.0
    tail = np.sum(np.log1p(-r2[k:N]))
    return float(head * math.exp(tail))


def mrca_truncation_bound(weights: WeightSequence, N: int,
                          tail: Callable[[int], float] | None = None) -> float:
    """Upper bound on ``sum_{i>N} (w_i / W_i)^2``.

    With ``tail`` given it is returned at ``N``; otherwise the bound is
    extrapolated from the last block assuming a tail decaying like
    ``i^{-2}`` (``N r_N^2``), which is exact in order for power weights.
    """
    if tail is not None:
        return float(tail(N))
    _require(weights, N)
    return float(N * weights.ratios[N - 1] ** 2)


def sample_mrca_pairs(weights: WeightSequence, n: int, pairs: int,
                      rng: np.random.Generator) -> np.ndarray:
    """Labels of ``mrca(D, D')`` for independent ``D, D'`` drawn from ``mu_n``.

    Each pair lives in its own random tree, which is only explored along the
    two ancestral lines: the larger label is replaced by its parent, drawn
    fresh with probability ``w_k / W_{x-1}``, until both labels agree.  This
    has the same law as growing a tree, sampling two vertices and walking up.
    """
    _require(weights, n)
    if n < 1:
        raise ParameterError("n must be at least 1")
    m = np.full(pairs, n)
    x = _wrt_choices(weights, m, rng.random(pairs))
    y = _wrt_choices(weights, m, rng.random(pairs))
    active = np.flatnonzero(x != y)
    while len(active):
        xa, ya = x[active], y[active]
        big = np.maximum(xa, ya)
        small = np.minimum(xa, ya)
        # vertex ``big`` arrived when the tree had ``big - 1`` vertices
        par = np.where(big == 2, 1, _wrt_choices(weights, np.maximum(big - 1, 1), rng.random(len(active))))
        x[active] = par
        y[active] = small
        active = active[par != small]
    return x


# ---------------------------------------------------------------------------
# Heights and degrees
# ---------------------------------------------------------------------------


def expected_height_sum(weights: WeightSequence, n: int) -> float:
    """``f(n) = sum_{i=2}^{n-1} w_i / W_i``.

    Examples
    --------
    >>> from wrtlab.sequences import make_power_weights
    >>> round(expected_height_sum(make_power_weights(1, 1, 4), 4), 12)
    0.833333333333
    """
    _require(weights, max(n - 1, 1))
    return float(weights.ratios[1:n - 1].sum())


def degree_expectation(weights: WeightSequence, k: int, n: int) -> float:
    """``E[deg(u_k)]`` in a tree of size ``n``: ``sum_{i=k}^{n-1} w_k / W_i``."""
    _require(weights, max(n - 1, 1))
    if not 1 <= k <= n:
        raise ParameterError("k out of range")
    if k >= n:
        return 0.0
    lw = weights.log_w[k - 1]
    if lw == -np.inf:
        return 0.0
    return float(np.exp(lw - weights.log_W[k - 1:n - 1]).sum())


@dataclass(frozen=True)
class DegreeScalingReport:
    """Scaled degrees averaged over replicates.

    ``scaled`` holds ``n^{-(1-gamma)} deg(u_k)`` per replicate and ``k``;
    ``ratio`` divides its mean by the predicted limit ``w_k / (C (1-gamma))``
    (``nan`` where ``w_k = 0``, whose scaled degree must vanish).
    """

    n: int
    gamma: float
    k: np.ndarray
    scaled: np.ndarray
    mean_scaled: np.ndarray
    second_moment: np.ndarray
    ratio: np.ndarray
    lp_norms: np.ndarray
    max_is_first: np.ndarray


def degree_scaling_report(trees: Sequence[PlaneTree], gamma: float,
                          weights: WeightSequence | None = None, C: float | None = None,
                          k_max: int = 10, p: float = 2.0) -> DegreeScalingReport:
    """Degree scaling diagnostics over replicate trees of equal size.

    Parameters
    ----------
    trees : sequence of PlaneTree
        Replicates with the same number of vertices.
    gamma : float
        Exponent in ``W_n ~ C n^gamma``; degrees are scaled by ``n^{-(1-gamma)}``.
    weights, C : optional
        When both are given, ``ratio`` compares the mean scaled degree of
        ``u_k`` with ``w_k / (C (1 - gamma))``.
    k_max : int
        Number of leading vertices reported.
    p : float
        Exponent of the norm of the full scaled degree vector.
    """
    if not trees:
        raise ParameterError("need at least one tree")
    n = trees[0].n
    if any(t.n != n for t in trees):
        raise ParameterError("all trees must have the same size")
    if not 0 <= gamma < 1:
        raise ParameterError("gamma must lie in [0, 1)")
    k_max = min(k_max, n)
    scale = n ** -(1 - gamma)
    scaled = np.empty((len(trees), k_max))
    norms = np.empty(len(trees))
    max_first = np.empty(len(trees), dtype=bool)
    for i, t in enumerate(trees):
        d = t.degrees * scale
        scaled[i] = d[:k_max]
        norms[i] = float(np.sum(d ** p) ** (1 / p))
        max_first[i] = d[0] == d.max()
    mean = scaled.mean(axis=0)
    ratio = np.full(k_max, np.nan)
    if weights is not None and C is not None:
        wk = weights.w[:k_max]
        pred = wk / (C * (1 - gamma))
        nz = wk > 0
        ratio[nz] = mean[nz] / pred[nz]
    return DegreeScalingReport(n, float(gamma), np.arange(1, k_max + 1), scaled, mean,
                               (scaled ** 2).mean(axis=0), ratio, norms, max_first)
