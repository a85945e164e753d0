"""Moments and samplers for the limits of normalized degrees.

Under a fitness sequence with mean ``c`` the degree of ``u_k`` in a
preferential attachment tree grows like ``M_k n^{1/(c+1)}``.  The limits form
a Markov chain ``M_{k+1} = M_k / beta_k`` with

.. math:: E[M_k^p] = \\frac{(c+1)^p C_p}{\\prod_{i<k} E[\\beta_i^p]},
          \\qquad \\prod_{i<n} E[\\beta_i^p] \\sim C_p n^{-p + p/(c+1)}.

Closed forms exist for constant fitness (Mittag-Leffler Markov chains) and
for periodic integer fitness (intertwined products of generalized Gamma
processes).  Samplers go through the Beta products with a truncation; the
moment formulas are exact and serve as the cross-check.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.special import gammaln

from .errors import ParameterError
from .sequences import (
    FitnessSequence,
    estimate_Z,
    make_constant_fitness,
    make_periodic_fitness,
    sample_beta_coupling,
    weights_from_betas,
    _draw_betas,
)

__all__ = [
    "beta_moment",
    "beta_mixed_moment",
    "ml_moment",
    "LimitChainSpec",
    "limit_chain_spec",
    "estimate_Cp",
    "closed_form_Cp",
    "limit_chain_moment",
    "sample_mlmc",
    "GGPSpec",
    "sample_ggp",
    "ipggp_index_set",
    "ipggp_scale",
    "sample_ipggp",
    "sample_limit_chain",
    "ConvergenceWarning",
]

# rising-factorial products are exact enough below this many factors;
# beyond it the log-Gamma route is both faster and just as accurate
_PRODUCT_CUTOFF = 64


class ConvergenceWarning(UserWarning):
    """An extrapolated constant did not settle within tolerance."""


def _rising_ratio(x: float, y: float, p: int) -> float:
    """``(x)_p / (y)_p`` for rising factorials."""
    if p <= _PRODUCT_CUTOFF:
        out = 1.0
        for k in range(p):
            out *= (x + k) / (y + k)
        return out
    return math.exp(gammaln(x + p) - gammaln(x) - gammaln(y + p) + gammaln(y))


def beta_moment(a: float, b: float, q: int) -> float:
    """``E[beta^q]`` for ``beta ~ Beta(a, b)``.

    ``b = 0`` is the point mass at 1.

    Examples
    --------
    >>> beta_moment(2, 3, 2)
    0.2
    """
    if not a > 0:
        raise ParameterError("a must be positive")
    if b < 0 or q < 0:
        raise ParameterError("need b >= 0 and q >= 0")
    if b == 0:
        return 1.0
    return _rising_ratio(a, a + b, int(q))


def beta_mixed_moment(a: float, b: float, p: int, q: int) -> float:
    """``E[beta^p (1 - beta)^q]`` for ``beta ~ Beta(a, b)``.

    Equals ``(a)_p (b)_q / (a + b)_{p+q}``; with ``b = 0`` the variable is 1
    almost surely, so the result is 1 when ``q = 0`` and 0 otherwise.
    """
    if not a > 0:
        raise ParameterError("a must be positive")
    if b < 0 or p < 0 or q < 0:
        raise ParameterError("need b >= 0 and p, q >= 0")
    if b == 0:
        return 1.0 if q == 0 else 0.0
    p, q = int(p), int(q)
    if p + q <= _PRODUCT_CUTOFF:
        out = 1.0
        for k in range(p):
            out *= (a + k) / (a + b + k)
        for k in range(q):
            out *= (b + k) / (a + b + p + k)
        return out
    return math.exp(gammaln(a + p) + gammaln(b + q) + gammaln(a + b)
                    - gammaln(a) - gammaln(b) - gammaln(a + b + p + q))


def ml_moment(alpha: float, theta: float, p: int) -> float:
    """p-th moment of the generalized Mittag-Leffler law ``ML(alpha, theta)``.

    .. math:: \\frac{\\Gamma(\\theta+1)\\Gamma(\\theta/\\alpha+p+1)}
                    {\\Gamma(\\theta/\\alpha+1)\\Gamma(\\theta+p\\alpha+1)}

    Examples
    --------
    >>> round(ml_moment(0.5, 0.5, 2), 12)
    4.0
    """
    if not 0 < alpha < 1:
        raise ParameterError("alpha must lie in (0, 1)")
    if not theta > -alpha:
        raise ParameterError("theta must exceed -alpha")
    if p < 0:
        raise ParameterError("p must be nonnegative")
    return math.exp(gammaln(theta + 1) + gammaln(theta / alpha + p + 1)
                    - gammaln(theta / alpha + 1) - gammaln(theta + p * alpha + 1))


# ---------------------------------------------------------------------------
# Limit chain specification and moments
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LimitChainSpec:
    """Description of the chain of degree limits for a fitness sequence.

    ``closed_form`` is ``"mlmc"`` for constant fitness ``(a, b, b, ...)``
    (then ``params = {"alpha": 1/(b+1), "theta": a/(b+1)}``), ``"ipggp"`` for
    periodic integer fitness (``params`` holds ``a`` and ``pattern``), or
    ``None`` when only the generic extrapolation is available.
    """

    fitness: FitnessSequence
    c: float
    closed_form: str | None = None
    params: dict = field(default_factory=dict)


def limit_chain_spec(fitness: FitnessSequence, c: float | None = None) -> LimitChainSpec:
    """Attach the matching closed form to ``fitness`` when there is one."""
    if c is None:
        c = fitness.mean_fitness
        if c is None:
            raise ParameterError("c is needed for a fitness without a repeating tail")
    if not c > 0:
        raise ParameterError("the mean fitness c must be positive")
    head, pattern = fitness.head, fitness.pattern
    if len(head) == 1 and len(pattern) == 1 and pattern[0] > 0 and fitness.kind != "periodic_fitness":
        a, b = head[0], pattern[0]
        return LimitChainSpec(fitness, c, "mlmc",
                              {"a": a, "b": b, "alpha": 1 / (b + 1), "theta": a / (b + 1)})
    if len(head) == 1 and pattern and all(float(x).is_integer() for x in pattern):
        return LimitChainSpec(fitness, c, "ipggp",
                              {"a": head[0], "pattern": [int(x) for x in pattern]})
    return LimitChainSpec(fitness, c, None, {})


def _log_beta_moment_products(fitness: FitnessSequence, p: int, n: int) -> np.ndarray:
    """``log prod_{i<m} E[beta_i^p]`` for ``m = 1..n`` (first entry 0)."""
    a = fitness.values(n)
    A = np.cumsum(a)
    i = np.arange(1, n)
    x = A[i - 1] + i
    y = x + a[i]
    # log of (x)_p / (y)_p, zero when a_{i+1} = 0
    terms = gammaln(x + p) - gammaln(x) - gammaln(y + p) + gammaln(y)
    if p <= 8:
        # direct products are more accurate than Gamma differences here
        terms = np.zeros(n - 1)
        for k in range(p):
            terms += np.log1p(-a[i] / (y + k))
    return np.concatenate([[0.0], np.cumsum(terms)])


def closed_form_Cp(spec: LimitChainSpec, p: int) -> float:
    """Exact ``C_p`` for the ``mlmc`` and ``ipggp`` closed forms."""
    if spec.closed_form == "mlmc":
        a, b = spec.params["a"], spec.params["b"]
        return math.exp(-p * math.log(b + 1) + gammaln(1 + a + p) + gammaln(1 + a / (b + 1))
                        - gammaln(1 + a) - gammaln(1 + (a + p) / (b + 1)))
    if spec.closed_form == "ipggp":
        a, pattern = spec.params["a"], spec.params["pattern"]
        ell, S = len(pattern), sum(pattern)
        idx = np.array(ipggp_index_set(pattern), dtype=np.float64)
        val = p * S / (ell + S) * math.log(ell)
        val += np.sum(gammaln((a + idx + p) / (ell + S)) - gammaln((a + idx) / (ell + S)))
        return math.exp(val)
    raise ParameterError("this spec has no closed form for C_p")


def estimate_Cp(fitness: FitnessSequence, c: float, p: int, N: int = 10**6,
                rtol: float = 0.01) -> tuple[float, bool]:
    """Extrapolate ``C_p = lim n^{p - p/(c+1)} prod_{i<n} E[beta_i^p]``.

    The partial products are evaluated at ``N/4``, ``N/2`` and ``N`` and an
    Aitken step removes a geometric error ``K n^{-eps}``.

    Returns
    -------
    value : float
    flagged : bool
        True when the extrapolated and the raw value at ``N`` differ by more
        than ``rtol``.
    """
    logs = _log_beta_moment_products(fitness, p, N)
    expo = p - p / (c + 1)
    pts = [N // 4, N // 2, N]
    vals = [math.exp(logs[m - 1] + expo * math.log(m)) for m in pts]
    d1, d2 = vals[1] - vals[0], vals[2] - vals[1]
    est = vals[2]
    if d1 != 0:
        rho = d2 / d1
        if 0 < rho < 1:
            est = vals[2] + d2 * rho / (1 - rho)
    flagged = abs(est - vals[2]) > rtol * abs(est)
    return est, flagged


def limit_chain_moment(spec: LimitChainSpec, k: int, p: int, N: int = 10**6,
                       method: str = "auto") -> float:
    """``E[(M_k)^p]`` for the chain of degree limits.

    Parameters
    ----------
    spec : LimitChainSpec
    k : int
        Vertex index (from 1).
    p : int
        Moment order.
    N : int
        Truncation for the generic path.
    method : {"auto", "closed", "generic"}
        ``auto`` uses the closed form of ``C_p`` when the spec has one.

    Warns
    -----
    ConvergenceWarning
        When the generic extrapolation is not settled to 1%.
    """
    if k < 1 or p < 0:
        raise ParameterError("need k >= 1 and p >= 0")
    if p == 0:
        return 1.0
    c = spec.c
    if method == "generic" or (method == "auto" and spec.closed_form is None):
        Cp, flagged = estimate_Cp(spec.fitness, c, p, N)
        if flagged:
            warnings.warn(f"C_{p} extrapolation moved by more than 1%", ConvergenceWarning)
    else:
        Cp = closed_form_Cp(spec, p)
    log_den = _log_beta_moment_products(spec.fitness, p, k)[k - 1]
    return math.exp(p * math.log(c + 1) + math.log(Cp) - log_den)


# ---------------------------------------------------------------------------
# Samplers through Beta products
# ---------------------------------------------------------------------------


def _chain_from_betas(fitness: FitnessSequence, c: float, C1: float, N: int, k_max: int,
                      rng: np.random.Generator) -> np.ndarray:
    b, comp = _draw_betas(fitness, 1, N, rng)
    a = fitness.values(N)
    A = np.cumsum(a)
    i = np.arange(1, N)
    mean = (A[i - 1] + i) / (A[i - 1] + i + a[i])
    log_b = np.where(comp < 0.5, np.log1p(-comp), np.log(b))
    log_X = np.sum(log_b - np.log(mean))
    M1 = (c + 1) * C1 * math.exp(log_X)
    out = np.empty(k_max)
    out[0] = M1
    for k in range(1, k_max):
        out[k] = out[k - 1] / b[k - 1]
    return out


def sample_mlmc(alpha: float, theta: float, k_max: int, N: int, rng: np.random.Generator,
                replicates: int | None = None) -> np.ndarray:
    """Approximate draws of the Mittag-Leffler Markov chain ``MLMC(alpha, theta)``.

    The chain is built from the Beta products of constant fitness
    ``(theta/alpha, 1/alpha - 1, ...)``: ``M_1 = (c+1) C_1 X_N`` with the
    martingale ``X_N = prod_{i<N} beta_i / E[beta_i]`` and
    ``M_{k+1} = M_k / beta_k``.  Because ``X_N`` is a mean-one martingale the
    first moment is unbiased for every ``N``; higher moments carry a relative
    truncation error of order ``1/N``.

    Returns
    -------
    ndarray
        Shape ``(k_max,)`` or ``(replicates, k_max)``.
    """
    if not 0 < alpha < 1 or not theta > -alpha:
        raise ParameterError("need 0 < alpha < 1 and theta > -alpha")
    if N <= k_max:
        raise ParameterError("truncation N must exceed k_max")
    if N < 10**4:
        warnings.warn("truncation below 1e4 inflates the bias of higher moments",
                      ConvergenceWarning)
    a, b = theta / alpha, 1 / alpha - 1
    fitness = make_constant_fitness(a, b, N)
    spec = limit_chain_spec(fitness)
    C1 = closed_form_Cp(spec, 1)
    if replicates is None:
        return _chain_from_betas(fitness, b, C1, N, k_max, rng)
    return np.stack([_chain_from_betas(fitness, b, C1, N, k_max, rng)
                     for _ in range(replicates)])


def sample_limit_chain(fitness: FitnessSequence, c: float, k_max: int, N: int,
                       rng: np.random.Generator,
                       window: tuple[float, float] = (0.5, 1.0)) -> np.ndarray:
    """Approximate ``(M_1, ..., M_{k_max})`` for a general fitness sequence.

    ``Z`` is replaced by the tail average of ``W_n n^{-c/(c+1)}`` over the
    window, then ``M_1 = (c+1)/Z`` and ``M_{k+1} = M_k / beta_k``, so the
    ratios of consecutive entries are the sampled Beta variables.
    """
    if not c > 0:
        raise ParameterError("c must be positive")
    if N <= k_max:
        raise ParameterError("truncation N must exceed k_max")
    coupling = sample_beta_coupling(fitness, N, rng)
    weights = weights_from_betas(coupling)
    Z = estimate_Z(weights, c / (c + 1), N, window)
    out = np.empty(k_max)
    out[0] = (c + 1) / Z
    for k in range(1, k_max):
        out[k] = out[k - 1] / coupling.betas[k - 1]
    return out


@dataclass(frozen=True)
class GGPSpec:
    """Generalized Gamma process with parameters ``(z, r)``."""

    z: float
    r: float

    def __post_init__(self):
        if not self.z > 0 or not self.r > 0:
            raise ParameterError("z and r must be positive")


def sample_ggp(spec: GGPSpec, k_max: int, rng: np.random.Generator,
               size: int | Sequence[int] | None = None) -> np.ndarray:
    """``G_k = (Z_1 + ... + Z_k)^{1/r}`` with ``Z_1 ~ Gamma(z/r)``, ``Z_i ~ Exp(1)``.

    ``G_k^r`` is Gamma distributed with shape ``k - 1 + z/r``.  With
    ``z = r`` the values are the points of a Poisson process of intensity
    ``r t^{r-1} dt`` in increasing order.
    """
    shape = () if size is None else ((size,) if np.isscalar(size) else tuple(size))
    first = rng.standard_gamma(spec.z / spec.r, size=shape + (1,))
    rest = rng.standard_exponential(size=shape + (k_max - 1,))
    total = np.cumsum(np.concatenate([first, rest], axis=-1), axis=-1)
    return total ** (1.0 / spec.r)


def ipggp_index_set(pattern: Sequence[int]) -> list[int]:
    """Index set ``{1..S+l-1}`` minus ``{B_r + r : 1 <= r <= l-1}``."""
    pattern = [int(b) for b in pattern]
    ell, S = len(pattern), sum(pattern)
    if S <= 0:
        raise ParameterError("pattern must contain a nonzero entry")
    B = np.cumsum([0] + pattern)
    removed = {int(B[r]) + r for r in range(1, ell)}
    idx = [q for q in range(1, S + ell) if q not in removed]
    assert idx, "index set cannot be empty for a nonzero pattern"
    return idx


def ipggp_scale(pattern: Sequence[int]) -> float:
    """Factor ``s`` with ``M_k = s G_k`` in distribution.

    ``s = (S + l) l^{-l/(S+l)}``, equivalently ``G = l^{l/(S+l)} / (S+l) M``.
    """
    ell, S = len(pattern), sum(pattern)
    return (S + ell) * ell ** (-ell / (S + ell))


def sample_ipggp(a: float, pattern: Sequence[int], k_max: int, rng: np.random.Generator,
                 size: int | None = None) -> np.ndarray:
    """Intertwined product of generalized Gamma processes ``IPGGP(a; b_1..b_l)``.

    With ``B_r = b_1 + ... + b_r`` and independent ``G^(q) ~ GGP(a+q, l+S)``
    for ``q`` in :func:`ipggp_index_set`, the value at ``k = l(n-1) + r``
    (``1 <= r <= l``) is

    .. math:: \\prod_{q \\le r-1+B_{r-1}} G^{(q)}_{n+1}
              \\prod_{q \\ge r+B_{r-1}} G^{(q)}_{n}.

    Returns
    -------
    ndarray
        Shape ``(k_max,)`` or ``(size, k_max)``.
    """
    if not a > -1:
        raise ParameterError("a must exceed -1")
    pattern = [int(b) for b in pattern]
    idx = ipggp_index_set(pattern)
    ell, S = len(pattern), sum(pattern)
    B = np.cumsum([0] + pattern)
    n_top = (k_max - 1) // ell + 2
    shape = () if size is None else (size,)
    comps = {q: sample_ggp(GGPSpec(a + q, ell + S), n_top, rng, size) for q in idx}
    out = np.ones(shape + (k_max,))
    for k in range(1, k_max + 1):
        n, r = (k - 1) // ell + 1, (k - 1) % ell + 1
        cut = r - 1 + int(B[r - 1])
        for q in idx:
            g = comps[q]
            out[..., k - 1] *= g[..., n] if q <= cut else g[..., n - 1]
    return out
