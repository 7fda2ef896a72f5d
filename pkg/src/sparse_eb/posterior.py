"""Exact subset posterior over all 2^n index sets in polynomial time.

The posterior weight of a set I factorizes through its cardinality and the
per-coordinate factors ``a_i = exp(x_i^2 / (2 sigma^2))``:

    w(I) = G_{|I|} * prod_{i in I} a_i,   G_k = exp(-(kappa + 1/2) k log(e n / k)),

so every marginal of interest reduces to elementary symmetric polynomials
e_k(a). All recursions below add nonnegative terms only and run entirely in
the log domain, which keeps them exact-to-roundoff and overflow-free even
for |x_i| / sigma in the hundreds:

* cardinality posterior:   q_k ~ G_k * e_k(a);
* inclusion probabilities: p_i ~ a_i * sum_u e_u(prefix_i) * D_i[u], where
  D_i[u] = sum_v G_{u+v+1} e_v(suffix_i) satisfies the backward recursion
  D_{i-1}[u] = D_i[u] + a_i * D_i[u+1]  (O(n^2) overall, no subtraction);
* fixed-size subset sampling: sequential inclusion probabilities read off
  the suffix table (conditional Bernoulli sampling).

A literal leave-one-out recursion per coordinate (O(n^3)) is kept as
``_inclusion_leave_one_out`` purely as a cross-check; the subtraction
recursion e_j(a without i) = e_j(a) - a_i e_{j-1}(a without i) is rejected
outright because it cancels catastrophically when a_i dominates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.special import logsumexp
from scipy.stats import norm

from .core import Observation, complexity_curve, derive_rng

__all__ = [
    "SubsetPosterior",
    "PosteriorDraw",
    "ProductPosterior",
    "subset_log_weight",
    "build",
    "shrinkage_mean",
    "sample",
    "product_posterior",
]

_NEG_INF = float("-inf")


@dataclass(frozen=True)
class SubsetPosterior:
    """Exact posterior summaries for one observation.

    Attributes
    ----------
    log_a : np.ndarray
        Per-coordinate log factors ``x_i^2 / (2 sigma^2)``.
    log_G : np.ndarray
        Log cardinality weights ``-(kappa + 1/2) k log(e n / k)``, k = 0..n.
    log_esp : np.ndarray
        ``log e_k(a)`` for k = 0..n.
    cardinality_posterior : np.ndarray
        q_k, normalized to sum exactly to 1.
    inclusion : np.ndarray
        Marginal inclusion probabilities p_i.
    conditional_sd : np.ndarray
        Gaussian sd of an included coordinate given cardinality k:
        ``sigma * sqrt(1 - k / (e n))`` (the k = 0 entry is the formula
        limit and is never used; an empty set has no Gaussian coordinates).
    """

    log_a: np.ndarray
    log_G: np.ndarray
    log_esp: np.ndarray
    cardinality_posterior: np.ndarray
    inclusion: np.ndarray
    conditional_sd: np.ndarray
    sigma: float
    kappa: float
    _log_suffix_esp: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.log_a.size


@dataclass(frozen=True)
class PosteriorDraw:
    """One draw: the subset and the vector (exact zeros off the subset)."""

    subset: np.ndarray
    value: np.ndarray


class ProductPosterior(NamedTuple):
    """Coordinatewise posterior summaries under the product prior."""

    inclusion: np.ndarray
    mean: np.ndarray
    median: np.ndarray


def _check_kappa(kappa: float) -> float:
    kappa = float(kappa)
    if not (kappa > 0 and math.isfinite(kappa)):
        raise ValueError(f"kappa must be positive and finite, got {kappa}")
    return kappa


def subset_log_weight(I, x: Observation, kappa: float) -> float:
    """Unnormalized log posterior weight of the index set I.

    Equals ``-(kappa + 1/2)|I| log(e n/|I|) + sum_{i in I} x_i^2/(2 sigma^2)``;
    the data-independent constant is dropped. Maximizing this over I is the
    same optimization as the penalized selection criterion (factor 2 sigma^2
    and an additive constant apart).
    """
    kappa = _check_kappa(kappa)
    idx = np.asarray(sorted(int(i) for i in I), dtype=int)
    n = x.n
    if idx.size:
        if idx[0] < 0 or idx[-1] >= n:
            raise ValueError(f"index set entries must lie in [0, {n - 1}]")
        if np.any(np.diff(idx) == 0):
            raise ValueError("index set entries must be distinct")
    curve = complexity_curve(n)
    energy = float(np.sum(x.x[idx] ** 2)) / (2.0 * x.sigma**2)
    return -(kappa + 0.5) * float(curve[idx.size]) + energy


def _log_prefix_esp(log_a: np.ndarray) -> np.ndarray:
    """E[i, j] = log e_j(a_0..a_{i-1}); shape (n+1, n+1). Dtype follows log_a."""
    n = log_a.size
    E = np.full((n + 1, n + 1), _NEG_INF, dtype=log_a.dtype)
    E[0, 0] = 0.0
    for i in range(1, n + 1):
        E[i] = E[i - 1]
        E[i, 1:] = np.logaddexp(E[i - 1, 1:], log_a[i - 1] + E[i - 1, :-1])
    return E


def _log_suffix_esp(log_a: np.ndarray) -> np.ndarray:
    """S[t, j] = log e_j(a_t..a_{n-1}); shape (n+1, n+1). Dtype follows log_a."""
    n = log_a.size
    S = np.full((n + 1, n + 1), _NEG_INF, dtype=log_a.dtype)
    S[n, 0] = 0.0
    for t in range(n - 1, -1, -1):
        S[t] = S[t + 1]
        S[t, 1:] = np.logaddexp(S[t + 1, 1:], log_a[t] + S[t + 1, :-1])
    return S


def _lse_rows(arr: np.ndarray) -> np.ndarray:
    """Row-wise log-sum-exp, dtype-preserving (rows have a finite maximum)."""
    m = arr.max(axis=1)
    return np.log(np.exp(arr - m[:, None]).sum(axis=1)) + m


def _posterior_marginals(
    log_a: np.ndarray, log_G: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Cardinality posterior and inclusion probabilities for given weights."""
    n = log_a.size
    if n == 0:
        return np.ones(1), np.zeros(0)
    # Conditioning: center the per-coordinate factors (compensated exactly
    # through the cardinality weights) and run the recursions in extended
    # precision. Interior magnitudes then track the spread of log_a rather
    # than its running sum, and the accumulated roundoff stays orders of
    # magnitude below the 1e-9 identity tolerances even at n = 500.
    center = float(log_a.mean())
    la = (log_a - center).astype(np.longdouble)
    lg = log_G.astype(np.longdouble) + np.longdouble(center) * np.arange(n + 1)
    log_esp = _log_suffix_esp(la)[0]
    log_q_raw = lg + log_esp
    shift = log_q_raw.max()
    weights = np.exp(log_q_raw - shift)
    log_Z = np.log(weights.sum()) + shift
    q = (weights / weights.sum()).astype(float)
    q /= q.sum()
    # D_i[u] = log sum_v G_{u+v+1} e_v(a_{i+1}..a_{n-1}) via backward recursion.
    E = _log_prefix_esp(la)
    log_c = np.concatenate([lg[1:], [np.longdouble(_NEG_INF)]])
    D = np.empty((n, n + 1), dtype=np.longdouble)
    D[n - 1] = log_c
    for i in range(n - 1, 0, -1):
        D[i - 1] = D[i]
        D[i - 1, :-1] = np.logaddexp(D[i, :-1], la[i] + D[i, 1:])
    log_w = _lse_rows(E[:n] + D)
    p = np.exp(np.minimum(la + log_w - log_Z, 0.0)).astype(float)
    return q, p


def build(x: Observation, kappa: float) -> SubsetPosterior:
    """Compute the exact cardinality posterior and inclusion probabilities.

    O(n^2) time and memory; log-domain throughout, so it cannot overflow.
    Coordinates whose log factor exceeds the largest possible penalty
    increment by 46 nats are excluded from no subset with more than e^-46
    posterior odds; they are conditioned on exactly (p_i = 1, cardinality
    shifted), which keeps the remaining log magnitudes small and the
    marginals accurate to roundoff even for |x_i| / sigma in the thousands.
    """
    kappa = _check_kappa(kappa)
    n = x.n
    log_a = x.x**2 / (2.0 * x.sigma**2)
    log_G = -(kappa + 0.5) * complexity_curve(n)

    S = _log_suffix_esp(log_a)
    log_esp = S[0].copy()

    sure = log_a >= (kappa + 0.5) * (1.0 + math.log(n)) + 46.0
    s = int(np.count_nonzero(sure))
    q_rest, p_rest = _posterior_marginals(log_a[~sure], log_G[s:])
    q = np.zeros(n + 1)
    q[s:] = q_rest
    p = np.ones(n)
    p[~sure] = p_rest

    k = np.arange(n + 1, dtype=float)
    cond_sd = x.sigma * np.sqrt(1.0 - k / (math.e * n))

    return SubsetPosterior(
        log_a=log_a,
        log_G=log_G,
        log_esp=log_esp,
        cardinality_posterior=q,
        inclusion=p,
        conditional_sd=cond_sd,
        sigma=x.sigma,
        kappa=kappa,
        _log_suffix_esp=S,
    )


def _inclusion_leave_one_out(x: Observation, kappa: float) -> np.ndarray:
    """Reference inclusion probabilities via a fresh leave-one-out DP per i.

    O(n^3); used to cross-check the production O(n^2) path in tests. Both
    paths add nonnegative terms only, so they agree to roundoff.
    """
    kappa = _check_kappa(kappa)
    n = x.n
    log_a = x.x**2 / (2.0 * x.sigma**2)
    log_G = -(kappa + 0.5) * complexity_curve(n)
    log_Z = float(logsumexp(log_G + _log_suffix_esp(log_a)[0]))
    # Row i carries the forward ESP recursion over all coordinates except i.
    L = np.full((n, n + 1), _NEG_INF)
    L[:, 0] = 0.0
    for t in range(n):
        add = np.full(n, log_a[t])
        add[t] = _NEG_INF
        L[:, 1:] = np.logaddexp(L[:, 1:], add[:, None] + L[:, :-1])
    log_w = logsumexp(log_G[None, 1:] + L[:, :n], axis=1)
    return np.exp(np.minimum(log_a + log_w - log_Z, 0.0))


def shrinkage_mean(post: SubsetPosterior, x: Observation) -> np.ndarray:
    """Posterior mean estimate ``p_i * x_i``."""
    if post.n != x.n:
        raise ValueError("posterior and observation dimensions differ")
    return post.inclusion * x.x


def _sample_arrays(
    post: SubsetPosterior, x: Observation, rng: np.random.Generator, count: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized two-stage sampler; returns (cardinalities, masks, values)."""
    n = post.n
    S = post._log_suffix_esp
    ks = rng.choice(n + 1, size=count, p=post.cardinality_posterior)
    remaining = ks.astype(np.int64).copy()
    mask = np.zeros((count, n), dtype=bool)
    uniforms = rng.random((count, n))
    for t in range(n):
        r = remaining
        live = r > 0
        num = post.log_a[t] + S[t + 1, np.maximum(r, 1) - 1]
        den = S[t, np.minimum(r, n - t)]
        with np.errstate(invalid="ignore"):
            incl = np.exp(np.minimum(num - den, 0.0))
        take = live & (uniforms[:, t] < incl)
        take |= live & (r == n - t)  # as many slots left as picks: forced
        mask[:, t] = take
        remaining = r - take
    z = rng.standard_normal((count, n))
    sd = post.conditional_sd[ks]
    values = np.where(mask, x.x[None, :] + sd[:, None] * z, 0.0)
    return ks, mask, values


def sample(post: SubsetPosterior, x: Observation, seed: int, count: int) -> list[PosteriorDraw]:
    """Draw ``count`` exact posterior samples; deterministic given ``seed``.

    Each draw picks a cardinality from q, then a subset of that size with
    probability proportional to ``prod_{i in I} a_i`` by sequential inclusion
    (conditional Bernoulli), then Gaussian values on the subset and exact
    zeros elsewhere.
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    if post.n != x.n:
        raise ValueError("posterior and observation dimensions differ")
    rng = derive_rng(seed)
    ks, mask, values = _sample_arrays(post, x, rng, int(count))
    return [
        PosteriorDraw(subset=np.flatnonzero(mask[d]), value=values[d])
        for d in range(int(count))
    ]


def product_posterior(x: Observation, kappa: float, K: float) -> ProductPosterior:
    """Coordinatewise posterior under the product prior variant.

    The prior slab variance is ``K sigma^2`` and the inclusion odds involve
    ``h = n^kappa sqrt(K+1)``, giving the closed form
    ``p_i = 1 / (1 + h exp(-x_i^2 / (2 sigma^2)))`` (computed in log domain).
    The median solves mixture CDF = 1/2 for the two-point mixture
    ``p_i N(x_i, K sigma^2/(K+1)) + (1-p_i) delta_0``: it is 0 whenever the
    atom straddles the 1/2 level and a shifted Gaussian quantile otherwise.
    """
    kappa = _check_kappa(kappa)
    K = float(K)
    if not (K > 0 and math.isfinite(K)):
        raise ValueError(f"K must be positive and finite, got {K}")
    n = x.n
    log_a = x.x**2 / (2.0 * x.sigma**2)
    log_h = kappa * math.log(n) + 0.5 * math.log1p(K)
    p = np.exp(-np.logaddexp(0.0, log_h - log_a))
    mean = p * x.x

    s = x.sigma * math.sqrt(K / (K + 1.0))
    mass_below_zero = p * norm.cdf(-x.x / s)
    median = np.zeros(n)
    neg = mass_below_zero >= 0.5
    pos = mass_below_zero + (1.0 - p) < 0.5
    if np.any(neg):
        median[neg] = x.x[neg] + s * norm.ppf(0.5 / p[neg])
    if np.any(pos):
        median[pos] = x.x[pos] + s * norm.ppf((p[pos] - 0.5) / p[pos])
    return ProductPosterior(inclusion=p, mean=mean, median=median)
