"""Oracle benchmark functionals of the true signal.

For a candidate index set I the local rate splits into a bias part (signal
energy left outside I) and a log-inflated variance part. The oracle is the
set minimizing that rate. Because at fixed cardinality k the rate is
minimized by the k largest-magnitude coordinates, the search over all 2^n
subsets reduces to a scan over k = 0..n after one sort; the exhaustive
search exists only in the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import complexity_curve, complexity_term, order_by_magnitude, signal_array

__all__ = [
    "OracleReport",
    "tau_rate",
    "tau_oracle",
    "restricted_tau_oracle",
    "r_oracle",
    "ebr_member",
]


@dataclass(frozen=True)
class OracleReport:
    """Oracle set and rate decomposition for one (theta, sigma, tau).

    Attributes
    ----------
    oracle_set : np.ndarray
        0-based indices of the oracle set, ascending.
    rate_sq : float
        Minimized squared rate, ``bias_part + variance_part``.
    bias_part : float
        Signal energy outside the oracle set.
    variance_part : float
        ``tau * sigma^2 * k * log(e*n/k)`` at the oracle cardinality.
    ebr_ratio : float
        Excessive bias ratio: ``bias_part / (sigma^2 + variance_part / tau)``.
    """

    tau: float
    oracle_set: np.ndarray
    oracle_cardinality: int
    rate_sq: float
    bias_part: float
    variance_part: float
    ebr_ratio: float


def _check_sigma(sigma: float) -> float:
    sigma = float(sigma)
    if not (sigma > 0 and math.isfinite(sigma)):
        raise ValueError(f"sigma must be positive and finite, got {sigma}")
    return sigma


def _check_tau(tau: float) -> float:
    tau = float(tau)
    if not (tau > 0 and math.isfinite(tau)):
        raise ValueError(f"tau must be positive and finite, got {tau}")
    return tau


def _check_index_set(I, n: int) -> np.ndarray:
    idx = np.asarray(sorted(int(i) for i in I), dtype=int)
    if idx.size:
        if idx[0] < 0 or idx[-1] >= n:
            raise ValueError(f"index set entries must lie in [0, {n - 1}]")
        if np.any(np.diff(idx) == 0):
            raise ValueError("index set entries must be distinct")
    return idx


def tau_rate(I, theta, sigma: float, tau: float) -> float:
    """Squared local rate of the set I: bias outside I plus penalized variance."""
    arr = signal_array(theta)
    sigma = _check_sigma(sigma)
    tau = _check_tau(tau)
    idx = _check_index_set(I, arr.size)
    mask = np.zeros(arr.size, dtype=bool)
    mask[idx] = True
    bias = float(np.sum(arr[~mask] ** 2))
    return bias + tau * sigma**2 * complexity_term(idx.size, arr.size)


def _scan(theta, sigma: float, tau: float, k_min: int = 0) -> OracleReport:
    arr = signal_array(theta)
    n = arr.size
    if not 0 <= k_min <= n:
        raise ValueError(f"k_min must lie in [0, {n}], got {k_min}")
    order = order_by_magnitude(arr)
    sq_desc = arr[order] ** 2
    # bias(k) = energy of the n-k smallest magnitudes, accumulated small-first
    tail = np.zeros(n + 1)
    tail[:n] = np.cumsum(sq_desc[::-1])[::-1]
    penalty = tau * sigma**2 * complexity_curve(n)
    objective = tail + penalty
    k_hat = k_min + int(np.argmin(objective[k_min:]))  # ties -> smallest k
    oracle_set = np.sort(order[:k_hat])
    bias = float(tail[k_hat])
    variance = float(penalty[k_hat])
    ebr = bias / (sigma**2 + variance / tau)
    return OracleReport(
        tau=tau,
        oracle_set=oracle_set,
        oracle_cardinality=k_hat,
        rate_sq=bias + variance,
        bias_part=bias,
        variance_part=variance,
        ebr_ratio=ebr,
    )


def tau_oracle(theta, sigma: float, tau: float) -> OracleReport:
    """Best index set and rate over all subsets.

    Ties across cardinalities resolve to the smallest k; within a cardinality
    the magnitude order (ties by ascending index) fixes the set, which also
    minimizes the sum of indices among magnitude-tied optima.
    """
    return _scan(theta, _check_sigma(sigma), _check_tau(tau))


def restricted_tau_oracle(theta, sigma: float, tau: float, k_min: int) -> OracleReport:
    """Oracle over sets of cardinality >= k_min; k_min = 0 recovers tau_oracle."""
    return _scan(theta, _check_sigma(sigma), _check_tau(tau), k_min=int(k_min))


def r_oracle(theta, sigma: float) -> tuple[np.ndarray, float]:
    """Minimizer and value of the un-inflated rate (bias + sigma^2 * |I|).

    This benchmark is not mimicable by data-driven procedures; it exists for
    comparison with the log-inflated oracle rate.
    """
    arr = signal_array(theta)
    sigma = _check_sigma(sigma)
    n = arr.size
    order = order_by_magnitude(arr)
    sq_desc = arr[order] ** 2
    tail = np.zeros(n + 1)
    tail[:n] = np.cumsum(sq_desc[::-1])[::-1]
    objective = tail + sigma**2 * np.arange(n + 1)
    k_hat = int(np.argmin(objective))
    return np.sort(order[:k_hat]), float(objective[k_hat])


def ebr_member(theta, sigma: float, tau: float, t: float) -> bool:
    """Whether the excessive bias ratio of theta is at most t."""
    t = float(t)
    if not (t >= 0):
        raise ValueError(f"t must be >= 0, got {t}")
    return bool(tau_oracle(theta, sigma, tau).ebr_ratio <= t)
