"""Exhaustive 2^n reference computations used as independent test oracles.

These never call the production selection/posterior paths: every quantity is
rebuilt from the subset definitions by enumerating all bitmasks. Complement
energies are accumulated smallest-magnitude-first (adding exact zeros for
excluded slots keeps IEEE associativity identical to a plain sequential sum),
which is also what makes exact-equality assertions against the production
criterion meaningful.
"""

import numpy as np
from scipy.special import logsumexp

from sparse_eb.core import complexity_curve, order_by_magnitude


def all_subset_masks(n: int) -> np.ndarray:
    """Boolean matrix (2^n, n); row m is the subset with bits of m set."""
    m = np.arange(2**n, dtype=np.uint32)
    return ((m[:, None] >> np.arange(n)) & 1).astype(bool)


def _complement_energy_ascending(x: np.ndarray, masks: np.ndarray) -> np.ndarray:
    """sum of x_i^2 over each mask's complement, smallest |x| added first."""
    asc = order_by_magnitude(x)[::-1]
    sq_asc = x[asc] ** 2
    masks_asc = masks[:, asc]
    contrib = np.where(~masks_asc, sq_asc[None, :], 0.0)
    return np.cumsum(contrib, axis=1)[:, -1]


def brute_tau_oracle(theta: np.ndarray, sigma: float, tau: float):
    """(min rate, cardinality of the smallest-k minimizer) over all subsets."""
    n = theta.size
    masks = all_subset_masks(n)
    k = masks.sum(axis=1)
    rates = _complement_energy_ascending(theta, masks) + tau * sigma**2 * complexity_curve(n)[k]
    best = rates.min()
    best_k = int(k[rates == best].min())
    return float(best), best_k


def brute_r_oracle(theta: np.ndarray, sigma: float):
    n = theta.size
    masks = all_subset_masks(n)
    k = masks.sum(axis=1)
    rates = _complement_energy_ascending(theta, masks) + sigma**2 * k
    best = rates.min()
    return float(best), int(k[rates == best].min())


def brute_selector_min(x: np.ndarray, sigma: float, kappa: float) -> float:
    """Exhaustive minimum of the penalized selection criterion."""
    n = x.size
    masks = all_subset_masks(n)
    k = masks.sum(axis=1)
    crit = _complement_energy_ascending(x, masks) + (
        (2.0 * kappa + 1.0) * sigma**2 * complexity_curve(n)[k]
    )
    return float(crit.min())


def brute_posterior(x: np.ndarray, sigma: float, kappa: float):
    """Exhaustive q, p, shrinkage mean, and the maximum subset log weight."""
    n = x.size
    masks = all_subset_masks(n)
    k = masks.sum(axis=1)
    w = -(kappa + 0.5) * complexity_curve(n)[k] + (masks @ (x**2)) / (2.0 * sigma**2)
    log_z = logsumexp(w)
    prob = np.exp(w - log_z)
    q = np.bincount(k, weights=prob, minlength=n + 1)
    p = prob @ masks
    mean = prob @ (masks * x[None, :])
    return q, p, mean, float(w.max())
