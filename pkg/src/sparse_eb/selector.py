"""Penalized variable selection and hard thresholding.

The selected set maximizes the subset posterior weight, equivalently
minimizes ``crit(k) = sum of the n-k smallest x_i^2 +
(2*kappa+1) * sigma^2 * k * log(e*n/k)`` over k, with the top-k magnitudes
realizing each cardinality. Ties resolve to the smallest k, then to the
magnitude order (ascending index among equal magnitudes).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Observation, complexity_curve, complexity_term, order_by_magnitude

__all__ = [
    "SubsetSelection",
    "criterion",
    "select",
    "hard_threshold_estimate",
    "radius_sq",
]


@dataclass(frozen=True)
class SubsetSelection:
    """Selection result: set, criterion curve, threshold, and radius.

    ``selected`` holds 0-based indices (ascending) of the ``cardinality``
    largest-magnitude coordinates; ``criterion_values[k]`` is the penalized
    criterion at cardinality k; ``threshold`` is the smallest included
    magnitude (0 when nothing is selected); ``radius_sq`` is the data-driven
    squared radius ``sigma^2 * (1 + k * log(e*n/k))``.
    """

    selected: np.ndarray
    cardinality: int
    criterion_values: np.ndarray
    threshold: float
    radius_sq: float

    @property
    def n(self) -> int:
        return self.criterion_values.size - 1


def _check_kappa(kappa: float) -> float:
    kappa = float(kappa)
    if not (kappa > 0 and math.isfinite(kappa)):
        raise ValueError(f"kappa must be positive and finite, got {kappa}")
    return kappa


def _criterion_curve(x: Observation, kappa: float) -> tuple[np.ndarray, np.ndarray]:
    """Magnitude order and crit(k) for all k in one pass via suffix sums."""
    n = x.n
    order = order_by_magnitude(x.x)
    sq_desc = x.x[order] ** 2
    tail = np.zeros(n + 1)
    tail[:n] = np.cumsum(sq_desc[::-1])[::-1]
    curve = tail + (2.0 * kappa + 1.0) * x.sigma**2 * complexity_curve(n)
    return order, curve


def criterion(k: int, x: Observation, kappa: float) -> float:
    """Penalized selection criterion at cardinality k."""
    kappa = _check_kappa(kappa)
    n = x.n
    if not 0 <= k <= n:
        raise ValueError(f"k must lie in [0, {n}], got {k}")
    sq_asc = np.sort(x.x**2)
    tail = float(np.sum(sq_asc[: n - k]))
    return tail + (2.0 * kappa + 1.0) * x.sigma**2 * complexity_term(k, n)


def select(x: Observation, kappa: float) -> SubsetSelection:
    """Minimize the criterion over cardinalities and return the selection."""
    kappa = _check_kappa(kappa)
    order, curve = _criterion_curve(x, kappa)
    k_hat = int(np.argmin(curve))  # first minimum -> smallest k
    selected = np.sort(order[:k_hat])
    threshold = float(np.abs(x.x[order[k_hat - 1]])) if k_hat > 0 else 0.0
    r_sq = x.sigma**2 * (1.0 + complexity_term(k_hat, x.n))
    return SubsetSelection(
        selected=selected,
        cardinality=k_hat,
        criterion_values=curve,
        threshold=threshold,
        radius_sq=r_sq,
    )


def hard_threshold_estimate(x: Observation, kappa: float) -> np.ndarray:
    """Estimate equal to x on the selected set and exactly 0 elsewhere."""
    sel = select(x, kappa)
    out = np.zeros(x.n)
    out[sel.selected] = x.x[sel.selected]
    return out


def radius_sq(sel: SubsetSelection, sigma: float, n: int) -> float:
    """Squared radius ``sigma^2 * (1 + k * log(e*n/k))`` for a selection."""
    sigma = float(sigma)
    if not (sigma > 0 and math.isfinite(sigma)):
        raise ValueError(f"sigma must be positive and finite, got {sigma}")
    return sigma**2 * (1.0 + complexity_term(sel.cardinality, n))
