"""Confidence balls and the theory-constants calculator."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import NORMAL_CASE_KAPPA_BAR, Observation, signal_array
from .posterior import build, shrinkage_mean
from .selector import hard_threshold_estimate, select

__all__ = [
    "ConfidenceBall",
    "NormalCaseConstants",
    "TheoryConstants",
    "confidence_ball",
    "covers",
    "theory_constants",
    "inflated_ball_radius_sq",
]


@dataclass(frozen=True)
class ConfidenceBall:
    """Closed Euclidean ball ``{theta : ||center - theta|| <= radius}``."""

    center: np.ndarray
    radius: float
    inflation_factor: float
    base_radius_sq: float


@dataclass(frozen=True)
class NormalCaseConstants:
    """Sharpened constants available when the errors are independent normals.

    ``c1 > 2`` is the usable regime; it holds iff kappa exceeds 3.24 (up to
    the rounding in that bound).
    """

    h0: float
    c1: float
    c2: float
    c3: float
    kappa_bar: float = NORMAL_CASE_KAPPA_BAR

    def alpha(self, tau: float, rho: float) -> float:
        """Exponent ``(tau/4)(1-rho) - kappa(1+rho) - 1/2`` of the normal case."""
        kappa = (self.c3 - 1.0) / 4.0
        return (tau / 4.0) * (1.0 - rho) - kappa * (1.0 + rho) - 0.5


@dataclass(frozen=True)
class TheoryConstants:
    """Constants attached to the moment condition (beta, B) and prior exponent kappa."""

    beta: float
    B: float
    kappa: float
    kappa_bar: float
    normal_case: NormalCaseConstants

    @property
    def satisfies_kappa_condition(self) -> bool:
        """kappa > kappa_bar = (12 - beta + 4B) / (4 beta)."""
        return self.kappa > self.kappa_bar

    @property
    def satisfies_normal_case_bound(self) -> bool:
        return self.kappa > self.normal_case.kappa_bar

    @property
    def c1_exceeds_two(self) -> bool:
        return self.normal_case.c1 > 2.0

    def tau_bar(self, rho):
        """Threshold ``(6(kappa*beta+B)(1+rho) + 3 beta) / (2 beta (1-rho))``.

        Exceeds 1 for every rho in [0, 1); oracle rates with tau above it are
        mimicable without extra inflation. Accepts scalars or arrays.
        """
        rho_arr = np.asarray(rho, dtype=float)
        if np.any(rho_arr < 0) or np.any(rho_arr >= 1):
            raise ValueError("rho must lie in [0, 1)")
        val = (6.0 * (self.kappa * self.beta + self.B) * (1.0 + rho_arr) + 3.0 * self.beta) / (
            2.0 * self.beta * (1.0 - rho_arr)
        )
        return float(val) if np.isscalar(rho) else val


def theory_constants(beta: float, B: float, kappa: float) -> TheoryConstants:
    """Evaluate all closed-form theory constants for (beta, B, kappa)."""
    beta = float(beta)
    B = float(B)
    kappa = float(kappa)
    if not (0 < beta <= 1):
        raise ValueError(f"beta must lie in (0, 1], got {beta}")
    if not (B > 0 and math.isfinite(B)):
        raise ValueError(f"B must be positive and finite, got {B}")
    if not (kappa > 0 and math.isfinite(kappa)):
        raise ValueError(f"kappa must be positive and finite, got {kappa}")
    kappa_bar = (12.0 - beta + 4.0 * B) / (4.0 * beta)
    normal = NormalCaseConstants(
        h0=2.0 * kappa / (2.0 * kappa + 1.0),
        c1=kappa - 0.5 * math.log(2.0 * kappa + 1.0) - kappa / (4.0 * kappa + 1.0),
        c2=kappa / (4.0 * kappa + 1.0),
        c3=4.0 * kappa + 1.0,
    )
    return TheoryConstants(beta=beta, B=B, kappa=kappa, kappa_bar=kappa_bar, normal_case=normal)


def confidence_ball(
    x: Observation, kappa: float, M: float, center_method: str = "threshold"
) -> ConfidenceBall:
    """Ball centered at the chosen estimator with radius ``sqrt(M * r_hat^2)``.

    The squared base radius is the data-driven
    ``sigma^2 (1 + k_hat * log(e n / k_hat))`` from the selection, for either
    center.
    """
    M = float(M)
    if not (M > 0 and math.isfinite(M)):
        raise ValueError(f"M must be positive and finite, got {M}")
    if center_method == "threshold":
        center = hard_threshold_estimate(x, kappa)
    elif center_method == "shrinkage":
        center = shrinkage_mean(build(x, kappa), x)
    else:
        raise ValueError(f"center_method must be 'threshold' or 'shrinkage', got {center_method!r}")
    base = select(x, kappa).radius_sq
    return ConfidenceBall(
        center=center,
        radius=math.sqrt(M * base),
        inflation_factor=M,
        base_radius_sq=base,
    )


def covers(ball: ConfidenceBall, theta) -> bool:
    """True iff theta lies in the closed ball (boundary counts as covered)."""
    arr = signal_array(theta)
    if arr.size != ball.center.size:
        raise ValueError(
            f"dimension mismatch: center has length {ball.center.size}, theta {arr.size}"
        )
    return bool(np.linalg.norm(ball.center - arr) <= ball.radius)


def inflated_ball_radius_sq(
    m2: float, b_tau: float, tau: float, r_hat_sq: float, M: float, sigma: float
) -> float:
    """Bias-inflated squared radius ``m2 (b_tau + tau) r_hat^2 + M sigma^2``.

    ``m2`` is non-constructive in the theory and must be supplied by the
    caller; the practical ball uses ``confidence_ball`` instead.
    """
    return m2 * (b_tau + tau) * r_hat_sq + M * sigma**2
