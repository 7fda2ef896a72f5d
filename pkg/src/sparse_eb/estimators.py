"""Scikit-learn style denoisers wrapping the selector and the posterior.

Both estimators fit on a single noisy vector (shape ``(n,)``) and expose the
fitted quantities as trailing-underscore attributes, so they compose with
sklearn tooling (``get_params`` / ``set_params`` / ``clone`` / pipelines).
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .core import Observation, as_vector
from .posterior import build, sample, shrinkage_mean
from .selector import select

__all__ = ["EmpiricalBayesSelector", "EmpiricalBayesShrinkage"]


class EmpiricalBayesSelector(TransformerMixin, BaseEstimator):
    """Penalized subset selection with hard-threshold denoising.

    Parameters
    ----------
    kappa : float, default=0.7
        Prior exponent; the penalty constant is ``2 * kappa + 1``.
    sigma : float, default=1.0
        Known noise intensity.

    Attributes
    ----------
    selection_ : SubsetSelection
    selected_ : np.ndarray of selected 0-based indices
    k_hat_ : int
    threshold_ : float
    radius_sq_ : float
    estimate_ : np.ndarray, the denoised fit vector
    """

    def __init__(self, kappa: float = 0.7, sigma: float = 1.0):
        self.kappa = kappa
        self.sigma = sigma

    def fit(self, X, y=None):
        x = Observation(as_vector(X, "X"), self.sigma)
        self.selection_ = select(x, self.kappa)
        self.selected_ = self.selection_.selected
        self.k_hat_ = self.selection_.cardinality
        self.threshold_ = self.selection_.threshold
        self.radius_sq_ = self.selection_.radius_sq
        estimate = np.zeros(x.n)
        estimate[self.selected_] = x.x[self.selected_]
        self.estimate_ = estimate
        return self

    def transform(self, X):
        """Hard-threshold a vector at the fitted threshold.

        On the fit vector this reproduces ``estimate_`` (up to magnitude
        ties at the threshold); with an empty fitted set everything is
        zeroed.
        """
        self._check_fitted()
        x = as_vector(X, "X")
        if self.k_hat_ == 0:
            return np.zeros(x.size)
        return np.where(np.abs(x) >= self.threshold_, x, 0.0)

    def predict(self, X):
        return self.transform(X)

    def _check_fitted(self):
        if not hasattr(self, "selection_"):
            raise RuntimeError("estimator is not fitted; call fit(X) first")


class EmpiricalBayesShrinkage(TransformerMixin, BaseEstimator):
    """Exact posterior-mean shrinkage denoiser.

    Attributes
    ----------
    posterior_ : SubsetPosterior
    inclusion_ : np.ndarray of marginal inclusion probabilities
    cardinality_posterior_ : np.ndarray
    estimate_ : np.ndarray, the shrinkage fit vector ``p_i * x_i``
    """

    def __init__(self, kappa: float = 0.7, sigma: float = 1.0):
        self.kappa = kappa
        self.sigma = sigma

    def fit(self, X, y=None):
        x = Observation(as_vector(X, "X"), self.sigma)
        self.observation_ = x
        self.posterior_ = build(x, self.kappa)
        self.inclusion_ = self.posterior_.inclusion
        self.cardinality_posterior_ = self.posterior_.cardinality_posterior
        self.estimate_ = shrinkage_mean(self.posterior_, x)
        return self

    def transform(self, X):
        """Apply the fitted per-coordinate shrinkage factors to a vector."""
        self._check_fitted()
        x = as_vector(X, "X")
        if x.size != self.inclusion_.size:
            raise ValueError("X has a different length than the fitted vector")
        return self.inclusion_ * x

    def predict(self, X):
        return self.transform(X)

    def sample(self, count: int, seed: int):
        """Exact posterior draws for the fitted observation."""
        self._check_fitted()
        return sample(self.posterior_, self.observation_, seed, count)

    def _check_fitted(self):
        if not hasattr(self, "posterior_"):
            raise RuntimeError("estimator is not fitted; call fit(X) first")
