"""Domain types, noise generation, and log-domain primitives.

Everything downstream (selection, posteriors, oracles, experiments) is built
on the conventions fixed here:

* indices are 0-based internally, 1-based only in CLI/JSON output;
* all probability arithmetic happens in the natural-log domain;
* magnitude ordering breaks ties by ascending original index;
* randomness comes from counter-based Philox streams derived from
  ``(seed, *path)`` so parallel tasks are order-independent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp as _scipy_logsumexp

__all__ = [
    "ConfigurationError",
    "Observation",
    "Signal",
    "PriorConfig",
    "NoiseSpec",
    "NORMAL_CASE_KAPPA_BAR",
    "as_vector",
    "simulate",
    "order_by_magnitude",
    "log_sum_exp",
    "complexity_term",
    "complexity_curve",
    "derive_rng",
]

#: Normal-case lower bound on the prior exponent kappa required by the theory.
NORMAL_CASE_KAPPA_BAR = 3.24


class ConfigurationError(ValueError):
    """Raised for invalid noise/prior configuration values."""


def as_vector(values, name: str = "vector") -> np.ndarray:
    """Coerce ``values`` to a finite 1-D float64 array (copy).

    Raises
    ------
    ValueError
        If the input is empty, not 1-D, or contains non-finite entries.
    """
    arr = np.array(values, dtype=float, copy=True)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be 1-D, got shape {arr.shape}")
    if arr.size < 1:
        raise ValueError(f"{name} must have length >= 1")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must contain only finite values")
    return arr


@dataclass(frozen=True)
class Signal:
    """True mean vector theta. Arrays are treated as immutable after init."""

    theta: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "theta", as_vector(self.theta, "theta"))

    @property
    def n(self) -> int:
        return self.theta.size

    @property
    def active_set(self) -> np.ndarray:
        """0-based indices of the nonzero coordinates."""
        return np.flatnonzero(self.theta)

    @property
    def sparsity(self) -> int:
        """Number of nonzero coordinates."""
        return int(self.active_set.size)


def signal_array(theta) -> np.ndarray:
    """Accept a ``Signal`` or array-like and return the validated array."""
    if isinstance(theta, Signal):
        return theta.theta
    return as_vector(theta, "theta")


@dataclass(frozen=True)
class Observation:
    """Observed data vector with known noise intensity sigma."""

    x: np.ndarray
    sigma: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "x", as_vector(self.x, "x"))
        object.__setattr__(self, "sigma", float(self.sigma))
        if not (self.sigma > 0 and math.isfinite(self.sigma)):
            raise ConfigurationError(f"sigma must be positive and finite, got {self.sigma}")

    @property
    def n(self) -> int:
        return self.x.size


@dataclass(frozen=True)
class PriorConfig:
    """Subset-prior exponent kappa, plus the optional product-prior variance factor."""

    kappa: float
    product_variance_factor: float | None = None

    def __post_init__(self) -> None:
        if not (self.kappa > 0 and math.isfinite(self.kappa)):
            raise ConfigurationError(f"kappa must be positive and finite, got {self.kappa}")
        k = self.product_variance_factor
        if k is not None and not (k > 0 and math.isfinite(k)):
            raise ConfigurationError(f"product_variance_factor must be positive, got {k}")

    @property
    def meets_normal_case_bound(self) -> bool:
        """Whether kappa exceeds the normal-case theory bound 3.24.

        Values below the bound are permitted (the reference simulation design
        uses kappa=0.7) but the theory-backed guarantees then do not apply.
        """
        return self.kappa > NORMAL_CASE_KAPPA_BAR

    def to_dict(self) -> dict:
        d = {"kappa": self.kappa}
        if self.product_variance_factor is not None:
            d["product_variance_factor"] = self.product_variance_factor
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "PriorConfig":
        if not isinstance(d, dict) or "kappa" not in d:
            raise ConfigurationError("prior config must be an object with a 'kappa' key")
        return cls(
            kappa=float(d["kappa"]),
            product_variance_factor=(
                float(d["product_variance_factor"]) if "product_variance_factor" in d else None
            ),
        )


GAUSSIAN = "gaussian-iid"
UNIFORM = "uniform-bounded"
RADEMACHER = "rademacher"
STUDENT_T = "student-t-stress"
_FAMILIES = (GAUSSIAN, UNIFORM, RADEMACHER, STUDENT_T)


@dataclass(frozen=True)
class NoiseSpec:
    """Noise family for the additive errors.

    ``gaussian-iid``, ``uniform-bounded`` and ``rademacher`` satisfy the
    exchangeable exponential moment condition; ``student-t-stress`` violates
    it and exists only for robustness stress tests. All families are
    normalized to unit variance (uniform on [-sqrt(3), sqrt(3)] by default,
    Student t scaled by sqrt((df-2)/df) when df > 2).
    """

    family: str = GAUSSIAN
    bound: float = math.sqrt(3.0)
    df: float = 3.0

    def __post_init__(self) -> None:
        if self.family not in _FAMILIES:
            raise ConfigurationError(
                f"unknown noise family {self.family!r}; expected one of {_FAMILIES}"
            )
        if self.family == UNIFORM and not (self.bound > 0 and math.isfinite(self.bound)):
            raise ConfigurationError(f"uniform bound must be positive, got {self.bound}")
        if self.family == STUDENT_T and not (self.df > 0 and math.isfinite(self.df)):
            raise ConfigurationError(f"student-t df must be positive, got {self.df}")

    @property
    def satisfies_moment_condition(self) -> bool:
        """True if the family satisfies the exponential moment condition."""
        return self.family != STUDENT_T

    def moment_constants(self) -> tuple[float, float] | None:
        """A valid (beta, B) pair for the exponential moment condition.

        Returns None for the Student-t stress family (no finite exponential
        moment exists). The pairs are not unique; these are convenient ones:
        N(0,1) gives E exp(beta*xi^2) = (1-2*beta)^(-1/2); bounded families
        give B = beta * max(xi^2).
        """
        if self.family == GAUSSIAN:
            beta = 0.25
            return beta, 0.5 * math.log(2.0)
        if self.family == UNIFORM:
            return 1.0, self.bound**2
        if self.family == RADEMACHER:
            return 1.0, 1.0
        return None

    def draw(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """Draw n errors from the family (unit-variance normalization)."""
        if self.family == GAUSSIAN:
            return rng.standard_normal(n)
        if self.family == UNIFORM:
            return rng.uniform(-self.bound, self.bound, n)
        if self.family == RADEMACHER:
            return rng.integers(0, 2, n) * 2.0 - 1.0
        scale = math.sqrt((self.df - 2.0) / self.df) if self.df > 2.0 else 1.0
        return scale * rng.standard_t(self.df, n)

    def to_dict(self) -> dict:
        d = {"family": self.family}
        if self.family == UNIFORM:
            d["bound"] = self.bound
        if self.family == STUDENT_T:
            d["df"] = self.df
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "NoiseSpec":
        if not isinstance(d, dict) or "family" not in d:
            raise ConfigurationError("noise spec must be an object with a 'family' key")
        kwargs = {"family": d["family"]}
        if "bound" in d:
            kwargs["bound"] = float(d["bound"])
        if "df" in d:
            kwargs["df"] = float(d["df"])
        return cls(**kwargs)


def derive_rng(seed: int, *path: int) -> np.random.Generator:
    """Independent counter-based (Philox) stream keyed by ``(seed, *path)``.

    Parallel tasks derive disjoint streams from their own path, so results
    do not depend on scheduling order.
    """
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(i) for i in path))
    return np.random.Generator(np.random.Philox(ss))


def simulate(theta, sigma: float, noise: NoiseSpec, seed: int) -> Observation:
    """Draw ``x = theta + sigma * xi`` with xi from the given noise family.

    Deterministic given ``seed``: the same inputs reproduce ``x`` bit for bit.
    """
    arr = signal_array(theta)
    if not (sigma > 0 and math.isfinite(sigma)):
        raise ConfigurationError(f"sigma must be positive and finite, got {sigma}")
    if not isinstance(noise, NoiseSpec):
        noise = NoiseSpec.from_dict(noise)
    rng = derive_rng(seed)
    xi = noise.draw(rng, arr.size)
    return Observation(arr + sigma * xi, sigma)


def order_by_magnitude(v) -> np.ndarray:
    """Indices (0-based) sorted by decreasing ``|v_i|``, ties by ascending index."""
    arr = as_vector(v, "v")
    return np.argsort(-np.abs(arr), kind="stable")


def log_sum_exp(terms) -> float:
    """log(sum(exp(terms))) with max-subtraction; exact -inf if all terms are -inf."""
    arr = np.asarray(terms, dtype=float)
    if arr.size == 0:
        raise ValueError("log_sum_exp requires a nonempty vector")
    if np.all(np.isneginf(arr)):
        return float("-inf")
    return float(_scipy_logsumexp(arr))


def complexity_term(k: int, n: int) -> float:
    """The penalty building block ``k * log(e*n/k)``, with 0 at k = 0.

    Strictly increasing in k on [0, n]; equals n at k = n.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not 0 <= k <= n:
        raise ValueError(f"k must lie in [0, {n}], got {k}")
    if k == 0:
        return 0.0
    return k * (1.0 + math.log(n) - math.log(k))


def complexity_curve(n: int) -> np.ndarray:
    """Vector of ``complexity_term(k, n)`` for k = 0..n."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    ks = np.arange(n + 1, dtype=float)
    out = np.zeros(n + 1)
    out[1:] = ks[1:] * (1.0 + math.log(n) - np.log(ks[1:]))
    return out
