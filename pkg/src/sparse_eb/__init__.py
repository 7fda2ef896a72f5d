"""Empirical Bayes inference for possibly sparse high-dimensional signals.

Exact subset-mixture posteriors, penalized selection, oracle-rate
functionals, excessive-bias-ratio diagnostics, confidence balls, and a
Monte Carlo coverage harness.
"""

__version__ = "0.1.0"

from .core import (
    NORMAL_CASE_KAPPA_BAR,
    ConfigurationError,
    NoiseSpec,
    Observation,
    PriorConfig,
    Signal,
    complexity_curve,
    complexity_term,
    derive_rng,
    log_sum_exp,
    order_by_magnitude,
    simulate,
)
from .estimators import EmpiricalBayesSelector, EmpiricalBayesShrinkage
from .experiments import (
    ExperimentConfig,
    ExperimentRow,
    SelectorQuality,
    contraction_curve,
    dimension_check,
    selector_quality,
    spike_signal,
    table1,
)
from .oracle import (
    OracleReport,
    ebr_member,
    r_oracle,
    restricted_tau_oracle,
    tau_oracle,
    tau_rate,
)
from .posterior import (
    PosteriorDraw,
    ProductPosterior,
    SubsetPosterior,
    build,
    product_posterior,
    sample,
    shrinkage_mean,
    subset_log_weight,
)
from .selector import (
    SubsetSelection,
    criterion,
    hard_threshold_estimate,
    radius_sq,
    select,
)
from .uq import (
    ConfidenceBall,
    NormalCaseConstants,
    TheoryConstants,
    confidence_ball,
    covers,
    inflated_ball_radius_sq,
    theory_constants,
)

__all__ = [
    "__version__",
    "NORMAL_CASE_KAPPA_BAR",
    "ConfigurationError",
    "NoiseSpec",
    "Observation",
    "PriorConfig",
    "Signal",
    "complexity_curve",
    "complexity_term",
    "derive_rng",
    "log_sum_exp",
    "order_by_magnitude",
    "simulate",
    "EmpiricalBayesSelector",
    "EmpiricalBayesShrinkage",
    "ExperimentConfig",
    "ExperimentRow",
    "SelectorQuality",
    "contraction_curve",
    "dimension_check",
    "selector_quality",
    "spike_signal",
    "table1",
    "OracleReport",
    "ebr_member",
    "r_oracle",
    "restricted_tau_oracle",
    "tau_oracle",
    "tau_rate",
    "PosteriorDraw",
    "ProductPosterior",
    "SubsetPosterior",
    "build",
    "product_posterior",
    "sample",
    "shrinkage_mean",
    "subset_log_weight",
    "SubsetSelection",
    "criterion",
    "hard_threshold_estimate",
    "radius_sq",
    "select",
    "ConfidenceBall",
    "NormalCaseConstants",
    "TheoryConstants",
    "confidence_ball",
    "covers",
    "inflated_ball_radius_sq",
    "theory_constants",
]
