import numpy as np
import pytest
from sklearn.base import clone

from sparse_eb.core import Observation
from sparse_eb.estimators import EmpiricalBayesSelector, EmpiricalBayesShrinkage
from sparse_eb.posterior import build, shrinkage_mean
from sparse_eb.selector import hard_threshold_estimate, select


@pytest.fixture
def vector():
    rng = np.random.default_rng(0)
    v = rng.normal(0, 1, 50)
    v[:6] += 5.0
    return v


def test_selector_estimator_matches_functional_api(vector):
    est = EmpiricalBayesSelector(kappa=0.7, sigma=1.0).fit(vector)
    sel = select(Observation(vector, 1.0), 0.7)
    assert np.array_equal(est.selected_, sel.selected)
    assert est.k_hat_ == sel.cardinality
    assert est.threshold_ == sel.threshold
    assert est.radius_sq_ == sel.radius_sq
    assert np.array_equal(est.estimate_, hard_threshold_estimate(Observation(vector, 1.0), 0.7))
    assert np.array_equal(est.transform(vector), est.estimate_)
    assert np.array_equal(est.predict(vector), est.estimate_)


def test_selector_estimator_empty_selection_zeroes():
    est = EmpiricalBayesSelector().fit(np.zeros(12))
    assert est.k_hat_ == 0
    assert np.all(est.transform(np.ones(12)) == 0.0)


def test_shrinkage_estimator_matches_functional_api(vector):
    est = EmpiricalBayesShrinkage(kappa=0.7, sigma=1.0).fit(vector)
    x = Observation(vector, 1.0)
    post = build(x, 0.7)
    assert np.allclose(est.inclusion_, post.inclusion, rtol=0, atol=0)
    assert np.array_equal(est.estimate_, shrinkage_mean(post, x))
    assert np.array_equal(est.transform(vector), est.estimate_)
    draws = est.sample(count=5, seed=3)
    assert len(draws) == 5


def test_estimators_sklearn_protocol(vector):
    est = EmpiricalBayesSelector(kappa=1.1, sigma=2.0)
    assert est.get_params() == {"kappa": 1.1, "sigma": 2.0}
    est2 = clone(est).set_params(kappa=0.9)
    assert est2.get_params()["kappa"] == 0.9
    shr = EmpiricalBayesShrinkage(kappa=0.8, sigma=0.5)
    assert clone(shr).get_params() == {"kappa": 0.8, "sigma": 0.5}
    pipeline_result = EmpiricalBayesSelector().fit_transform(vector)
    assert pipeline_result.shape == vector.shape


def test_estimators_validation(vector):
    with pytest.raises(RuntimeError):
        EmpiricalBayesSelector().transform(vector)
    with pytest.raises(RuntimeError):
        EmpiricalBayesShrinkage().sample(1, 1)
    with pytest.raises(ValueError):
        EmpiricalBayesSelector().fit(np.array([[1.0, 2.0]]))
    fitted = EmpiricalBayesShrinkage().fit(vector)
    with pytest.raises(ValueError):
        fitted.transform(vector[:10])
