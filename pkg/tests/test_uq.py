import math

import numpy as np
import pytest

from sparse_eb.core import Observation
from sparse_eb.uq import (
    confidence_ball,
    covers,
    inflated_ball_radius_sq,
    theory_constants,
)


def test_ball_zero_data():
    ball = confidence_ball(Observation(np.zeros(40), 1.5), 0.7, 1.0)
    assert np.all(ball.center == 0.0)
    assert ball.base_radius_sq == pytest.approx(1.5**2, abs=0)
    assert ball.radius == pytest.approx(1.5, abs=0)


def test_ball_inflation_scaling():
    rng = np.random.default_rng(3)
    x = Observation(rng.normal(0, 2, 60), 1.0)
    b1 = confidence_ball(x, 0.7, 1.0)
    b4 = confidence_ball(x, 0.7, 4.0)
    assert b4.radius == pytest.approx(2.0 * b1.radius, rel=1e-15)
    assert b4.base_radius_sq == b1.base_radius_sq


def test_ball_centers_differ():
    rng = np.random.default_rng(5)
    x = Observation(rng.normal(0, 1.5, 30), 1.0)
    thr = confidence_ball(x, 0.7, 1.0, "threshold")
    shr = confidence_ball(x, 0.7, 1.0, "shrinkage")
    assert thr.base_radius_sq == shr.base_radius_sq
    assert not np.array_equal(thr.center, shr.center)
    with pytest.raises(ValueError):
        confidence_ball(x, 0.7, 1.0, "median")
    with pytest.raises(ValueError):
        confidence_ball(x, 0.7, 0.0)


def test_covers_basics():
    ball = confidence_ball(Observation(np.zeros(5), 1.0), 0.7, 1.0)
    assert covers(ball, np.zeros(5))  # center
    boundary = np.zeros(5)
    boundary[0] = ball.radius
    assert covers(ball, boundary)  # closed ball includes the boundary
    outside = np.zeros(5)
    outside[0] = ball.radius * (1 + 1e-12)
    assert not covers(ball, outside)
    with pytest.raises(ValueError):
        covers(ball, np.zeros(4))


def test_covers_translation_invariance():
    rng = np.random.default_rng(7)
    x = Observation(rng.normal(0, 2, 25), 1.0)
    ball = confidence_ball(x, 0.7, 2.0)
    theta = rng.normal(0, 1, 25)
    shift = rng.normal(0, 5, 25)
    shifted = type(ball)(
        center=ball.center + shift,
        radius=ball.radius,
        inflation_factor=ball.inflation_factor,
        base_radius_sq=ball.base_radius_sq,
    )
    assert covers(ball, theta) == covers(shifted, theta + shift)


def test_kappa_bar_value():
    tc = theory_constants(1.0, 1.0, 4.0)
    assert tc.kappa_bar == pytest.approx(15.0 / 4.0, abs=0)
    assert tc.satisfies_kappa_condition
    assert not theory_constants(1.0, 1.0, 3.0).satisfies_kappa_condition
    with pytest.raises(ValueError):
        theory_constants(1.5, 1.0, 1.0)
    with pytest.raises(ValueError):
        theory_constants(1.0, 0.0, 1.0)


def test_normal_case_constants_at_kappa_four():
    nc = theory_constants(1.0, 1.0, 4.0).normal_case
    assert nc.c2 == pytest.approx(4.0 / 17.0, rel=1e-15)
    assert nc.c3 == pytest.approx(17.0, abs=0)
    assert nc.h0 == pytest.approx(8.0 / 9.0, rel=1e-15)
    expected_c1 = 4.0 - 0.5 * math.log(9.0) - 4.0 / 17.0
    assert nc.c1 == pytest.approx(expected_c1, rel=1e-14)


def test_c1_sign_change_near_kappa_bar():
    below = theory_constants(1.0, 1.0, 3.23).normal_case.c1
    above = theory_constants(1.0, 1.0, 3.25).normal_case.c1
    assert below < 2.0 < above
    assert theory_constants(1.0, 1.0, 4.0).c1_exceeds_two
    assert theory_constants(1.0, 1.0, 4.0).satisfies_normal_case_bound


def test_tau_bar_properties():
    tc = theory_constants(0.5, 2.0, 1.5)
    grid = np.linspace(0.0, 0.95, 30)
    vals = tc.tau_bar(grid)
    assert np.all(vals > 1.0)
    assert np.all(np.diff(vals) > 0)  # increasing in rho
    expected0 = (6.0 * (1.5 * 0.5 + 2.0) + 3.0 * 0.5) / (2.0 * 0.5)
    assert tc.tau_bar(0.0) == pytest.approx(expected0, rel=1e-14)
    with pytest.raises(ValueError):
        tc.tau_bar(1.0)


def test_normal_case_alpha():
    nc = theory_constants(1.0, 1.0, 2.0).normal_case
    # (tau/4)(1-rho) - kappa(1+rho) - 1/2 at kappa = 2
    assert nc.alpha(40.0, 0.5) == pytest.approx(40.0 / 4.0 * 0.5 - 2.0 * 1.5 - 0.5, rel=1e-14)


def test_inflated_ball_radius_sq():
    got = inflated_ball_radius_sq(2.0, 0.3, 1.5, 10.0, 4.0, 0.5)
    assert got == pytest.approx(2.0 * 1.8 * 10.0 + 4.0 * 0.25, rel=1e-15)
