import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from repfreq.concentration import FiniteDist, min_horizon, tail_exponent, tail_probability_mc

# Distributions whose exponent solves a factorable polynomial in exp(r).
DIST_QUARTER = FiniteDist.from_pairs([(1.0, 0.25), (-1.0, 0.75)])
# 0.2 x^3 - x^2 + 0.8 = 0 factors as (x - 1)(x^2 - 4x - 4) / 5.
DIST_CUBIC = FiniteDist.from_pairs([(1.0, 0.2), (-2.0, 0.8)])
R_QUARTER = math.log(3.0)
R_CUBIC = math.log(2.0 + 2.0 * math.sqrt(2.0))


def test_exponent_quarter_dist():
    assert abs(tail_exponent(DIST_QUARTER) - R_QUARTER) < 1e-10


def test_exponent_cubic_dist():
    assert abs(tail_exponent(DIST_CUBIC) - R_CUBIC) < 1e-10


def test_exponent_other_cubic():
    # 0.2 x^3 - x + 0.8 = 0 factors as (x - 1)(x^2 + x - 4) / 5.
    dist = FiniteDist.from_pairs([(2.0, 0.2), (-1.0, 0.8)])
    assert abs(tail_exponent(dist) - math.log((math.sqrt(17.0) - 1.0) / 2.0)) < 1e-10


def test_exponent_requires_positive_support():
    with pytest.raises(ValueError, match="positive value"):
        tail_exponent(FiniteDist.from_pairs([(-1.0, 1.0)]))


def test_exponent_requires_negative_mean():
    with pytest.raises(ValueError, match="mean"):
        tail_exponent(FiniteDist.from_pairs([(1.0, 0.5), (-1.0, 0.5)]))


def test_exponent_is_smallest_positive_root():
    r_star = tail_exponent(DIST_QUARTER)
    for frac in (0.1, 0.3, 0.5, 0.7, 0.9):
        r = frac * r_star
        moment = float(DIST_QUARTER.probs @ np.exp(r * DIST_QUARTER.values))
        assert moment < 1.0


@pytest.mark.parametrize("k", [0.5, 2.0])
def test_exponent_scaling(k):
    scaled = FiniteDist(values=k * DIST_QUARTER.values, probs=DIST_QUARTER.probs)
    assert tail_exponent(scaled) == pytest.approx(tail_exponent(DIST_QUARTER) / k, abs=1e-9)


@settings(max_examples=60, deadline=None)
@given(
    up=st.floats(0.05, 5.0),
    down=st.floats(0.05, 5.0),
    p=st.floats(0.01, 0.99),
)
def test_exponent_root_property_on_two_point_dists(up, down, p):
    # Any two-point distribution with negative mean and a positive value has
    # one positive root, at which the exponential moment is exactly one.
    if p * up - (1 - p) * down >= -1e-3:
        return
    dist = FiniteDist.from_pairs([(up, p), (-down, 1 - p)])
    r = tail_exponent(dist)
    assert r > 0
    moment = float(dist.probs @ np.exp(r * dist.values))
    assert moment == pytest.approx(1.0, abs=1e-9)
    assert float(dist.probs @ np.exp(0.5 * r * dist.values)) < 1.0


def test_dist_validation():
    with pytest.raises(ValueError, match="sum"):
        FiniteDist.from_pairs([(1.0, 0.5), (-1.0, 0.4)])
    with pytest.raises(ValueError, match="positive"):
        FiniteDist.from_pairs([(1.0, 1.0), (-1.0, 0.0)])
    with pytest.raises(ValueError, match="distinct"):
        FiniteDist.from_pairs([(1.0, 0.5), (1.0, 0.5)])
    with pytest.raises(ValueError, match="finite"):
        FiniteDist.from_pairs([(math.inf, 1.0)])


def test_zero_threshold_bound_is_one():
    report = tail_probability_mc(DIST_QUARTER, delta=0.9, c=0.0, horizon=200, reps=1000, seed=1)
    assert report.analytic_bound == 1.0
    assert report.empirical <= 1.0


def test_bound_holds_at_reference_cell():
    horizon = min_horizon(DIST_QUARTER, 0.99, 2.0)
    report = tail_probability_mc(DIST_QUARTER, delta=0.99, c=2.0, horizon=horizon, reps=20_000, seed=5)
    assert report.analytic_bound == pytest.approx(1.0 / 9.0, abs=1e-12)
    assert report.empirical <= report.analytic_bound + 3 * report.std_error


def test_monotone_in_delta_at_matched_seeds():
    empiricals = []
    for delta in (0.9, 0.99, 0.999):
        horizon = min_horizon(DIST_QUARTER, delta, 1.0)
        report = tail_probability_mc(DIST_QUARTER, delta=delta, c=1.0, horizon=horizon, reps=20_000, seed=42)
        empiricals.append(report.empirical)
    assert empiricals[0] <= empiricals[1] + 1e-12
    assert empiricals[1] <= empiricals[2] + 1e-12


def test_determinism():
    a = tail_probability_mc(DIST_QUARTER, 0.9, 1.0, 200, reps=2000, seed=9)
    b = tail_probability_mc(DIST_QUARTER, 0.9, 1.0, 200, reps=2000, seed=9)
    assert a.empirical == b.empirical


def test_undiscounted_limit_rejected_but_near_one_accepted():
    with pytest.raises(ValueError, match="delta"):
        tail_probability_mc(DIST_QUARTER, 1.0, 2.0, 100, reps=1000, seed=0)
    delta = 0.9999
    report = tail_probability_mc(
        DIST_QUARTER, delta, 2.0, min_horizon(DIST_QUARTER, delta, 2.0), reps=1000, seed=0
    )
    assert report.empirical <= 1.0


def test_domain_guards():
    with pytest.raises(ValueError, match="delta"):
        tail_probability_mc(DIST_QUARTER, 1.0, 1.0, 100, reps=2000, seed=0)
    with pytest.raises(ValueError, match="reps"):
        tail_probability_mc(DIST_QUARTER, 0.9, 1.0, 100, reps=10, seed=0)
    with pytest.raises(ValueError, match="horizon"):
        # A horizon this short leaves a reachable tail above the guard.
        tail_probability_mc(DIST_QUARTER, 0.999, 1.0, 50, reps=2000, seed=0)


def test_min_horizon_satisfies_guard():
    for delta in (0.9, 0.99, 0.999):
        for c in (0.5, 1.0, 2.0, 4.0):
            h = min_horizon(DIST_QUARTER, delta, c)
            residual = delta ** (h + 1) * DIST_QUARTER.max_value / (1 - delta)
            assert residual < 1e-6 * max(c, 1.0)
            shorter = delta**h * DIST_QUARTER.max_value / (1 - delta)
            assert shorter >= 1e-6 * max(c, 1.0) or h == 1
