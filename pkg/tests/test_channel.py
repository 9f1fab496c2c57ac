import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from erasure_secrecy.channel import (
    ChannelParams,
    JointErasureDist,
    correlation_bounds,
    joint_from_rho,
    pearson_rho,
    sample_pair,
    sample_pairs,
)
from erasure_secrecy.errors import DegenerateMarginal, InfeasibleCorrelation

probs = st.floats(0.001, 0.999)


def test_bounds_worked_example():
    lo, hi = correlation_bounds(0.3, 0.15)
    assert lo == pytest.approx(-0.275, abs=1e-3)
    assert hi == pytest.approx(0.642, abs=1e-3)


def test_bounds_symmetric_half():
    # denominator 0.25; numerators -0.25 and +0.25
    lo, hi = correlation_bounds(0.5, 0.5)
    assert lo == pytest.approx(-1.0, abs=1e-15)
    assert hi == pytest.approx(1.0, abs=1e-15)


def test_bounds_complementary_marginals():
    # denominator 0.16; numerators -0.16 and 0.04
    lo, hi = correlation_bounds(0.2, 0.8)
    assert lo == pytest.approx(-1.0, abs=1e-12)
    assert hi == pytest.approx(0.25, abs=1e-12)


@pytest.mark.parametrize("delta,epsilon", [(0.0, 0.5), (1.0, 0.5), (0.5, 0.0), (0.5, 1.0)])
def test_bounds_degenerate(delta, epsilon):
    with pytest.raises(DegenerateMarginal):
        correlation_bounds(delta, epsilon)


@given(probs, probs)
def test_bounds_bracket_zero(delta, epsilon):
    lo, hi = correlation_bounds(delta, epsilon)
    assert lo <= 0.0 <= hi
    assert -1.0 - 1e-12 <= lo and hi <= 1.0 + 1e-12


def test_joint_independent():
    d = joint_from_rho(ChannelParams(0.5, 0.5, 0.0))
    assert (d.p00, d.p01, d.p10, d.p11) == pytest.approx((0.25, 0.25, 0.25, 0.25))


def test_joint_perfectly_coupled():
    d = joint_from_rho(ChannelParams(0.5, 0.5, 1.0))
    assert (d.p00, d.p01, d.p10, d.p11) == pytest.approx((0.5, 0.0, 0.0, 0.5), abs=1e-15)


def test_joint_at_upper_bound():
    _, hi = correlation_bounds(0.3, 0.15)
    d = joint_from_rho(ChannelParams(0.3, 0.15, hi))
    assert d.p11 == pytest.approx(min(0.3, 0.15), abs=1e-3)
    assert d.p01 >= 0.0


def test_joint_rounded_upper_bound_is_infeasible():
    # 0.642 overshoots the exact bound 0.64169 by far more than rounding slack
    with pytest.raises(InfeasibleCorrelation):
        ChannelParams(0.3, 0.15, 0.642)


def test_joint_rejects_infeasible():
    with pytest.raises(InfeasibleCorrelation):
        ChannelParams(0.2, 0.8, 0.5)


@given(probs, probs, st.floats(0.0, 1.0))
def test_joint_invariants_and_round_trip(delta, epsilon, t):
    lo, hi = correlation_bounds(delta, epsilon)
    rho = lo + t * (hi - lo)
    d = joint_from_rho(ChannelParams(delta, epsilon, rho))
    ps = (d.p00, d.p01, d.p10, d.p11)
    assert all(0.0 <= p <= 1.0 for p in ps)
    assert abs(math.fsum(ps) - 1.0) <= 1e-12
    assert d.delta == pytest.approx(delta, abs=1e-12)
    assert d.epsilon == pytest.approx(epsilon, abs=1e-12)
    assert max(delta + epsilon - 1.0, 0.0) - 1e-12 <= d.p11 <= min(delta, epsilon) + 1e-12
    assert pearson_rho(d) == pytest.approx(rho, abs=1e-9)


@given(probs, probs, st.floats(-0.5, 0.5))
def test_round_trip_interior(delta, epsilon, t):
    lo, hi = correlation_bounds(delta, epsilon)
    rho = t * (hi - lo) + 0.5 * (hi + lo)
    d = joint_from_rho(ChannelParams(delta, epsilon, rho))
    assert abs(pearson_rho(d) - rho) <= 1e-12 * max(1.0, 1.0 / math.sqrt(delta * epsilon * (1 - delta) * (1 - epsilon)))


def test_round_trip_grid_strict():
    grid = np.linspace(0.05, 0.95, 19)
    for delta in grid:
        for epsilon in grid:
            lo, hi = correlation_bounds(delta, epsilon)
            for rho in np.linspace(lo, hi, 9):
                d = joint_from_rho(ChannelParams(delta, epsilon, rho))
                assert abs(pearson_rho(d) - rho) <= 1e-12


def test_independent_constructor_accepts_degenerate():
    d = JointErasureDist.independent(0.0, 0.3)
    assert d.p10 == d.p11 == 0.0
    d = JointErasureDist.independent(1.0, 1.0)
    assert d.p11 == 1.0


def test_sample_degenerate_laws():
    rng = np.random.default_rng(0)
    always = JointErasureDist(0.0, 0.0, 0.0, 1.0)
    never = JointErasureDist(1.0, 0.0, 0.0, 0.0)
    assert all(sample_pair(always, rng) == (1, 1) for _ in range(200))
    assert all(sample_pair(never, rng) == (0, 0) for _ in range(200))
    e_m, e_w = sample_pairs(always, rng, 1000)
    assert e_m.all() and e_w.all()


def test_scalar_and_vector_sampling_agree():
    dist = joint_from_rho(ChannelParams(0.4, 0.3, 0.2))
    rng = np.random.default_rng(3)
    scalar = [sample_pair(dist, rng) for _ in range(500)]
    e_m, e_w = sample_pairs(dist, np.random.default_rng(3), 500)
    assert scalar == list(zip(e_m.tolist(), e_w.tolist()))


def test_sample_independence_rate():
    delta, epsilon = 0.3, 0.6
    dist = joint_from_rho(ChannelParams(delta, epsilon, 0.0))
    n = 10**6
    e_m, e_w = sample_pairs(dist, np.random.default_rng(2024), n)
    p = delta * epsilon
    sigma = math.sqrt(p * (1 - p) / n)
    assert abs(float(np.mean(e_m & e_w)) - p) <= 4 * sigma


@pytest.mark.parametrize("delta,epsilon,rho", [(0.5, 0.5, -0.8), (0.1, 0.7, 0.2), (0.9, 0.2, -0.1)])
def test_sample_marginals(delta, epsilon, rho):
    dist = joint_from_rho(ChannelParams(delta, epsilon, rho))
    n = 200_000
    e_m, e_w = sample_pairs(dist, np.random.default_rng(7), n)
    for est, p in ((e_m.mean(), delta), (e_w.mean(), epsilon)):
        assert abs(est - p) <= 4 * math.sqrt(p * (1 - p) / n)
