import math

import pytest

from derange.params import (
    PSequence,
    ThetaSequence,
    conditional_theta,
    link_conditional,
    link_pushforward,
    pushforward_theta,
)


def test_theta_constant_and_boundaries():
    ts = ThetaSequence.constant(0.7)
    assert ts(1) == 1.0
    for i in range(3, 10):
        assert ts(i) == 0.7


def test_eta_star_values():
    theta = 0.6
    ts = ThetaSequence.eta_star(theta)
    assert ts(3) == pytest.approx(theta)
    for i in range(4, 12):
        assert ts(i) == pytest.approx(theta * (1.0 + theta / (i - 2)))


def test_coin_prob():
    ts = ThetaSequence.constant(2.0)
    for i in range(2, 8):
        assert ts.coin_prob(i) == pytest.approx(ts(i) / (i - 1 + ts(i)))


def test_p_boundaries_enforced():
    p = PSequence.eta(0.5)
    assert p(1) == 0.0
    assert p(2) == 1.0
    assert p.q(1) == 1.0
    assert p.q(2) == 0.0


def test_eta_values():
    theta = 1.3
    p = PSequence.eta(theta)
    for i in range(3, 10):
        assert p(i) == pytest.approx((i - 1) / (theta + i - 1))


def test_links_are_inverse():
    p = PSequence.eta(0.8)
    ts = conditional_theta(p)
    p2 = PSequence.from_theta_conditional(ts)
    for i in range(3, 15):
        assert p2(i) == pytest.approx(p(i), rel=1e-12)

    ts = pushforward_theta(p)
    p3 = PSequence.from_theta_pushforward(ts)
    for i in range(3, 15):
        assert p3(i) == pytest.approx(p(i), rel=1e-12)


def test_pushforward_theta_closed_form():
    # p_i = (i-1)/(i-1+theta_i)  <=>  theta_i = (i-1) q_i / p_i
    p = PSequence.eta(0.5)
    ts = pushforward_theta(p)
    for i in range(3, 10):
        assert ts(i) == pytest.approx(0.5, rel=1e-12)


def test_link_guards():
    p = PSequence.eta(0.5)
    with pytest.raises(ValueError):
        link_conditional("p_to_theta", p, 2)
    with pytest.raises(ValueError):
        link_pushforward("p_to_theta", p, 1)


def test_tabulated_roundtrip():
    vals = [0.0, 1.0, 0.3, 0.6, 0.4]
    p = PSequence.tabulated(vals, tail_rule="constant")
    assert p(3) == 0.3
    assert p(5) == 0.4
    assert p(9) == 0.4  # constant tail


def test_scaled_theta1():
    ts = ThetaSequence.constant(0.5)
    s = ts.scaled(2.0)
    assert s.theta1 == 2.0
    assert s(3) == pytest.approx(2.0 * ts(3))
