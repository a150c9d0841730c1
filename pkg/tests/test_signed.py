import itertools
import math

import pytest

from derange import oracle
from derange.chains import ChainKind, cycle_statistics
from derange.coupling import k_distribution
from derange.params import PSequence, ThetaSequence
from derange.signed_stats import (
    OrientationWeights,
    cki_distribution,
    cstar_moments,
    lambda_mean_identity,
    lambda_total,
    omega,
    ordered_star_prob,
)


def test_omega_worked_value():
    w = OrientationWeights.binomial(0.5)
    assert omega(3, 2, w) == pytest.approx(0.5)


def test_omega_rows_sum_to_one():
    for kappa in (0.0, 0.3, 1.0):
        w = OrientationWeights.binomial(kappa)
        for k in range(1, 30):
            assert math.fsum(omega(k, i, w) for i in range(1, k + 1)) == (
                pytest.approx(1.0, abs=1e-12)
            )


def test_omega_leader_always_in():
    # i = 0 impossible: the leader always looks in
    w = OrientationWeights.binomial(0.4)
    with pytest.raises(ValueError):
        omega(3, 0, w)


def test_custom_table_validation():
    with pytest.raises(ValueError):
        OrientationWeights.from_table({(2, 1): 0.5, (2, 2): 0.2})
    w = OrientationWeights.from_table({(2, 1): 0.5, (2, 2): 0.5})
    assert omega(2, 1, w) == 0.5


def test_cki_vs_direct_sum():
    p = PSequence.eta(0.8)
    n = 9
    provider = oracle.ExactCycleProvider(ChainKind.x(p), n)
    w = OrientationWeights.binomial(0.3)
    k, i = 3, 2
    c_law = provider.c_law(k)
    for ell in range(0, 4):
        direct = math.fsum(
            math.comb(m, ell) * omega(k, i, w) ** ell
            * (1 - omega(k, i, w)) ** (m - ell) * pm
            for m, pm in c_law.items() if m >= ell
        )
        assert cki_distribution(k, i, ell, n, c_law, w) == pytest.approx(
            direct, abs=1e-13
        )


def test_cki_support_guard():
    p = PSequence.eta(0.8)
    provider = oracle.ExactCycleProvider(ChainKind.x(p), 9)
    w = OrientationWeights.binomial(0.3)
    assert cki_distribution(4, 2, 3, 9, provider.c_law(4), w) == 0.0  # 4*3 > 9


def test_lambda_mean_identity_exact():
    for kappa in (0.3, 0.9):
        for n in range(4, 13):
            p = PSequence.eta(0.7)
            k_law = k_distribution("X", n, p)
            law, mean = lambda_total(n, kappa, k_law)
            assert law.total() == pytest.approx(1.0, abs=1e-12)
            assert mean == pytest.approx(
                lambda_mean_identity(n, kappa, k_law.mean()), abs=1e-12
            )


def test_cstar_vs_exhaustive():
    # exhaustive check over words and orientation patterns at small n
    p = PSequence.eta(1.0)
    n = 6
    kappa = 0.4
    w = OrientationWeights.binomial(kappa)
    kind = ChainKind.x(p)
    law = oracle.exact_law(kind, n)
    j = 2
    mean_direct = 0.0
    sq_direct = 0.0
    mean_i_direct = 0.0
    cross_direct = 0.0
    i = 1
    for word, pr in law.items():
        _, k, lengths = cycle_statistics(word)
        # orientation patterns: each circle independently has in-look count
        # distributed omega(len, .)
        for combo in itertools.product(*[range(1, a + 1) for a in lengths]):
            pw = pr * math.prod(
                omega(lengths[m], combo[m], w) for m in range(k)
            )
            cj = sum(1 for v in combo if v == j)
            ci = sum(1 for v in combo if v == i)
            mean_direct += pw * cj
            sq_direct += pw * cj * cj
            mean_i_direct += pw * ci
            cross_direct += pw * ci * cj
    provider = oracle.ExactCycleProvider(kind, n)
    mean_j, cov_jj = cstar_moments(j, j, n, provider, w)
    assert mean_j == pytest.approx(mean_direct, abs=1e-12)
    assert cov_jj == pytest.approx(sq_direct - mean_direct**2, abs=1e-12)
    _, cov_ij = cstar_moments(i, j, n, provider, w)
    assert cov_ij == pytest.approx(
        cross_direct - mean_i_direct * mean_direct, abs=1e-12
    )


def test_ordered_star_vs_enumeration():
    ts = ThetaSequence.constant(1.0)
    n = 6
    kappa = 0.5
    w = OrientationWeights.binomial(kappa)
    law = oracle.exact_law(ChainKind.y(ts), n)
    for astar in [(1,), (2,), (1, 1)]:
        r = len(astar)
        direct = 0.0
        for word, pr in law.items():
            _, k, lengths = cycle_statistics(word)
            if k <= r:
                continue
            for combo in itertools.product(*[range(1, a + 1) for a in lengths[:r]]):
                if tuple(combo) != astar:
                    continue
                direct += pr * math.prod(
                    omega(lengths[m], combo[m], w) for m in range(r)
                )
        assert ordered_star_prob(astar, n, ts, w) == pytest.approx(
            direct, abs=1e-12
        )


def test_ordered_star_guards():
    ts = ThetaSequence.constant(1.0)
    w = OrientationWeights.binomial(0.5)
    with pytest.raises(ValueError):
        ordered_star_prob((0,), 5, ts, w)
    with pytest.raises(ValueError):
        ordered_star_prob((3, 2), 5, ts, w)
