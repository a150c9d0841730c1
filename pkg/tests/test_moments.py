import math

import pytest

from derange import oracle
from derange.chains import ChainKind
from derange.moments import (
    cov_eta,
    lambda_esf,
    mean_cj,
    mean_cj_eta,
    mean_cj_eta_limit,
    mean_k,
    mean_k_eta,
    mean_k_eta_limit,
    second_moments,
)
from derange.params import PSequence


@pytest.fixture(scope="module")
def enum():
    p = PSequence.eta(0.6)
    return p, oracle.enumeration_moments(ChainKind.x(p), 10, j_max=10)


def test_mean_k_vs_enumeration(enum):
    p, moments = enum
    assert mean_k(10, p) == pytest.approx(moments["mean_k"], abs=1e-12)


def test_mean_cj_vs_enumeration(enum):
    p, moments = enum
    for j in range(2, 11):
        assert mean_cj(10, j, p) == pytest.approx(moments["mean_c"][j], abs=1e-12)


def test_mean_c1_rejected():
    # derangements have no fixed points; 1-cycle requests are guard errors
    with pytest.raises(ValueError):
        mean_cj(10, 1, PSequence.eta(0.6))


def test_var_vs_enumeration(enum):
    p, moments = enum
    for j in range(2, 9):
        assert second_moments(10, j, p) == pytest.approx(
            moments["cov_c"][j][j], abs=1e-12
        )


def test_cov_eta_bits_vs_enumeration():
    # covariance of the word bits themselves
    theta = 0.6
    p = PSequence.eta(theta)
    n = 10
    law = oracle.exact_law(ChainKind.x(p), n)
    for i, j in [(4, 6), (3, 7), (5, 8)]:
        e_i = math.fsum(pr for w, pr in law.items() if w[i - 1] == 1)
        e_j = math.fsum(pr for w, pr in law.items() if w[j - 1] == 1)
        e_ij = math.fsum(
            pr for w, pr in law.items() if w[i - 1] == 1 and w[j - 1] == 1
        )
        assert cov_eta(n, i, j, theta) == pytest.approx(e_ij - e_i * e_j, abs=1e-11)


def test_eta_closed_forms_match_generic():
    theta = 0.8
    p = PSequence.eta(theta)
    for n in (8, 15):
        assert mean_k_eta(n, theta) == pytest.approx(mean_k(n, p), rel=1e-12)
        for j in range(2, n + 1):
            assert mean_cj_eta(n, j, theta) == pytest.approx(
                mean_cj(n, j, p), rel=1e-11, abs=1e-13
            )


def test_mean_cj_limit_methods_agree():
    for theta in (0.5, 1.0):
        for j in (2, 4):
            a = mean_cj_eta_limit(theta, j, method="series", m=4)
            b = mean_cj_eta_limit(theta, j, method="integral")
            assert a.value == pytest.approx(b.value, abs=max(a.error_bound, 1e-8))


def test_mean_cj_limit_is_large_n_limit():
    # n = 4000 evaluation should be within ~1/n of the limit
    theta = 0.5
    for j in (2, 3):
        lim = mean_cj_eta_limit(theta, j, m=4).value
        assert abs(mean_cj_eta(4000, j, theta) - lim) < 5e-3


def test_mean_k_limit_methods_agree():
    for theta in (0.5, 1.5):
        a = mean_k_eta_limit(theta, m=4, method="series")
        b = mean_k_eta_limit(theta, method="integral")
        c = mean_k_eta_limit(theta, method="pfq")
        assert a.value == pytest.approx(b.value, abs=max(a.error_bound, 1e-8))
        assert b.value == pytest.approx(c.value, abs=1e-8)


def test_mean_k_limit_is_log_n_centering():
    theta = 0.5
    lim = mean_k_eta_limit(theta, m=5).value
    n = 20000
    assert abs(mean_k_eta(n, theta) - theta * math.log(n) - lim) < 2e-3


def test_lambda_esf_uniform_case():
    # theta = 1 reduces to the classical derangement probability !n / n!
    subfact = [1, 0]
    for n in range(2, 12):
        subfact.append((n - 1) * (subfact[-1] + subfact[-2]))
    for n in range(1, 12):
        assert lambda_esf(n, 1.0) == pytest.approx(
            subfact[n] / math.factorial(n), rel=1e-12
        )


def test_lambda_esf_vs_cycle_type_sum():
    # sum of Ewens-sampling-formula weights over fixed-point-free cycle
    # types: n!/theta_(n) * sum_{c: c_1=0} prod (theta/j)^{c_j} / c_j!
    from scipy.special import poch

    theta = 0.7
    for n in range(2, 9):
        total = 0.0

        def rec(j, remaining, weight):
            nonlocal total
            if remaining == 0:
                total += weight
                return
            if j > remaining:
                return
            c = 0
            w = weight
            while j * c <= remaining:
                if c > 0:
                    w *= theta / j / c
                rec(j + 1, remaining - j * c, w)
                c += 1

        rec(2, n, 1.0)
        assert lambda_esf(n, theta) == pytest.approx(
            math.factorial(n) / poch(theta, n) * total, rel=1e-11
        )
