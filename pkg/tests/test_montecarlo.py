import numpy as np
import pytest

from derange import oracle
from derange.chains import ChainKind
from derange.montecarlo import (
    estimate,
    gem_diagnostic,
    ks_p_value,
    ks_statistic,
    replicate_rng,
    stick_breaking_sample,
)
from derange.params import PSequence


def test_replicate_streams_distinct():
    a = replicate_rng(7, 0).random(4)
    b = replicate_rng(7, 1).random(4)
    c = replicate_rng(8, 0).random(4)
    assert not np.allclose(a, b)
    assert not np.allclose(a, c)


def test_replicate_streams_deterministic():
    a = replicate_rng(7, 3).random(4)
    b = replicate_rng(7, 3).random(4)
    assert np.allclose(a, b)


def test_estimate_deterministic():
    kind = ChainKind.eta(1.0)
    r1 = estimate("K", kind, 12, 400, seed=5)
    r2 = estimate("K", kind, 12, 400, seed=5)
    assert r1.mean == r2.mean


def test_chunk_size_invariance():
    kind = ChainKind.eta(0.8)
    r1 = estimate("K", kind, 10, 300, seed=9, chunk=32)
    r2 = estimate("K", kind, 10, 300, seed=9, chunk=300)
    assert r1.mean == r2.mean
    assert r1.std_error == r2.std_error


def test_estimate_matches_exact_mean():
    p = PSequence.eta(1.0)
    kind = ChainKind.x(p)
    n = 8
    enum = oracle.enumeration_moments(kind, n, j_max=4)
    for stat, target in [("K", enum["mean_k"]), ("Cj", enum["mean_c"][2])]:
        rep = estimate(stat, kind, n, 20000, seed=13, j=2)
        assert abs(rep.mean - target) < 4 * rep.std_error


def test_ks_uniform_sample():
    rng = np.random.default_rng(4)
    x = rng.random(2000)
    d = ks_statistic(x, lambda v: v)
    assert ks_p_value(d, 2000) > 0.001


def test_ks_detects_wrong_law():
    rng = np.random.default_rng(4)
    x = rng.random(2000) ** 2
    d = ks_statistic(x, lambda v: v)
    assert ks_p_value(d, 2000) < 1e-6


def test_stick_breaking_marginal():
    x = stick_breaking_sample(0.7, 5000, seed=2)
    # first stick is Beta(1, theta): mean 1/(1+theta)
    assert abs(float(np.mean(x[:, 0])) - 1 / 1.7) < 0.02


def test_gem_diagnostic_fast():
    rep = gem_diagnostic(0.7, 800, 400, seed=21)
    assert rep.p_value > 0.001
