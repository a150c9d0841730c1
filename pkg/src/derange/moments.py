"""First and second moments of cycle counts, exact and in the n -> infinity
limit.

Conventions: q_1 = 1, q_2 = 0 (the chain is forced at those indices); all
alternating sums are accumulated with compensated summation.  Closed forms
specialized to the eta chain (p_i = (i-1)/(theta+i-1)) carry `_eta` in
their names and must agree with the generic routines — that agreement is a
test, not an assumption.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from scipy import special as _sp

from .numerics import (
    AccuracySpec,
    DEFAULT_ACC,
    EULER_GAMMA,
    generalized_pfq,
    harmonic_h,
    integrate,
    rising_factorial,
)
from .params import PSequence


@dataclass(frozen=True)
class LimitEstimate:
    """A limit value with its alternating-tail error bracket."""

    value: float
    error_bound: float
    m: int


# ---------------------------------------------------------------------------
# E[K_n]

def mean_k(n: int, p: PSequence) -> float:
    """Expected number of cycles of the derangement chain at horizon n."""
    if n < 2:
        raise ValueError("n must be >= 2")
    if n in (2, 3):
        return 1.0
    terms = []
    for i in range(1, n):
        prod = 1.0
        for j in range(0, n - i):
            prod *= p.q(i + j)
            if prod == 0.0:
                break
            terms.append(prod if j % 2 == 0 else -prod)
    return math.fsum(terms)


def _abar_numeric(p: PSequence, j: int, n_terms: int) -> float:
    """a-bar_j = sum_i prod_{l=i}^{j+i} q_l, summed numerically with an
    integral tail correction (terms decay like i^{-(j+1)})."""
    total = []
    prod = 1.0
    # rolling product over a window of j+1 consecutive q's
    window = [p.q(l) for l in range(1, j + 2)]
    for w in window:
        prod *= w
    i = 1
    last = 0.0
    while i <= n_terms:
        total.append(prod)
        last = prod
        # slide the window: divide out q_i, multiply in q_{i+j+1}
        qi = p.q(i)
        qn = p.q(i + j + 1)
        if qi > 0.0:
            prod = prod / qi * qn
        else:
            prod = 1.0
            for l in range(i + 1, i + j + 2):
                prod *= p.q(l)
        i += 1
    tail = last * (n_terms) / j  # integral approximation of the power tail
    return math.fsum(total) + tail


def mean_k_asymptotic(p: PSequence, alpha: float, m: int,
                      probe: int = 10**6) -> LimitEstimate:
    """Estimate lim (E[K_n] - alpha log n) for a chain with i q_i -> alpha.

    Built from alpha*gamma + psi_alpha(p) + the alternating a-bar series
    truncated at 2m - 1 terms; the reported bound is a-bar_{2m}.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    # probe i q_i -> alpha
    checks = [abs(i * p.q(i) - alpha) for i in (probe // 100, probe // 10, probe)]
    if not (checks[-1] <= max(0.05 * alpha, 1e-6) and checks[-1] <= checks[0] + 1e-12):
        raise ValueError(
            f"i*q_i does not appear to converge to {alpha}: deviations {checks}"
        )
    # psi = sum (q_i - alpha/i) with an integral tail correction
    psi_terms = [p.q(i) - alpha / i for i in range(1, probe + 1)]
    psi = math.fsum(psi_terms) + psi_terms[-1] * probe
    abars = [_abar_numeric(p, j, min(probe, 10**5) if j > 1 else probe)
             for j in range(1, 2 * m + 1)]
    value = alpha * EULER_GAMMA + psi + math.fsum(
        (-1) ** j * abars[j - 1] for j in range(1, 2 * m)
    )
    return LimitEstimate(value=value, error_bound=abars[2 * m - 1], m=m)


def mean_k_eta(n: int, theta: float) -> float:
    """Closed form for E[K_n] under the eta chain."""
    if n < 2:
        raise ValueError("n must be >= 2")
    if n in (2, 3):
        return 1.0
    terms = [1.0]
    for i in range(3, n):
        terms.append(theta / (theta + i - 1))
    for i in range(3, n - 1):
        # alternating tail in j with ratio -theta/(theta+i-2+j); truncate
        # once the term can no longer move the fsum
        t = -theta * theta / (
            (theta + i - 1.0) * (theta + i)
        )  # j = 2 term with sign (-1)^{j+1}
        for j in range(2, n - i + 1):
            terms.append(t)
            if abs(t) < 1e-18:
                break
            t *= -theta / (theta + i - 1.0 + j)
    return math.fsum(terms)


def eta_abar(theta: float, j: int) -> float:
    """Closed form a-bar_j for the eta chain: theta^{j+1}/(j (theta+2)_(j))."""
    if j < 1:
        raise ValueError("j must be >= 1")
    return theta ** (j + 1) / (j * rising_factorial(theta + 2.0, j))


def mean_k_eta_limit(theta: float, m: int = 3, method: str = "series",
                     acc: AccuracySpec = DEFAULT_ACC) -> LimitEstimate:
    """lim (E[K_n] - theta log n) for the eta chain.

    Methods: 'series' (closed-form a-bar alternating series, bracketed by
    a-bar_{2m}); 'integral' (tail resummed as a double integral); 'pfq'
    (tail as a 2F2 evaluation).  All agree within combined tolerances.
    """
    if theta <= 0:
        raise ValueError("theta must be positive")
    head = 1.0 - theta * harmonic_h(theta + 1.0) + theta * EULER_GAMMA
    if method == "series":
        tail = math.fsum((-1) ** j * eta_abar(theta, j) for j in range(1, 2 * m))
        return LimitEstimate(value=head + tail, error_bound=eta_abar(theta, 2 * m), m=m)
    if method == "integral":
        val = integrate(
            lambda x, y: math.exp(-theta * x * y) * (1.0 - x) ** (theta + 1.0),
            ((0.0, 1.0), (0.0, 1.0)),
            acc,
        )
        return LimitEstimate(value=head - theta * theta * val, error_bound=0.0, m=0)
    if method == "pfq":
        f = generalized_pfq((1.0, 1.0), (2.0, theta + 3.0), -theta, acc)
        tail = -theta * theta / (theta + 2.0) * f
        return LimitEstimate(value=head + tail, error_bound=0.0, m=0)
    raise ValueError(f"unknown method {method!r}")


# ---------------------------------------------------------------------------
# E[C_j(n)]

def mean_cj(n: int, j: int, p: PSequence) -> float:
    """Expected number of j-cycles at horizon n, from the boundary term
    plus the double alternating sum."""
    if j < 2:
        raise ValueError("j must be >= 2 (no 1-cycles in a derangement)")
    if n < j:
        return 0.0
    boundary = p.q(n - j + 1)
    for l in range(n - j + 2, n):
        boundary *= p(l)
    terms = [boundary]
    for i in range(j + 1, n):
        head = p.q(i - j)
        for l in range(i - j + 1, i - 1):
            head *= p(l)
        if head == 0.0:
            continue
        prod = head
        for k in range(0, n - i):
            prod *= p.q(i + k)
            if prod == 0.0:
                break
            terms.append(prod if k % 2 == 0 else -prod)
    return math.fsum(terms)


def mean_cj_eta(n: int, j: int, theta: float) -> float:
    """Closed form for E[C_j(n)] under the eta chain."""
    if j < 2:
        raise ValueError("j must be >= 2")
    if n < j:
        return 0.0
    if j == n:
        if n == 2:
            return 1.0
        return math.exp(
            math.lgamma(n - 1.0)
            - float(_sp.gammaln(theta + 2 + n - 3) - _sp.gammaln(theta + 2))
        )
    if j == n - 1:
        return 0.0
    return mean_cj(n, j, PSequence.eta(theta))


def eta_bbar(theta: float, j: int, k: int) -> float:
    """Closed form b-bar_k(theta, j), the k-th alternating correction in the
    series for lim E[C_j(n)]."""
    first = (
        theta**k
        * math.gamma(k)
        * (k * (j - 1.0) + theta * (k + j - 1.0))
        / (rising_factorial(theta + 1.0, k) * rising_factorial(j - 1.0, k + 1))
    )
    second = (
        theta**k
        * math.gamma(j - 1.0)
        * ((k - 1.0 + (theta + 1.0) * j) * (theta + j) - k)
        / rising_factorial(theta + 1.0, k + j)
    )
    return first - second


def _exp_beta_integral(theta: float, power: float,
                       acc: AccuracySpec = DEFAULT_ACC) -> float:
    """int_0^1 e^{-theta x} (1-x)^{power} dx."""
    return integrate(lambda x: math.exp(-theta * x) * (1.0 - x) ** power,
                     (0.0, 1.0), acc)


def mean_cj_eta_limit(theta: float, j: int, method: str = "series", m: int = 2,
                      acc: AccuracySpec = DEFAULT_ACC) -> LimitEstimate:
    """lim_n E[C_j(n)] under the eta chain.

    Methods: 'series' (head integral plus alternating b-bar corrections,
    error bracket b-bar_{2m+1}); 'integral' (full double-integral form).
    """
    if j < 2:
        raise ValueError("j must be >= 2")
    if theta <= 0:
        raise ValueError("theta must be positive")
    if method == "series":
        if j >= 3:
            head = (
                theta
                * math.gamma(j - 1.0)
                / rising_factorial(theta + 2.0, j - 3)
                * _exp_beta_integral(theta, theta + j - 1.0, acc)
            )
        else:
            head = theta * _exp_beta_integral(theta, theta + 1.0, acc)
        tail = math.fsum(
            (-1) ** (k + 1) * eta_bbar(theta, j, k) for k in range(1, 2 * m + 1)
        )
        return LimitEstimate(
            value=head + tail,
            error_bound=abs(eta_bbar(theta, j, 2 * m + 1)),
            m=m,
        )
    if method == "integral":
        def f(x, y):
            return (
                theta
                * theta
                * math.exp(-theta * y)
                * x ** (theta - 1.0)
                * (1.0 - x) ** (j - 2.0)
                * (1.0 - y) ** (theta + j - 1.0)
                / (1.0 - x + x * y) ** (j - 1.0)
            )

        val = integrate(f, ((0.0, 1.0), (0.0, 1.0)), acc)
        if j >= 3:
            theta_bracket = theta * rising_factorial(theta + 1.0, j)  # theta_(j+1)
            corr = (
                theta**3
                * math.gamma(j - 1.0)
                / theta_bracket
                * (
                    theta
                    + j
                    - 1.0
                    - ((theta + j - 1.0) ** 2 + j - 1.0)
                    * _exp_beta_integral(theta, theta + j, acc)
                )
            )
            val += corr
        else:
            val -= (
                theta * theta / (theta + 1.0)
                * _exp_beta_integral(theta, theta + 2.0, acc)
            )
        return LimitEstimate(value=val, error_bound=0.0, m=0)
    raise ValueError(f"unknown method {method!r}")


# ---------------------------------------------------------------------------
# second moments

def _pattern_r(m: int, j: int, l: int, p: PSequence) -> float:
    """Probability that a j-cycle ends exactly at position l under horizon m
    (l = m+1 is the boundary cycle touching the top)."""
    if m < j:
        return 0.0
    if l == m + 1:
        out = p.q(m - j + 1)
        for s in range(m - j + 2, m):
            out *= p(s)
        return out
    if not (j + 1 <= l <= m - 1):
        return 0.0
    from .chains import ChainKind, marginal_one

    out = marginal_one(ChainKind.x(p), l, m) * p.q(l - j)
    for s in range(l - j + 1, l - 1):
        out *= p(s)
    return out


def second_moments(n: int, j: int, p: PSequence) -> float:
    """Var(C_j(n)) assembled from the cycle-end pattern probabilities."""
    if j < 2:
        raise ValueError("j must be >= 2")
    if n < j:
        return 0.0
    idx = list(range(j + 1, n + 2))
    r_full = {i: _pattern_r(n, j, i, p) for i in idx}
    var_terms = [r_full[i] * (1.0 - r_full[i]) for i in idx]
    cross_inner = []
    for i in idx:
        if r_full[i] == 0.0:
            continue
        for l in range(j + 1, i - j + 1):
            cross_inner.append(2.0 * r_full[i] * _pattern_r(i - j - 1, j, l, p))
    cross_full = []
    for i in idx:
        if r_full[i] == 0.0:
            continue
        for l in range(j + 1, i):
            cross_full.append(-2.0 * r_full[i] * r_full.get(l, 0.0))
    return math.fsum(var_terms + cross_inner + cross_full)


def cov_eta(n: int, i: int, j: int, theta: float) -> float:
    """Covariance of the word bits at indices i < j under the eta chain,
    for 2 < i < j < n-1."""
    if not (2 < i < j < n - 1):
        raise ValueError("require 2 < i < j < n-1")

    def s_sum(start: int) -> float:
        return math.fsum(
            (-1) ** l * theta**l / math.gamma(theta + l) for l in range(start, n)
        )

    e_j = math.gamma(theta + j - 1.0) * theta ** (1 - j) * (-1) ** j * s_sum(j)
    c_i = math.gamma(theta + i - 1.0) * (-1) ** i * theta ** (1 - i)
    return -e_j * c_i * s_sum(j - 1)


# ---------------------------------------------------------------------------
# derangement probabilities of the theta-biased permutation

@lru_cache(maxsize=None)
def lambda_esf(n: int, theta: float) -> float:
    """P(a theta-biased random permutation of n elements has no fixed
    point), by the stabilized alternating sum."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if n == 1:
        return 0.0
    # t_0 = 1; t_{j+1}/t_j = -theta (n-j) / ((j+1)(n+theta-j-1)); the
    # theta^j/j! factor makes the tail negligible after ~40 terms
    terms = [1.0]
    t = 1.0
    for j in range(0, n):
        t *= -theta * (n - j) / ((j + 1) * (n + theta - j - 1.0))
        terms.append(t)
        if abs(t) < 1e-20:
            break
    return math.fsum(terms)
