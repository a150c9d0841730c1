"""Signed-model statistics layered on top of the unsigned cycle laws.

Each circle of size k carries an orientation pattern; the number of
in-looking members of a k-circle is i with probability omega_{ki},
independently across circles given the cycle counts.  From the omega
weights and the unsigned laws (exact or formula-based) this module derives
the laws and moments of the oriented counts: C_{ki} (k-circles with i
looking in), C*_j (circles with j looking in), Lambda_n (total looking
in), and A*_i (in-looking counts of the circles in formation order).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from scipy import special as _sp

from .dist import DistTable
from .params import ThetaSequence


@dataclass(frozen=True)
class OrientationWeights:
    """Per-circle orientation weights omega_{ki}, 1 <= i <= k.

    The binomial mode has the leader always looking in and every other
    member looking in independently with probability kappa; the custom
    mode takes an explicit table {(k, i): weight} with unit row sums.
    """

    mode: str
    kappa: float | None = None
    table: tuple | None = None

    @classmethod
    def binomial(cls, kappa: float) -> "OrientationWeights":
        if not (0.0 <= kappa <= 1.0):
            raise ValueError("kappa must lie in [0, 1]")
        return cls(mode="binomial", kappa=kappa)

    @classmethod
    def from_table(cls, table: dict, tol: float = 1e-9) -> "OrientationWeights":
        rows: dict = {}
        for (k, i), w in table.items():
            if not (1 <= i <= k):
                raise ValueError(f"weight index ({k}, {i}) outside 1 <= i <= k")
            if w < 0:
                raise ValueError("weights must be nonnegative")
            rows.setdefault(k, 0.0)
            rows[k] += w
        for k, s in rows.items():
            if abs(s - 1.0) > tol:
                raise ValueError(f"row k={k} sums to {s}, not 1")
        return cls(mode="custom", table=tuple(sorted(table.items())))

    def __call__(self, k: int, i: int) -> float:
        return omega(k, i, self)


def omega(k: int, i: int, weights: OrientationWeights) -> float:
    """Probability that a k-circle has exactly i members looking in."""
    if not (1 <= i <= k):
        raise ValueError(f"require 1 <= i <= k, got i={i}, k={k}")
    if weights.mode == "binomial":
        kap = weights.kappa
        return float(_sp.comb(k - 1, i - 1, exact=True)) * kap ** (i - 1) * (1.0 - kap) ** (k - i)
    lookup = dict(weights.table)
    return lookup.get((k, i), 0.0)


def cki_distribution(k: int, i: int, ell: int, n: int, k_law: DistTable,
                     weights: OrientationWeights) -> float:
    """P(C_{ki} = ell): number of k-circles with exactly i looking in,
    given the exact law of the k-circle count."""
    if ell < 0:
        raise ValueError("ell must be nonnegative")
    if k * ell > n:
        return 0.0
    w = omega(k, i, weights)
    total = 0.0
    for m, pm in k_law.items():
        if m < ell:
            continue
        total += (
            float(_sp.comb(m, ell, exact=True))
            * w**ell * (1.0 - w) ** (m - ell) * pm
        )
    return total


def cstar_moments(i: int, j: int, n: int, provider,
                  weights: OrientationWeights) -> tuple[float, float]:
    """(E[C*_j], Cov(C*_i, C*_j)) for the counts of circles with exactly
    i or j members looking in.

    ``provider`` supplies the unsigned moments: ``provider.mean(k)`` =
    E[C_k] and ``provider.cov(k, kp)`` = Cov(C_k, C_kp), for k, kp <= n.
    """
    if not (1 <= i <= n and 1 <= j <= n):
        raise ValueError("require 1 <= i, j <= n")
    mean_j = math.fsum(
        omega(k, j, weights) * provider.mean(k) for k in range(j, n + 1)
    )
    cov_terms = []
    for k in range(i, n + 1):
        w_ki = omega(k, i, weights)
        if w_ki == 0.0:
            continue
        for kp in range(j, n + 1):
            w_kj = omega(kp, j, weights)
            if w_kj == 0.0:
                continue
            cov_terms.append(w_ki * w_kj * provider.cov(k, kp))
    for k in range(max(i, j), n + 1):
        cov_terms.append(-omega(k, i, weights) * omega(k, j, weights) * provider.mean(k))
    if i == j:
        # diagonal of the conditional multinomial covariance is the binomial
        # variance C_k w(1-w), not -C_k w^2; the extra C_k w part lands here
        for k in range(j, n + 1):
            cov_terms.append(omega(k, j, weights) * provider.mean(k))
    return mean_j, math.fsum(cov_terms)


def lambda_total(n: int, kappa: float, k_law: DistTable) -> tuple[DistTable, float]:
    """(law, mean) of Lambda_n, the total number looking in: each circle
    leader looks in, every other member independently with probability
    kappa."""
    if not (0.0 <= kappa <= 1.0):
        raise ValueError("kappa must lie in [0, 1]")
    probs: dict = {}
    for k, pk in k_law.items():
        if pk == 0.0:
            continue
        for r in range(k, n + 1):
            probs[r] = probs.get(r, 0.0) + (
                float(_sp.comb(n - k, r - k, exact=True))
                * kappa ** (r - k) * (1.0 - kappa) ** (n - r) * pk
            )
    law = DistTable(probs, tol=1e-10)
    return law, law.mean()


def lambda_mean_identity(n: int, kappa: float, mean_k: float) -> float:
    """E[Lambda_n] = n kappa + (1 - kappa) E[K_n]."""
    return n * kappa + (1.0 - kappa) * mean_k


def ordered_star_prob(astar, n: int, thetaseq: ThetaSequence,
                      weights: OrientationWeights) -> float:
    """P(A*_1 = a*_1, ..., A*_k = a*_k, K_n > k): joint in-looking counts
    of the first k circles in formation order, for the coin process."""
    from .coupling import ordered_cycle_prefix_prob

    astar = tuple(int(a) for a in astar)
    if any(a < 1 for a in astar):
        raise ValueError("in-looking counts must be >= 1 (leaders look in)")
    if sum(astar) >= n:
        raise ValueError("sum of in-looking counts must be < n")
    k = len(astar)
    total = []

    def rec(pos: int, used: int, r_prefix: tuple):
        if pos == k:
            total.append(
                ordered_cycle_prefix_prob(r_prefix, n, thetaseq)
                * math.prod(omega(r_prefix[l], astar[l], weights) for l in range(k))
            )
            return
        min_rest = sum(astar[pos + 1:])
        for r in range(astar[pos], n - used - min_rest):
            rec(pos + 1, used + r, r_prefix + (r,))

    rec(0, 0, ())
    return math.fsum(total)
