"""Parameter sequences for the chains and the two maps linking them.

A ``ThetaSequence`` drives the independent-coin process (index i succeeds
with probability theta_i/(i-1+theta_i)); a ``PSequence`` drives the
derangement chain (index i continues with probability p_i).  Two distinct
correspondences connect them:

* conditional link: theta_i = (i-1) q_i / (p_i p_{i-1}), the choice under
  which conditioning the coin process on "no adjacent 1s" reproduces the
  chain law exactly;
* push-forward link: theta_i = (i-1) q_i / p_i, the choice under which
  erasing 11-patterns from the coin process reproduces the chain law.

Conventions throughout: theta_1 = 1, p_1 = 0, p_2 = 1.
"""

from __future__ import annotations

import math
from typing import Callable, Sequence


class ThetaSequence:
    """Evaluator i -> theta_i > 0 with family metadata.

    Families:
      constant(theta)       theta_i = theta for i >= 3
      eta_star(theta)       theta_3 = theta, theta_i = theta(1 + theta/(i-2))
      holst(a, b, c)        theta_i = a(i-1)/(b - a + (i-1)^c)
      tabulated(values)     explicit table with a tail rule
      from_callable(fn)     arbitrary evaluator
    """

    def __init__(self, family: str, evaluator: Callable[[int], float], theta2: float = 1.0, label: str = ""):
        self.family = family
        self.theta2 = float(theta2)
        self.label = label or family
        self._eval = evaluator

    @classmethod
    def constant(cls, theta: float, theta2: float | None = None) -> "ThetaSequence":
        if theta <= 0:
            raise ValueError("theta must be positive")
        t2 = theta if theta2 is None else theta2
        return cls("constant", lambda i: theta, theta2=t2, label=f"constant({theta})")

    @classmethod
    def eta_star(cls, theta: float, theta2: float = 1.0) -> "ThetaSequence":
        """The sequence for which conditioning reproduces the playground chain."""
        if theta <= 0:
            raise ValueError("theta must be positive")
        if not (0 < theta2 <= 1):
            raise ValueError("theta2 must lie in (0, 1]")

        def ev(i: int) -> float:
            if i == 3:
                return theta
            return theta * (1.0 + theta / (i - 2))

        seq = cls("eta_star", ev, theta2=theta2, label=f"eta_star({theta})")
        seq.theta = theta
        return seq

    @classmethod
    def holst(cls, a: float, b: float, c: float) -> "ThetaSequence":
        if a <= 0 or c <= 0:
            raise ValueError("require a > 0 and c > 0")

        def ev(i: int) -> float:
            return a * (i - 1) / (b - a + (i - 1) ** c)

        return cls("holst", ev, theta2=ev(2), label=f"holst({a},{b},{c})")

    @classmethod
    def tabulated(cls, values: Sequence[float], tail_rule: str = "reject") -> "ThetaSequence":
        vals = [float(v) for v in values]
        if any(v <= 0 for v in vals[1:]):
            raise ValueError("all tabulated theta values must be positive")
        if tail_rule not in ("constant", "reject"):
            raise ValueError("tail_rule must be 'constant' or 'reject'")

        def ev(i: int) -> float:
            if i - 1 < len(vals):
                return vals[i - 1]
            if tail_rule == "constant":
                return vals[-1]
            raise IndexError(f"theta table has no entry for i={i}")

        t2 = vals[1] if len(vals) > 1 else 1.0
        return cls("tabulated", ev, theta2=t2, label="tabulated")

    @classmethod
    def from_callable(cls, fn: Callable[[int], float], theta2: float = 1.0, label: str = "callable") -> "ThetaSequence":
        return cls("callable", fn, theta2=theta2, label=label)

    def __call__(self, i: int) -> float:
        if i < 1:
            raise ValueError("index must be >= 1")
        if i == 1:
            return 1.0
        if i == 2:
            return self.theta2
        v = float(self._eval(i))
        if v <= 0:
            raise ValueError(f"theta_{i} = {v} is not positive")
        return v

    def with_theta2(self, theta2: float) -> "ThetaSequence":
        return ThetaSequence(self.family, self._eval, theta2=theta2, label=self.label)

    def scaled(self, s: float) -> "ThetaSequence":
        """Every theta_i (including theta_1) multiplied by s.

        The index-1 value of the scaled sequence is s rather than 1; used by
        the pgf identity.
        """
        if s < 0:
            raise ValueError("scale must be nonnegative")
        base = self
        seq = ThetaSequence(
            f"scaled({s})*{self.family}",
            lambda i: s * base._eval(i),
            theta2=s * self.theta2,
            label=f"{s}*{self.label}",
        )
        seq._theta1 = s
        return seq

    @property
    def theta1(self) -> float:
        return getattr(self, "_theta1", 1.0)

    def coin_prob(self, i: int) -> float:
        """P(coin at index i shows 1) = theta_i/(i-1+theta_i); 1 at i=1."""
        if i == 1:
            return 1.0
        t = self(i)
        return t / (i - 1 + t)

    def bracket_product_log(self, n: int) -> float:
        """log of theta_1(theta_2+1)...(theta_n+n-1).

        For a scaled sequence theta_1 may differ from 1 and enters the
        product; a zero first factor is rejected.
        """
        t1 = self.theta1
        if t1 <= 0:
            raise ValueError("bracket product undefined for theta_1 <= 0")
        out = math.log(t1)
        for i in range(2, n + 1):
            out += math.log(self(i) + i - 1)
        return out


class PSequence:
    """Evaluator i -> p_i with p_1 = 0, p_2 = 1, p_i in (0,1) for i >= 3."""

    def __init__(self, evaluator: Callable[[int], float], family: str = "custom", label: str = ""):
        self.family = family
        self.label = label or family
        self._eval = evaluator

    @classmethod
    def eta(cls, theta: float) -> "PSequence":
        """p_i = (i-1)/(theta+i-1), the playground-game chain."""
        if theta <= 0:
            raise ValueError("theta must be positive")
        seq = cls(lambda i: (i - 1) / (theta + i - 1), family="eta", label=f"eta({theta})")
        seq.theta = theta
        return seq

    @classmethod
    def from_theta_conditional(cls, thetaseq: ThetaSequence) -> "PSequence":
        """p_i = G_{i-1}/G_i, inverting the conditional link."""
        from .coupling import g_values  # local import: coupling depends on params

        def ev(i: int) -> float:
            g = g_values(thetaseq, i)
            return g[i - 1] / g[i]

        return cls(ev, family="from_theta_conditional", label=f"cond<-{thetaseq.label}")

    @classmethod
    def from_theta_pushforward(cls, thetaseq: ThetaSequence) -> "PSequence":
        """p_i = (i-1)/(i-1+theta_i), inverting the push-forward link."""

        def ev(i: int) -> float:
            return (i - 1) / (i - 1 + thetaseq(i))

        return cls(ev, family="from_theta_pushforward", label=f"push<-{thetaseq.label}")

    @classmethod
    def tabulated(cls, values: Sequence[float], tail_rule: str = "reject") -> "PSequence":
        vals = [float(v) for v in values]

        def ev(i: int) -> float:
            if i - 1 < len(vals):
                return vals[i - 1]
            if tail_rule == "constant":
                return vals[-1]
            raise IndexError(f"p table has no entry for i={i}")

        return cls(ev, family="tabulated", label="tabulated")

    def __call__(self, i: int) -> float:
        if i < 1:
            raise ValueError("index must be >= 1")
        if i == 1:
            return 0.0
        if i == 2:
            return 1.0
        v = float(self._eval(i))
        if not (0.0 < v < 1.0):
            raise ValueError(f"p_{i} = {v} must lie in (0, 1)")
        return v

    def q(self, i: int) -> float:
        return 1.0 - self(i)


def link_conditional(direction: str, seq, i: int) -> float:
    """Single-index conditional link between p and theta.

    ``p_to_theta`` maps a PSequence to theta_i = (i-1)q_i/(p_i p_{i-1});
    ``theta_to_p`` maps a ThetaSequence to p_i = G_{i-1}/G_i.
    """
    if i < 3:
        raise ValueError("link values below index 3 are fixed by convention")
    if direction == "p_to_theta":
        p = seq
        return (i - 1) * p.q(i) / (p(i) * p(i - 1))
    if direction == "theta_to_p":
        from .coupling import g_values

        g = g_values(seq, i)
        return g[i - 1] / g[i]
    raise ValueError(f"unknown direction {direction!r}")


def link_pushforward(direction: str, seq, i: int) -> float:
    """Single-index push-forward link: theta_i = (i-1)q_i/p_i and inverse."""
    if i < 3:
        raise ValueError("link values below index 3 are fixed by convention")
    if direction == "p_to_theta":
        p = seq
        return (i - 1) * p.q(i) / p(i)
    if direction == "theta_to_p":
        t = seq(i)
        return (i - 1) / (i - 1 + t)
    raise ValueError(f"unknown direction {direction!r}")


def conditional_theta(p: PSequence, theta2: float = 1.0) -> ThetaSequence:
    """ThetaSequence conditionally linked to p (index 2 value configurable)."""
    return ThetaSequence.from_callable(
        lambda i: link_conditional("p_to_theta", p, i),
        theta2=theta2,
        label=f"cond<-{p.label}",
    )


def pushforward_theta(p: PSequence, theta2: float = 1.0) -> ThetaSequence:
    """ThetaSequence push-forward linked to p."""
    return ThetaSequence.from_callable(
        lambda i: link_pushforward("p_to_theta", p, i),
        theta2=theta2,
        label=f"push<-{p.label}",
    )
