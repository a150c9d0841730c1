"""Chain definitions, exact path probabilities, samplers, cycle extraction.

Two families of {0,1}-valued chains run from index n+1 (value 1, never
stored) down to index 1:

* derangement chains (tags X, ETA, ETA_TILDE): inhomogeneous two-state
  chains whose words land in the no-adjacent-1s set Delta_n;
* independent-coin chains (tags Y, XI_TILDE): index i carries a 1 with
  probability theta_i/(i-1+theta_i), independently.

Words are stored ascending by chain index (w_1 first); string serialization
reverses to the visual top-down order.  The signed variant (tag SIGNED)
carries a +/- orientation on each 0-step and extends to a signed
permutation by uniform labeling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .params import PSequence, ThetaSequence

_DERANGEMENT_TAGS = ("X", "ETA", "ETA_TILDE")
_COIN_TAGS = ("Y", "XI_TILDE")

# Signed-state order used in 3x3 transition matrices.
SIGNED_STATES = ("+0", "-0", "1")


class ChainKind:
    """Tagged chain family with its parameters.

    Use the classmethod constructors; every kind exposes either an
    effective PSequence (derangement family) or ThetaSequence (coin
    family).
    """

    def __init__(self, tag: str, p: PSequence | None = None,
                 thetaseq: ThetaSequence | None = None,
                 kappa: float | None = None, theta: float | None = None):
        self.tag = tag
        self.p = p
        self.thetaseq = thetaseq
        self.kappa = kappa
        self.theta = theta

    @classmethod
    def x(cls, p: PSequence) -> "ChainKind":
        return cls("X", p=p)

    @classmethod
    def eta(cls, theta: float) -> "ChainKind":
        return cls("ETA", p=PSequence.eta(theta), theta=theta)

    @classmethod
    def eta_tilde(cls, theta: float) -> "ChainKind":
        """Derangement chain whose law matches a derangement-conditioned
        theta-biased permutation; continue-probabilities built from the
        derangement probabilities lambda_r(theta)."""
        if theta <= 0:
            raise ValueError("theta must be positive")
        p = PSequence(lambda i: _eta_tilde_p(theta, i),
                      family="eta_tilde", label=f"eta_tilde({theta})")
        return cls("ETA_TILDE", p=p, theta=theta)

    @classmethod
    def y(cls, thetaseq: ThetaSequence) -> "ChainKind":
        return cls("Y", thetaseq=thetaseq)

    @classmethod
    def xi_tilde(cls, theta: float) -> "ChainKind":
        return cls("XI_TILDE", thetaseq=ThetaSequence.constant(theta), theta=theta)

    @classmethod
    def signed(cls, p: PSequence, kappa: float) -> "ChainKind":
        if not (0.0 <= kappa <= 1.0):
            raise ValueError("kappa must lie in [0, 1]")
        return cls("SIGNED", p=p, kappa=kappa)

    @classmethod
    def xinf_prefix(cls, p: PSequence) -> "ChainKind":
        return cls("XINF_PREFIX", p=p)

    @property
    def is_derangement(self) -> bool:
        return self.tag in _DERANGEMENT_TAGS

    @property
    def is_coin(self) -> bool:
        return self.tag in _COIN_TAGS

    def __repr__(self):
        return f"ChainKind({self.tag})"


@lru_cache(maxsize=None)
def _eta_tilde_p(theta: float, r: int) -> float:
    from .moments import lambda_esf

    lam_r = lambda_esf(r, theta)
    lam_rm1 = lambda_esf(r - 1, theta)
    num = (theta + r - 1) * lam_r
    return num / (num + theta * lam_rm1)


# ---------------------------------------------------------------------------
# words

def word_to_string(word) -> str:
    """Serialize bits in visual order, index n down to 1."""
    return "".join(str(b) for b in reversed(word))


def word_from_string(s: str):
    return tuple(int(c) for c in reversed(s))


def in_delta(word) -> bool:
    """Membership in Delta_n: w_1 = 1, w_n = 0, no adjacent 1s."""
    n = len(word)
    if n < 2:
        return False
    if word[0] != 1 or word[-1] != 0:
        return False
    return all(word[i] + word[i + 1] < 2 for i in range(n - 1))


@dataclass(frozen=True)
class SignedWord:
    """Steps at indices 1..n, each '+0', '-0' or '1', plus the orientation
    probability kappa used to generate them."""

    steps: tuple
    kappa: float

    def __post_init__(self):
        for s in self.steps:
            if s not in SIGNED_STATES:
                raise ValueError(f"invalid signed step {s!r}")

    def projection(self):
        """The underlying 0/1 word (both 0-orientations collapse to 0)."""
        return tuple(1 if s == "1" else 0 for s in self.steps)

    def to_string(self) -> str:
        """Characters {o, i, 1} for {-0, +0, 1}, index n down to 1."""
        table = {"-0": "o", "+0": "i", "1": "1"}
        return "".join(table[s] for s in reversed(self.steps))


@dataclass(frozen=True)
class SignedPermutation:
    """Ordered circles of signed labels; first label of each circle
    positive, absolute labels partitioning 1..n."""

    circles: tuple

    def n(self) -> int:
        return sum(len(c) for c in self.circles)

    def positive_count(self) -> int:
        return sum(1 for c in self.circles for lab in c if lab > 0)


# ---------------------------------------------------------------------------
# transition structure

def transition_matrix(kind: ChainKind, r: int, n: int) -> np.ndarray:
    """Row-stochastic one-step matrix used when generating the value at
    index r (rows indexed by the value at index r+1)."""
    if not (1 <= r <= n):
        raise ValueError(f"index r={r} outside 1..{n}")
    if kind.tag == "XINF_PREFIX":
        return _xinf_matrix(kind.p, r)
    if kind.is_derangement:
        p = kind.p
        if r == n:
            return np.array([[1.0, 0.0], [1.0, 0.0]])
        if r == 1:
            return np.array([[0.0, 1.0], [0.0, 1.0]])
        pr = p(r)
        return np.array([[pr, 1.0 - pr], [1.0, 0.0]])
    if kind.is_coin:
        c = kind.thetaseq.coin_prob(r)
        return np.array([[1.0 - c, c], [1.0 - c, c]])
    if kind.tag == "SIGNED":
        kap = kind.kappa
        if r == n:
            row = [kap, 1.0 - kap, 0.0]
            return np.array([row, row, row])
        if r == 1:
            row = [0.0, 0.0, 1.0]
            return np.array([row, row, row])
        pr = kind.p(r)
        from_zero = [kap * pr, (1.0 - kap) * pr, 1.0 - pr]
        from_one = [kap, 1.0 - kap, 0.0]
        return np.array([from_zero, from_zero, from_one])
    raise ValueError(f"unsupported kind {kind.tag}")


def _xinf_matrix(p: PSequence, i: int) -> np.ndarray:
    """Upward step of the limit chain from index i to i+1."""
    from .limitchain import xinf_transition

    t = xinf_transition(i, p)
    return np.array([[1.0 - t, t], [1.0, 0.0]])


# ---------------------------------------------------------------------------
# sampling

def _rng(seed) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


def sample_path(kind: ChainKind, n: int, seed, rng: np.random.Generator | None = None):
    """One word from the chain law; deterministic given (kind, n, seed)."""
    if kind.tag == "SIGNED":
        return generate_signed(n, kind.p, kind.kappa, seed)[0]
    if (kind.is_derangement or kind.tag == "XINF_PREFIX") and n < 2:
        raise ValueError("derangement chains need n >= 2")
    if rng is None:
        rng = _rng(seed)
    u = rng.random(n)
    if kind.is_coin:
        bits = [1 if u[i - 1] < kind.thetaseq.coin_prob(i) else 0 for i in range(1, n + 1)]
        return tuple(bits)
    if kind.tag == "XINF_PREFIX":
        # the limit chain runs upward from a 1 at index 1
        word = [1] + [0] * (n - 1)
        for i in range(1, n):
            row = _xinf_matrix(kind.p, i)[word[i - 1]]
            word[i] = 1 if u[i] < row[1] else 0
        return tuple(word)
    # derangement family: walk indices n down to 1
    word = [0] * n
    prev = 1  # sentinel value at index n+1
    for r in range(n, 0, -1):
        row = transition_matrix(kind, r, n)[prev]
        bit = 1 if u[n - r] < row[1] else 0
        word[r - 1] = bit
        prev = bit
    return tuple(word)


def generate_signed(n: int, p: PSequence, kappa: float, seed, rng=None):
    """Sample the signed word and its uniformly labeled signed permutation."""
    if n < 2:
        raise ValueError("signed chain needs n >= 2")
    if rng is None:
        rng = _rng(seed)
    kind = ChainKind.signed(p, kappa)
    u = rng.random(n)
    steps = [None] * n
    prev = 2  # state index of '1' at the virtual index n+1
    for r in range(n, 0, -1):
        row = transition_matrix(kind, r, n)[prev]
        cum = np.cumsum(row)
        state = int(np.searchsorted(cum, u[n - r], side="right"))
        state = min(state, 2)
        steps[r - 1] = SIGNED_STATES[state]
        prev = state
    word = SignedWord(steps=tuple(steps), kappa=kappa)

    # labels: index i's label sign comes from the step at index i+1
    labels = list(rng.permutation(n) + 1)
    circles = []
    current = []
    above = "1"  # virtual step at index n+1
    for idx in range(n, 0, -1):
        lab = labels[n - idx]
        if above == "1":
            if current:
                circles.append(tuple(current))
            current = [lab]  # circle leader, always positive
        elif above == "+0":
            current.append(lab)
        else:
            current.append(-lab)
        above = steps[idx - 1]
    if current:
        circles.append(tuple(current))
    return word, SignedPermutation(circles=tuple(circles))


# ---------------------------------------------------------------------------
# exact evaluation

def path_probability(kind: ChainKind, word, n: int | None = None,
                     method: str = "auto") -> float:
    """Exact probability of a word under the chain law; 0 off-support."""
    if n is None:
        n = len(word)
    if len(word) != n:
        raise ValueError("word length must equal n")
    if kind.is_coin:
        if word[0] != 1:
            return 0.0
        if method in ("auto", "product"):
            prob = 1.0
            for i in range(2, n + 1):
                c = kind.thetaseq.coin_prob(i)
                prob *= c if word[i - 1] == 1 else 1.0 - c
            if method == "product":
                return prob
            if method == "auto":
                return prob
        if method == "closed_form":
            t = kind.thetaseq
            log_p = math.lgamma(n) - t.bracket_product_log(n) + math.log(t.theta1)
            for i in range(2, n + 1):
                if word[i - 1] == 1:
                    log_p += math.log(t(i)) - math.log(i - 1)
            return math.exp(log_p)
        raise ValueError(f"unknown method {method!r}")
    if kind.is_derangement:
        if not in_delta(word):
            return 0.0
        prob = 1.0
        prev = 1
        for r in range(n, 0, -1):
            row = transition_matrix(kind, r, n)[prev]
            bit = word[r - 1]
            prob *= row[bit]
            prev = bit
        return prob
    if kind.tag == "XINF_PREFIX":
        # the limit chain runs upward in index, starting from a 1 at index 1
        if word[0] != 1 or any(word[i] + word[i + 1] > 1 for i in range(n - 1)):
            return 0.0
        prob = 1.0
        for i in range(1, n):
            row = _xinf_matrix(kind.p, i)[word[i - 1]]
            prob *= row[word[i]]
        return prob
    raise ValueError(f"unsupported kind {kind.tag}")


def marginal_one(kind: ChainKind, i: int, horizon) -> float:
    """P(value at index i is 1) at finite horizon n or in the n -> infinity
    limit (derangement kinds; requires the continue-probabilities to sum to
    infinity, probed numerically)."""
    if kind.is_coin:
        return kind.thetaseq.coin_prob(i)
    if kind.tag == "XINF_PREFIX" or horizon == math.inf:
        from .limitchain import phi

        return phi(i, kind.p)
    n = int(horizon)
    if not (1 <= i <= n):
        raise ValueError(f"index {i} outside 1..{n}")
    if i == 1:
        return 1.0
    if i == 2 or i == n:
        return 0.0
    p = kind.p
    terms = []
    prod = 1.0
    for j in range(0, n - i):
        prod *= p.q(i + j)
        terms.append(prod if j % 2 == 0 else -prod)
    return math.fsum(terms)


def joint_marginal_product(indices, n: int, kind: ChainKind) -> float:
    """E[product of the word bits at the given indices], indices strictly
    decreasing and all > 2."""
    if not kind.is_derangement:
        raise ValueError("joint marginals implemented for derangement kinds")
    idx = list(indices)
    if any(idx[l] <= idx[l + 1] for l in range(len(idx) - 1)):
        raise ValueError("indices must be strictly decreasing")
    if idx and (idx[0] > n or idx[-1] <= 2):
        raise ValueError("indices must lie in (2, n]")
    p = kind.p
    full = [n + 1] + idx
    out = 1.0
    for l in range(len(idx)):
        upper = full[l] - full[l + 1] - 2
        base = full[l + 1]
        terms = []
        prod = 1.0
        for r in range(0, upper + 1):
            prod *= p.q(base + r)
            terms.append(prod if r % 2 == 0 else -prod)
        out *= math.fsum(terms)
    return out


def cycle_statistics(word):
    """(cycle-type counts c_1..c_n, K, ordered lengths A_1..A_K).

    The virtual 1 at index n+1 opens the first cycle; each stored 1 closes
    a cycle and opens the next.
    """
    n = len(word)
    if word[0] != 1:
        raise ValueError("cycle extraction requires w_1 = 1")
    ones = [i for i in range(1, n + 1) if word[i - 1] == 1]
    positions = [n + 1] + sorted(ones, reverse=True)
    lengths = tuple(positions[m] - positions[m + 1] for m in range(len(positions) - 1))
    counts = [0] * n
    for a in lengths:
        counts[a - 1] += 1
    return tuple(counts), len(lengths), lengths
