"""Exact laws, conditioning, and the erase-pattern push-forward.

The derangement chain X runs downward from a virtual 1 at index n+1 and
produces admissible words: first bit 1, last bit 0, no adjacent 1s.  The
same law arises in two other ways from independent biased coins Y:

  * condition the coin word on landing in the admissible set, or
  * push the coin word through the 11-erasing map.

Both constructions are verified here at machine precision.
"""

from derange import (
    ChainKind,
    PSequence,
    ThetaSequence,
    compare_laws,
    conditional_theta,
    word_to_string,
)
from derange import oracle

n = 8
theta = 0.5
p = PSequence.eta(theta)
kind = ChainKind.x(p)

print(f"admissible words of length {n} (Fibonacci count):")
words = oracle.enumerate_delta(n)
law = oracle.exact_law(kind, n)
for w in words:
    print(f"  {word_to_string(w)}  P = {law[w]:.6f}")
print(f"  {len(words)} words, total mass {law.total():.15f}\n")

# conditioning: the linked coin process, restricted to the admissible set
ts = conditional_theta(p)
cond = oracle.conditional_law(n, ts)
print("conditioned coin law vs chain law:",
      f"TV = {compare_laws(law, cond).tv:.3e}")

# push-forward: the erase-11 image of the coin law under the other link
ts_push = ThetaSequence.constant(theta)
p_push = PSequence.from_theta_pushforward(ts_push)
law_push_chain = oracle.exact_law(ChainKind.x(p_push), n)
pushed = oracle.pushforward_law(n, ts_push)
print("erase-11 image vs chain law:     ",
      f"TV = {compare_laws(law_push_chain, pushed).tv:.3e}")
