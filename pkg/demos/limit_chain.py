"""The infinite-horizon chain and its coupling constants.

As n grows the prefix law of the derangement chain converges in total
variation to an upward-running limit chain; the TV distance is exactly
phi_n, an alternating series in the q-sequence.  The probability that the
infinite coin word never shows the erased pattern from index i on,
gamma_{i,inf}, has Beta-function closed forms that the backward recursion
reproduces.
"""

import math

from derange import (
    PSequence,
    ThetaSequence,
    delta_i_inf,
    delta_n,
    gamma_inf,
    phi,
    tv_prefix,
)

theta = 0.5
p = PSequence.eta(theta)

print("TV(prefix law at n, limit chain) = phi_n:")
for n in (3, 5, 8, 12):
    direct = tv_prefix(n, p, method="direct")
    print(f"  n = {n:>2}: direct enumeration {direct:.12f}   phi {phi(n, p):.12f}")

print("\nfixed-point identity  q_i (1 - phi_{i+1}) = phi_i:")
for i in (3, 6, 10):
    lhs = p.q(i) * (1 - phi(i + 1, p))
    print(f"  i = {i:>2}: {lhs:.15f} = {phi(i, p):.15f}")

print("\ngamma_{i,inf}: Richardson-extrapolated recursion vs closed forms:")
ts = ThetaSequence.eta_star(theta)
for i in (2, 3, 4, 10):
    rec = gamma_inf(i, ts)
    closed = delta_i_inf(theta, i)
    print(f"  i = {i:>2}: recursion {rec:.12f}   closed form {closed:.12f}")

print("\nfinite-n convergence of the no-pattern probability:")
for th in (0.5, 2.0):
    d_fin = delta_n(th, n=4000)
    d_inf = delta_n(th, n=math.inf)
    print(f"  theta = {th}: delta_4000 = {d_fin:.8f}, "
          f"limit = {d_inf:.8f}, gap = {abs(d_fin-d_inf):.2e}")
