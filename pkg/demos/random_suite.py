"""
Robustness on random nonsymmetric indefinite matrices
=====================================================

Fifty fixed-seed 100x100 sparse matrices with random-sign diagonals and
Gaussian off-diagonal coupling. The right-hand side is A @ ones.
"""

from collections import Counter

from grcstab import BicgstabConfig, bicgstab, grc_bicgstab
from grcstab.problems import gen_random_indefinite, rhs_all_ones

tally = {"bicgstab": Counter(), "grc-bicgstab": Counter()}
for seed in range(50):
    A = gen_random_indefinite(100, seed, coupling=1.5)
    b = rhs_all_ones(A)
    tally["bicgstab"][bicgstab(A, b, config=BicgstabConfig(max_iters=1000)).outcome.tag.value] += 1
    tally["grc-bicgstab"][grc_bicgstab(A, b).outcome.tag.value] += 1

for name, counts in tally.items():
    print(f"{name:<14}", dict(counts))

# A milder coupling makes both methods reliable; BiCGSTAB is then cheaper.
A = gen_random_indefinite(100, 0, coupling=0.5)
b = rhs_all_ones(A)
a, g = bicgstab(A, b), grc_bicgstab(A, b)
print("coupling 0.5, matvecs: BiCGSTAB", a.history[-1].cumulative_matvecs,
      "GRC-BiCGSTAB", g.history[-1].cumulative_matvecs)
