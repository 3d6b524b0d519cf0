"""
Effect of the GRC window
========================

j counts the directions combined per outer step (the new one plus j-1
stored ones). j=1 reduces the outer loop to a one-dimensional residual cut.
"""

from grcstab import GrcConfig, grc_bicgstab
from grcstab.problems import Pde1Spec, gen_pde1

A, b = gen_pde1(Pde1Spec(5))
for j in (1, 2, 3, 5, 8):
    res = grc_bicgstab(A, b, grc_config=GrcConfig(j=j, max_outer=300))
    last = res.history[-1]
    print(f"j={j}: {res.outcome!s:<14} outer={res.outcome.iterations:4d} "
          f"inner={last.cumulative_inner_iters:5d} rel.res={last.relative_residual:.2e}")

# The literal alpha formula (psi, A phi) in place of the residual minimizer
res = grc_bicgstab(A, b, grc_config=GrcConfig(alpha_formula="paper", max_outer=300))
print("alpha=paper:", res.outcome, f"rel.res={res.outcome.final_relative_residual:.2e}")
