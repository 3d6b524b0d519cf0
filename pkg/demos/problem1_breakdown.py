"""
BiCGSTAB vs GRC-BiCGSTAB on a convection-dominated 3-D problem
===============================================================

Discretize u_xx + u_yy + u_zz + 1000 u_x = F on a 5x5x5 interior grid
(n = 125) and solve with plain BiCGSTAB and with GRC-BiCGSTAB.
"""

import numpy as np

from grcstab import BicgstabConfig, GrcConfig, bicgstab, grc_bicgstab
from grcstab.history import Phase, emit_csv
from grcstab.problems import Pde1Spec, gen_pde1

A, b = gen_pde1(Pde1Spec(nx=5, c=1000.0))
print(f"n = {A.n}, nnz = {A.nnz}")

# Standalone BiCGSTAB with the outer tolerance as its threshold
alone = bicgstab(A, b, config=BicgstabConfig(theta=1e-12, max_iters=10 * A.n))
print("BiCGSTAB:      ", alone.outcome)

# GRC-BiCGSTAB: window j=5, inner BiCGSTAB stops once its residual halves
grc = grc_bicgstab(A, b, grc_config=GrcConfig(j=5, tol=1e-12),
                   inner_config=BicgstabConfig(theta=0.5))
print("GRC-BiCGSTAB:  ", grc.outcome)
print("true relative residual:", np.linalg.norm(b - A @ grc.x) / np.linalg.norm(b))

# How often did the inner solver itself break down?
flags = [s.inner_outcome for s in grc.steps if not s.inner_outcome.converged]
print(f"{len(flags)} of {len(grc.steps)} inner solves ended on a breakdown flag")

emit_csv(alone.history, "problem1_bicgstab.csv")
emit_csv(grc.history, "problem1_grc_bicgstab.csv")

# The three curves share an x axis: accumulated BiCGSTAB iterations
try:
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    h = grc.history
    plt.semilogy([r.cumulative_inner_iters for r in alone.history],
                 alone.history.residuals(), label="BiCGSTAB")
    inner = h.phase_rows(Phase.INNER)
    outer = h.phase_rows(Phase.OUTER)
    plt.semilogy([r.cumulative_inner_iters for r in inner], [r.residual_norm for r in inner],
                 ".", ms=3, label="GRC-BiCGSTAB (inner loop)")
    plt.semilogy([r.cumulative_inner_iters for r in outer], [r.residual_norm for r in outer],
                 "-o", ms=3, label="GRC-BiCGSTAB")
    plt.xlabel("accumulated BiCGSTAB iterations")
    plt.ylabel("residual norm")
    plt.legend()
    plt.savefig("problem1.png", dpi=120)
    print("wrote problem1.png")
