"""
Running the harness on a Matrix Market file
===========================================

Writes a banded Toeplitz matrix to disk, then drives the same code path as

    grcstab --matrix toeplitz100.mtx --rhs ones --solver both --out results/

and checks the computed solution against the all-ones vector.
"""

import numpy as np

from grcstab.harness import RunSpec, run
from grcstab.problems import ToeplitzSpec, gen_toeplitz
from grcstab.sparse import mm_load, mm_write

A = gen_toeplitz(ToeplitzSpec(100, ((0, 4.0), (-1, -1.0), (1, -2.0), (-3, 0.5))))
with open("toeplitz100.mtx", "w") as fh:
    mm_write(A, fh, comment="toeplitz stencil 0:4, -1:-1, 1:-2, -3:0.5")

# the file round-trips exactly
assert mm_load("toeplitz100.mtx").same_as(A)

report = run(RunSpec(matrix="toeplitz100.mtx", rhs="ones", out="results"))
print(report.table)
for r in report.runs:
    print(f"{r.name}: max |x - 1| = {np.abs(r.x - 1).max():.2e}")
print("exit status would be", report.exit_status)
