"""Sparse iterative solvers: BiCGSTAB, MGS-stabilized generalized residual
cutting (GRC), and the composed GRC-BiCGSTAB, with a small benchmark harness.
"""
from .sparse import (
    CsrMatrix,
    TripletList,
    MatrixMarketError,
    axpy,
    dot,
    from_dense,
    from_triplets,
    matvec,
    mm_read,
    mm_write,
    norm2,
)
from .history import ConvergenceHistory, HistoryRow, Phase
from .outcome import Outcome, SolverOutcome, SolveResult
from .bicgstab import BicgstabConfig, bicgstab, bicgstab_step_check
from .grc import (
    AlphaFormula,
    Degenerate,
    GrcConfig,
    GrcState,
    GrcWindow,
    InnerResult,
    alpha_coefficient,
    bicgstab_inner,
    grc_bicgstab,
    grc_outer,
    mgs_insert,
)
from .problems import (
    Pde1Spec,
    ToeplitzSpec,
    gen_pde1,
    gen_random_indefinite,
    gen_toeplitz,
    rhs_all_ones,
)

__version__ = "0.1.0"
