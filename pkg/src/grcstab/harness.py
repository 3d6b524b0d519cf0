"""Benchmark harness: build or load a problem, run the solvers, write results.

The command-line front end lives in :mod:`grcstab.cli`; everything here is
usable directly from Python.
"""
from __future__ import annotations

import json
import logging
import os
import time
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .bicgstab import BicgstabConfig, bicgstab
from .grc import AlphaFormula, GrcConfig, grc_bicgstab
from .history import ConvergenceHistory, emit_csv
from .outcome import Outcome, SolverOutcome
from .problems import Pde1Spec, ToeplitzSpec, gen_pde1, gen_toeplitz, parse_stencil, rhs_all_ones
from .sparse import CsrMatrix, matvec, mm_load, norm2

log = logging.getLogger(__name__)

SOLVERS = ("bicgstab", "grc-bicgstab")


@dataclass
class RunSpec:
    """Everything needed to reproduce one harness invocation.

    Exactly one of ``matrix`` (a Matrix Market path) and ``problem``
    (``"pde1"`` or ``"toeplitz"``) must be given. ``rhs=None`` means the
    problem's own right-hand side: the sampled forcing term for pde1 and
    ``A @ ones`` otherwise.
    """

    matrix: Optional[str] = None
    problem: Optional[str] = None
    nx: int = 5
    conv: float = 1000.0
    n: int = 100
    stencil: Optional[str] = None
    rhs: Optional[str] = None
    solver: str = "both"
    tol: float = 1e-12
    theta: float = 0.5
    window: int = 5
    max_outer: int = 500
    max_inner: Optional[int] = None
    max_iters: Optional[int] = None
    shadow: str = "r0"
    alpha: str = "minres"
    absolute: bool = False
    out: Optional[str] = None
    seed: int = 0

    def __post_init__(self):
        if (self.matrix is None) == (self.problem is None):
            raise ValueError("give exactly one of a matrix file or a generated problem")
        if self.problem not in (None, "pde1", "toeplitz"):
            raise ValueError(f"unknown problem {self.problem!r}")
        if self.problem == "toeplitz" and not self.stencil:
            raise ValueError("the toeplitz problem needs a stencil")
        if self.solver not in SOLVERS + ("both",):
            raise ValueError(f"unknown solver {self.solver!r}")
        if self.shadow not in ("r0", "random"):
            raise ValueError(f"unknown shadow mode {self.shadow!r}")
        AlphaFormula(self.alpha)
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if not 0 < self.theta < 1:
            raise ValueError("theta must lie in (0, 1)")
        if self.window < 1 or self.max_outer < 1:
            raise ValueError("window and max_outer must be >= 1")
        for name in ("max_inner", "max_iters"):
            v = getattr(self, name)
            if v is not None and v < 1:
                raise ValueError(f"{name} must be >= 1")

    @property
    def solvers(self) -> tuple:
        return SOLVERS if self.solver == "both" else (self.solver,)


@dataclass
class SolverRun:
    name: str
    outcome: SolverOutcome
    history: ConvergenceHistory
    x: np.ndarray
    true_relative_residual: float
    wall_time: float
    outer_steps: int = 0
    steps: tuple = ()

    @property
    def inner_iterations(self) -> int:
        return self.history.rows[-1].cumulative_inner_iters

    @property
    def matvecs(self) -> int:
        return self.history.rows[-1].cumulative_matvecs


@dataclass
class RunReport:
    spec: RunSpec
    runs: list
    table: str
    summary: list = field(default_factory=list)

    @property
    def exit_status(self) -> int:
        return exit_status(self.runs)


def read_vector(path) -> np.ndarray:
    """Read a dense vector: Matrix Market ``array`` format or one value per line."""
    with open(path) as fh:
        first = fh.readline()
        if first.startswith("%%MatrixMarket"):
            tokens = first.lower().split()
            if len(tokens) != 5 or tokens[2] != "array" or tokens[3] not in ("real", "integer"):
                raise ValueError(f"{path}: expected a real Matrix Market array")
            lines = [s for s in (ln.strip() for ln in fh) if s and not s.startswith("%")]
            rows, cols = (int(v) for v in lines[0].split())
            vals = np.array([float(s) for s in lines[1:]])
            if cols != 1 or vals.shape != (rows,):
                raise ValueError(f"{path}: expected a {rows}x1 column vector")
            return vals
    return np.atleast_1d(np.loadtxt(path, dtype=np.float64))


def load_problem(spec: RunSpec) -> tuple[CsrMatrix, np.ndarray, str]:
    """Return ``(A, b, label)`` for ``spec``."""
    if spec.matrix is not None:
        A = mm_load(spec.matrix)
        native = None
        label = os.path.splitext(os.path.basename(spec.matrix))[0]
    elif spec.problem == "pde1":
        A, native = gen_pde1(Pde1Spec(spec.nx, spec.conv))
        label = f"pde1_nx{spec.nx}"
    else:
        A = gen_toeplitz(ToeplitzSpec(spec.n, parse_stencil(spec.stencil)))
        native = None
        label = f"toeplitz{spec.n}"

    if spec.rhs is None:
        b = native if native is not None else rhs_all_ones(A)
    elif spec.rhs == "ones":
        b = rhs_all_ones(A)
    else:
        b = read_vector(spec.rhs)
        if b.shape != (A.n,):
            raise ValueError(f"rhs has length {b.shape[0]}, matrix is {A.n}x{A.n}")
    return A, b, label


def run_solver(name: str, A: CsrMatrix, b: np.ndarray, spec: RunSpec) -> SolverRun:
    b_norm = norm2(b)
    t0 = time.perf_counter()
    if name == "bicgstab":
        theta = spec.tol
        if spec.absolute and b_norm > 0:
            theta = min(spec.tol / b_norm, np.nextafter(1.0, 0.0))
        cfg = BicgstabConfig(theta=theta, max_iters=spec.max_iters or 10 * A.n,
                             shadow=spec.shadow, seed=spec.seed)
        res = bicgstab(A, b, None, cfg)
        outer = 0
    elif name == "grc-bicgstab":
        gcfg = GrcConfig(j=spec.window, tol=spec.tol, max_outer=spec.max_outer,
                         alpha_formula=AlphaFormula(spec.alpha), absolute=spec.absolute)
        icfg = BicgstabConfig(theta=spec.theta, max_iters=spec.max_inner,
                              shadow=spec.shadow, seed=spec.seed)
        res = grc_bicgstab(A, b, None, gcfg, icfg)
        outer = res.outcome.iterations
    else:
        raise ValueError(f"unknown solver {name!r}")
    wall = time.perf_counter() - t0
    true_rel = norm2(b - matvec(A, res.x)) / b_norm if b_norm > 0 else 0.0
    log.info("%s: %s after %d iterations", name, res.outcome, res.outcome.iterations)
    return SolverRun(name, res.outcome, res.history, res.x, true_rel, wall, outer, res.steps)


def summary_records(runs: list) -> list[dict]:
    """One structured record per run, ordered for the comparison table.

    Converged runs come first, cheapest (fewest matvecs) first; failed runs
    follow in their original order.
    """
    order = sorted(range(len(runs)),
                   key=lambda i: (not runs[i].outcome.converged,
                                  runs[i].matvecs if runs[i].outcome.converged else 0, i))
    out = []
    for i in order:
        run = runs[i]
        o = run.outcome
        out.append({
            "solver": run.name,
            "outcome": o.tag.value,
            "reason": o.reason,
            "breakdown_iteration": o.breakdown_iteration,
            "iterations": run.inner_iterations,
            "outer_steps": run.outer_steps,
            "matvecs": run.matvecs,
            "final_relative_residual": run.history.rows[-1].relative_residual,
            "true_relative_residual": run.true_relative_residual,
            "wall_time": run.wall_time,
        })
    return out


def summarize(runs: list) -> tuple[str, list[dict]]:
    """Return the comparison table as text and as a list of records."""
    if not runs:
        raise ValueError("nothing to summarize")
    records = summary_records(runs)
    head = f"{'solver':<14} {'outcome':<32} {'iters':>7} {'outer':>6} {'matvecs':>8} " \
           f"{'rel.res':>10} {'true rel.res':>12}"
    lines = [head, "-" * len(head)]
    for rec in records:
        outcome = rec["outcome"]
        if rec["breakdown_iteration"] is not None:
            outcome = f"Breakdown({rec['reason']}) @ it {rec['breakdown_iteration']}"
        elif rec["reason"]:
            outcome = f"{outcome}({rec['reason']})"
        lines.append(f"{rec['solver']:<14} {outcome:<32} {rec['iterations']:>7d} "
                     f"{rec['outer_steps']:>6d} {rec['matvecs']:>8d} "
                     f"{rec['final_relative_residual']:>10.3e} "
                     f"{rec['true_relative_residual']:>12.3e}")
    return "\n".join(lines), records


def exit_status(runs: list) -> int:
    return 0 if runs and all(r.outcome.tag is Outcome.CONVERGED for r in runs) else 1


def run(spec: RunSpec) -> RunReport:
    """Load the problem, run every requested solver, and write outputs.

    With ``spec.out`` set, writes ``<solver>.csv``, ``<solver>_solution.txt``,
    ``summary.txt`` and ``summary.json`` into that directory.
    """
    A, b, label = load_problem(spec)
    runs = [run_solver(name, A, b, spec) for name in spec.solvers]
    table, records = summarize(runs)
    report = RunReport(spec, runs, table, records)
    if spec.out is not None:
        os.makedirs(spec.out, exist_ok=True)
        for r in runs:
            emit_csv(r.history, os.path.join(spec.out, f"{r.name}.csv"))
            np.savetxt(os.path.join(spec.out, f"{r.name}_solution.txt"), r.x, fmt="%.17e")
        with open(os.path.join(spec.out, "summary.txt"), "w") as fh:
            fh.write(f"problem: {label} (n={A.n}, nnz={A.nnz})\n{table}\n")
        with open(os.path.join(spec.out, "summary.json"), "w") as fh:
            json.dump({"problem": label, "n": A.n, "nnz": A.nnz, "spec": asdict(spec),
                       "results": records}, fh, indent=2)
    return report
