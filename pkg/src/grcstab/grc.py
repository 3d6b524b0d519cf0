"""Generalized residual cutting (GRC) stabilized by modified Gram-Schmidt.

The outer loop asks an inner solver for an approximate correction ``psi``
to the residual equation ``A psi = r``, orthonormalizes ``A psi`` against a
sliding window of earlier directions, and cuts the residual along the
resulting unit direction. :func:`grc_bicgstab` plugs BiCGSTAB in as the
inner solver.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional

import numpy as np

from .bicgstab import BicgstabConfig, bicgstab
from .history import ConvergenceHistory, Phase
from .outcome import Outcome, SolverOutcome, SolveResult
from .sparse import CsrMatrix, DimensionError, dot, matvec, norm2

__all__ = [
    "AlphaFormula",
    "Degenerate",
    "GrcConfig",
    "GrcWindow",
    "GrcState",
    "InnerResult",
    "OuterStep",
    "mgs_insert",
    "alpha_coefficient",
    "grc_outer",
    "bicgstab_inner",
    "grc_bicgstab",
]


class AlphaFormula(str, enum.Enum):
    # (psi, A phi) / (A phi, A phi); CLI value "paper". Carries no
    # monotonicity guarantee.
    PSI_NUMERATOR = "paper"
    # (r, A phi) / (A phi, A phi), the minimizer of ||r - alpha A phi||
    RESIDUAL_MINIMIZING = "minres"


class Degenerate(ArithmeticError):
    """``A psi`` lies (numerically) in the span of the window."""


@dataclass(frozen=True)
class GrcConfig:
    """Outer-loop parameters.

    ``j`` is the total number of directions combined per step, so the window
    keeps at most ``j - 1`` earlier pairs. With ``absolute=True`` the stopping
    test is ``||r|| < tol`` instead of ``||r|| / ||r0|| < tol``.
    """

    j: int = 5
    tol: float = 1e-12
    max_outer: int = 500
    alpha_formula: AlphaFormula = AlphaFormula.RESIDUAL_MINIMIZING
    mgs_eps: float = 1e-12
    absolute: bool = False

    def __post_init__(self):
        if self.j < 1:
            raise ValueError("j must be >= 1")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_outer < 1:
            raise ValueError("max_outer must be >= 1")
        object.__setattr__(self, "alpha_formula", AlphaFormula(self.alpha_formula))


@dataclass(frozen=True)
class GrcWindow:
    """Orthonormalized direction pairs ``(phi, A phi)``, oldest first."""

    pairs: tuple = ()

    def __len__(self):
        return len(self.pairs)

    @property
    def h_phis(self) -> list[np.ndarray]:
        return [h for _, h in self.pairs]

    @property
    def phis(self) -> list[np.ndarray]:
        return [p for p, _ in self.pairs]

    def gram(self) -> np.ndarray:
        """Gram matrix of the stored ``A phi`` vectors."""
        hs = self.h_phis
        return np.array([[dot(a, b) for b in hs] for a in hs]).reshape(len(hs), len(hs))


@dataclass(frozen=True)
class GrcState:
    u: np.ndarray
    r: np.ndarray
    m: int
    window: GrcWindow


class InnerResult(NamedTuple):
    """What an inner solver hands back to the outer loop.

    ``rows`` holds ``(iterations, matvecs, residual_norm)`` for each inner
    iteration, counted from the start of this inner solve.
    """

    psi: np.ndarray
    iterations: int
    matvecs: int
    rows: list
    outcome: Optional[SolverOutcome] = None


InnerSolver = Callable[[CsrMatrix, np.ndarray, Optional[np.ndarray]], InnerResult]


@dataclass(frozen=True)
class OuterStep:
    m: int
    alpha: float
    residual_norm: float
    inner_iterations: int
    inner_outcome: Optional[SolverOutcome]
    fallback: bool = False
    flushed: bool = False


def _sweep(pairs, v, w):
    for phi_k, h_k in pairs:
        c = dot(h_k, v)
        v = v - c * h_k
        w = w - c * phi_k
    return v, w


def mgs_insert(window: GrcWindow, psi, h_psi, j: int, eps: float = 1e-12):
    """Orthonormalize ``(psi, A psi)`` against the window and store the result.

    The same MGS coefficients are applied to ``psi`` and ``A psi``, so the
    returned pair keeps ``h_phi = A phi`` up to rounding. A second sweep is
    made when the first one cancels more than half of the norm.

    Returns
    -------
    phi, h_phi, window
        The new direction pair and the updated window (at most ``j - 1``
        pairs; the oldest is dropped first).

    Raises
    ------
    Degenerate
        If ``||v|| <= eps * ||A psi||`` after orthogonalization.
    """
    psi = np.asarray(psi, dtype=np.float64)
    h_psi = np.asarray(h_psi, dtype=np.float64)
    h_norm = norm2(h_psi)
    v, w = _sweep(window.pairs, h_psi, psi)
    nu = norm2(v)
    if window.pairs and nu < 0.5 * h_norm:
        v, w = _sweep(window.pairs, v, w)
        nu = norm2(v)
    if not nu > eps * h_norm:
        raise Degenerate(f"residual norm {nu:.3e} after MGS (input {h_norm:.3e})")
    h_phi = v / nu
    phi = w / nu
    keep = max(j - 1, 0)
    pairs = window.pairs + ((phi, h_phi),)
    pairs = pairs[-keep:] if keep else ()
    return phi, h_phi, GrcWindow(pairs)


def alpha_coefficient(formula, psi, r, h_phi) -> float:
    hh = dot(h_phi, h_phi)
    if AlphaFormula(formula) is AlphaFormula.PSI_NUMERATOR:
        return dot(psi, h_phi) / hh
    return dot(r, h_phi) / hh


def grc_outer(A: CsrMatrix, b, u0=None, inner: InnerSolver | None = None,
              config: GrcConfig | None = None, callback=None) -> SolveResult:
    """Run the GRC outer loop around ``inner``.

    Parameters
    ----------
    A : CsrMatrix
    b : array_like
    u0 : array_like, optional
        Initial guess, zero by default.
    inner : callable
        ``inner(A, rhs, hint) -> InnerResult``. ``hint`` is the previous
        direction ``phi`` (``None`` on the first step).
    config : GrcConfig, optional
    callback : callable, optional
        Called with a :class:`GrcState` after every outer step.

    Returns
    -------
    SolveResult
        ``steps`` lists one :class:`OuterStep` per outer iteration.

    Notes
    -----
    A near-zero ``A psi`` is replaced by the current residual direction. If
    MGS finds the new direction degenerate, the window is flushed and the
    insertion retried once before giving up with ``Stagnation``. Convergence
    of the recursive residual is confirmed against ``b - A u``; a true
    residual above ten times the tolerance demotes the run to
    ``Stagnation``.
    """
    cfg = config or GrcConfig()
    if inner is None:
        inner = bicgstab_inner()
    n = A.n
    b = np.asarray(b, dtype=np.float64)
    if b.shape != (n,):
        raise DimensionError(f"rhs has shape {b.shape}, matrix is {n}x{n}")
    if u0 is None:
        u = np.zeros(n)
        r = b.copy()
    else:
        u = np.array(u0, dtype=np.float64)
        if u.shape != (n,):
            raise DimensionError(f"u0 has shape {u.shape}, matrix is {n}x{n}")
        r = b - matvec(A, u)

    r0_norm = norm2(r)
    hist = ConvergenceHistory(r0_norm)
    hist.append(0, 0, 0, Phase.OUTER, r0_norm)
    steps: list[OuterStep] = []
    threshold = cfg.tol if cfg.absolute else cfg.tol * r0_norm

    def done(tag, m, res_norm, reason=None):
        rel = res_norm / r0_norm if r0_norm > 0 else 0.0
        return SolveResult(u, r, SolverOutcome(tag, m, rel, reason), hist, tuple(steps))

    if r0_norm == 0.0:
        return done(Outcome.CONVERGED, 0, 0.0)

    window = GrcWindow()
    r_norm = r0_norm
    inner_total = 0
    matvecs = 0
    hint = None

    for m in range(cfg.max_outer):
        res = inner(A, r, hint)
        for it, mv, rn in res.rows:
            hist.append(inner_total + it, matvecs + mv, m + 1, Phase.INNER, rn)
        inner_total += res.iterations
        matvecs += res.matvecs

        psi = res.psi
        h_psi = matvec(A, psi)
        matvecs += 1
        fallback = False
        if not norm2(h_psi) > cfg.mgs_eps * r_norm:
            psi = r.copy()
            h_psi = matvec(A, psi)
            matvecs += 1
            fallback = True

        flushed = False
        try:
            phi, h_phi, window = mgs_insert(window, psi, h_psi, cfg.j, cfg.mgs_eps)
        except Degenerate:
            flushed = True
            try:
                phi, h_phi, window = mgs_insert(GrcWindow(), psi, h_psi, cfg.j, cfg.mgs_eps)
            except Degenerate:
                return done(Outcome.STAGNATION, m, r_norm, "degenerate_direction")

        alpha = alpha_coefficient(cfg.alpha_formula, psi, r, h_phi)
        r = r - alpha * h_phi
        u = u + alpha * phi
        r_norm = norm2(r)
        hist.append(inner_total, matvecs, m + 1, Phase.OUTER, r_norm)
        steps.append(OuterStep(m + 1, alpha, r_norm, res.iterations, res.outcome,
                               fallback, flushed))
        if callback is not None:
            callback(GrcState(u, r, m + 1, window))
        hint = phi

        if r_norm < threshold:
            true_norm = norm2(b - matvec(A, u))
            if true_norm > 10 * threshold:
                return done(Outcome.STAGNATION, m + 1, r_norm, "residual_gap")
            return done(Outcome.CONVERGED, m + 1, r_norm)

    return done(Outcome.MAX_ITERATIONS, cfg.max_outer, r_norm)


def bicgstab_inner(config: BicgstabConfig | None = None) -> InnerSolver:
    """BiCGSTAB as a GRC inner solver.

    Each call solves ``A psi = rhs`` from a zero start until the residual
    halves (``theta=0.5`` by default). A breakdown is not an error here: the
    last consistent iterate is returned as ``psi``.
    """
    cfg = config or BicgstabConfig(theta=0.5)

    def solve(A, rhs, hint=None):
        res = bicgstab(A, rhs, None, cfg)
        rows = [(row.cumulative_inner_iters, row.cumulative_matvecs, row.residual_norm)
                for row in res.history.rows[1:]]
        last = res.history.rows[-1]
        return InnerResult(res.x, res.outcome.iterations, last.cumulative_matvecs, rows,
                           res.outcome)

    return solve


def grc_bicgstab(A: CsrMatrix, b, u0=None, grc_config: GrcConfig | None = None,
                 inner_config: BicgstabConfig | None = None, callback=None) -> SolveResult:
    """GRC outer loop with BiCGSTAB (``theta=0.5``) as the inner solver."""
    return grc_outer(A, b, u0, bicgstab_inner(inner_config), grc_config, callback)
