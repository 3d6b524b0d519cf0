"""Unpreconditioned BiCGSTAB with explicit breakdown detection."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .history import ConvergenceHistory, Phase
from .outcome import Outcome, SolverOutcome, SolveResult
from .sparse import CsrMatrix, DimensionError, matvec, dot, norm2

__all__ = ["BicgstabConfig", "bicgstab", "bicgstab_step_check", "shadow_residual"]

SHADOW_MODES = ("r0", "random")


@dataclass(frozen=True)
class BicgstabConfig:
    """Parameters of one BiCGSTAB run.

    Parameters
    ----------
    theta : float
        Stop once ``||r|| / ||r0|| < theta``.
    max_iters : int, optional
        Iteration cap; ``None`` means ``2 * n``.
    breakdown_eps : float
        A bi-orthogonality denominator counts as zero when it falls below
        ``breakdown_eps`` times the product of its operand norms.
    shadow : {"r0", "random"}
        Shadow residual: a copy of the initial residual, or a standard normal
        vector drawn from ``seed``.
    """

    theta: float = 1e-12
    max_iters: Optional[int] = None
    breakdown_eps: float = 1e-14
    shadow: str = "r0"
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.theta < 1:
            raise ValueError(f"theta must lie in (0, 1), got {self.theta}")
        if self.max_iters is not None and self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if not self.breakdown_eps > 0:
            raise ValueError("breakdown_eps must be positive")
        if self.shadow not in SHADOW_MODES:
            raise ValueError(f"shadow must be one of {SHADOW_MODES}")


def bicgstab_step_check(s_norm: float, r0_norm: float, theta: float) -> bool:
    """True when the half-step residual already meets the threshold."""
    return s_norm / r0_norm < theta


def shadow_residual(r0: np.ndarray, cfg: BicgstabConfig) -> np.ndarray:
    if cfg.shadow == "r0":
        return r0.copy()
    return np.random.default_rng(cfg.seed).standard_normal(r0.shape[0])


def _finite(*xs) -> bool:
    return all(math.isfinite(v) for v in xs)


def bicgstab(A: CsrMatrix, b, x0=None, config: BicgstabConfig | None = None,
             history: ConvergenceHistory | None = None) -> SolveResult:
    """Solve ``A x = b`` with BiCGSTAB.

    Uses ``p0 = r0``. Convergence is tested on the half-step residual ``s``
    (which avoids a 0/0 in ``omega`` when ``s`` vanishes) and on the full
    residual. On any outcome the returned ``x`` and ``r`` are the last
    iterate/recursive-residual pair that were updated together.

    Parameters
    ----------
    A : CsrMatrix
    b : array_like
    x0 : array_like, optional
        Initial guess, zero by default.
    config : BicgstabConfig, optional
    history : ConvergenceHistory, optional
        Sink for one row per iteration (plus the initial residual). A fresh
        history is created when omitted.

    Returns
    -------
    SolveResult
        ``(x, r, outcome, history)``.
    """
    cfg = config or BicgstabConfig()
    n = A.n
    b = np.asarray(b, dtype=np.float64)
    if b.shape != (n,):
        raise DimensionError(f"rhs has shape {b.shape}, matrix is {n}x{n}")
    if x0 is None:
        x = np.zeros(n)
        r = b.copy()
    else:
        x = np.array(x0, dtype=np.float64)
        if x.shape != (n,):
            raise DimensionError(f"x0 has shape {x.shape}, matrix is {n}x{n}")
        r = b - matvec(A, x)
    max_iters = cfg.max_iters if cfg.max_iters is not None else 2 * n

    r0_norm = norm2(r)
    hist = history if history is not None else ConvergenceHistory()
    hist.r0_norm = r0_norm
    hist.append(0, 0, 0, Phase.STANDALONE, r0_norm)

    def done(tag, j, res_norm, reason=None):
        rel = res_norm / r0_norm if r0_norm > 0 else 0.0
        bd = j if tag is Outcome.BREAKDOWN else None
        return SolveResult(x, r, SolverOutcome(tag, j, rel, reason, bd), hist)

    if r0_norm == 0.0:
        return done(Outcome.CONVERGED, 0, 0.0)

    rstar = shadow_residual(r, cfg)
    rstar_norm = norm2(rstar)
    eps = cfg.breakdown_eps
    p = r.copy()
    rho = dot(r, rstar)
    r_norm = r0_norm
    matvecs = 0

    for j in range(max_iters):
        if not math.isfinite(rho):
            return done(Outcome.BREAKDOWN, j, r_norm, "nonfinite")
        if abs(rho) <= eps * r_norm * rstar_norm:
            return done(Outcome.BREAKDOWN, j, r_norm, "rho_zero")

        v = matvec(A, p)
        matvecs += 1
        sigma = dot(v, rstar)
        if not math.isfinite(sigma):
            return done(Outcome.BREAKDOWN, j, r_norm, "nonfinite")
        if abs(sigma) <= eps * norm2(v) * rstar_norm:
            return done(Outcome.BREAKDOWN, j, r_norm, "alpha_denominator")
        alpha = rho / sigma

        s = r - alpha * v
        s_norm = norm2(s)
        if not _finite(alpha, s_norm):
            return done(Outcome.BREAKDOWN, j, r_norm, "nonfinite")
        if bicgstab_step_check(s_norm, r0_norm, cfg.theta):
            x = x + alpha * p
            r = s
            hist.append(j + 1, matvecs, 0, Phase.STANDALONE, s_norm)
            return done(Outcome.CONVERGED, j + 1, s_norm)

        t = matvec(A, s)
        matvecs += 1
        tt = dot(t, t)
        if tt == 0.0:
            return done(Outcome.BREAKDOWN, j, r_norm, "omega_denominator")
        omega = dot(t, s) / tt
        if not _finite(omega, tt):
            return done(Outcome.BREAKDOWN, j, r_norm, "nonfinite")
        if omega == 0.0:
            # r would equal s and beta would divide by zero
            return done(Outcome.BREAKDOWN, j, r_norm, "omega_zero")

        x_new = x + alpha * p + omega * s
        r_new = s - omega * t
        r_new_norm = norm2(r_new)
        if not math.isfinite(r_new_norm) or not np.all(np.isfinite(x_new)):
            return done(Outcome.BREAKDOWN, j, r_norm, "nonfinite")
        x, r, r_norm = x_new, r_new, r_new_norm
        hist.append(j + 1, matvecs, 0, Phase.STANDALONE, r_norm)
        if r_norm / r0_norm < cfg.theta:
            return done(Outcome.CONVERGED, j + 1, r_norm)

        rho_new = dot(r, rstar)
        beta = (rho_new / rho) * (alpha / omega)
        if not math.isfinite(beta):
            return done(Outcome.BREAKDOWN, j + 1, r_norm, "nonfinite")
        p = r + beta * (p - omega * v)
        rho = rho_new

    return done(Outcome.MAX_ITERATIONS, max_iters, r_norm)
