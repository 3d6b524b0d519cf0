"""Test-problem generators."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .sparse import CsrMatrix, TripletList, from_dense, from_triplets, matvec

__all__ = ["Pde1Spec", "ToeplitzSpec", "gen_pde1", "gen_toeplitz", "rhs_all_ones",
           "parse_stencil", "gen_random_indefinite"]


@dataclass(frozen=True)
class Pde1Spec:
    """Grid for ``u_xx + u_yy + u_zz + c u_x = F`` on the unit cube.

    ``nx`` interior points per axis gives ``n = nx**3`` unknowns.
    """

    nx: int = 5
    c: float = 1000.0

    def __post_init__(self):
        if self.nx < 1:
            raise ValueError("nx must be >= 1")


def gen_pde1(spec: Pde1Spec) -> tuple[CsrMatrix, np.ndarray]:
    """Central-difference 7-point discretization with zero Dirichlet data.

    Rows are ordered lexicographically with x fastest. The matrix is kept
    unscaled: diagonal ``6/h**2``, y/z neighbours ``-1/h**2``, and x
    neighbours ``-1/h**2 - c/(2h)`` (+x) and ``-1/h**2 + c/(2h)`` (-x).
    The right-hand side samples
    ``F = exp(xyz) sin(pi x) sin(pi y) sin(pi z)`` at the grid points.
    """
    nx, c = spec.nx, spec.c
    h = 1.0 / (nx + 1)
    inv_h2 = 1.0 / h**2
    conv = c / (2 * h)
    n = nx**3

    def idx(i, j, k):
        return i + nx * (j + nx * k)

    t = TripletList(n)
    b = np.empty(n)
    for k in range(nx):
        for j in range(nx):
            for i in range(nx):
                row = idx(i, j, k)
                t.add(row, row, 6.0 * inv_h2)
                if i > 0:
                    t.add(row, idx(i - 1, j, k), -inv_h2 + conv)
                if i < nx - 1:
                    t.add(row, idx(i + 1, j, k), -inv_h2 - conv)
                if j > 0:
                    t.add(row, idx(i, j - 1, k), -inv_h2)
                if j < nx - 1:
                    t.add(row, idx(i, j + 1, k), -inv_h2)
                if k > 0:
                    t.add(row, idx(i, j, k - 1), -inv_h2)
                if k < nx - 1:
                    t.add(row, idx(i, j, k + 1), -inv_h2)
                x, y, z = (i + 1) * h, (j + 1) * h, (k + 1) * h
                b[row] = np.exp(x * y * z) * np.sin(np.pi * x) * np.sin(np.pi * y) * np.sin(np.pi * z)
    return from_triplets(t), b


@dataclass(frozen=True)
class ToeplitzSpec:
    """Banded Toeplitz matrix: ``A[i, i+offset] = value`` for each stencil entry."""

    n: int
    stencil: tuple = field(default_factory=tuple)

    def __post_init__(self):
        offsets = [o for o, _ in self.stencil]
        if len(set(offsets)) != len(offsets):
            raise ValueError(f"duplicate stencil offsets in {offsets}")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        for o in offsets:
            if abs(o) >= self.n:
                raise ValueError(f"offset {o} does not fit an {self.n}x{self.n} matrix")


def gen_toeplitz(spec: ToeplitzSpec) -> CsrMatrix:
    n = spec.n
    t = TripletList(n)
    for offset, value in spec.stencil:
        for i in range(max(0, -offset), min(n, n - offset)):
            t.add(i, i + offset, value)
    return from_triplets(t)


def parse_stencil(text: str) -> tuple:
    """Parse ``"offset:value,offset:value,..."``, e.g. ``"0:2,-1:-1,1:-1"``."""
    out = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        off, _, val = item.partition(":")
        if not _:
            raise ValueError(f"bad stencil entry {item!r}; expected offset:value")
        out.append((int(off), float(val)))
    return tuple(out)


def rhs_all_ones(A: CsrMatrix) -> np.ndarray:
    """Right-hand side whose exact solution is the all-ones vector."""
    return matvec(A, np.ones(A.n))


def gen_random_indefinite(n: int = 100, seed: int = 0, coupling: float = 1.5,
                          density: float = 0.1) -> CsrMatrix:
    """Random sparse nonsymmetric matrix with an indefinite symmetric part.

    The diagonal entries have magnitudes in [1, 2] and random signs; the
    off-diagonal part is Gaussian with the given density, scaled by
    ``coupling / sqrt(density * n)``. Larger ``coupling`` pushes eigenvalues
    toward the origin and makes the systems harder.
    """
    rng = np.random.default_rng(seed)
    diag = rng.uniform(1.0, 2.0, n) * rng.choice([-1.0, 1.0], n)
    noise = rng.standard_normal((n, n)) * (rng.random((n, n)) < density)
    M = np.diag(diag) + coupling * noise / np.sqrt(density * n)
    return from_dense(M)
