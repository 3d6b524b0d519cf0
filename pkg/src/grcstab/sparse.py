"""Compressed sparse row storage, dense vector kernels and Matrix Market I/O.

Vectors are plain 1-D ``float64`` numpy arrays. Every kernel here is a pure
function; :class:`CsrMatrix` arrays are frozen after construction.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, TextIO

import numpy as np

__all__ = [
    "CsrMatrix",
    "TripletList",
    "DimensionError",
    "MatrixMarketError",
    "MalformedHeaderError",
    "TruncatedFileError",
    "NonSquareError",
    "UnsupportedFieldError",
    "IndexOutOfBoundsError",
    "matvec",
    "dot",
    "norm2",
    "axpy",
    "from_triplets",
    "from_dense",
    "mm_read",
    "mm_load",
    "mm_write",
]


class DimensionError(ValueError):
    """Operand lengths do not agree."""


class MatrixMarketError(ValueError):
    """Base class for Matrix Market parse failures."""


class MalformedHeaderError(MatrixMarketError):
    pass


class TruncatedFileError(MatrixMarketError):
    pass


class NonSquareError(MatrixMarketError):
    pass


class UnsupportedFieldError(MatrixMarketError):
    pass


class IndexOutOfBoundsError(MatrixMarketError):
    pass


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class CsrMatrix:
    """Square sparse matrix in compressed sparse row form.

    Column indices are strictly increasing within each row; construction
    fails if any CSR invariant is violated.
    """

    n: int
    row_offsets: np.ndarray
    col_indices: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        ro = _frozen(np.asarray(self.row_offsets, dtype=np.int64))
        ci = _frozen(np.asarray(self.col_indices, dtype=np.int64))
        va = _frozen(np.asarray(self.values, dtype=np.float64))
        object.__setattr__(self, "row_offsets", ro)
        object.__setattr__(self, "col_indices", ci)
        object.__setattr__(self, "values", va)
        n = self.n
        if n < 0:
            raise ValueError("negative dimension")
        if ro.shape != (n + 1,) or ro[0] != 0:
            raise ValueError("row_offsets must have length n+1 and start at 0")
        if np.any(np.diff(ro) < 0):
            raise ValueError("row_offsets must be nondecreasing")
        nnz = int(ro[-1])
        if ci.shape != (nnz,) or va.shape != (nnz,):
            raise ValueError("col_indices/values length must equal row_offsets[n]")
        if nnz and (ci.min() < 0 or ci.max() >= n):
            raise ValueError("column index out of range")
        # strictly increasing columns inside each row
        if nnz > 1:
            inc = np.diff(ci) > 0
            same_row = np.diff(self._row_ids) == 0
            if np.any(same_row & ~inc):
                raise ValueError("column indices must be strictly increasing within a row")

    @property
    def nnz(self) -> int:
        return int(self.row_offsets[-1])

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n, self.n)

    @cached_property
    def _row_ids(self) -> np.ndarray:
        return np.repeat(np.arange(self.n, dtype=np.int64), np.diff(self.row_offsets))

    def __matmul__(self, x):
        return matvec(self, x)

    def __getitem__(self, ij):
        i, k = ij
        lo, hi = self.row_offsets[i], self.row_offsets[i + 1]
        pos = np.searchsorted(self.col_indices[lo:hi], k)
        if pos < hi - lo and self.col_indices[lo + pos] == k:
            return float(self.values[lo + pos])
        return 0.0

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.n, self.n))
        out[self._row_ids, self.col_indices] = self.values
        return out

    def transpose(self) -> "CsrMatrix":
        return from_triplets(
            TripletList(self.n, list(zip(self.col_indices.tolist(), self._row_ids.tolist(),
                                         self.values.tolist())))
        )

    def same_as(self, other: "CsrMatrix") -> bool:
        """Exact structural and numerical equality."""
        return (
            self.n == other.n
            and np.array_equal(self.row_offsets, other.row_offsets)
            and np.array_equal(self.col_indices, other.col_indices)
            and np.array_equal(self.values, other.values)
        )


@dataclass
class TripletList:
    """Coordinate-format construction intermediary."""

    n: int
    entries: list = field(default_factory=list)

    def add(self, row: int, col: int, value: float) -> None:
        self.entries.append((row, col, value))


def _check_len(x: np.ndarray, n: int, what: str = "vector") -> None:
    if x.ndim != 1 or x.shape[0] != n:
        raise DimensionError(f"{what} has shape {x.shape}, expected ({n},)")


def matvec(A: CsrMatrix, x) -> np.ndarray:
    """Return ``A @ x``."""
    x = np.asarray(x, dtype=np.float64)
    _check_len(x, A.n)
    if A.nnz == 0:
        return np.zeros(A.n)
    return np.bincount(A._row_ids, weights=A.values * x[A.col_indices], minlength=A.n)


def dot(x, y) -> float:
    """Inner product of two vectors.

    The products are summed with :func:`math.fsum`, i.e. exactly rounded,
    which also makes the result independent of summation order.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise DimensionError(f"dot of shapes {x.shape} and {y.shape}")
    return math.fsum((x * y).tolist())


def norm2(x) -> float:
    return math.sqrt(dot(x, x))


def axpy(a: float, x, y) -> np.ndarray:
    """Return ``a*x + y`` as a new array."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise DimensionError(f"axpy of shapes {x.shape} and {y.shape}")
    return a * x + y


def from_triplets(t: TripletList) -> CsrMatrix:
    """Build a CSR matrix, summing duplicate ``(row, col)`` entries."""
    n = t.n
    if not t.entries:
        return CsrMatrix(n, np.zeros(n + 1, dtype=np.int64), np.zeros(0, np.int64), np.zeros(0))
    rows, cols, vals = (np.asarray(c) for c in zip(*t.entries))
    rows = rows.astype(np.int64)
    cols = cols.astype(np.int64)
    vals = vals.astype(np.float64)
    if rows.min() < 0 or cols.min() < 0 or rows.max() >= n or cols.max() >= n:
        raise IndexError(f"triplet index out of range for n={n}")
    key = rows * n + cols
    # stable sort keeps duplicate summation order fixed for a given input
    order = np.argsort(key, kind="stable")
    key, vals = key[order], vals[order]
    uniq, start = np.unique(key, return_index=True)
    summed = np.array([math.fsum(vals[a:b].tolist())
                       for a, b in zip(start, list(start[1:]) + [len(key)])])
    urows = uniq // n
    ucols = uniq % n
    offsets = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(urows, minlength=n), out=offsets[1:])
    return CsrMatrix(n, offsets, ucols, summed)


def from_dense(M) -> CsrMatrix:
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionError("only square matrices are supported")
    rows, cols = np.nonzero(M)
    return from_triplets(TripletList(M.shape[0], list(zip(rows, cols, M[rows, cols]))))


# -- Matrix Market ----------------------------------------------------------

_SYMMETRIES = {"general", "symmetric", "skew-symmetric"}


def _data_lines(lines: Iterable[str]):
    for line in lines:
        s = line.strip()
        if s and not s.startswith("%"):
            yield s


def mm_read(stream: TextIO) -> CsrMatrix:
    """Parse a Matrix Market coordinate file into a square CSR matrix.

    Accepts ``real`` and ``integer`` fields with ``general``, ``symmetric``
    or ``skew-symmetric`` symmetry. Symmetric storage is expanded to both
    triangles (with a sign flip for skew-symmetric).
    """
    header = stream.readline()
    tokens = header.strip().split()
    if len(tokens) != 5 or tokens[0] != "%%MatrixMarket":
        raise MalformedHeaderError(f"bad banner line: {header.strip()!r}")
    obj, fmt, fld, sym = (t.lower() for t in tokens[1:])
    if obj != "matrix" or fmt != "coordinate":
        raise MalformedHeaderError(f"unsupported object/format: {obj} {fmt}")
    if fld in ("pattern", "complex"):
        raise UnsupportedFieldError(f"field '{fld}' is not supported")
    if fld not in ("real", "integer", "double"):
        raise MalformedHeaderError(f"unknown field '{fld}'")
    if sym not in _SYMMETRIES:
        if sym == "hermitian":
            raise UnsupportedFieldError("hermitian matrices are not supported")
        raise MalformedHeaderError(f"unknown symmetry '{sym}'")

    body = _data_lines(stream)
    size_line = next(body, None)
    if size_line is None:
        raise TruncatedFileError("missing size line")
    try:
        nrows, ncols, nnz = (int(v) for v in size_line.split())
    except ValueError:
        raise MalformedHeaderError(f"bad size line: {size_line!r}") from None
    if nrows != ncols:
        raise NonSquareError(f"matrix is {nrows}x{ncols}")
    n = nrows

    t = TripletList(n)
    count = 0
    for line in body:
        if count == nnz:
            raise MalformedHeaderError("more entries than declared")
        parts = line.split()
        if len(parts) != 3:
            raise MalformedHeaderError(f"bad entry line: {line!r}")
        try:
            i, k, v = int(parts[0]) - 1, int(parts[1]) - 1, float(parts[2])
        except ValueError:
            raise MalformedHeaderError(f"bad entry line: {line!r}") from None
        if not (0 <= i < n and 0 <= k < n):
            raise IndexOutOfBoundsError(f"entry ({i + 1},{k + 1}) outside {n}x{n}")
        t.add(i, k, v)
        if i != k:
            if sym == "symmetric":
                t.add(k, i, v)
            elif sym == "skew-symmetric":
                t.add(k, i, -v)
        count += 1
    if count < nnz:
        raise TruncatedFileError(f"declared {nnz} entries, found {count}")
    return from_triplets(t)


def mm_load(path) -> CsrMatrix:
    with open(path) as fh:
        return mm_read(fh)


def mm_write(A: CsrMatrix, stream: TextIO, comment: str | None = None) -> None:
    """Write ``A`` as a general real coordinate file (17 significant digits)."""
    stream.write("%%MatrixMarket matrix coordinate real general\n")
    if comment:
        for line in comment.splitlines():
            stream.write(f"% {line}\n")
    stream.write(f"{A.n} {A.n} {A.nnz}\n")
    for i, k, v in zip(A._row_ids.tolist(), A.col_indices.tolist(), A.values.tolist()):
        stream.write(f"{i + 1} {k + 1} {v:.17g}\n")
