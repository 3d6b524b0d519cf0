"""Convergence history rows and their CSV form."""
from __future__ import annotations

import csv
import enum
from dataclasses import astuple, dataclass, field, fields
from typing import TextIO


class Phase(str, enum.Enum):
    INNER = "inner"
    OUTER = "outer"
    STANDALONE = "standalone"


@dataclass(frozen=True)
class HistoryRow:
    cumulative_inner_iters: int
    cumulative_matvecs: int
    outer_iter: int
    phase: Phase
    residual_norm: float
    relative_residual: float


CSV_HEADER = [f.name for f in fields(HistoryRow)]


@dataclass
class ConvergenceHistory:
    """Ordered residual record of one run.

    Standalone BiCGSTAB writes ``standalone`` rows; GRC-BiCGSTAB interleaves
    ``inner`` rows (one per inner BiCGSTAB iteration) with one ``outer`` row
    per outer step. Row 0 always holds the initial residual.
    """

    r0_norm: float = 1.0
    rows: list[HistoryRow] = field(default_factory=list)

    def append(self, cumulative_inner_iters, cumulative_matvecs, outer_iter, phase,
               residual_norm):
        rel = residual_norm / self.r0_norm if self.r0_norm > 0 else 0.0
        self.rows.append(HistoryRow(int(cumulative_inner_iters), int(cumulative_matvecs),
                                    int(outer_iter), Phase(phase), float(residual_norm), rel))

    def __len__(self):
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    def __getitem__(self, i):
        return self.rows[i]

    def phase_rows(self, phase) -> list[HistoryRow]:
        phase = Phase(phase)
        return [r for r in self.rows if r.phase is phase]

    def residuals(self, phase=None) -> list[float]:
        rows = self.rows if phase is None else self.phase_rows(phase)
        return [r.residual_norm for r in rows]


def _fmt(v) -> str:
    if isinstance(v, enum.Enum):
        return v.value
    if isinstance(v, float):
        # 18 significant digits round-trip every float64
        return f"{v:.17e}"
    return str(v)


def write_csv(history: ConvergenceHistory, stream: TextIO) -> None:
    if not len(history):
        raise ValueError("refusing to write an empty history")
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for row in history.rows:
        w.writerow([_fmt(v) for v in astuple(row)])


def emit_csv(history: ConvergenceHistory, path) -> None:
    with open(path, "w", newline="") as fh:
        write_csv(history, fh)


def read_csv(stream: TextIO) -> list[HistoryRow]:
    reader = csv.reader(stream)
    header = next(reader)
    if header != CSV_HEADER:
        raise ValueError(f"unexpected CSV header {header}")
    out = []
    for rec in reader:
        ci, cm, oi, ph, rn, rr = rec
        out.append(HistoryRow(int(ci), int(cm), int(oi), Phase(ph), float(rn), float(rr)))
    return out
