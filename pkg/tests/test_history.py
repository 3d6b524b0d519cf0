import io

import numpy as np
import pytest
from hypothesis import given, strategies as st

from grcstab import grc_bicgstab
from grcstab.history import (
    CSV_HEADER,
    ConvergenceHistory,
    HistoryRow,
    Phase,
    emit_csv,
    read_csv,
    write_csv,
)
from grcstab.problems import Pde1Spec, gen_pde1


def test_header():
    assert ",".join(CSV_HEADER) == ("cumulative_inner_iters,cumulative_matvecs,outer_iter,"
                                    "phase,residual_norm,relative_residual")


def test_single_row_file(tmp_path):
    h = ConvergenceHistory(2.0)
    h.append(0, 0, 0, "standalone", 2.0)
    path = tmp_path / "h.csv"
    emit_csv(h, path)
    lines = path.read_text().splitlines()
    assert len(lines) == 2
    assert lines[1].startswith("0,0,0,standalone,")


def test_empty_history_rejected():
    with pytest.raises(ValueError):
        write_csv(ConvergenceHistory(), io.StringIO())


def test_unwritable_path(tmp_path):
    h = ConvergenceHistory(1.0)
    h.append(0, 0, 0, "outer", 1.0)
    with pytest.raises(OSError):
        emit_csv(h, tmp_path / "missing" / "dir" / "h.csv")


def test_residual_digits():
    h = ConvergenceHistory(3.0)
    h.append(1, 2, 0, "standalone", 1.0 / 3.0)
    buf = io.StringIO()
    write_csv(h, buf)
    field = buf.getvalue().splitlines()[1].split(",")[4]
    mantissa = field.split("e")[0].replace(".", "").lstrip("-")
    assert len(mantissa) >= 17


@given(st.lists(st.tuples(st.floats(0, 1e300, allow_nan=False), st.sampled_from(list(Phase))),
                min_size=1, max_size=20),
       st.floats(1e-300, 1e300))
def test_csv_round_trip(entries, r0):
    h = ConvergenceHistory(r0)
    for k, (res, phase) in enumerate(entries):
        h.append(k, 2 * k, k // 3, phase, res)
    buf = io.StringIO()
    write_csv(h, buf)
    buf.seek(0)
    assert read_csv(buf) == h.rows


def test_grc_csv_structure():
    A, b = gen_pde1(Pde1Spec(5))
    res = grc_bicgstab(A, b)
    buf = io.StringIO()
    write_csv(res.history, buf)
    buf.seek(0)
    rows = read_csv(buf)
    assert rows == res.history.rows
    phases = {r.phase for r in rows}
    assert phases == {Phase.INNER, Phase.OUTER}
    # inner counters strictly increase inside each outer step
    by_step = {}
    for r in rows:
        if r.phase is Phase.INNER:
            by_step.setdefault(r.outer_iter, []).append(r.cumulative_inner_iters)
    for counts in by_step.values():
        assert all(np.diff(counts) > 0)


def test_relative_residual_definition():
    h = ConvergenceHistory(4.0)
    h.append(0, 0, 0, "outer", 4.0)
    h.append(1, 2, 1, "outer", 1.0)
    assert [r.relative_residual for r in h] == [1.0, 0.25]
    assert isinstance(h[1], HistoryRow)
