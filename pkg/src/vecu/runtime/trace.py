"""Recorded traces: CSV export/import and tolerance-based comparison.

CSV uses `,` as the separator and `.` as the decimal point, first column
is always t_ms. Booleans are written as 0/1.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import CorruptTrace, NoSharedColumns
from ..scalars import fmt_num


@dataclass
class Trace:
    columns: list    # ["t_ms", sig, ...]
    rows: list       # [[t, v, ...], ...]

    def column(self, name: str) -> list:
        i = self.columns.index(name)
        return [row[i] for row in self.rows]

    @property
    def times(self) -> list:
        return [row[0] for row in self.rows]


def export_trace(trace: Trace) -> str:
    lines = [",".join(trace.columns)]
    for row in trace.rows:
        lines.append(",".join(fmt_num(v) for v in row))
    return "\n".join(lines) + "\n"


def _parse_cell(text: str, line: int) -> float:
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)   # accepts inf/-inf/nan spellings
    except ValueError:
        raise CorruptTrace(f"bad numeric cell {text!r}", line=line) from None


def import_trace(text: str) -> Trace:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise CorruptTrace("empty trace")
    columns = lines[0].split(",")
    if not columns or columns[0] != "t_ms":
        raise CorruptTrace("first column must be t_ms", line=1)
    rows = []
    for n, ln in enumerate(lines[1:], start=2):
        cells = ln.split(",")
        if len(cells) != len(columns):
            raise CorruptTrace(
                f"row has {len(cells)} cells, header has {len(columns)}",
                line=n)
        rows.append([_parse_cell(c, n) for c in cells])
    return Trace(columns, rows)


@dataclass
class Divergence:
    signal: str
    t_ms: float
    value_a: float
    value_b: float
    max_dev: float
    max_dev_t_ms: float


@dataclass
class CompareReport:
    signals: list
    divergences: list = field(default_factory=list)
    max_dev: dict = field(default_factory=dict)
    compared_rows: int = 0

    @property
    def is_empty(self) -> bool:
        return not self.divergences

    def to_text(self) -> str:
        if self.is_empty:
            return (f"traces agree on {len(self.signals)} signal(s) over "
                    f"{self.compared_rows} shared sample(s)")
        lines = [f"{len(self.divergences)} signal(s) diverge:"]
        for d in self.divergences:
            lines.append(
                f"  {d.signal}: first at t={fmt_num(d.t_ms)}ms "
                f"({fmt_num(d.value_a)} vs {fmt_num(d.value_b)}), "
                f"max |dev|={fmt_num(d.max_dev)} at t={fmt_num(d.max_dev_t_ms)}ms")
        return "\n".join(lines)


def _deviation(va, vb) -> float:
    if va == vb:
        return 0.0
    a_nan = va != va
    b_nan = vb != vb
    if a_nan and b_nan:
        return 0.0
    if a_nan or b_nan:
        return float("inf")
    return abs(va - vb)


def compare_traces(a: Trace, b: Trace, tolerances=None) -> CompareReport:
    tolerances = tolerances or {}
    shared = [c for c in a.columns[1:] if c in b.columns]
    if not shared:
        raise NoSharedColumns()
    b_index = {row[0]: row for row in b.rows}
    ai = [a.columns.index(c) for c in shared]
    bi = [b.columns.index(c) for c in shared]
    report = CompareReport(signals=shared)
    first = {}
    worst = {}
    for row in a.rows:
        other = b_index.get(row[0])
        if other is None:
            continue
        report.compared_rows += 1
        for name, ia, ib in zip(shared, ai, bi):
            dev = _deviation(row[ia], other[ib])
            w = worst.get(name)
            if w is None or dev > w[0]:
                worst[name] = (dev, row[0])
            tol = tolerances.get(name, tolerances.get("*", 0.0))
            if dev > tol and name not in first:
                first[name] = (row[0], row[ia], other[ib])
    for name in shared:
        if name in worst:
            report.max_dev[name] = worst[name][0]
        if name in first:
            t, va, vb = first[name]
            dev, dev_t = worst[name]
            report.divergences.append(Divergence(name, t, va, vb, dev, dev_t))
    return report
