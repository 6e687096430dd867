"""Calibration file (`.cal`): scalar and table values applied over defaults.

Entries are `name = value`, `name = [b0 b1 ...; v0 v1 ...]` (1-D table) or
`name = [x...; y...; row | row | ...]` (2-D table).  Names may be qualified
(`Module.Param`) or bare; resolution against declared parameters happens at
load time, not here.
"""

from __future__ import annotations

from ..errors import DuplicateName
from ..scalars import MapData1, MapData2, fmt_num
from .ast import CalibrationSet
from .tokens import TokenStream


def read_number(ts: TokenStream):
    """Signed numeric literal; returns (value, first token)."""
    neg = ts.accept("punct", "-")
    tok = ts.expect("num", what="number")
    value = -tok.value if neg else tok.value
    return value, (neg or tok)


def read_scalar_literal(ts: TokenStream):
    """Number (possibly signed) or true/false; returns (value, first token)."""
    if ts.at("ident", "true"):
        return True, ts.next()
    if ts.at("ident", "false"):
        return False, ts.next()
    return read_number(ts)


def _read_row(ts: TokenStream) -> list[float]:
    row: list[float] = []
    while ts.at("num") or ts.at("punct", "-"):
        v, _ = read_number(ts)
        row.append(float(v))
    if not row:
        ts.error("expected at least one number")
    return row


def read_table(ts: TokenStream, name: str):
    """Bracketed table literal after the '='; infers 1-D vs 2-D."""
    open_tok = ts.expect("punct", "[")
    first = _read_row(ts)
    ts.expect("punct", ";")
    second = _read_row(ts)
    if ts.accept("punct", "]"):
        m = MapData1(first, second, name)
        m.validate(open_tok.line)
        return m
    ts.expect("punct", ";")
    rows = [_read_row(ts)]
    while ts.accept("punct", "|"):
        rows.append(_read_row(ts))
    ts.expect("punct", "]")
    m2 = MapData2(first, second, rows, name)
    m2.validate(open_tok.line)
    return m2


def _read_name(ts: TokenStream) -> tuple[str, object]:
    tok = ts.expect("ident", what="parameter name")
    name = tok.text
    if ts.accept("punct", "."):
        name += "." + ts.expect("ident", what="parameter name").text
    return name, tok


def parse_calibration(text: str, path: str | None = None) -> CalibrationSet:
    ts = TokenStream(text, path)
    cal = CalibrationSet()
    while not ts.at_eof():
        name, tok = _read_name(ts)
        if name in cal.scalars or name in cal.maps1d or name in cal.maps2d:
            raise DuplicateName(name, tok.line, tok.col)
        ts.expect("punct", "=")
        if ts.at("punct", "["):
            table = read_table(ts, name)
            if isinstance(table, MapData1):
                cal.maps1d[name] = table
            else:
                cal.maps2d[name] = table
        else:
            value, _ = read_scalar_literal(ts)
            cal.scalars[name] = value
    return cal


def _row_text(row) -> str:
    return " ".join(fmt_num(v) for v in row)


def print_calibration(cal: CalibrationSet) -> str:
    out = []
    for name, v in cal.scalars.items():
        lit = "true" if v is True else "false" if v is False else fmt_num(v)
        out.append(f"{name} = {lit}\n")
    for name, m in cal.maps1d.items():
        out.append(f"{name} = [{_row_text(m.breakpoints)}; {_row_text(m.values)}]\n")
    for name, m2 in cal.maps2d.items():
        grid = " | ".join(_row_text(r) for r in m2.values)
        out.append(f"{name} = [{_row_text(m2.x_breakpoints)}; "
                   f"{_row_text(m2.y_breakpoints)}; {grid}]\n")
    return "".join(out)
