"""OS event table (`.ostab`).

Lines:
    every <N>ms [+<N>ms]: Mod.Run, Mod.Run2
    at <D>deg: Mod.Run
    on <name>: Mod.Init

Event order and runnable order in the file are the dispatch order.
"""

from __future__ import annotations

from ..errors import BadAngle, BadPeriod, DuplicateName
from ..scalars import fmt_num
from .ast import EventSpec, OsSpec
from .tokens import TokenStream


def runnable_ref(ts: TokenStream) -> str:
    mod = ts.expect("ident", what="module name")
    ts.expect("punct", ".")
    run = ts.expect("ident", what="runnable name")
    return f"{mod.text}.{run.text}"


def _signed_num(ts: TokenStream):
    neg = ts.accept("punct", "-")
    tok = ts.expect("num", what="number")
    return (-tok.value if neg else tok.value), (neg or tok)


def parse_os_spec(text: str, path: str | None = None) -> OsSpec:
    ts = TokenStream(text, path)
    events: list[EventSpec] = []
    aperiodic: set[str] = set()
    while not ts.at_eof():
        tok = ts.expect("ident", what="'every', 'at' or 'on'")
        if tok.text == "every":
            period, num_tok = _signed_num(ts)
            ts.expect("ident", "ms")
            if not isinstance(period, int) or period <= 0:
                raise BadPeriod(period, num_tok.line, num_tok.col)
            offset = 0
            if ts.accept("punct", "+"):
                offset, off_tok = _signed_num(ts)
                ts.expect("ident", "ms")
                if not isinstance(offset, int) or offset < 0:
                    raise BadPeriod(offset, off_tok.line, off_tok.col)
            ev = EventSpec("periodic", [], period=period, offset=offset,
                           line=tok.line, col=tok.col)
        elif tok.text == "at":
            raw, num_tok = _signed_num(ts)
            ts.expect("ident", "deg")
            angle = float(raw)
            if not 0 <= angle < 720:
                raise BadAngle(raw, num_tok.line, num_tok.col)
            ev = EventSpec("angular", [], angle=angle, line=tok.line, col=tok.col)
        elif tok.text == "on":
            name_tok = ts.expect("ident", what="event name")
            if name_tok.text in aperiodic:
                raise DuplicateName(name_tok.text, name_tok.line, name_tok.col)
            aperiodic.add(name_tok.text)
            ev = EventSpec("aperiodic", [], name=name_tok.text,
                           line=tok.line, col=tok.col)
        else:
            ts.error(f"expected 'every', 'at' or 'on', found {tok.text!r}", tok)
        ts.expect("punct", ":")
        ev.runnables.append(runnable_ref(ts))
        while ts.accept("punct", ","):
            ev.runnables.append(runnable_ref(ts))
        events.append(ev)
    return OsSpec(events)


def print_os_spec(spec: OsSpec) -> str:
    out = []
    for ev in spec.events:
        if ev.kind == "periodic":
            head = f"every {ev.period}ms"
            if ev.offset:
                head += f" +{ev.offset}ms"
        elif ev.kind == "angular":
            head = f"at {fmt_num(ev.angle)}deg"
        else:
            head = f"on {ev.name}"
        out.append(f"{head}: " + ", ".join(ev.runnables) + "\n")
    return "".join(out)
