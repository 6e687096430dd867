"""Sensor/actuator binding map: `plantName -> ecuSignal` lines."""

from __future__ import annotations

from ..errors import DuplicateName
from ..specfmt.tokens import TokenStream


def parse_bindings(text: str, path: str | None = None) -> dict:
    ts = TokenStream(text, path)
    out: dict = {}
    while not ts.at_eof():
        left = ts.expect("ident", what="plant signal name")
        ts.expect("punct", "->")
        right = ts.expect("ident", what="ecu signal name")
        if left.text in out:
            raise DuplicateName(left.text, left.line, left.col)
        out[left.text] = right.text
    return out


def print_bindings(bindings: dict) -> str:
    return "".join(f"{p} -> {e}\n" for p, e in bindings.items())
