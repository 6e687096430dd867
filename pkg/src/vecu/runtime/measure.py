"""Measurement files (`.meas`): recorded signal list and decimation.

    record: EngSpd, IdleTrim, plant.speed_rpm
    decimation: 10

`record` lines accumulate; `decimation` takes the last value. An empty
record list means "use the image's default recorded signals".
"""

from __future__ import annotations

from ..errors import ParseError, UnknownKey
from ..specfmt.tokens import TokenStream
from .instance import MeasurementConfig


def _signal_name(ts: TokenStream) -> str:
    name = ts.expect("ident", what="signal name").text
    while ts.at("punct", "."):
        ts.next()
        name += "." + ts.expect("ident", what="signal name").text
    return name


def parse_measurement(text: str, path: str | None = None) -> MeasurementConfig:
    ts = TokenStream(text, path)
    recorded: list = []
    decimation = 1
    while not ts.at_eof():
        key = ts.expect("ident", what="'record' or 'decimation'")
        if key.text not in ("record", "decimation"):
            raise UnknownKey(key.text, key.line, key.col)
        ts.expect("punct", ":")
        if key.text == "decimation":
            tok = ts.expect("num", what="decimation factor")
            if not isinstance(tok.value, int) or tok.value < 1:
                raise ParseError(
                    f"decimation must be a positive integer, got {tok.value}",
                    line=tok.line, column=tok.col)
            decimation = tok.value
        else:
            name = _signal_name(ts)
            if name not in recorded:
                recorded.append(name)
            while ts.accept("punct", ","):
                name = _signal_name(ts)
                if name not in recorded:
                    recorded.append(name)
    return MeasurementConfig(recorded, decimation)
