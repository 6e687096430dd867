"""Scalar types and value semantics shared by the compiler and the runtime.

Integer arithmetic saturates at the type bounds.  f32 values are computed
in double precision and quantized to single on every store or cast, which
matches what a C target does with float variables and double intermediates.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field
from decimal import Decimal

from .errors import DimensionMismatch, NonAscendingBreakpoints

FLOAT_TYPES = ("f32", "f64")
SIGNED_TYPES = ("i8", "i16", "i32")
UNSIGNED_TYPES = ("u8", "u16", "u32")
INT_TYPES = SIGNED_TYPES + UNSIGNED_TYPES
NUMERIC_TYPES = FLOAT_TYPES + INT_TYPES
SCALAR_TYPES = NUMERIC_TYPES + ("bool",)

# Accepted spellings in the type dictionary and module sources.
ALIASES = {
    "float": "f32", "double": "f64",
    "int8": "i8", "int16": "i16", "int32": "i32",
    "uint8": "u8", "uint16": "u16", "uint32": "u32",
    "boolean": "bool",
}

INT_BOUNDS = {
    "i8": (-128, 127),
    "i16": (-32768, 32767),
    "i32": (-2147483648, 2147483647),
    "u8": (0, 255),
    "u16": (0, 65535),
    "u32": (0, 4294967295),
}

_F32 = struct.Struct("<f")


def canonical_type(token: str) -> str | None:
    """Resolve a type spelling to its canonical name, or None."""
    if token in SCALAR_TYPES:
        return token
    return ALIASES.get(token)


def is_float(t: str) -> bool:
    return t in FLOAT_TYPES


def is_int(t: str) -> bool:
    return t in INT_BOUNDS


def is_numeric(t: str) -> bool:
    return t != "bool"


def quant32(x: float) -> float:
    """Round a double to the nearest representable f32."""
    try:
        return _F32.unpack(_F32.pack(x))[0]
    except OverflowError:
        # pack refuses doubles beyond f32 range; IEEE rounds them to inf
        return math.inf if x > 0 else -math.inf


def saturate(t: str, v: int) -> int:
    lo, hi = INT_BOUNDS[t]
    if v < lo:
        return lo
    if v > hi:
        return hi
    return v


def zero(t: str):
    if t == "bool":
        return False
    if is_float(t):
        return 0.0
    return 0


def cast_value(t: str, v):
    """Convert a runtime value to type t with the toolkit's cast rules.

    float -> int truncates toward zero then saturates; NaN becomes 0.
    Anything -> bool is a zero test, bool -> numeric is 0/1.
    """
    if t == "bool":
        return bool(v)
    if isinstance(v, bool):
        v = 1 if v else 0
    if t == "f64":
        return float(v)
    if t == "f32":
        return quant32(float(v))
    # integer target
    if isinstance(v, float):
        if math.isnan(v):
            return 0
        if math.isinf(v):
            return INT_BOUNDS[t][1] if v > 0 else INT_BOUNDS[t][0]
        v = math.trunc(v)
    return saturate(t, v)


def store_value(t: str, v):
    """Quantize/saturate a computed value on assignment to a typed slot."""
    return cast_value(t, v)


def check_literal(t: str, v) -> bool:
    """Can this parsed literal initialize a slot of type t without change?"""
    if t == "bool":
        return isinstance(v, bool)
    if isinstance(v, bool):
        return False
    if is_float(t):
        return isinstance(v, (int, float))
    return isinstance(v, int) and INT_BOUNDS[t][0] <= v <= INT_BOUNDS[t][1]


def fmt_num(v) -> str:
    """Shortest decimal text that parses back to exactly this value.

    Plain decimal notation only (the literal grammar has no exponents);
    inf/nan render as their float() spellings, which only traces may hold.
    """
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, int):
        return str(v)
    if v != v or v in (math.inf, -math.inf):
        return repr(v)
    r = repr(v)
    if "e" in r or "E" in r:
        r = format(Decimal(r), "f")
        if "." not in r:
            r += ".0"      # keep float-ness through a text roundtrip
    return r


# ----------------------------------------------------------------- tables

@dataclass
class MapData1:
    """1-D interpolated table: breakpoints strictly ascending."""
    breakpoints: list[float]
    values: list[float]
    name: str = field(default="", compare=False)

    def validate(self, line: int | None = None):
        if len(self.breakpoints) != len(self.values):
            raise DimensionMismatch(self.name,
                                    f"{len(self.breakpoints)} breakpoints but "
                                    f"{len(self.values)} values", line=line)
        if len(self.breakpoints) < 2:
            raise DimensionMismatch(self.name, "needs at least 2 breakpoints",
                                    line=line)
        for a, b in zip(self.breakpoints, self.breakpoints[1:]):
            if not a < b:
                raise NonAscendingBreakpoints(self.name, line=line)


@dataclass
class MapData2:
    """2-D interpolated table: values[i][j] at (x[i], y[j])."""
    x_breakpoints: list[float]
    y_breakpoints: list[float]
    values: list[list[float]]
    name: str = field(default="", compare=False)

    def validate(self, line: int | None = None):
        nx, ny = len(self.x_breakpoints), len(self.y_breakpoints)
        if nx < 2 or ny < 2:
            raise DimensionMismatch(self.name, "needs at least 2x2 breakpoints",
                                    line=line)
        if len(self.values) != nx:
            raise DimensionMismatch(self.name,
                                    f"{nx} x-breakpoints but {len(self.values)} rows",
                                    line=line)
        for i, row in enumerate(self.values):
            if len(row) != ny:
                raise DimensionMismatch(self.name,
                                        f"row {i} has {len(row)} values, expected {ny}",
                                        line=line)
        for bps in (self.x_breakpoints, self.y_breakpoints):
            for a, b in zip(bps, bps[1:]):
                if not a < b:
                    raise NonAscendingBreakpoints(self.name, line=line)


def _bracket(bps: list[float], x: float) -> tuple[int, float]:
    """Clamping segment search: index i and blend u in [0,1] for x."""
    if x <= bps[0]:
        return 0, 0.0
    if x >= bps[-1]:
        return len(bps) - 2, 1.0
    lo, hi = 0, len(bps) - 1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if bps[mid] <= x:
            lo = mid
        else:
            hi = mid
    u = (x - bps[lo]) / (bps[lo + 1] - bps[lo])
    return lo, u


def interp1(m: MapData1, x: float) -> float:
    i, u = _bracket(m.breakpoints, x)
    return m.values[i] + u * (m.values[i + 1] - m.values[i])


def interp2(m: MapData2, x: float, y: float) -> float:
    i, u = _bracket(m.x_breakpoints, x)
    j, v = _bracket(m.y_breakpoints, y)
    z00 = m.values[i][j]
    z01 = m.values[i][j + 1]
    z10 = m.values[i + 1][j]
    z11 = m.values[i + 1][j + 1]
    top = z00 + v * (z01 - z00)
    bot = z10 + v * (z11 - z10)
    return top + u * (bot - top)
