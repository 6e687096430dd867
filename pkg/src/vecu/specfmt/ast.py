"""Parsed representations of the five input formats.

Source positions are carried on every node but excluded from equality, so
a parsed artifact compares equal to the re-parse of its pretty-print.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..scalars import MapData1, MapData2

# ------------------------------------------------------------- expressions


@dataclass
class Lit:
    value: object                      # int, float or bool
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


@dataclass
class Name:
    name: str
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


@dataclass
class Unary:
    op: str                            # '-' | 'not'
    operand: object
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


@dataclass
class Binary:
    op: str                            # + - * / % < <= > >= == != and or
    lhs: object
    rhs: object
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


@dataclass
class Call:
    fn: str                            # 'min' | 'max' | 'clamp'
    args: list
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


@dataclass
class Cast:
    type: str
    expr: object
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


@dataclass
class Lookup:
    map: str                           # declared map parameter name
    args: list                         # 1 expr for 1-D, 2 for 2-D
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


# -------------------------------------------------------------- statements


@dataclass
class Assign:
    target: str
    expr: object
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


@dataclass
class Let:
    name: str
    decl_type: str | None
    expr: object
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


@dataclass
class If:
    cond: object
    then: list
    orelse: list
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


# ------------------------------------------------------------ declarations


@dataclass
class ParamDecl:
    name: str
    type: str                          # scalar type of value or map elements
    default: object = None             # scalar default; None for maps
    map1: MapData1 | None = None
    map2: MapData2 | None = None
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)

    @property
    def is_map(self) -> bool:
        return self.map1 is not None or self.map2 is not None


@dataclass
class StateDecl:
    name: str
    type: str
    init: object = None
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


@dataclass
class RunnableSpec:
    name: str
    body: list
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


@dataclass
class ModuleSpec:
    name: str
    inputs: list[str]
    outputs: list[str]
    params: list[ParamDecl]
    states: list[StateDecl]
    runnables: list[RunnableSpec]
    source_hash: str = field(default="", compare=False)


@dataclass
class TypeDictionary:
    entries: dict[str, str]


@dataclass
class EventSpec:
    kind: str                          # 'periodic' | 'angular' | 'aperiodic'
    runnables: list[str]               # ordered Module.Runnable references
    period: int = 0
    offset: int = 0
    angle: float = 0.0
    name: str = ""
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


@dataclass
class OsSpec:
    events: list[EventSpec]


@dataclass
class VecuConfig:
    bypassable_modules: set[str] = field(default_factory=set)
    exposed_tunable_modules: set[str] = field(default_factory=set)
    eliminated_runnables: set[str] = field(default_factory=set)
    crank_angle_signal: str = ""
    default_recorded_signals: list[str] = field(default_factory=list)


@dataclass
class CalibrationSet:
    scalars: dict[str, object] = field(default_factory=dict)
    maps1d: dict[str, MapData1] = field(default_factory=dict)
    maps2d: dict[str, MapData2] = field(default_factory=dict)
