"""Turn lowered statement lists into Python closures.

Value semantics are fixed here: integer ops saturate at the type bounds
after every operation, f32 results are quantized to single precision,
float division follows IEEE-754, and integer division or remainder by
zero yields 0 while bumping the div_by_zero diagnostic counter.
"""

from __future__ import annotations

import math

from ..scalars import (INT_BOUNDS, MapData1, MapData2, cast_value, interp1,
                       interp2, quant32)


class ExecContext:
    __slots__ = ("signals", "params", "states", "maps", "locals", "diag")

    def __init__(self, signals, params, states, maps, diag):
        self.signals = signals
        self.params = params
        self.states = states
        self.maps = maps
        self.locals = {}
        self.diag = diag


def _fdiv(a: float, b: float) -> float:
    if b == 0.0:
        if a == 0.0 or a != a:
            return math.nan
        neg = (a < 0.0) != (math.copysign(1.0, b) < 0.0)
        return -math.inf if neg else math.inf
    return a / b


def _float_binop(op: str, l, r, f32: bool):
    if op == "+":
        raw = lambda ctx: l(ctx) + r(ctx)
    elif op == "-":
        raw = lambda ctx: l(ctx) - r(ctx)
    elif op == "*":
        raw = lambda ctx: l(ctx) * r(ctx)
    else:
        raw = lambda ctx: _fdiv(l(ctx), r(ctx))
    if f32:
        return lambda ctx: quant32(raw(ctx))
    return raw


def _int_binop(op: str, l, r, lo: int, hi: int):
    if op == "+":
        def run(ctx):
            v = l(ctx) + r(ctx)
            return lo if v < lo else hi if v > hi else v
    elif op == "-":
        def run(ctx):
            v = l(ctx) - r(ctx)
            return lo if v < lo else hi if v > hi else v
    elif op == "*":
        def run(ctx):
            v = l(ctx) * r(ctx)
            return lo if v < lo else hi if v > hi else v
    elif op == "/":
        def run(ctx):
            a, b = l(ctx), r(ctx)
            if b == 0:
                ctx.diag["div_by_zero"] += 1
                return 0
            q = a // b
            if q < 0 and q * b != a:
                q += 1          # truncate toward zero
            return lo if q < lo else hi if q > hi else q
    else:
        def run(ctx):
            a, b = l(ctx), r(ctx)
            if b == 0:
                ctx.diag["div_by_zero"] += 1
                return 0
            v = a % b
            if v != 0 and (v < 0) != (a < 0):
                v -= b          # remainder takes the dividend's sign
            return v
    return run


_CMP = {
    "<": lambda l, r: lambda ctx: l(ctx) < r(ctx),
    "<=": lambda l, r: lambda ctx: l(ctx) <= r(ctx),
    ">": lambda l, r: lambda ctx: l(ctx) > r(ctx),
    ">=": lambda l, r: lambda ctx: l(ctx) >= r(ctx),
    "==": lambda l, r: lambda ctx: l(ctx) == r(ctx),
    "!=": lambda l, r: lambda ctx: l(ctx) != r(ctx),
}


def compile_expr(ir: list, mod: str):
    tag = ir[0]
    if tag == "lit":
        v = ir[2]
        return lambda ctx: v
    if tag == "sig":
        name = ir[2]
        return lambda ctx: ctx.signals[name]
    if tag == "par":
        q = f"{mod}.{ir[2]}"
        return lambda ctx: ctx.params[q]
    if tag == "sta":
        q = f"{mod}.{ir[2]}"
        return lambda ctx: ctx.states[q]
    if tag == "loc":
        name = ir[2]
        return lambda ctx: ctx.locals[name]
    if tag == "un":
        t, e = ir[1], compile_expr(ir[3], mod)
        if ir[2] == "not":
            return lambda ctx: not e(ctx)
        if t == "f32":
            return lambda ctx: quant32(-e(ctx))
        if t == "f64":
            return lambda ctx: -e(ctx)
        lo, hi = INT_BOUNDS[t]
        def neg(ctx):
            v = -e(ctx)
            return lo if v < lo else hi if v > hi else v
        return neg
    if tag == "bin":
        t, op = ir[1], ir[2]
        l, r = compile_expr(ir[3], mod), compile_expr(ir[4], mod)
        if op in _CMP:
            return _CMP[op](l, r)
        if op == "and":
            return lambda ctx: l(ctx) and r(ctx)
        if op == "or":
            return lambda ctx: l(ctx) or r(ctx)
        if t in INT_BOUNDS:
            return _int_binop(op, l, r, *INT_BOUNDS[t])
        return _float_binop(op, l, r, t == "f32")
    if tag == "call":
        fn = ir[2]
        args = [compile_expr(a, mod) for a in ir[3]]
        if fn == "min":
            a, b = args
            return lambda ctx: min(a(ctx), b(ctx))
        if fn == "max":
            a, b = args
            return lambda ctx: max(a(ctx), b(ctx))
        x, lo, hi = args
        return lambda ctx: min(max(x(ctx), lo(ctx)), hi(ctx))
    if tag == "cast":
        t, e = ir[1], compile_expr(ir[2], mod)
        return lambda ctx: cast_value(t, e(ctx))
    if tag == "lut1":
        t, q = ir[1], f"{mod}.{ir[2]}"
        x = compile_expr(ir[3], mod)
        if t == "f32":
            return lambda ctx: quant32(interp1(ctx.maps[q], x(ctx)))
        return lambda ctx: interp1(ctx.maps[q], x(ctx))
    assert tag == "lut2"
    t, q = ir[1], f"{mod}.{ir[2]}"
    x = compile_expr(ir[3], mod)
    y = compile_expr(ir[4], mod)
    if t == "f32":
        return lambda ctx: quant32(interp2(ctx.maps[q], x(ctx), y(ctx)))
    return lambda ctx: interp2(ctx.maps[q], x(ctx), y(ctx))


def compile_stmt(ir: list, mod: str):
    tag = ir[0]
    if tag == "assign":
        kind, name = ir[1], ir[2]
        e = compile_expr(ir[3], mod)
        if kind == "sig":
            def run(ctx):
                ctx.signals[name] = e(ctx)
        elif kind == "sta":
            q = f"{mod}.{name}"
            def run(ctx):
                ctx.states[q] = e(ctx)
        else:
            def run(ctx):
                ctx.locals[name] = e(ctx)
        return run
    if tag == "let":
        name = ir[1]
        e = compile_expr(ir[3], mod)
        def let_run(ctx):
            ctx.locals[name] = e(ctx)
        return let_run
    assert tag == "if"
    cond = compile_expr(ir[1], mod)
    then = [compile_stmt(s, mod) for s in ir[2]]
    orelse = [compile_stmt(s, mod) for s in ir[3]]
    def if_run(ctx):
        for s in (then if cond(ctx) else orelse):
            s(ctx)
    return if_run


def compile_runnable(stmts: list, mod: str):
    fns = [compile_stmt(s, mod) for s in stmts]
    def run(ctx):
        ctx.locals = {}
        for f in fns:
            f(ctx)
    return run


def build_map(kind: str, elem_type: str, data, name: str):
    if kind == "map1":
        m = MapData1([float(v) for v in data[0]],
                     [float(v) for v in data[1]], name)
    else:
        m = MapData2([float(v) for v in data[0]],
                     [float(v) for v in data[1]],
                     [[float(v) for v in row] for row in data[2]], name)
    m.validate()
    return m
