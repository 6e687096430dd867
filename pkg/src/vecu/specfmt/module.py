"""Module file (`.vmod`): declarations plus runnable bodies.

Layout:

    module Name
    inputs: a, b            # optional; types come from the dictionary
    outputs: x
    param Kp: f32 = 0.2
    param TqMap: map1 f32 = [0 50 100; 0 40 90]
    state Integ: f32 = 0.0
    runnable Run10ms {
      let err := Setpoint - a
      if err > 0.0 { x := clamp(err * Kp, 0.0, 50.0) } else { x := 0.0 }
    }

Statements are assignment (`:=`), `let`, and `if`/`else`; `;` separators are
optional.  Undeclared signal reads/writes inside bodies resolve against the
dictionary when the interface is derived, not here.
"""

from __future__ import annotations

import hashlib

from ..errors import (ConflictingDeclaration, DuplicateName, DuplicateRunnable,
                      TypeConflict, UndeclaredSignal, UnknownType)
from ..scalars import FLOAT_TYPES, canonical_type, check_literal, fmt_num
from .ast import (Assign, Binary, Call, Cast, If, Let, Lit, Lookup,
                  ModuleSpec, Name, ParamDecl, RunnableSpec, StateDecl,
                  TypeDictionary, Unary)
from .calibration import read_scalar_literal, read_table
from .tokens import TokenStream

RESERVED = {
    "module", "inputs", "outputs", "param", "state", "runnable",
    "let", "if", "else", "true", "false", "and", "or", "not",
    "cast", "min", "max", "clamp", "lookup1", "lookup2", "map1", "map2",
}

_CALL_ARITY = {"min": 2, "max": 2, "clamp": 3}
_COMPARE_OPS = ("<", "<=", ">", ">=", "==", "!=")


def _name_tok(ts: TokenStream, what: str):
    tok = ts.expect("ident", what=what)
    if tok.text in RESERVED:
        ts.error(f"{tok.text!r} is a reserved word", tok)
    return tok


def _type_name(ts: TokenStream) -> str:
    tok = ts.expect("ident", what="type name")
    t = canonical_type(tok.text)
    if t is None:
        raise UnknownType(tok.text, tok.line, tok.col)
    return t


# ------------------------------------------------------------- expressions


def parse_expr(ts: TokenStream):
    return _or_expr(ts)


def _or_expr(ts):
    e = _and_expr(ts)
    while ts.at("ident", "or"):
        op = ts.next()
        e = Binary("or", e, _and_expr(ts), op.line, op.col)
    return e


def _and_expr(ts):
    e = _not_expr(ts)
    while ts.at("ident", "and"):
        op = ts.next()
        e = Binary("and", e, _not_expr(ts), op.line, op.col)
    return e


def _not_expr(ts):
    if ts.at("ident", "not"):
        op = ts.next()
        return Unary("not", _not_expr(ts), op.line, op.col)
    return _comparison(ts)


def _comparison(ts):
    e = _additive(ts)
    tok = ts.peek()
    if tok.kind == "punct" and tok.text in _COMPARE_OPS:
        ts.next()
        # single comparison only; chain with parens and and/or
        return Binary(tok.text, e, _additive(ts), tok.line, tok.col)
    return e


def _additive(ts):
    e = _multiplicative(ts)
    while ts.at("punct", "+") or ts.at("punct", "-"):
        op = ts.next()
        e = Binary(op.text, e, _multiplicative(ts), op.line, op.col)
    return e


def _multiplicative(ts):
    e = _unary(ts)
    while ts.at("punct", "*") or ts.at("punct", "/") or ts.at("punct", "%"):
        op = ts.next()
        e = Binary(op.text, e, _unary(ts), op.line, op.col)
    return e


def _unary(ts):
    if ts.at("punct", "-"):
        op = ts.next()
        return Unary("-", _unary(ts), op.line, op.col)
    return _primary(ts)


def _primary(ts: TokenStream):
    tok = ts.peek()
    if tok.kind == "num":
        ts.next()
        return Lit(tok.value, tok.line, tok.col)
    if tok.kind == "punct" and tok.text == "(":
        ts.next()
        e = parse_expr(ts)
        ts.expect("punct", ")")
        return e
    if tok.kind != "ident":
        ts.error("expected an expression")
    if tok.text in ("true", "false"):
        ts.next()
        return Lit(tok.text == "true", tok.line, tok.col)
    if tok.text == "cast":
        ts.next()
        ts.expect("punct", "<")
        t = _type_name(ts)
        ts.expect("punct", ">")
        ts.expect("punct", "(")
        e = parse_expr(ts)
        ts.expect("punct", ")")
        return Cast(t, e, tok.line, tok.col)
    if tok.text in _CALL_ARITY:
        ts.next()
        ts.expect("punct", "(")
        args = [parse_expr(ts)]
        while ts.accept("punct", ","):
            args.append(parse_expr(ts))
        ts.expect("punct", ")")
        if len(args) != _CALL_ARITY[tok.text]:
            ts.error(f"{tok.text} takes {_CALL_ARITY[tok.text]} arguments, "
                     f"got {len(args)}", tok)
        return Call(tok.text, args, tok.line, tok.col)
    if tok.text in ("lookup1", "lookup2"):
        ts.next()
        n_axes = 1 if tok.text == "lookup1" else 2
        ts.expect("punct", "(")
        map_name = _name_tok(ts, "map name").text
        args = []
        for _ in range(n_axes):
            ts.expect("punct", ",")
            args.append(parse_expr(ts))
        ts.expect("punct", ")")
        return Lookup(map_name, args, tok.line, tok.col)
    if tok.text in RESERVED:
        ts.error(f"{tok.text!r} is a reserved word", tok)
    ts.next()
    return Name(tok.text, tok.line, tok.col)


# -------------------------------------------------------------- statements


def _block(ts: TokenStream) -> list:
    ts.expect("punct", "{")
    stmts = []
    while not ts.at("punct", "}"):
        stmts.append(_statement(ts))
    ts.expect("punct", "}")
    return stmts


def _statement(ts: TokenStream):
    tok = ts.peek()
    if tok.kind == "ident" and tok.text == "let":
        ts.next()
        name = _name_tok(ts, "local name").text
        decl_type = None
        if ts.accept("punct", ":"):
            decl_type = _type_name(ts)
        ts.expect("punct", ":=")
        e = parse_expr(ts)
        ts.accept("punct", ";")
        return Let(name, decl_type, e, tok.line, tok.col)
    if tok.kind == "ident" and tok.text == "if":
        ts.next()
        cond = parse_expr(ts)
        then = _block(ts)
        orelse = []
        if ts.at("ident", "else"):
            ts.next()
            if ts.at("ident", "if"):
                orelse = [_statement(ts)]
            else:
                orelse = _block(ts)
        return If(cond, then, orelse, tok.line, tok.col)
    target = _name_tok(ts, "assignment target")
    ts.expect("punct", ":=")
    e = parse_expr(ts)
    ts.accept("punct", ";")
    return Assign(target.text, e, target.line, target.col)


# ------------------------------------------------------------ declarations


def _read_io_list(ts, dictionary: TypeDictionary, into: list, kind: str,
                  declared: dict):
    while True:
        tok = _name_tok(ts, f"{kind} name")
        if tok.text not in dictionary.entries:
            raise UndeclaredSignal(tok.text, tok.line, tok.col)
        prior = declared.get(tok.text)
        if prior == kind:
            raise DuplicateName(tok.text, tok.line, tok.col)
        if prior is not None:
            raise ConflictingDeclaration(
                tok.text, f"declared as both {prior} and {kind}",
                tok.line, tok.col)
        declared[tok.text] = kind
        into.append(tok.text)
        if not ts.accept("punct", ","):
            return


def _check_declared(tok, kind: str, declared: dict):
    prior = declared.get(tok.text)
    if prior == kind:
        raise DuplicateName(tok.text, tok.line, tok.col)
    if prior is not None:
        raise ConflictingDeclaration(tok.text,
                                     f"declared as both {prior} and {kind}",
                                     tok.line, tok.col)
    declared[tok.text] = kind


def _parse_param(ts: TokenStream, declared: dict) -> ParamDecl:
    kw = ts.next()  # 'param'
    name_tok = _name_tok(ts, "parameter name")
    _check_declared(name_tok, "param", declared)
    ts.expect("punct", ":")
    dim = 0
    if ts.at("ident", "map1") or ts.at("ident", "map2"):
        dim = 1 if ts.next().text == "map1" else 2
    type_tok = ts.peek()
    t = _type_name(ts)
    ts.expect("punct", "=")
    if dim == 0:
        value, lit_tok = read_scalar_literal(ts)
        if not check_literal(t, value):
            raise TypeConflict(f"default for '{name_tok.text}' does not fit {t}",
                               lit_tok.line, lit_tok.col)
        return ParamDecl(name_tok.text, t, default=value,
                         line=kw.line, col=kw.col)
    if t not in FLOAT_TYPES:
        raise TypeConflict(f"map parameter '{name_tok.text}' must be f32 or "
                           f"f64, not {t}", type_tok.line, type_tok.col)
    table = read_table(ts, name_tok.text)
    got_dim = 1 if hasattr(table, "breakpoints") else 2
    if got_dim != dim:
        raise TypeConflict(f"'{name_tok.text}' declared map{dim} but "
                           f"initialized as map{got_dim}",
                           name_tok.line, name_tok.col)
    if dim == 1:
        return ParamDecl(name_tok.text, t, map1=table, line=kw.line, col=kw.col)
    return ParamDecl(name_tok.text, t, map2=table, line=kw.line, col=kw.col)


def _parse_state(ts: TokenStream, declared: dict) -> StateDecl:
    kw = ts.next()  # 'state'
    name_tok = _name_tok(ts, "state name")
    _check_declared(name_tok, "state", declared)
    ts.expect("punct", ":")
    t = _type_name(ts)
    ts.expect("punct", "=")
    value, lit_tok = read_scalar_literal(ts)
    if not check_literal(t, value):
        raise TypeConflict(f"initial value for '{name_tok.text}' does not fit {t}",
                           lit_tok.line, lit_tok.col)
    return StateDecl(name_tok.text, t, value, kw.line, kw.col)


def _parse_runnable(ts: TokenStream, seen: set) -> RunnableSpec:
    kw = ts.next()  # 'runnable'
    name_tok = _name_tok(ts, "runnable name")
    if name_tok.text in seen:
        raise DuplicateRunnable(name_tok.text, name_tok.line, name_tok.col)
    seen.add(name_tok.text)
    body = _block(ts)
    return RunnableSpec(name_tok.text, body, kw.line, kw.col)


def parse_module(text: str, dictionary: TypeDictionary,
                 path: str | None = None) -> ModuleSpec:
    ts = TokenStream(text, path)
    ts.expect("ident", "module", what="'module'")
    name = _name_tok(ts, "module name").text
    inputs: list[str] = []
    outputs: list[str] = []
    params: list[ParamDecl] = []
    states: list[StateDecl] = []
    runnables: list[RunnableSpec] = []
    declared: dict[str, str] = {}
    runnable_names: set[str] = set()
    while not ts.at_eof():
        tok = ts.peek()
        if tok.kind != "ident":
            ts.error("expected a declaration")
        if tok.text == "inputs":
            ts.next()
            ts.expect("punct", ":")
            _read_io_list(ts, dictionary, inputs, "input", declared)
        elif tok.text == "outputs":
            ts.next()
            ts.expect("punct", ":")
            _read_io_list(ts, dictionary, outputs, "output", declared)
        elif tok.text == "param":
            params.append(_parse_param(ts, declared))
        elif tok.text == "state":
            states.append(_parse_state(ts, declared))
        elif tok.text == "runnable":
            runnables.append(_parse_runnable(ts, runnable_names))
        else:
            ts.error(f"expected a declaration, found {tok.text!r}")
    digest = hashlib.sha256(text.encode("utf-8")).hexdigest()
    return ModuleSpec(name, inputs, outputs, params, states, runnables, digest)


# ---------------------------------------------------------- pretty printer

_PREC = {"or": 1, "and": 2,
         "<": 4, "<=": 4, ">": 4, ">=": 4, "==": 4, "!=": 4,
         "+": 5, "-": 5, "*": 6, "/": 6, "%": 6}


def _lit_text(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    return fmt_num(v)


def expr_text(e, min_prec: int = 0) -> str:
    if isinstance(e, Lit):
        return _lit_text(e.value)
    if isinstance(e, Name):
        return e.name
    if isinstance(e, Cast):
        return f"cast<{e.type}>({expr_text(e.expr)})"
    if isinstance(e, Call):
        return e.fn + "(" + ", ".join(expr_text(a) for a in e.args) + ")"
    if isinstance(e, Lookup):
        inner = ", ".join(expr_text(a) for a in e.args)
        return f"lookup{len(e.args)}({e.map}, {inner})"
    if isinstance(e, Unary):
        if e.op == "-":
            s = "-" + expr_text(e.operand, 7)
            return s if min_prec <= 7 else f"({s})"
        s = "not " + expr_text(e.operand, 3)
        return s if min_prec <= 3 else f"({s})"
    assert isinstance(e, Binary)
    prec = _PREC[e.op]
    if prec == 4:
        s = f"{expr_text(e.lhs, 5)} {e.op} {expr_text(e.rhs, 5)}"
    else:
        s = f"{expr_text(e.lhs, prec)} {e.op} {expr_text(e.rhs, prec + 1)}"
    return s if prec >= min_prec else f"({s})"


def _stmt_lines(stmts, indent: int, out: list):
    pad = "  " * indent
    for s in stmts:
        if isinstance(s, Assign):
            out.append(f"{pad}{s.target} := {expr_text(s.expr)}")
        elif isinstance(s, Let):
            t = f": {s.decl_type}" if s.decl_type else ""
            out.append(f"{pad}let {s.name}{t} := {expr_text(s.expr)}")
        else:
            out.append(f"{pad}if {expr_text(s.cond)} {{")
            _stmt_lines(s.then, indent + 1, out)
            if s.orelse:
                out.append(f"{pad}}} else {{")
                _stmt_lines(s.orelse, indent + 1, out)
            out.append(f"{pad}}}")


def _row(vals) -> str:
    return " ".join(fmt_num(v) for v in vals)


def print_module(m: ModuleSpec) -> str:
    lines = [f"module {m.name}", ""]
    if m.inputs:
        lines.append("inputs: " + ", ".join(m.inputs))
    if m.outputs:
        lines.append("outputs: " + ", ".join(m.outputs))
    if m.inputs or m.outputs:
        lines.append("")
    for p in m.params:
        if p.map1 is not None:
            lines.append(f"param {p.name}: map1 {p.type} = "
                         f"[{_row(p.map1.breakpoints)}; {_row(p.map1.values)}]")
        elif p.map2 is not None:
            grid = " | ".join(_row(r) for r in p.map2.values)
            lines.append(f"param {p.name}: map2 {p.type} = "
                         f"[{_row(p.map2.x_breakpoints)}; "
                         f"{_row(p.map2.y_breakpoints)}; {grid}]")
        else:
            lines.append(f"param {p.name}: {p.type} = {_lit_text(p.default)}")
    for st in m.states:
        lines.append(f"state {st.name}: {st.type} = {_lit_text(st.init)}")
    if m.params or m.states:
        lines.append("")
    for r in m.runnables:
        lines.append(f"runnable {r.name} {{")
        _stmt_lines(r.body, 1, lines)
        lines.append("}")
        lines.append("")
    while lines and lines[-1] == "":
        lines.pop()
    return "\n".join(lines) + "\n"
