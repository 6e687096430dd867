"""Type checking and lowering of runnable bodies.

Lowered statements and expressions are JSON-shaped lists so compiled
fragments serialize canonically:

    expr: ["lit", t, v] | ["sig"|"par"|"sta"|"loc", t, name]
        | ["un", t, op, e] | ["bin", t, op, l, r] | ["call", t, fn, [args]]
        | ["cast", t, e] | ["lut1", t, map, x] | ["lut2", t, map, x, y]
    stmt: ["assign", kind, name, e] | ["let", name, t, e]
        | ["if", cond, [then], [orelse]]

Every node carries its resolved type.  There are no implicit conversions:
operands must agree, and only cast<T>(e) changes a type.  Numeric literals
adopt the type the context requires.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import (ConflictingDeclaration, TypeConflict, UndeclaredSignal,
                      UnknownMap, WriteToInput)
from ..scalars import INT_BOUNDS, store_value
from ..specfmt.ast import (Assign, Binary, Call, Cast, If, Let, Lit, Lookup,
                           ModuleSpec, Name, TypeDictionary, Unary)

_COMPARES = ("<", "<=", ">", ">=", "==", "!=")


@dataclass
class CompiledModule:
    name: str
    interface: dict       # inputs/outputs/params/states, JSON-shaped
    code: dict            # runnable name -> list of lowered statements
    source_hash: str
    env_hash: str

    def to_obj(self) -> dict:
        return {"name": self.name, "interface": self.interface,
                "code": self.code, "source_hash": self.source_hash,
                "env_hash": self.env_hash}

    @classmethod
    def from_obj(cls, obj: dict) -> "CompiledModule":
        return cls(obj["name"], obj["interface"], obj["code"],
                   obj["source_hash"], obj["env_hash"])


# ------------------------------------------------- interface derivation

def body_io(module: ModuleSpec, dictionary: TypeDictionary):
    """Signals read and written by runnable bodies, locals/params/states
    excluded.  Names that resolve nowhere raise UndeclaredSignal."""
    param_names = {p.name for p in module.params}
    state_names = {s.name for s in module.states}
    reads: set[str] = set()
    writes: set[str] = set()

    def is_local(name, scopes):
        return any(name in s for s in scopes)

    def walk_expr(e, scopes):
        if isinstance(e, Name):
            if is_local(e.name, scopes) or e.name in state_names \
                    or e.name in param_names:
                return
            if e.name in dictionary.entries:
                reads.add(e.name)
                return
            raise UndeclaredSignal(e.name, e.line, e.col)
        if isinstance(e, Unary):
            walk_expr(e.operand, scopes)
        elif isinstance(e, Binary):
            walk_expr(e.lhs, scopes)
            walk_expr(e.rhs, scopes)
        elif isinstance(e, (Call, Lookup)):
            for a in e.args:
                walk_expr(a, scopes)
        elif isinstance(e, Cast):
            walk_expr(e.expr, scopes)

    def walk_stmt(s, scopes):
        if isinstance(s, Assign):
            walk_expr(s.expr, scopes)
            n = s.target
            if is_local(n, scopes) or n in state_names or n in param_names:
                return
            if n in dictionary.entries:
                writes.add(n)
                return
            raise UndeclaredSignal(n, s.line, s.col)
        if isinstance(s, Let):
            walk_expr(s.expr, scopes)
            scopes[-1].add(s.name)
        elif isinstance(s, If):
            walk_expr(s.cond, scopes)
            for branch in (s.then, s.orelse):
                scopes.append(set())
                for sub in branch:
                    walk_stmt(sub, scopes)
                scopes.pop()

    for r in module.runnables:
        scopes: list[set] = [set()]
        for s in r.body:
            walk_stmt(s, scopes)
    return reads, writes


# ------------------------------------------------------------ checking

def _lit_like(e) -> bool:
    if isinstance(e, Lit):
        return True
    return isinstance(e, Unary) and e.op == "-" and _lit_like(e.operand)


class _Checker:
    def __init__(self, module: ModuleSpec, input_types: dict, output_types: dict):
        self.input_types = input_types
        self.sig_types = {**input_types, **output_types}
        self.params = {p.name: p for p in module.params}
        self.states = {s.name: s.type for s in module.states}
        self.scopes: list[dict] = []

    def run(self, runnable) -> list:
        self.scopes = [{}]
        return [self.stmt(s) for s in runnable.body]

    # -- statements

    def stmt(self, s):
        if isinstance(s, Assign):
            kind, t = self._target(s)
            ir, _ = self.expr(s.expr, t)
            return ["assign", kind, s.target, ir]
        if isinstance(s, Let):
            if s.decl_type is not None:
                ir, t = self.expr(s.expr, s.decl_type)
            else:
                ir, t = self.expr(s.expr, None)
            n = s.name
            if n in self.states or n in self.params or n in self.sig_types \
                    or any(n in sc for sc in self.scopes):
                raise ConflictingDeclaration(n, "local shadows another name",
                                             s.line, s.col)
            self.scopes[-1][n] = t
            return ["let", n, t, ir]
        assert isinstance(s, If)
        cond, _ = self.expr(s.cond, "bool")
        branches = []
        for branch in (s.then, s.orelse):
            self.scopes.append({})
            branches.append([self.stmt(sub) for sub in branch])
            self.scopes.pop()
        return ["if", cond, branches[0], branches[1]]

    def _target(self, s: Assign):
        n = s.target
        for sc in reversed(self.scopes):
            if n in sc:
                return "loc", sc[n]
        if n in self.states:
            return "sta", self.states[n]
        if n in self.params:
            raise WriteToInput(n, s.line, s.col, what="parameter")
        if n in self.input_types:
            raise WriteToInput(n, s.line, s.col)
        if n in self.sig_types:
            return "sig", self.sig_types[n]
        raise UndeclaredSignal(n, s.line, s.col)

    # -- expressions

    def expr(self, e, want):
        if isinstance(e, Lit):
            return self._lit(e, want)
        if isinstance(e, Name):
            return self._name(e, want)
        if isinstance(e, Unary):
            return self._unary(e, want)
        if isinstance(e, Binary):
            return self._binary(e, want)
        if isinstance(e, Call):
            return self._call(e, want)
        if isinstance(e, Cast):
            inner, _ = self.expr(e.expr, None)
            if want not in (None, e.type):
                raise TypeConflict(f"cast yields {e.type} where {want} expected",
                                   e.line, e.col)
            return ["cast", e.type, inner], e.type
        assert isinstance(e, Lookup)
        return self._lookup(e, want)

    def _lit(self, e: Lit, want):
        v = e.value
        if isinstance(v, bool):
            if want in (None, "bool"):
                return ["lit", "bool", v], "bool"
            raise TypeConflict(f"bool literal where {want} expected",
                               e.line, e.col)
        if want is None:
            t = "f64" if isinstance(v, float) else "i32"
        elif want == "bool":
            raise TypeConflict("numeric literal where bool expected",
                               e.line, e.col)
        elif want in INT_BOUNDS and isinstance(v, float):
            raise TypeConflict(f"float literal where {want} expected",
                               e.line, e.col)
        else:
            t = want
        return ["lit", t, store_value(t, v)], t

    def _name(self, e: Name, want):
        n = e.name
        kind, t = None, None
        for sc in reversed(self.scopes):
            if n in sc:
                kind, t = "loc", sc[n]
                break
        if kind is None:
            if n in self.states:
                kind, t = "sta", self.states[n]
            elif n in self.params:
                p = self.params[n]
                if p.is_map:
                    raise TypeConflict(f"map parameter '{n}' used as a value",
                                       e.line, e.col)
                kind, t = "par", p.type
            elif n in self.sig_types:
                kind, t = "sig", self.sig_types[n]
            else:
                raise UndeclaredSignal(n, e.line, e.col)
        if want not in (None, t):
            raise TypeConflict(f"'{n}' has type {t} where {want} expected",
                               e.line, e.col)
        return [kind, t, n], t

    def _unary(self, e: Unary, want):
        if e.op == "not":
            if want not in (None, "bool"):
                raise TypeConflict(f"'not' yields bool where {want} expected",
                                   e.line, e.col)
            ir, _ = self.expr(e.operand, "bool")
            return ["un", "bool", "not", ir], "bool"
        ir, t = self.expr(e.operand, want)
        if t == "bool":
            raise TypeConflict("'-' needs a numeric operand", e.line, e.col)
        return ["un", t, "-", ir], t

    def _pair(self, lhs, rhs, want):
        """Check two operands that must share one type; returns (l, r, t)."""
        if want is not None:
            l, _ = self.expr(lhs, want)
            r, _ = self.expr(rhs, want)
            return l, r, want
        if _lit_like(lhs) and not _lit_like(rhs):
            r, t = self.expr(rhs, None)
            l, _ = self.expr(lhs, t)
            return l, r, t
        l, t = self.expr(lhs, None)
        r, _ = self.expr(rhs, t)
        return l, r, t

    def _binary(self, e: Binary, want):
        op = e.op
        if op in ("and", "or"):
            if want not in (None, "bool"):
                raise TypeConflict(f"'{op}' yields bool where {want} expected",
                                   e.line, e.col)
            l, _ = self.expr(e.lhs, "bool")
            r, _ = self.expr(e.rhs, "bool")
            return ["bin", "bool", op, l, r], "bool"
        if op in _COMPARES:
            if want not in (None, "bool"):
                raise TypeConflict(f"comparison yields bool where {want} "
                                   "expected", e.line, e.col)
            l, r, t = self._pair(e.lhs, e.rhs, None)
            if t == "bool" and op not in ("==", "!="):
                raise TypeConflict("ordering comparison on bool", e.line, e.col)
            return ["bin", "bool", op, l, r], "bool"
        if want == "bool":
            raise TypeConflict(f"'{op}' yields a number where bool expected",
                               e.line, e.col)
        l, r, t = self._pair(e.lhs, e.rhs, want)
        if t == "bool":
            raise TypeConflict(f"'{op}' needs numeric operands", e.line, e.col)
        if op == "%" and t not in INT_BOUNDS:
            raise TypeConflict("'%' needs integer operands", e.line, e.col)
        return ["bin", t, op, l, r], t

    def _call(self, e: Call, want):
        if want == "bool":
            raise TypeConflict(f"{e.fn} yields a number where bool expected",
                               e.line, e.col)
        if want is None:
            pivot = next((i for i, a in enumerate(e.args)
                          if not _lit_like(a)), 0)
            _, t = self.expr(e.args[pivot], None)
        else:
            t = want
        if t == "bool":
            raise TypeConflict(f"{e.fn} needs numeric arguments", e.line, e.col)
        irs = [self.expr(a, t)[0] for a in e.args]
        return ["call", t, e.fn, irs], t

    def _lookup(self, e: Lookup, want):
        p = self.params.get(e.map)
        if p is None or not p.is_map:
            raise UnknownMap(e.map, e.line, e.col)
        dims = 1 if p.map1 is not None else 2
        if dims != len(e.args):
            raise TypeConflict(f"'{e.map}' is a {dims}-D map, lookup{len(e.args)} "
                               "used", e.line, e.col)
        if want not in (None, p.type):
            raise TypeConflict(f"lookup yields {p.type} where {want} expected",
                               e.line, e.col)
        irs = [self.expr(a, p.type)[0] for a in e.args]
        tag = "lut1" if dims == 1 else "lut2"
        return [tag, p.type, e.map, *irs], p.type


# ----------------------------------------------------------- lowering

def _interface_obj(interface) -> dict:
    params = []
    for p in interface.params:
        if p.map1 is not None:
            params.append([p.name, "map1", p.type,
                           [p.map1.breakpoints, p.map1.values]])
        elif p.map2 is not None:
            params.append([p.name, "map2", p.type,
                           [p.map2.x_breakpoints, p.map2.y_breakpoints,
                            p.map2.values]])
        else:
            params.append([p.name, "scalar", p.type, p.default])
    return {
        "inputs": [list(pair) for pair in interface.inputs],
        "outputs": [list(pair) for pair in interface.outputs],
        "params": params,
        "states": [[s.name, s.type, s.init] for s in interface.states],
    }


def compile_module(module: ModuleSpec, interface) -> CompiledModule:
    checker = _Checker(module, dict(interface.inputs), dict(interface.outputs))
    code = {r.name: checker.run(r) for r in module.runnables}
    return CompiledModule(module.name, _interface_obj(interface), code,
                          module.source_hash, interface.env_hash)
