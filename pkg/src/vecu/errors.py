"""Error hierarchy for the vecu toolkit.

Every error that originates in a text input carries the line and column
(1-based) of its first offending token.  The CLI maps error families to
fixed exit codes: parse 2, type 3, link 4, I/O 5, runtime 6.
"""

from __future__ import annotations


class VecuError(Exception):
    exit_code = 1

    def __init__(self, message: str, *, line: int | None = None,
                 column: int | None = None, path: str | None = None):
        super().__init__(message)
        self.message = message
        self.line = line
        self.column = column
        self.path = path

    def __str__(self) -> str:
        loc = ""
        if self.path:
            loc += self.path
        if self.line is not None:
            loc += f"{':' if loc else 'line '}{self.line}"
            if self.column is not None:
                loc += f":{self.column}"
        return f"{loc}: {self.message}" if loc else self.message


# ---------------------------------------------------------------- parse (2)

class ParseError(VecuError):
    exit_code = 2


class VecuSyntaxError(ParseError):
    def __init__(self, message: str, line: int, column: int, path: str | None = None):
        super().__init__(message, line=line, column=column, path=path)


class DuplicateName(ParseError):
    def __init__(self, name: str, line: int | None = None, column: int | None = None):
        super().__init__(f"duplicate name '{name}'", line=line, column=column)
        self.name = name


class UnknownType(ParseError):
    def __init__(self, token: str, line: int | None = None, column: int | None = None):
        super().__init__(f"unknown type '{token}'", line=line, column=column)
        self.token = token


class UndeclaredSignal(ParseError):
    def __init__(self, name: str, line: int | None = None, column: int | None = None):
        super().__init__(f"signal '{name}' is not in the type dictionary",
                         line=line, column=column)
        self.name = name


class DuplicateRunnable(ParseError):
    def __init__(self, name: str, line: int | None = None, column: int | None = None):
        super().__init__(f"duplicate runnable '{name}'", line=line, column=column)
        self.name = name


class BadPeriod(ParseError):
    def __init__(self, value, line: int | None = None, column: int | None = None):
        super().__init__(f"period must be a positive integer, got {value}",
                         line=line, column=column)
        self.value = value


class BadAngle(ParseError):
    def __init__(self, value, line: int | None = None, column: int | None = None):
        super().__init__(f"angle must lie in [0, 720), got {value}",
                         line=line, column=column)
        self.value = value


class UnknownKey(ParseError):
    def __init__(self, key: str, line: int | None = None, column: int | None = None):
        super().__init__(f"unknown key '{key}'", line=line, column=column)
        self.key = key


class NonAscendingBreakpoints(ParseError):
    def __init__(self, name: str, line: int | None = None, column: int | None = None):
        super().__init__(f"breakpoints of '{name}' are not strictly ascending",
                         line=line, column=column)
        self.name = name


class DimensionMismatch(ParseError):
    def __init__(self, name: str, detail: str = "", line: int | None = None,
                 column: int | None = None):
        msg = f"map '{name}' has inconsistent dimensions"
        if detail:
            msg += f": {detail}"
        super().__init__(msg, line=line, column=column)
        self.name = name


# ------------------------------------------------------------- compile (3)

class CompileError(VecuError):
    exit_code = 3


class TypeConflict(CompileError):
    def __init__(self, detail: str, line: int | None = None, column: int | None = None):
        super().__init__(f"type conflict: {detail}", line=line, column=column)


class UnknownMap(CompileError):
    def __init__(self, name: str, line: int | None = None, column: int | None = None):
        super().__init__(f"'{name}' is not a declared map parameter",
                         line=line, column=column)
        self.name = name


class WriteToInput(CompileError):
    def __init__(self, name: str, line: int | None = None,
                 column: int | None = None, what: str = "input"):
        super().__init__(f"runnable writes to {what} '{name}'",
                         line=line, column=column)
        self.name = name


class ConflictingDeclaration(CompileError):
    def __init__(self, name: str, detail: str, line: int | None = None,
                 column: int | None = None):
        super().__init__(f"conflicting declaration of '{name}': {detail}",
                         line=line, column=column)
        self.name = name


# ---------------------------------------------------------------- link (4)

class LinkError(VecuError):
    exit_code = 4


class UnresolvedRunnable(LinkError):
    def __init__(self, ref: str):
        super().__init__(f"schedule references undefined runnable '{ref}'")
        self.ref = ref


class MultipleProducers(LinkError):
    def __init__(self, signal: str, producers):
        super().__init__(
            f"signal '{signal}' is written by more than one module: "
            + ", ".join(sorted(producers)))
        self.signal = signal
        self.producers = tuple(sorted(producers))


class MissingCrankSignal(LinkError):
    def __init__(self):
        super().__init__("schedule has angular events but the config names "
                         "no crank angle signal")


# ----------------------------------------------------------------- I/O (5)

class IoError(VecuError):
    exit_code = 5


class MissingFile(IoError):
    def __init__(self, module: str, path: str):
        super().__init__(f"source of cached module '{module}' is missing", path=path)
        self.module = module


class VersionMismatch(IoError):
    def __init__(self, found, supported):
        super().__init__(f"image format version {found} not supported "
                         f"(this build reads {supported})")
        self.found = found


class CorruptImage(IoError):
    def __init__(self, detail: str):
        super().__init__(f"corrupt image: {detail}")


class CorruptTrace(IoError):
    def __init__(self, detail: str, line: int | None = None):
        super().__init__(f"corrupt trace: {detail}", line=line)


class NoSharedColumns(IoError):
    def __init__(self):
        super().__init__("traces share no signal columns")


# ------------------------------------------------------------- runtime (6)

class RuntimeFault(VecuError):
    exit_code = 6


class UnknownParameter(RuntimeFault):
    def __init__(self, name: str):
        super().__init__(f"no module declares parameter '{name}'")
        self.name = name


class AmbiguousParameter(RuntimeFault):
    def __init__(self, name: str, candidates):
        super().__init__(f"parameter '{name}' is declared by several modules: "
                         + ", ".join(sorted(candidates)))
        self.name = name


class TypeMismatch(RuntimeFault):
    def __init__(self, name: str, detail: str):
        super().__init__(f"value for '{name}' has the wrong type: {detail}")
        self.name = name


class NotExposed(RuntimeFault):
    def __init__(self, name: str):
        super().__init__(f"parameter '{name}' is not an exposed tunable")
        self.name = name


class UnknownSignal(RuntimeFault):
    def __init__(self, name: str):
        super().__init__(f"unknown signal '{name}'")
        self.name = name


class UnknownEvent(RuntimeFault):
    def __init__(self, name: str):
        super().__init__(f"unknown aperiodic event '{name}'")
        self.name = name


class RunnableFault(RuntimeFault):
    def __init__(self, ref: str, diagnostic: str, t_ms: int | None = None):
        at = f" at t={t_ms}ms" if t_ms is not None else ""
        super().__init__(f"runnable '{ref}' faulted{at}: {diagnostic}")
        self.ref = ref
        self.diagnostic = diagnostic
        self.t_ms = t_ms


class BindingError(RuntimeFault):
    def __init__(self, name: str, detail: str):
        super().__init__(f"binding error for '{name}': {detail}")
        self.name = name


class BadRatio(RuntimeFault):
    def __init__(self, k):
        super().__init__(f"coupling ratio must be an integer >= 1, got {k}")
        self.k = k


class NonFiniteState(RuntimeFault):
    def __init__(self, field: str, value):
        super().__init__(f"plant state '{field}' became non-finite ({value})")
        self.field = field
