"""Interface derivation: the typed boundary of one module.

Inputs and outputs are the declared lists plus every dictionary signal a
runnable body reads or writes; types come from the dictionary only.  The
wrapper also fixes the module's environment digest: the dictionary entries
it uses plus the config flags that change its compiled form.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import ConflictingDeclaration
from ..specfmt.ast import ModuleSpec, ParamDecl, StateDecl, TypeDictionary, VecuConfig
from .canon import digest_of
from .compile import body_io


def env_digest(used: dict[str, str], bypassable: bool, tunable: bool) -> str:
    obj = {"dict": sorted([n, t] for n, t in used.items()),
           "bypassable": bypassable, "tunable": tunable}
    return digest_of(obj)


@dataclass
class Interface:
    module: str
    inputs: list[tuple[str, str]]      # declared order, then derived (sorted)
    outputs: list[tuple[str, str]]
    params: list[ParamDecl] = field(default_factory=list)
    states: list[StateDecl] = field(default_factory=list)
    bypassable: bool = False
    tunable: bool = False
    env_hash: str = ""


def generate_wrapper(module: ModuleSpec, dictionary: TypeDictionary,
                     config: VecuConfig) -> Interface:
    reads, writes = body_io(module, dictionary)
    for out in module.outputs:
        if out not in writes:
            raise ConflictingDeclaration(out, "declared output is never written")
    declared = set(module.inputs) | set(module.outputs)
    extra_out = sorted(writes - declared)
    extra_in = sorted(reads - writes - declared)
    inputs = [(n, dictionary.entries[n]) for n in list(module.inputs) + extra_in]
    outputs = [(n, dictionary.entries[n]) for n in list(module.outputs) + extra_out]
    used = {n: t for n, t in inputs + outputs}
    bypassable = module.name in config.bypassable_modules
    tunable = module.name in config.exposed_tunable_modules
    return Interface(module.name, inputs, outputs, module.params, module.states,
                     bypassable, tunable,
                     env_digest(used, bypassable, tunable))
