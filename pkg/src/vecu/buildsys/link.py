"""Link: merge compiled fragments with the OS table into one image.

Always runs, always deterministic: module order in equals module order out
(name-sorted), the signal table is name-sorted, and the image digest is
computed over the canonical payload bytes.
"""

from __future__ import annotations

from ..errors import (LinkError, MissingCrankSignal, MultipleProducers,
                      UndeclaredSignal, UnresolvedRunnable)
from ..scalars import zero
from ..specfmt.ast import OsSpec, TypeDictionary, VecuConfig
from .compile import CompiledModule
from .image import FORMAT_VERSION, VEcuImage, image_from_payload


def _event_obj(ev) -> dict:
    return {"kind": ev.kind, "period": ev.period, "offset": ev.offset,
            "angle": ev.angle, "name": ev.name, "runnables": list(ev.runnables)}


def link(compiled_modules, os_spec: OsSpec, config: VecuConfig,
         dictionary: TypeDictionary) -> VEcuImage:
    compiled_modules = list(compiled_modules)
    mods = {m.name: m for m in compiled_modules}
    if len(mods) != len(compiled_modules):
        raise LinkError("duplicate module names supplied to link")

    defined = {f"{m.name}.{r}" for m in mods.values() for r in m.code}
    for ref in sorted(config.eliminated_runnables):
        if ref not in defined:
            raise LinkError(f"eliminated runnable '{ref}' is not defined")
    for group, names in (("bypassable", config.bypassable_modules),
                         ("exposed_tunables", config.exposed_tunable_modules)):
        for n in sorted(names):
            if n not in mods:
                raise LinkError(f"{group} names unknown module '{n}'")

    events = []
    for ev in os_spec.events:
        kept = []
        for ref in ev.runnables:
            if ref in config.eliminated_runnables:
                continue
            if ref not in defined:
                raise UnresolvedRunnable(ref)
            kept.append(ref)
        obj = _event_obj(ev)
        obj["runnables"] = kept    # may be empty after elimination
        events.append(obj)

    producers: dict[str, str] = {}
    for name in sorted(mods):
        for sig, _t in mods[name].interface["outputs"]:
            if sig in producers:
                raise MultipleProducers(sig, [producers[sig], name])
            producers[sig] = name

    signals: dict[str, str] = {}
    for m in mods.values():
        for sig, t in m.interface["inputs"] + m.interface["outputs"]:
            signals[sig] = t

    crank = config.crank_angle_signal
    if any(ev["kind"] == "angular" for ev in events) and not crank:
        raise MissingCrankSignal()
    if crank:
        if crank not in dictionary.entries:
            raise UndeclaredSignal(crank)
        signals.setdefault(crank, dictionary.entries[crank])

    for sig in config.default_recorded_signals:
        if sig not in signals:
            raise UndeclaredSignal(sig)

    table = [[name, signals[name], producers.get(name, ""), zero(signals[name])]
             for name in sorted(signals)]

    tunables = []
    for name in sorted(config.exposed_tunable_modules):
        for pname, pkind, ptype, _data in mods[name].interface["params"]:
            if pkind == "scalar":
                tunables.append([f"{name}.{pname}", ptype])
    bypass = {}
    for name in sorted(config.bypassable_modules):
        iface = mods[name].interface
        bypass[name] = {"inputs": [s for s, _ in iface["inputs"]],
                        "outputs": [s for s, _ in iface["outputs"]]}

    payload = {
        "format_version": FORMAT_VERSION,
        "modules": [mods[n].to_obj() for n in sorted(mods)],
        "os": events,
        "signal_table": table,
        "exposed": {
            "inputs": sorted(s for s in signals if s not in producers),
            "outputs": sorted(producers),
            "tunables": tunables,
            "bypass": bypass,
        },
        "crank_angle_signal": crank,
        "default_recorded": list(config.default_recorded_signals),
    }
    return image_from_payload(payload)
