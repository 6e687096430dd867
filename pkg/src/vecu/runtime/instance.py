"""A loaded, steppable vECU: signal table, param/state stores, clock.

Value precedence for parameters: compiled defaults, overlaid by a
calibration file at load, overlaid by live tuning. Bypass outputs are
latched: once supplied they persist until resupplied or the module
leaves bypass.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import (AmbiguousParameter, NotExposed, TypeMismatch,
                      UnknownParameter, UnknownSignal, VecuError)
from ..scalars import (MapData1, MapData2, cast_value, is_float, is_int,
                       zero)
from ..specfmt import parse_calibration
from .. import oskernel
from .exec import ExecContext, build_map, compile_runnable
from .trace import Trace


@dataclass
class MeasurementConfig:
    recorded: list
    decimation: int = 1


class VEcuInstance:
    def __init__(self, image):
        self.image = image
        self.clock = 0
        self.bypass_active: set = set()
        self.diagnostics = {"div_by_zero": 0}
        self.measurement: MeasurementConfig | None = None

        self.signals: dict = {}
        self.sig_types: dict = {}
        for name, stype, _producer, init in image.signal_table:
            self.signals[name] = init
            self.sig_types[name] = stype

        # param/state/map stores use qualified "Module.Name" keys
        self.params: dict = {}
        self.param_types: dict = {}
        self.maps: dict = {}
        self.map_kinds: dict = {}      # qname -> ("map1"|"map2", elem type)
        self.states: dict = {}
        self.state_types: dict = {}
        self.executables: dict = {}
        for mod in image.modules:
            mname = mod["name"]
            iface = mod["interface"]
            for entry in iface["params"]:
                pname, kind, ptype = entry[0], entry[1], entry[2]
                q = f"{mname}.{pname}"
                if kind == "scalar":
                    self.params[q] = cast_value(ptype, entry[3])
                    self.param_types[q] = ptype
                else:
                    self.maps[q] = build_map(kind, ptype, entry[3], q)
                    self.map_kinds[q] = (kind, ptype)
            for sname, stype, init in iface["states"]:
                q = f"{mname}.{sname}"
                self.states[q] = cast_value(stype, init)
                self.state_types[q] = stype
            for rname, stmts in sorted(mod["code"].items()):
                self.executables[f"{mname}.{rname}"] = (
                    mname, compile_runnable(stmts, mname))

        self.ctx = ExecContext(self.signals, self.params, self.states,
                               self.maps, self.diagnostics)
        self.schedule = image.os_events
        self.tunables = {q: t for q, t in image.exposed["tunables"]}
        self.bypassable = image.exposed["bypass"]
        self._bypass_latch: dict = {}
        crank = image.crank_angle_signal
        self._crank_prev = self.signals.get(crank, 0.0) if crank else 0.0

    # ------------------------------------------------------------ tuning

    def _resolve_tunable(self, name: str) -> str:
        if "." in name:
            if name not in self.tunables:
                raise NotExposed(name)
            return name
        hits = [q for q in self.tunables if q.split(".", 1)[1] == name]
        if not hits:
            raise NotExposed(name)
        if len(hits) > 1:
            raise AmbiguousParameter(name, hits)
        return hits[0]

    def set_parameter(self, name: str, value) -> None:
        q = self._resolve_tunable(name)
        t = self.tunables[q]
        self.params[q] = _checked_scalar(q, t, value)

    def read_signal(self, name: str):
        if name in self.signals:
            return self.signals[name]
        if name in self.tunables:
            return self.params[name]
        raise UnknownSignal(name)

    # ------------------------------------------------------------ bypass

    def set_bypass_active(self, module: str, active: bool) -> None:
        if module not in self.bypassable:
            raise NotExposed(module)
        if active:
            self.bypass_active.add(module)
        else:
            self.bypass_active.discard(module)
            for out in self.bypassable[module]["outputs"]:
                self._bypass_latch.pop(out, None)

    def _active_bypass_outputs(self) -> set:
        outs = set()
        for module in self.bypass_active:
            outs.update(self.bypassable[module]["outputs"])
        return outs

    # ------------------------------------------------------------ stepping

    def step(self, external_inputs=None, injected_events=(),
             bypass_outputs=None):
        self.clock += 1
        if external_inputs:
            for name, value in external_inputs.items():
                self._write_external(name, value)
        allowed = self._active_bypass_outputs() if (
            bypass_outputs or self._bypass_latch) else set()
        if bypass_outputs:
            for name, value in bypass_outputs.items():
                if name not in allowed:
                    raise UnknownSignal(name)
                self._bypass_latch[name] = value
        for name, value in self._bypass_latch.items():
            if name in allowed:
                self.signals[name] = _coerce_signal(
                    name, self.sig_types[name], value)
        crank_now = self._crank_prev
        crank_sig = self.image.crank_angle_signal
        if crank_sig:
            crank_now = self.signals[crank_sig]
        due = oskernel.events_due(self.clock, self._crank_prev, crank_now,
                                  injected_events, self.schedule)
        self._crank_prev = crank_now
        oskernel.dispatch(due, self)
        meas = self.measurement
        if meas and self.clock % meas.decimation == 0:
            return self.sample_row(meas.recorded)
        return None

    def sample_row(self, recorded) -> list:
        row = [self.clock]
        for name in recorded:
            v = self.read_signal(name)
            row.append(int(v) if isinstance(v, bool) else v)
        return row

    def _write_external(self, name: str, value) -> None:
        t = self.sig_types.get(name)
        if t is not None:
            self.signals[name] = _coerce_signal(name, t, value)
            return
        if "." in name:
            if name in self.tunables:
                self.set_parameter(name, value)
                return
        else:
            hits = [q for q in self.tunables if q.split(".", 1)[1] == name]
            if hits:
                self.set_parameter(name, value)
                return
        raise UnknownSignal(name)


def _coerce_signal(name: str, t: str, value):
    if t == "bool":
        if isinstance(value, bool) or (isinstance(value, int)
                                       and value in (0, 1)):
            return bool(value)
        raise TypeMismatch(name, f"expected bool, got {value!r}")
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise TypeMismatch(name, f"expected {t}, got {value!r}")
    if is_int(t) and isinstance(value, float):
        raise TypeMismatch(name, f"expected {t}, got float {value!r}")
    return cast_value(t, value)


def _checked_scalar(name: str, t: str, value):
    if t == "bool":
        if not isinstance(value, bool):
            raise TypeMismatch(name, f"expected bool, got {value!r}")
        return value
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise TypeMismatch(name, f"expected {t}, got {value!r}")
    if is_int(t) and isinstance(value, float):
        raise TypeMismatch(name, f"expected {t}, got float {value!r}")
    return cast_value(t, value)


def _apply_calibration(instance: VEcuInstance, cal) -> None:
    def resolve(name: str, stores: dict) -> str:
        if "." in name:
            if name in stores:
                return name
            raise UnknownParameter(name)
        hits = [q for q in stores if q.split(".", 1)[1] == name]
        if not hits:
            raise UnknownParameter(name)
        if len(hits) > 1:
            raise AmbiguousParameter(name, hits)
        return hits[0]

    everything = dict.fromkeys(instance.param_types)
    everything.update(dict.fromkeys(instance.map_kinds))
    for name, value in cal.scalars.items():
        q = resolve(name, everything)
        if q in instance.map_kinds:
            raise TypeMismatch(q, "scalar value supplied for a map parameter")
        instance.params[q] = _checked_scalar(q, instance.param_types[q], value)
    for kind, table in (("map1", cal.maps1d), ("map2", cal.maps2d)):
        for name, data in table.items():
            q = resolve(name, everything)
            if q in instance.param_types:
                raise TypeMismatch(q, "table supplied for a scalar parameter")
            want, elem = instance.map_kinds[q]
            if want != kind:
                raise TypeMismatch(
                    q, f"{kind} data supplied for a {want} parameter")
            if kind == "map1":
                instance.maps[q] = MapData1(list(data.breakpoints),
                                            list(data.values), q)
            else:
                instance.maps[q] = MapData2(
                    list(data.x_breakpoints), list(data.y_breakpoints),
                    [list(r) for r in data.values], q)


def load_vecu(image, calibration_text: str | None = None) -> VEcuInstance:
    instance = VEcuInstance(image)
    if calibration_text is not None:
        _apply_calibration(instance, parse_calibration(calibration_text))
    return instance


def set_parameter(instance: VEcuInstance, name: str, value) -> None:
    instance.set_parameter(name, value)


def read_signal(instance: VEcuInstance, name: str):
    return instance.read_signal(name)


def run(instance: VEcuInstance, duration_ms: int, input_schedule=None,
        measurement: MeasurementConfig | None = None) -> Trace:
    if not isinstance(duration_ms, int) or duration_ms <= 0:
        raise VecuError(f"duration must be a positive integer, got {duration_ms}")
    meas = measurement or MeasurementConfig(
        list(instance.image.default_recorded), 1)
    if not isinstance(meas.decimation, int) or meas.decimation < 1:
        raise VecuError(f"decimation must be >= 1, got {meas.decimation}")
    for name in meas.recorded:
        if name not in instance.sig_types and name not in instance.tunables:
            raise UnknownSignal(name)
    schedule = input_schedule or {}
    instance.measurement = meas
    rows = []
    for _ in range(duration_ms):
        target = instance.clock + 1
        inputs: dict = {}
        events: list = []
        keys = [target]
        if target == 1 and 0 in schedule:
            keys.insert(0, 0)
        for key in keys:
            entry = schedule.get(key)
            if entry is None:
                continue
            more_inputs, more_events = entry
            inputs.update(more_inputs or {})
            events.extend(more_events or ())
        try:
            row = instance.step(inputs, events)
        except VecuError as exc:
            if "t=" not in exc.message:
                exc.message = f"at t={target}ms: {exc.message}"
                exc.args = (exc.message,)
            raise
        if row is not None:
            rows.append(row)
    return Trace(["t_ms"] + list(meas.recorded), rows)
