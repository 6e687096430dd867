"""Closed-loop co-simulation of a vECU instance with the engine plant.

Per tick: plant sensors (via the binding map) and scenario rows feed the
vECU step, then the vECU's actuator signals feed the plant. The rate
coupling variant sub-steps the plant k times per tick (plant_fast) or
steps it once every k ticks with latched actuators (plant_slow).
"""

from __future__ import annotations

from ..errors import BadRatio, BindingError, UnknownSignal
from ..runtime.instance import MeasurementConfig, VEcuInstance
from ..runtime.trace import Trace
from .model import ACTUATOR_NAMES, SENSOR_NAMES, Plant, plant_step
from .scenario import Scenario

PLANT_COLUMNS = {
    "plant.speed_rpm": lambda s: s.speed_rpm,
    "plant.crank_angle": lambda s: s.crank_angle,
    "plant.manifold_p": lambda s: s.manifold_p,
    "plant.load_torque": lambda s: s.load_torque,
}


def _check_bindings(bindings: dict, instance: VEcuInstance) -> None:
    if bindings is None:
        raise BindingError("bindings", "no binding map supplied")
    producers = {row[0]: row[2] for row in instance.image.signal_table}
    for plant_name, ecu_name in bindings.items():
        if plant_name not in SENSOR_NAMES and plant_name not in ACTUATOR_NAMES:
            raise BindingError(plant_name, "unknown plant signal")
        if ecu_name not in instance.sig_types:
            raise BindingError(ecu_name, "not a signal of this image")
        if plant_name in SENSOR_NAMES and producers.get(ecu_name):
            raise BindingError(
                ecu_name,
                f"sensor target is produced by module {producers[ecu_name]}")
    for name in (*SENSOR_NAMES, *ACTUATOR_NAMES):
        if name not in bindings:
            raise BindingError(name, "no binding for this plant port")


class TickDriver:
    """Advances one coupled tick at a time; shared by the trace harness
    and the live server."""

    def __init__(self, instance: VEcuInstance, *, plant: Plant | None = None,
                 scenario: Scenario | None = None, bindings: dict | None = None,
                 bypass_fn=None, k: int = 1, orientation: str = "plant_fast"):
        self.instance = instance
        self.plant = plant
        self.scenario = scenario
        self.bypass_fn = bypass_fn
        self.k = k
        self.orientation = orientation
        if plant is not None:
            _check_bindings(bindings, instance)
            self.sensor_binds = [(p, e) for p, e in bindings.items()
                                 if p in SENSOR_NAMES]
            self.act_binds = [(p, e) for p, e in bindings.items()
                              if p in ACTUATOR_NAMES]
        else:
            self.sensor_binds = []
            self.act_binds = []
        instance.measurement = None

    def can_read(self, name: str) -> bool:
        if name in PLANT_COLUMNS:
            return self.plant is not None
        return name in self.instance.sig_types or name in self.instance.tunables

    def read(self, name: str):
        getter = PLANT_COLUMNS.get(name)
        if getter is not None:
            if self.plant is None:
                raise UnknownSignal(name)
            return getter(self.plant.state)
        v = self.instance.read_signal(name)
        return int(v) if isinstance(v, bool) else v

    def tick(self, injected=()) -> int:
        inst = self.instance
        t = inst.clock + 1
        plant = self.plant
        inputs = ({e: getattr(plant.state, p) for p, e in self.sensor_binds}
                  if plant else {})
        events = list(injected)
        scn = self.scenario
        if scn is not None:
            for key in ([0, 1] if t == 1 else [t]):
                for name, value in scn.inputs.get(key, {}).items():
                    if name.startswith("plant."):
                        if plant is None or name != "plant.load_torque":
                            raise UnknownSignal(name)
                        plant.state.load_torque = float(value)
                    else:
                        inputs[name] = value
                events.extend(scn.events.get(key, []))
        bypass = self.bypass_fn(t, inst) if self.bypass_fn else None
        inst.step(inputs, events, bypass)
        if plant is not None:
            acts = {p: float(inst.read_signal(e)) for p, e in self.act_binds}
            if self.orientation == "plant_fast":
                dt = 1.0 / self.k
                for _sub in range(self.k):
                    plant.state, _ = plant_step(plant.state, acts, dt,
                                                plant.config)
            elif t % self.k == 0:
                plant.state, _ = plant_step(plant.state, acts, float(self.k),
                                            plant.config)
        return t


def _loop(instance: VEcuInstance, plant: Plant, scenario: Scenario,
          measurement, bindings, bypass_fn, k: int, orientation: str) -> Trace:
    meas = measurement or MeasurementConfig(
        list(instance.image.default_recorded), 1)
    driver = TickDriver(instance, plant=plant, scenario=scenario,
                        bindings=bindings, bypass_fn=bypass_fn, k=k,
                        orientation=orientation)
    for name in meas.recorded:
        if not driver.can_read(name):
            raise UnknownSignal(name)
    rows = []
    for _ in range(scenario.duration_ms):
        t = driver.tick()
        if t % meas.decimation == 0:
            rows.append([t] + [driver.read(n) for n in meas.recorded])
    return Trace(["t_ms"] + list(meas.recorded), rows)


def closed_loop_run(instance: VEcuInstance, plant: Plant, scenario: Scenario,
                    measurement: MeasurementConfig | None = None, *,
                    bindings: dict, bypass_fn=None) -> Trace:
    return _loop(instance, plant, scenario, measurement, bindings,
                 bypass_fn, 1, "plant_fast")


class RateCoupledHarness:
    def __init__(self, instance: VEcuInstance, plant: Plant, k: int,
                 orientation: str):
        self.instance = instance
        self.plant = plant
        self.k = k
        self.orientation = orientation

    def run(self, scenario: Scenario,
            measurement: MeasurementConfig | None = None, *,
            bindings: dict, bypass_fn=None) -> Trace:
        return _loop(self.instance, self.plant, scenario, measurement,
                     bindings, bypass_fn, self.k, self.orientation)


def plant_rate_coupling(instance: VEcuInstance, plant: Plant, k,
                        orientation: str = "plant_fast") -> RateCoupledHarness:
    if isinstance(k, bool) or not isinstance(k, int) or k < 1:
        raise BadRatio(k)
    if orientation not in ("plant_fast", "plant_slow"):
        raise ValueError(f"unknown orientation {orientation!r}")
    return RateCoupledHarness(instance, plant, k, orientation)
