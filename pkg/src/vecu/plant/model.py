"""Mean-value engine model: cheap, smooth, controllable.

Explicit-Euler state update at the caller's step size. Indicated torque
is proportional to manifold pressure gated by fueling; friction is a
quadratic in crank speed; the manifold is a first-order lag toward a
throttle-determined target pressure. Crank angle advances by
0.006 * rpm * dt_ms degrees (1000 rpm = 6 deg/ms) on a 720-degree cycle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

from ..errors import NonFiniteState, ParseError, UnknownKey

RPM_TO_RADS = math.pi / 30.0

SENSOR_NAMES = ("speed_rpm", "crank_angle", "manifold_p")
ACTUATOR_NAMES = ("throttle", "fuel")


@dataclass
class PlantConfig:
    inertia: float = 0.15          # kg*m^2
    fric0: float = 4.0             # N*m
    fric1: float = 0.015           # N*m / (rad/s)
    fric2: float = 0.00012         # N*m / (rad/s)^2
    torque_gain: float = 0.32      # N*m per kPa at full fueling
    manifold_tau_ms: float = 120.0
    p_min: float = 18.0            # kPa at closed throttle
    p_ambient: float = 100.0       # kPa at wide-open throttle
    load_torque: float = 5.0       # N*m accessory load
    init_speed_rpm: float = 1200.0
    init_pressure: float = 30.0
    init_crank_angle: float = 0.0


@dataclass
class EngineState:
    speed_rpm: float
    crank_angle: float
    manifold_p: float
    load_torque: float


@dataclass
class Plant:
    config: PlantConfig
    state: EngineState


def initial_state(config: PlantConfig) -> EngineState:
    return EngineState(config.init_speed_rpm, config.init_crank_angle,
                       config.init_pressure, config.load_torque)


def make_plant(config: PlantConfig | None = None) -> Plant:
    cfg = config or PlantConfig()
    return Plant(cfg, initial_state(cfg))


def sensors_of(state: EngineState) -> dict:
    return {"speed_rpm": state.speed_rpm,
            "crank_angle": state.crank_angle,
            "manifold_p": state.manifold_p}


_DEFAULT = PlantConfig()


def plant_step(state: EngineState, actuators: dict, dt_ms,
               config: PlantConfig | None = None):
    cfg = config or _DEFAULT
    if not dt_ms > 0:
        raise ValueError(f"dt_ms must be positive, got {dt_ms}")
    u = min(max(float(actuators.get("throttle", 0.0)), 0.0), 100.0)
    fuel = min(max(float(actuators.get("fuel", 0.0)), 0.0), 1.0)

    omega = state.speed_rpm * RPM_TO_RADS
    t_ind = cfg.torque_gain * state.manifold_p * fuel
    t_fric = cfg.fric0 + cfg.fric1 * omega + cfg.fric2 * omega * omega
    dt_s = dt_ms / 1000.0
    omega2 = omega + dt_s * (t_ind - t_fric - state.load_torque) / cfg.inertia
    if omega2 < 0.0:
        omega2 = 0.0

    p_target = cfg.p_min + (cfg.p_ambient - cfg.p_min) * u / 100.0
    alpha = dt_ms / cfg.manifold_tau_ms
    if alpha > 1.0:
        alpha = 1.0    # a first-order lag never overshoots its target
    p2 = state.manifold_p + (p_target - state.manifold_p) * alpha

    crank2 = (state.crank_angle + 0.006 * state.speed_rpm * dt_ms) % 720.0

    new = EngineState(omega2 / RPM_TO_RADS, crank2, p2, state.load_torque)
    for name in ("speed_rpm", "crank_angle", "manifold_p"):
        v = getattr(new, name)
        if not math.isfinite(v):
            raise NonFiniteState(name, v)
    return new, sensors_of(new)


def parse_plant_config(text: str, path: str | None = None) -> PlantConfig:
    known = {f.name for f in fields(PlantConfig)}
    values: dict = {}
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"expected 'key value', got {raw.strip()!r}",
                             line=n, path=path)
        key, val = parts
        if key not in known:
            raise UnknownKey(key, n)
        try:
            values[key] = float(val)
        except ValueError:
            raise ParseError(f"bad number {val!r} for '{key}'",
                             line=n, path=path) from None
    cfg = PlantConfig(**values)
    if cfg.inertia <= 0:
        raise ParseError("inertia must be > 0", path=path)
    if cfg.manifold_tau_ms <= 0:
        raise ParseError("manifold_tau_ms must be > 0", path=path)
    return cfg
