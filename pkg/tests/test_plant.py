from __future__ import annotations

import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from vecu.errors import NonFiniteState, ParseError, UnknownKey
from vecu.plant import (PlantConfig, initial_state, parse_plant_config,
                        plant_step)

RPM_TO_RADS = math.pi / 30.0


def speed_equilibrium_oracle(cfg: PlantConfig, throttle: float, fuel: float,
                             load: float) -> float:
    """Bisection on the torque balance, independent of the stepper.

    At equilibrium: torque_gain * p(throttle) * fuel
                    = fric0 + fric1*w + fric2*w^2 + load.
    The right side is strictly increasing in w, so bisection applies.
    """
    p = cfg.p_min + (cfg.p_ambient - cfg.p_min) * min(max(throttle, 0.0), 100.0) / 100.0
    drive = cfg.torque_gain * p * min(max(fuel, 0.0), 1.0)

    def resid(w):
        return drive - (cfg.fric0 + cfg.fric1 * w + cfg.fric2 * w * w) - load

    if resid(0.0) <= 0:
        return 0.0
    lo, hi = 0.0, 10000.0
    assert resid(hi) < 0
    for _ in range(200):
        mid = (lo + hi) / 2
        if resid(mid) > 0:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2 / RPM_TO_RADS     # rad/s -> rpm


def test_crank_advances_six_thousandths_deg_per_rpm_ms():
    cfg = PlantConfig(init_speed_rpm=1000.0, init_crank_angle=0.0)
    state, _ = plant_step(initial_state(cfg), {"throttle": 30.0, "fuel": 0.5},
                          1, cfg)
    assert state.crank_angle == pytest.approx(0.006 * 1000.0, abs=1e-9)


@given(st.floats(min_value=0, max_value=719.9),
       st.floats(min_value=100, max_value=8000),
       st.integers(min_value=1, max_value=50))
def test_crank_stays_in_revolution_window(angle0, rpm, dt):
    cfg = PlantConfig(init_speed_rpm=rpm, init_crank_angle=angle0)
    state = initial_state(cfg)
    for _ in range(20):
        state, _ = plant_step(state, {"throttle": 50.0, "fuel": 0.5}, dt, cfg)
        assert 0.0 <= state.crank_angle < 720.0


def test_coastdown_speed_strictly_decreases():
    cfg = PlantConfig(init_speed_rpm=3000.0)
    state = initial_state(cfg)
    prev = state.speed_rpm
    for _ in range(5000):
        state, _ = plant_step(state, {"throttle": 0.0, "fuel": 0.0}, 1, cfg)
        if state.speed_rpm == 0.0:
            break
        assert state.speed_rpm < prev
        prev = state.speed_rpm
    else:
        pytest.fail("never reached standstill")
    assert state.speed_rpm == 0.0          # clamped, never negative


def test_converges_to_bisection_equilibrium():
    cfg = PlantConfig()
    target = speed_equilibrium_oracle(cfg, throttle=40.0, fuel=0.9,
                                      load=cfg.load_torque)
    state = initial_state(cfg)
    for _ in range(60_000):
        state, _ = plant_step(state, {"throttle": 40.0, "fuel": 0.9}, 1, cfg)
    assert state.speed_rpm == pytest.approx(target, abs=0.5)


def test_equilibrium_oracle_monotone_in_throttle():
    # unloaded: every throttle point spins; loaded: low throttle stalls
    cfg = PlantConfig()
    speeds = [speed_equilibrium_oracle(cfg, u, 1.0, 0.0)
              for u in (10.0, 30.0, 60.0, 100.0)]
    assert speeds == sorted(speeds)
    assert speeds[0] > 0
    assert speed_equilibrium_oracle(cfg, 1.0, 1.0, 50.0) == 0.0


def test_manifold_first_order_lag_never_overshoots():
    cfg = PlantConfig(init_pressure=30.0)
    state = initial_state(cfg)
    target = cfg.p_min + (cfg.p_ambient - cfg.p_min) * 0.5   # throttle 50
    prev_gap = abs(state.manifold_p - target)
    for _ in range(3000):
        state, _ = plant_step(state, {"throttle": 50.0, "fuel": 0.5}, 1, cfg)
        gap = abs(state.manifold_p - target)
        assert gap <= prev_gap + 1e-12
        prev_gap = gap
    assert state.manifold_p == pytest.approx(target, abs=1e-6)


def test_manifold_stable_at_huge_dt():
    # alpha is clamped at 1, so even dt >> tau lands on the target
    cfg = PlantConfig()
    state, _ = plant_step(initial_state(cfg), {"throttle": 100.0, "fuel": 1.0},
                          10_000, cfg)
    assert state.manifold_p <= cfg.p_ambient + 1e-9


def test_sensor_dict_shape():
    cfg = PlantConfig()
    _, sensors = plant_step(initial_state(cfg), {"throttle": 20.0, "fuel": 0.5},
                            1, cfg)
    assert set(sensors) == {"speed_rpm", "crank_angle", "manifold_p"}


def test_actuator_inputs_clamped():
    cfg = PlantConfig()
    s1, _ = plant_step(initial_state(cfg), {"throttle": 500.0, "fuel": 9.0}, 1, cfg)
    s2, _ = plant_step(initial_state(cfg), {"throttle": 100.0, "fuel": 1.0}, 1, cfg)
    assert s1.speed_rpm == s2.speed_rpm
    assert s1.manifold_p == s2.manifold_p


def test_dt_must_be_positive():
    cfg = PlantConfig()
    with pytest.raises(ValueError):
        plant_step(initial_state(cfg), {"throttle": 0.0, "fuel": 0.0}, 0, cfg)


def test_non_finite_state_detected():
    cfg = PlantConfig(torque_gain=1e308)   # drive torque overflows
    with pytest.raises(NonFiniteState):
        plant_step(initial_state(cfg), {"throttle": 100.0, "fuel": 1.0}, 1, cfg)


def test_parse_plant_config_roundtrip_and_defaults():
    cfg = parse_plant_config("inertia 0.2\nload_torque 8.0\n# comment\n")
    assert cfg.inertia == 0.2
    assert cfg.load_torque == 8.0
    assert cfg.torque_gain == PlantConfig().torque_gain


def test_parse_plant_config_errors():
    with pytest.raises(UnknownKey):
        parse_plant_config("gearbox 5\n")
    with pytest.raises(ParseError):
        parse_plant_config("inertia heavy\n")
    with pytest.raises(ParseError):
        parse_plant_config("inertia -1\n")
    with pytest.raises(ParseError):
        parse_plant_config("manifold_tau_ms 0\n")
