from __future__ import annotations

import pytest

from vecu.errors import BadRatio, BindingError, UnknownSignal
from vecu.plant import (PlantConfig, RateCoupledHarness, closed_loop_run,
                        make_plant, parse_bindings, parse_scenario,
                        plant_rate_coupling)
from vecu.runtime import MeasurementConfig, export_trace, load_vecu

from conftest import DEMO_ROOT

BINDINGS = parse_bindings((DEMO_ROOT / "engine.bind").read_text())

SCN_TEXT = """\
duration 3000
plant engine.plant
bindings engine.bind
0 event ignition_on
0 IgnSw 1
0 PedalPos 0.0
"""


def scn():
    return parse_scenario(SCN_TEXT)


def fresh(demo_image):
    return load_vecu(demo_image, (DEMO_ROOT / "base.cal").read_text())


def test_closed_loop_row_count_and_columns(demo_image):
    meas = MeasurementConfig(["EngSpd", "plant.speed_rpm"], decimation=10)
    trace = closed_loop_run(fresh(demo_image), make_plant(), scn(), meas,
                            bindings=BINDINGS)
    assert trace.columns == ["t_ms", "EngSpd", "plant.speed_rpm"]
    assert len(trace.rows) == 300
    assert trace.rows[0][0] == 10 and trace.rows[-1][0] == 3000


def test_sensor_feed_lags_plant_by_one_tick(demo_image):
    # the vECU sees the sensor value sampled before the plant sub-step
    meas = MeasurementConfig(["EngSpd", "plant.speed_rpm"], decimation=1)
    trace = closed_loop_run(fresh(demo_image), make_plant(), scn(), meas,
                            bindings=BINDINGS)
    ecu = trace.column("EngSpd")
    plant = trace.column("plant.speed_rpm")
    cfg = PlantConfig()
    assert ecu[0] == pytest.approx(cfg.init_speed_rpm, abs=0.5)
    for k in range(1, 50):
        assert ecu[k] == pytest.approx(plant[k - 1], abs=1e-3)


def test_ignition_init_runs_exactly_once(demo_image):
    meas = MeasurementConfig(["EngState"], decimation=1)
    trace = closed_loop_run(fresh(demo_image), make_plant(), scn(), meas,
                            bindings=BINDINGS)
    states = trace.column("EngState")
    assert states[0] == 1 and all(v == 1 for v in states)


def test_scenario_without_bindings_rejected(demo_image):
    with pytest.raises(BindingError):
        closed_loop_run(fresh(demo_image), make_plant(), scn(), None,
                        bindings=None)


def test_binding_validation(demo_image):
    inst = fresh(demo_image)
    with pytest.raises(BindingError):
        closed_loop_run(inst, make_plant(), scn(), None,
                        bindings={**BINDINGS, "warp_drive": "EngSpd"})
    with pytest.raises(BindingError):
        closed_loop_run(inst, make_plant(), scn(), None,
                        bindings={**BINDINGS, "speed_rpm": "NoSuchSignal"})
    # sensor wired onto a produced signal would fight the producer
    bad = dict(BINDINGS)
    bad["speed_rpm"] = "TqDemand"
    with pytest.raises(BindingError):
        closed_loop_run(inst, make_plant(), scn(), None, bindings=bad)
    # all five ports must be bound
    partial = dict(BINDINGS)
    del partial["fuel"]
    with pytest.raises(BindingError):
        closed_loop_run(inst, make_plant(), scn(), None, bindings=partial)


def test_scenario_can_poke_plant_load(demo_image):
    text = SCN_TEXT + "1500 plant.load_torque 20.0\n"
    meas = MeasurementConfig(["plant.speed_rpm"], decimation=10)
    loaded = closed_loop_run(fresh(demo_image), make_plant(),
                             parse_scenario(text), meas, bindings=BINDINGS)
    base = closed_loop_run(fresh(demo_image), make_plant(), scn(), meas,
                           bindings=BINDINGS)
    speed_l = loaded.column("plant.speed_rpm")
    speed_b = base.column("plant.speed_rpm")
    assert speed_l[:149] == speed_b[:149]          # identical before the step
    assert speed_l[155] < speed_b[155] - 1.0       # sagged under load


def test_rate_coupling_k1_matches_plain_run(demo_image):
    meas = MeasurementConfig(["EngSpd", "plant.speed_rpm"], decimation=10)
    direct = closed_loop_run(fresh(demo_image), make_plant(), scn(), meas,
                             bindings=BINDINGS)
    harness = plant_rate_coupling(fresh(demo_image), make_plant(), 1)
    coupled = harness.run(scn(), meas, bindings=BINDINGS)
    assert export_trace(direct) == export_trace(coupled)


def test_rate_coupling_refinement_converges(demo_image):
    # halving the sub-step should at least not increase the gap to the
    # finest run: |k=4 - k=1| within 2x |k=2 - k=1| plus slack
    meas = MeasurementConfig(["plant.speed_rpm"], decimation=10)

    def speeds(k):
        h = plant_rate_coupling(fresh(demo_image), make_plant(), k)
        return h.run(scn(), meas, bindings=BINDINGS).column("plant.speed_rpm")

    s1, s2, s4 = speeds(1), speeds(2), speeds(4)
    gap2 = max(abs(a - b) for a, b in zip(s2, s1))
    gap4 = max(abs(a - b) for a, b in zip(s4, s1))
    assert gap2 > 0                      # refinement actually changes values
    assert gap4 <= 2.0 * gap2 + 1e-9
    assert gap4 >= gap2 * 0.5            # and converges monotonically-ish


def test_rate_coupling_plant_slow_latches_actuators(demo_image):
    meas = MeasurementConfig(["plant.speed_rpm"], decimation=10)
    h = plant_rate_coupling(fresh(demo_image), make_plant(), 5,
                            orientation="plant_slow")
    trace = h.run(scn(), meas, bindings=BINDINGS)
    assert len(trace.rows) == 300
    speeds = trace.column("plant.speed_rpm")
    # plant advances only every 5 ms: consecutive ms within a window agree
    meas1 = MeasurementConfig(["plant.speed_rpm"], decimation=1)
    h1 = plant_rate_coupling(fresh(demo_image), make_plant(), 5,
                             orientation="plant_slow")
    fine = h1.run(scn(), meas1, bindings=BINDINGS).column("plant.speed_rpm")
    assert fine[0] == fine[1] == fine[2] == fine[3]
    assert fine[4] != fine[5] or fine[5] != fine[9]
    assert speeds[-1] == pytest.approx(800.0, abs=25.0)


def test_bad_ratio_rejected(demo_image):
    inst = fresh(demo_image)
    with pytest.raises(BadRatio):
        plant_rate_coupling(inst, make_plant(), 0)
    with pytest.raises(BadRatio):
        plant_rate_coupling(inst, make_plant(), -2)
    with pytest.raises(BadRatio):
        plant_rate_coupling(inst, make_plant(), True)
    with pytest.raises(ValueError):
        plant_rate_coupling(inst, make_plant(), 2, orientation="sideways")
    assert isinstance(plant_rate_coupling(inst, make_plant(), 3),
                      RateCoupledHarness)


def test_closed_loop_recorded_names_checked(demo_image):
    meas = MeasurementConfig(["plant.exhaust_temp"], decimation=1)
    with pytest.raises(UnknownSignal):
        closed_loop_run(fresh(demo_image), make_plant(), scn(), meas,
                        bindings=BINDINGS)


def test_open_loop_trace_has_no_plant_columns(demo_image):
    inst = fresh(demo_image)
    from vecu.runtime import run
    meas = MeasurementConfig(["plant.speed_rpm"], decimation=1)
    with pytest.raises(UnknownSignal):
        run(inst, 10, None, meas)
