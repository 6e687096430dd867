from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from vecu.buildsys.build import Workspace, build
from vecu.buildsys.cache import BuildCache
from vecu.errors import RunnableFault, UnknownEvent
from vecu.oskernel import angular_due, dispatch, events_due, periodic_due
from vecu.runtime import load_vecu


# brute-force oracles, written before the implementations under test


def periodic_fires_oracle(duration: int, period: int, offset: int) -> list[int]:
    """Every tick 1..duration, checked directly against the firing rule."""
    return [t for t in range(1, duration + 1)
            if t >= offset and (t - offset) % period == 0]


def angular_fires_oracle(angles: list[float], target: float) -> list[int]:
    """Scan consecutive (prev, now] windows on a recorded angle series."""
    hits = []
    for i in range(1, len(angles)):
        prev, now = angles[i - 1], angles[i]
        if prev == now:
            continue
        if prev < now:
            due = prev < target <= now
        else:                                  # wrapped past 720
            due = target > prev or target <= now
        if due:
            hits.append(i)
    return hits


@given(st.integers(min_value=1, max_value=500),
       st.integers(min_value=1, max_value=100),
       st.integers(min_value=0, max_value=200))
def test_periodic_due_matches_oracle(duration, period, offset):
    got = [t for t in range(1, duration + 1) if periodic_due(t, period, offset)]
    assert got == periodic_fires_oracle(duration, period, offset)


def test_periodic_count_closed_form():
    # offset 0, clock starting at 1: exactly floor(T/p) fires in T ticks
    for period in (1, 2, 7, 10, 100):
        fires = periodic_fires_oracle(1000, period, 0)
        assert len(fires) == 1000 // period
        assert fires[0] == period          # no fire at t=0; first at t=p


@given(st.lists(st.floats(min_value=0, max_value=719.99), min_size=2, max_size=60),
       st.floats(min_value=0, max_value=719.5))
def test_angular_due_matches_oracle(angles, target):
    got = [i for i in range(1, len(angles))
           if angular_due(target, angles[i - 1], angles[i])]
    assert got == angular_fires_oracle(angles, target)


def test_angular_wrap_examples():
    assert angular_due(0.0, 710.0, 8.0)          # wrap catches 720==0
    assert angular_due(715.0, 710.0, 8.0)
    assert not angular_due(100.0, 710.0, 8.0)
    assert not angular_due(5.0, 5.0, 5.0)        # no motion, no fire
    assert angular_due(5.0, 4.0, 5.0)            # boundary is inclusive at now
    assert not angular_due(4.0, 4.0, 5.0)        # exclusive at prev


def test_angular_full_revolution_grid():
    # 0.1-degree sweep across one wrap, every declared target fires once
    angles = [(700.0 + 0.1 * k) % 720 for k in range(400)]  # 700 -> 19.9
    for target in (0.0, 700.05, 719.9, 10.0):
        fires = angular_fires_oracle(angles, target)
        assert len(fires) == 1, (target, fires)


SCHEDULE = [
    {"kind": "periodic", "period": 10, "offset": 0, "angle": None,
     "name": None, "runnables": ["M.Fast"]},
    {"kind": "periodic", "period": 2, "offset": 0, "angle": None,
     "name": None, "runnables": ["M.Faster"]},
    {"kind": "aperiodic", "period": None, "offset": None, "angle": None,
     "name": "kick", "runnables": ["M.Kick"]},
]


def test_events_due_declaration_order_tie_break():
    acts = events_due(20, 0.0, 0.0, (), SCHEDULE)
    # both periodics due at t=20; declaration order decides, so the
    # 10 ms event (declared first) comes before the 2 ms event
    assert [a.runnables for a in acts] == [["M.Fast"], ["M.Faster"]]


def test_events_due_injection():
    acts = events_due(3, 0.0, 0.0, ("kick",), SCHEDULE)
    assert [a.runnables for a in acts] == [["M.Kick"]]
    with pytest.raises(UnknownEvent):
        events_due(3, 0.0, 0.0, ("ghost",), SCHEDULE)


def test_events_due_even_when_elimination_emptied_event():
    sched = [dict(SCHEDULE[0], runnables=[])]
    acts = events_due(10, 0.0, 0.0, (), sched)
    assert acts == [] or all(not a.runnables for a in acts)


# dispatch semantics on a real instance


VIS_WS = {
    "v.dict": "X : i32\nY : i32\nZ : i32\n",
    "M.vmod": """\
module M
outputs: X, Y, Z

runnable Writer { X := 1; X := 2 }
runnable Reader { Y := X + 10 }
runnable Boom { Z := Z / (Z - Z) }
""",
    "v.ostab": "every 1ms: M.Writer, M.Reader\non boom: M.Boom\n",
    "v.vcfg": "recorded_signals: X, Y\n",
}


@pytest.fixture()
def vis_instance(make_workspace):
    root = make_workspace(VIS_WS)
    image, _, _ = build(Workspace.load(root), BuildCache())
    return load_vecu(image)


def test_dispatch_sequential_visibility(vis_instance):
    inst = vis_instance
    inst.step()
    # Writer ran before Reader within the same activation list, and the
    # last write inside Writer is the one Reader saw
    assert inst.signals["X"] == 2
    assert inst.signals["Y"] == 12


def test_dispatch_last_writer_wins(vis_instance):
    inst = vis_instance
    inst.step()
    assert inst.signals["X"] == 2      # X := 1 then X := 2


def test_divide_by_zero_is_counted_not_fatal(vis_instance):
    inst = vis_instance
    inst.step(injected_events=("boom",))
    assert inst.signals["Z"] == 0
    assert inst.diagnostics["div_by_zero"] == 1


FAULT_WS = {
    "f.dict": "N : u8\n",
    "F.vmod": """\
module F
outputs: N

runnable Tick { N := N + 1 }
""",
    "f.ostab": "every 1ms: F.Tick\n",
    "f.vcfg": "recorded_signals: N\n",
}


def test_runnable_fault_aborts_step_with_attribution(make_workspace):
    # fabricate a fault by corrupting a compiled closure's map reference
    root = make_workspace(FAULT_WS)
    image, _, _ = build(Workspace.load(root), BuildCache())
    inst = load_vecu(image)

    def blow_up():
        raise ValueError("synthetic failure")

    inst.executables["F.Tick"] = ("F", lambda ctx: blow_up())
    with pytest.raises(RunnableFault) as ei:
        inst.step()
    assert "F.Tick" in str(ei.value)
    assert ei.value.t_ms == 1
    assert ei.value.exit_code == 6


def test_dispatch_runs_activations_in_order(vis_instance):
    inst = vis_instance
    acts = events_due(1, 0.0, 0.0, (), inst.schedule)
    dispatch(acts, inst)
    assert inst.signals["Y"] == 12
