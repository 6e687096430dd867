"""Event generation and zero-time dispatch.

Periodic events come from the millisecond clock, angular events from the
crank-angle sweep between two tick boundaries, aperiodic events from the
harness.  Everything due in one tick executes in OS-table declaration
order, strictly sequentially, consuming no simulated time.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import RunnableFault, UnknownEvent, VecuError


@dataclass
class Activation:
    event_index: int
    cause: str               # 'periodic' | 'angular' | 'aperiodic'
    runnables: list[str]


def periodic_due(now: int, period: int, offset: int) -> bool:
    return now >= offset and (now - offset) % period == 0


def angular_due(angle: float, prev: float, now: float) -> bool:
    """True iff angle lies in the half-open sweep (prev, now], on the
    720-degree circle.  No rotation (prev == now) crosses nothing."""
    if prev == now:
        return False
    if prev < now:
        return prev < angle <= now
    return angle > prev or angle <= now


def events_due(now: int, crank_prev: float, crank_now: float,
               injected, schedule: list[dict]) -> list[Activation]:
    injected = list(injected or ())
    declared = {ev["name"] for ev in schedule if ev["kind"] == "aperiodic"}
    for name in injected:
        if name not in declared:
            raise UnknownEvent(name)
    fired = set(injected)
    due: list[Activation] = []
    for i, ev in enumerate(schedule):
        kind = ev["kind"]
        if kind == "periodic":
            if periodic_due(now, ev["period"], ev["offset"]):
                due.append(Activation(i, "periodic", ev["runnables"]))
        elif kind == "angular":
            if angular_due(ev["angle"], crank_prev, crank_now):
                due.append(Activation(i, "angular", ev["runnables"]))
        else:
            if ev["name"] in fired:
                due.append(Activation(i, "aperiodic", ev["runnables"]))
    return due


def dispatch(activations, instance) -> None:
    """Run every runnable of every activation in order.  Writes of earlier
    runnables are visible to later ones in the same tick; a fault aborts
    the step with the runnable attributed."""
    ctx = instance.ctx
    for act in activations:
        for ref in act.runnables:
            mod, closure = instance.executables[ref]
            if mod in instance.bypass_active:
                continue
            try:
                closure(ctx)
            except VecuError:
                raise
            except Exception as exc:
                raise RunnableFault(ref, f"{type(exc).__name__}: {exc}",
                                    instance.clock) from exc
