"""Scenario files: timed driver inputs and event injections.

Line format (`#` starts a comment, blank lines ignored):

    duration 10000
    plant engine.plant        # optional; absent means open loop
    bindings engine.bind      # required when plant is declared
    0 event ignition_on
    0 IgnSw 1
    2500 PedalPos 12.5
    4000 plant.load_torque 8.0

Row times are milliseconds within [0, duration]. Later rows override
earlier ones for the same time and name. PedalPos is the driver pedal
and must stay in [0, 100].
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import ParseError


@dataclass
class Scenario:
    duration_ms: int
    plant_path: str | None = None
    bindings_path: str | None = None
    inputs: dict = field(default_factory=dict)   # t_ms -> {name: value}
    events: dict = field(default_factory=dict)   # t_ms -> [event, ...]

    def schedule(self) -> dict:
        """Shape consumed by runtime.run: t -> (inputs, events)."""
        times = set(self.inputs) | set(self.events)
        return {t: (self.inputs.get(t, {}), self.events.get(t, []))
                for t in times}


def _number(text: str, line: int, path):
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        raise ParseError(f"bad number {text!r}", line=line, path=path) from None


def parse_scenario(text: str, path: str | None = None) -> Scenario:
    duration = None
    plant_path = None
    bindings_path = None
    rows = []   # (line, t, kind, name, value)
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        head = parts[0]
        if head == "duration":
            if len(parts) != 2:
                raise ParseError("expected 'duration <ms>'", line=n, path=path)
            duration = _number(parts[1], n, path)
            if not isinstance(duration, int) or duration <= 0:
                raise ParseError("duration must be a positive integer",
                                 line=n, path=path)
            continue
        if head in ("plant", "bindings"):
            if len(parts) != 2:
                raise ParseError(f"expected '{head} <path>'", line=n, path=path)
            if head == "plant":
                plant_path = parts[1]
            else:
                bindings_path = parts[1]
            continue
        t = _number(head, n, path)
        if not isinstance(t, int) or t < 0:
            raise ParseError("row time must be a non-negative integer",
                             line=n, path=path)
        if len(parts) == 3 and parts[1] == "event":
            rows.append((n, t, "event", parts[2], None))
        elif len(parts) == 3:
            value = _number(parts[2], n, path)
            if parts[1] == "PedalPos" and not 0 <= value <= 100:
                raise ParseError(f"PedalPos must be in [0, 100], got {value}",
                                 line=n, path=path)
            rows.append((n, t, "input", parts[1], value))
        else:
            raise ParseError("expected '<t> event <name>' or '<t> <name> <value>'",
                             line=n, path=path)
    if duration is None:
        raise ParseError("scenario declares no duration", path=path)
    scn = Scenario(duration, plant_path, bindings_path)
    for n, t, kind, name, value in rows:
        if t > duration:
            raise ParseError(f"row time {t} exceeds duration {duration}",
                             line=n, path=path)
        if kind == "event":
            scn.events.setdefault(t, []).append(name)
        else:
            scn.inputs.setdefault(t, {})[name] = value
    return scn
