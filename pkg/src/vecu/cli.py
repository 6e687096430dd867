"""Command-line front end: build, run, inspect, compare, serve.

stdout carries data (reports, listings, server address); stderr carries
diagnostics. Failures map to exit codes by error family: parse 2,
type 3, link 4, I/O 5, runtime fault 6, trace divergence 7.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .buildsys.build import Workspace, build
from .buildsys.cache import BuildCache
from .buildsys.image import load_image_file, save_image
from .errors import IoError, VecuError
from .plant import (closed_loop_run, make_plant, parse_bindings,
                    parse_plant_config, parse_scenario)
from .runtime import (MeasurementConfig, compare_traces, export_trace,
                      import_trace, load_vecu, parse_measurement, run)
from .server import LiveServer


def _read_text(path, what: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise IoError(f"cannot read {what} {path}: {exc.strerror or exc}")


def cmd_build(workspace_path, cache_path, out_path) -> int:
    ws = Workspace.load(workspace_path)
    cache = BuildCache(cache_path)
    image, cache, report = build(ws, cache)
    save_image(image, out_path)
    print(report.to_text(), end="")
    return 0


def _load_scenario_world(scenario_path):
    """Parse a scenario and materialize its plant/bindings, if declared."""
    scn = parse_scenario(_read_text(scenario_path, "scenario"),
                         path=str(scenario_path))
    base = Path(scenario_path).parent
    plant = None
    bindings = None
    if scn.plant_path is not None:
        cfg = parse_plant_config(
            _read_text(base / scn.plant_path, "plant config"),
            path=str(base / scn.plant_path))
        plant = make_plant(cfg)
    if scn.bindings_path is not None:
        bindings = parse_bindings(
            _read_text(base / scn.bindings_path, "binding map"),
            path=str(base / scn.bindings_path))
    return scn, plant, bindings


def cmd_run(image_path, calibration_path, scenario_path, measurement_path,
            out_csv) -> int:
    image = load_image_file(image_path)
    cal_text = None
    if calibration_path is not None:
        cal_text = _read_text(calibration_path, "calibration")
    instance = load_vecu(image, cal_text)

    meas = None
    if measurement_path is not None:
        meas = parse_measurement(_read_text(measurement_path, "measurement"),
                                 path=str(measurement_path))
        if not meas.recorded:
            meas = MeasurementConfig(list(image.default_recorded),
                                     meas.decimation)

    scn, plant, bindings = _load_scenario_world(scenario_path)
    if plant is not None:
        trace = closed_loop_run(instance, plant, scn, meas, bindings=bindings)
    else:
        trace = run(instance, scn.duration_ms, scn.schedule(), meas)

    try:
        Path(out_csv).write_text(export_trace(trace))
    except OSError as exc:
        raise IoError(f"cannot write trace {out_csv}: {exc.strerror or exc}")
    if instance.diagnostics["div_by_zero"]:
        print(f"div_by_zero events: {instance.diagnostics['div_by_zero']}",
              file=sys.stderr)
    return 0


def cmd_inspect(image_path) -> int:
    image = load_image_file(image_path)
    out = [f"image {image.image_hash}", ""]

    out.append("modules:")
    for mod in image.modules:
        ins = ", ".join(n for n, _t in mod["interface"]["inputs"]) or "-"
        outs = ", ".join(n for n, _t in mod["interface"]["outputs"]) or "-"
        out.append(f"  {mod['name']}  inputs: {ins}  outputs: {outs}")
    out.append("")

    out.append("os events:")
    for ev in image.os_events:
        if ev["kind"] == "periodic":
            head = f"every {ev['period']}ms"
            if ev["offset"]:
                head += f" +{ev['offset']}ms"
        elif ev["kind"] == "angular":
            head = f"at {ev['angle']:g}deg"
        else:
            head = f"on {ev['name']}"
        refs = ", ".join(ev["runnables"]) or "(empty)"
        out.append(f"  {head}: {refs}")
    out.append("")

    exposed = image.exposed
    out.append("exposed inputs:  " + (", ".join(exposed["inputs"]) or "-"))
    out.append("exposed outputs: " + (", ".join(exposed["outputs"]) or "-"))
    out.append("tunables:")
    for name, tname in exposed["tunables"]:
        out.append(f"  {name}: {tname}")
    if not exposed["tunables"]:
        out.append("  -")
    out.append("bypass ports:")
    for mod in sorted(exposed["bypass"]):
        ports = exposed["bypass"][mod]
        out.append(f"  {mod}  reads: "
                   + (", ".join(ports["inputs"]) or "-")
                   + "  overrides: " + (", ".join(ports["outputs"]) or "-"))
    if not exposed["bypass"]:
        out.append("  -")
    out.append("")

    out.append("signal table:")
    for name, tname, producer, _init in image.signal_table:
        src = producer if producer else "(external)"
        out.append(f"  {name}: {tname}  from {src}")
    print("\n".join(out))
    return 0


def cmd_compare(trace_a, trace_b, tolerance_spec) -> int:
    a = import_trace(_read_text(trace_a, "trace"))
    b = import_trace(_read_text(trace_b, "trace"))
    report = compare_traces(a, b, tolerance_spec)
    print(report.to_text())
    return 7 if report.divergences else 0


def cmd_serve(image_path, calibration_path, scenario_path, port,
              rate: float = 1000.0) -> int:
    image = load_image_file(image_path)
    cal_text = None
    if calibration_path is not None:
        cal_text = _read_text(calibration_path, "calibration")
    instance = load_vecu(image, cal_text)

    scn = plant = bindings = None
    if scenario_path is not None:
        scn, plant, bindings = _load_scenario_world(scenario_path)

    server = LiveServer(instance, plant=plant, scenario=scn,
                        bindings=bindings, port=port, rate=rate)
    actual = server.start()
    print(f"vecu-serve listening on 127.0.0.1:{actual}", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        server.stop()
    return 0


def _parse_tolerances(pairs) -> dict:
    tol = {}
    for spec in pairs or ():
        name, sep, val = spec.partition("=")
        if not sep or not name:
            raise IoError(f"bad tolerance {spec!r}, expected NAME=VALUE")
        try:
            tol[name] = float(val)
        except ValueError:
            raise IoError(f"bad tolerance value in {spec!r}")
    return tol


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="vecu", description="virtual ECU toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="compile a workspace into an image")
    p.add_argument("workspace")
    p.add_argument("--cache", default=None, help="incremental cache directory")
    p.add_argument("--out", default=None, help="output image path")

    p = sub.add_parser("run", help="run a scenario and write a trace CSV")
    p.add_argument("image")
    p.add_argument("--scenario", required=True)
    p.add_argument("--cal", default=None, help="calibration overlay file")
    p.add_argument("--measure", default=None, help="measurement config file")
    p.add_argument("--out", required=True, help="output trace CSV")

    p = sub.add_parser("inspect", help="describe an image")
    p.add_argument("image")

    p = sub.add_parser("compare", help="compare two trace CSVs")
    p.add_argument("trace_a")
    p.add_argument("trace_b")
    p.add_argument("--tol", action="append", metavar="NAME=VALUE",
                   help="per-signal tolerance; NAME may be '*'")

    p = sub.add_parser("serve", help="serve the live tuning protocol")
    p.add_argument("image")
    p.add_argument("--cal", default=None)
    p.add_argument("--scenario", default=None)
    p.add_argument("--port", type=int, default=0)
    p.add_argument("--rate", type=float, default=1000.0,
                   help="ticks per wallclock second; 0 = as fast as possible")
    return ap


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "build":
            out = args.out or str(Path(args.workspace) / "out.vimg")
            return cmd_build(args.workspace, args.cache, out)
        if args.command == "run":
            return cmd_run(args.image, args.cal, args.scenario,
                           args.measure, args.out)
        if args.command == "inspect":
            return cmd_inspect(args.image)
        if args.command == "compare":
            return cmd_compare(args.trace_a, args.trace_b,
                               _parse_tolerances(args.tol))
        if args.command == "serve":
            return cmd_serve(args.image, args.cal, args.scenario,
                             args.port, args.rate)
    except VecuError as exc:
        print(str(exc), file=sys.stderr)
        return exc.exit_code
    raise AssertionError(f"unhandled command {args.command!r}")


if __name__ == "__main__":
    sys.exit(main())
