from __future__ import annotations

import json
import shutil
from pathlib import Path

import pytest

from vecu.cli import main
from conftest import COUNTER_FILES, DEMO_ROOT


@pytest.fixture()
def built_demo(tmp_path):
    img = tmp_path / "ems.vimg"
    assert main(["build", str(DEMO_ROOT), "--out", str(img)]) == 0
    return img


def run_cli(*argv):
    return main([str(a) for a in argv])


def test_build_exit_zero_and_image_written(tmp_path, capsys):
    img = tmp_path / "out.vimg"
    code = run_cli("build", DEMO_ROOT, "--out", img)
    out = capsys.readouterr().out
    assert code == 0
    assert img.is_file()
    assert "6 rebuilt, 0 cached" in out
    assert "image " in out


def test_build_second_invocation_all_cached(tmp_path, capsys):
    cache = tmp_path / "cache"
    img = tmp_path / "out.vimg"
    run_cli("build", DEMO_ROOT, "--cache", cache, "--out", img)
    capsys.readouterr()
    code = run_cli("build", DEMO_ROOT, "--cache", cache, "--out", img)
    assert code == 0
    assert "0 rebuilt, 6 cached" in capsys.readouterr().out


def test_parse_error_exits_2(tmp_path, make_workspace, capsys):
    files = dict(COUNTER_FILES)
    files["Count.vmod"] = "module Count\noutputs Tick10\n"   # missing colon
    root = make_workspace(files)
    assert run_cli("build", root, "--out", tmp_path / "x.vimg") == 2
    assert "expected" in capsys.readouterr().err


def test_type_error_exits_3_with_location(tmp_path, make_workspace, capsys):
    files = dict(COUNTER_FILES)
    files["Count.vmod"] = ("module Count\noutputs: Tick10, TdcHits, Started\n"
                           "runnable Bump { Tick10 := Tick10 + 0.5 }\n"
                           "runnable Tdc { TdcHits := TdcHits + 1 }\n"
                           "runnable Init { Started := true }\n")
    root = make_workspace(files)
    assert run_cli("build", root, "--out", tmp_path / "x.vimg") == 3
    err = capsys.readouterr().err
    assert "Count.vmod" in err and "3:" in err


def test_link_error_exits_4(tmp_path, make_workspace):
    files = dict(COUNTER_FILES)
    files["c.ostab"] = "every 10ms: Count.Bump, Phantom.R\n"
    root = make_workspace(files)
    assert run_cli("build", root, "--out", tmp_path / "x.vimg") == 4


def test_missing_workspace_exits_5(tmp_path):
    assert run_cli("build", tmp_path / "nowhere", "--out", tmp_path / "x.vimg") == 5


def test_corrupt_image_exits_5(tmp_path, built_demo):
    obj = json.loads(built_demo.read_text())
    obj["payload"]["crank_angle_signal"] = "Hacked"
    built_demo.write_text(json.dumps(obj))
    assert run_cli("inspect", built_demo) == 5


def test_missing_calibration_exits_5(tmp_path, built_demo):
    code = run_cli("run", built_demo, "--scenario", DEMO_ROOT / "idle.scn",
                   "--cal", tmp_path / "ghost.cal",
                   "--out", tmp_path / "t.csv")
    assert code == 5


def test_runtime_fault_exits_6(tmp_path, built_demo):
    meas = tmp_path / "bad.meas"
    meas.write_text("record: NoSuchSignal\n")
    code = run_cli("run", built_demo, "--scenario", DEMO_ROOT / "idle.scn",
                   "--measure", meas, "--out", tmp_path / "t.csv")
    assert code == 6


def test_run_determinism_byte_identical(tmp_path, built_demo):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for out in (a, b):
        code = run_cli("run", built_demo, "--scenario", DEMO_ROOT / "idle.scn",
                       "--cal", DEMO_ROOT / "base.cal",
                       "--measure", DEMO_ROOT / "idle.meas", "--out", out)
        assert code == 0
    assert a.read_bytes() == b.read_bytes()


def test_open_loop_scenario_runs(tmp_path, make_workspace, built_demo):
    scn = tmp_path / "open.scn"
    scn.write_text("duration 50\n0 IgnSw 1\n0 event ignition_on\n"
                   "0 PedalPos 10.0\n")
    out = tmp_path / "open.csv"
    code = run_cli("run", built_demo, "--scenario", scn, "--out", out)
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("t_ms,")
    assert len(lines) == 51


def test_inspect_lists_expected_sections(built_demo, capsys):
    assert run_cli("inspect", built_demo) == 0
    out = capsys.readouterr().out
    assert "os events:" in out
    assert "every 10ms: PedalMap.Run10ms" in out
    assert "Diag.RunSlow" not in out            # eliminated
    assert "IdleGov.Kp: f32" in out
    assert "PedalMap  reads: PedalPos  overrides: TqDemand" in out
    assert "EngSpd: f32  from (external)" in out


def test_compare_equal_exit_0(tmp_path, built_demo, capsys):
    csv = tmp_path / "t.csv"
    run_cli("run", built_demo, "--scenario", DEMO_ROOT / "idle.scn",
            "--measure", DEMO_ROOT / "idle.meas", "--out", csv)
    capsys.readouterr()
    assert run_cli("compare", csv, csv) == 0
    assert "traces agree" in capsys.readouterr().out


def test_compare_divergence_exit_7(tmp_path, built_demo, capsys):
    csv = tmp_path / "t.csv"
    run_cli("run", built_demo, "--scenario", DEMO_ROOT / "idle.scn",
            "--measure", DEMO_ROOT / "idle.meas", "--out", csv)
    lines = csv.read_text().splitlines()
    cells = lines[300].split(",")
    cells[1] = str(float(cells[1]) + 5.0)
    lines[300] = ",".join(cells)
    pert = tmp_path / "p.csv"
    pert.write_text("\n".join(lines) + "\n")
    capsys.readouterr()
    assert run_cli("compare", csv, pert, "--tol", "*=0.001") == 7
    out = capsys.readouterr().out
    assert "EngSpd" in out and "t=3000ms" in out


def test_compare_tolerance_flag_suppresses(tmp_path, built_demo):
    csv = tmp_path / "t.csv"
    run_cli("run", built_demo, "--scenario", DEMO_ROOT / "idle.scn",
            "--measure", DEMO_ROOT / "idle.meas", "--out", csv)
    lines = csv.read_text().splitlines()
    cells = lines[10].split(",")
    cells[1] = str(float(cells[1]) + 0.5)
    lines[10] = ",".join(cells)
    pert = tmp_path / "p.csv"
    pert.write_text("\n".join(lines) + "\n")
    assert run_cli("compare", csv, pert, "--tol", "EngSpd=1.0") == 0
    assert run_cli("compare", csv, pert, "--tol", "EngSpd=0.1") == 7


def test_compare_disjoint_columns_exit_5(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    a.write_text("t_ms,x\n1,1\n")
    b.write_text("t_ms,y\n1,1\n")
    assert run_cli("compare", a, b) == 5


def test_compare_unreadable_trace_exit_5(tmp_path):
    a = tmp_path / "a.csv"
    a.write_text("t_ms,x\n1,1\n")
    assert run_cli("compare", a, tmp_path / "missing.csv") == 5


def test_edit_demo_module_rebuilds_one(tmp_path, capsys):
    demo = tmp_path / "demo"
    shutil.copytree(DEMO_ROOT, demo)
    cache = tmp_path / "cache"
    img = tmp_path / "ems.vimg"
    run_cli("build", demo, "--cache", cache, "--out", img)
    p = demo / "AirCtl.vmod"
    p.write_text(p.read_text().replace("0.55", "0.60"))
    capsys.readouterr()
    assert run_cli("build", demo, "--cache", cache, "--out", img) == 0
    assert "1 rebuilt, 5 cached" in capsys.readouterr().out
