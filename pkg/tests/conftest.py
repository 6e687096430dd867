from __future__ import annotations

import shutil
from pathlib import Path

import pytest

from vecu.buildsys.build import Workspace, build
from vecu.buildsys.cache import BuildCache

DEMO_ROOT = Path(__file__).resolve().parent.parent / "demo"


@pytest.fixture(scope="session")
def demo_image():
    image, _, _ = build(Workspace.load(DEMO_ROOT), BuildCache())
    return image


@pytest.fixture()
def demo_copy(tmp_path):
    """Mutable copy of the demo workspace for edit/rebuild tests."""
    dst = tmp_path / "demo"
    shutil.copytree(DEMO_ROOT, dst)
    return dst


@pytest.fixture()
def make_workspace(tmp_path):
    """Write a workspace from {filename: text} and return its root."""
    count = 0

    def _make(files: dict) -> Path:
        nonlocal count
        root = tmp_path / f"ws{count}"
        count += 1
        root.mkdir()
        for name, text in files.items():
            (root / name).write_text(text)
        return root

    return _make


# A minimal self-contained workspace: one counter bumped every 10 ms,
# one angular counter, one aperiodic init. Used anywhere a full demo
# would be overkill.
COUNTER_DICT = """\
Tick10 : u32
TdcHits : u32
Crank : f32
Started : bool
"""

COUNTER_MOD = """\
module Count
outputs: Tick10, TdcHits, Started

runnable Bump { Tick10 := Tick10 + 1 }
runnable Tdc { TdcHits := TdcHits + 1 }
runnable Init { Started := true }
"""

COUNTER_OS = """\
every 10ms: Count.Bump
at 0deg: Count.Tdc
on go: Count.Init
"""

COUNTER_CFG = """\
crank_angle_signal: Crank
recorded_signals: Tick10, TdcHits
"""

COUNTER_FILES = {
    "c.dict": COUNTER_DICT,
    "Count.vmod": COUNTER_MOD,
    "c.ostab": COUNTER_OS,
    "c.vcfg": COUNTER_CFG,
}


@pytest.fixture()
def counter_image(make_workspace):
    root = make_workspace(COUNTER_FILES)
    image, _, _ = build(Workspace.load(root), BuildCache())
    return image
