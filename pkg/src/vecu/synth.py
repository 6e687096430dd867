"""Synthetic workspace generator for build-system scaling checks.

Produces a chain of modules: module i reads the signals produced by
module i-1 and filters them into its own outputs. Bodies are plain
arithmetic with per-module gains so every module compiles to a distinct
fragment. Deterministic for a given (modules, runnables, seed).
"""

from __future__ import annotations

import random
from pathlib import Path

_PERIODS = (1, 2, 5, 10, 20, 50, 100, 200)


def _module_text(i: int, runnables: int, rng: random.Random) -> str:
    lines = [f"module M{i:03d}", ""]
    ins = [f"s{i - 1:03d}_{j}" for j in range(runnables)] if i else []
    outs = [f"s{i:03d}_{j}" for j in range(runnables)]
    if ins:
        lines.append("inputs: " + ", ".join(ins))
    lines.append("outputs: " + ", ".join(outs))
    lines.append("")
    for j in range(runnables):
        gain = round(rng.uniform(0.5, 1.5), 4)
        lim = round(rng.uniform(50.0, 500.0), 2)
        lines.append(f"param G{j}: f32 = {gain}")
        lines.append(f"param L{j}: f32 = {lim}")
    lines.append("")
    for j in range(runnables):
        src = ins[(j * 3 + 1) % len(ins)] if ins else f"G{(j + 1) % runnables}"
        alt = ins[(j * 5 + 2) % len(ins)] if ins else f"L{j}"
        bias = round(rng.uniform(-2.0, 2.0), 4)
        lines += [
            f"runnable R{j} {{",
            f"    let a := {src} * G{j} + {bias}",
            f"    let b := clamp(a + {alt} * 0.125, -L{j}, L{j})",
            f"    {outs[j]} := b * 0.5 + {outs[j]} * 0.5",
            "}",
            "",
        ]
    return "\n".join(lines)


def generate_workspace(root, modules: int = 200, runnables: int = 8,
                       seed: int = 0) -> Path:
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    rng = random.Random(seed)

    dict_lines = []
    for i in range(modules):
        for j in range(runnables):
            dict_lines.append(f"s{i:03d}_{j} : f32")
    (root / "synth.dict").write_text("\n".join(dict_lines) + "\n")

    for i in range(modules):
        (root / f"M{i:03d}.vmod").write_text(_module_text(i, runnables, rng))

    events: dict[int, list[str]] = {p: [] for p in _PERIODS}
    for i in range(modules):
        for j in range(runnables):
            events[_PERIODS[j % len(_PERIODS)]].append(f"M{i:03d}.R{j}")
    os_lines = [f"every {p}ms: " + ", ".join(refs)
                for p, refs in events.items() if refs]
    (root / "synth.ostab").write_text("\n".join(os_lines) + "\n")

    recorded = [f"s{i:03d}_0" for i in range(min(modules, 20))]
    (root / "synth.vcfg").write_text(
        "recorded_signals: " + ", ".join(recorded) + "\n")
    return root
