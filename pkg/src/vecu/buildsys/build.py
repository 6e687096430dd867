"""Workspace loading, change detection, and the full build pipeline."""

from __future__ import annotations

import hashlib
import time
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import IoError, MissingFile, VecuError, VecuSyntaxError
from ..specfmt import (parse_dictionary, parse_module, parse_os_spec,
                       parse_vecu_config)
from ..specfmt.ast import ModuleSpec, OsSpec, TypeDictionary, VecuConfig
from .cache import BuildCache
from .compile import compile_module
from .image import VEcuImage
from .link import link
from .wrapper import env_digest, generate_wrapper


@dataclass
class Workspace:
    root: Path
    dictionary: TypeDictionary
    os_spec: OsSpec
    config: VecuConfig
    module_paths: dict[str, Path]    # module name (file stem) -> source path

    @classmethod
    def load(cls, root) -> "Workspace":
        root = Path(root)
        if not root.is_dir():
            raise IoError(f"workspace '{root}' is not a directory")

        def only(pattern: str) -> Path:
            found = sorted(root.glob(pattern))
            if len(found) != 1:
                raise IoError(f"workspace needs exactly one {pattern} file, "
                              f"found {len(found)} in '{root}'")
            return found[0]

        dict_path = only("*.dict")
        os_path = only("*.ostab")
        cfg_path = only("*.vcfg")
        dictionary = parse_dictionary(dict_path.read_text(), str(dict_path))
        os_spec = parse_os_spec(os_path.read_text(), str(os_path))
        config = parse_vecu_config(cfg_path.read_text(), str(cfg_path))
        modules = {p.stem: p for p in sorted(root.glob("*.vmod"))}
        return cls(root, dictionary, os_spec, config, modules)


def _entry_env_hash(entry, workspace: Workspace, name: str) -> str:
    used = {n: workspace.dictionary.entries.get(n, "?")
            for n in entry.dict_used}
    return env_digest(used, name in workspace.config.bypassable_modules,
                      name in workspace.config.exposed_tunable_modules)


def detect_changes(workspace: Workspace, cache: BuildCache) -> list[str]:
    """Module names needing recompilation, in sorted order."""
    for name in sorted(cache.entries):
        if name not in workspace.module_paths:
            raise MissingFile(name, str(workspace.root / f"{name}.vmod"))
    changed = []
    for name in sorted(workspace.module_paths):
        path = workspace.module_paths[name]
        entry = cache.entries.get(name)
        if entry is None:
            changed.append(name)
            continue
        try:
            st = path.stat()
        except OSError:
            raise MissingFile(name, str(path)) from None
        if entry.fast_path_valid(st):
            source_same = True
        else:
            digest = hashlib.sha256(path.read_bytes()).hexdigest()
            source_same = digest == entry.source_hash
        if not source_same or _entry_env_hash(entry, workspace, name) != entry.env_hash:
            changed.append(name)
    return changed


@dataclass
class ModuleBuildInfo:
    name: str
    action: str            # 'rebuilt' | 'cached'
    seconds: float


@dataclass
class BuildReport:
    modules: list[ModuleBuildInfo] = field(default_factory=list)
    link_seconds: float = 0.0
    total_seconds: float = 0.0
    image_hash: str = ""

    @property
    def rebuilt(self) -> list[str]:
        return [m.name for m in self.modules if m.action == "rebuilt"]

    @property
    def cached(self) -> list[str]:
        return [m.name for m in self.modules if m.action == "cached"]

    def to_text(self) -> str:
        lines = [f"{m.action:7s} {m.name}  ({m.seconds * 1000:.1f} ms)"
                 for m in self.modules]
        lines.append(f"{len(self.rebuilt)} rebuilt, {len(self.cached)} cached; "
                     f"linked in {self.link_seconds * 1000:.1f} ms; "
                     f"total {self.total_seconds:.2f} s")
        lines.append(f"image {self.image_hash}")
        return "\n".join(lines) + "\n"


def parse_module_file(path: Path, dictionary: TypeDictionary) -> ModuleSpec:
    spec = parse_module(path.read_text(), dictionary, str(path))
    if spec.name != path.stem:
        raise VecuSyntaxError(
            f"module '{spec.name}' must live in '{spec.name}.vmod', "
            f"not '{path.name}'", 1, 1, str(path))
    return spec


def build(workspace: Workspace, cache: BuildCache):
    """Returns (VEcuImage, cache, BuildReport); cache is updated in place
    and persisted only after the whole build (compile + link) succeeds."""
    t_start = time.perf_counter()
    to_rebuild = set(detect_changes(workspace, cache))
    report = BuildReport()
    fragments = []
    for name in sorted(workspace.module_paths):
        path = workspace.module_paths[name]
        t0 = time.perf_counter()
        if name in to_rebuild:
            st = path.stat()
            spec = parse_module_file(path, workspace.dictionary)
            try:
                iface = generate_wrapper(spec, workspace.dictionary,
                                         workspace.config)
                compiled = compile_module(spec, iface)
            except VecuError as exc:
                if exc.path is None:
                    exc.path = str(path)
                raise
            cache.put(name, compiled, st, [n for n, _ in iface.inputs + iface.outputs])
            report.modules.append(ModuleBuildInfo(
                name, "rebuilt", time.perf_counter() - t0))
        else:
            entry = cache.entries[name]
            st = path.stat()
            if not entry.fast_path_valid(st):
                cache.refresh_stamp(name, st)   # touched but byte-identical
            compiled = cache.fragment(name)
            report.modules.append(ModuleBuildInfo(
                name, "cached", time.perf_counter() - t0))
        fragments.append(compiled)
    t_link = time.perf_counter()
    image = link(fragments, workspace.os_spec, workspace.config,
                 workspace.dictionary)
    report.link_seconds = time.perf_counter() - t_link
    cache.flush()
    report.total_seconds = time.perf_counter() - t_start
    report.image_hash = image.image_hash
    return image, cache, report
