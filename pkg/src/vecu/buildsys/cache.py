"""Build cache: one meta record plus one compiled fragment per module.

A hit requires equal source digest AND equal environment digest.  File
mtime/size is only a fast path to skip rehashing; an entry stamped in the
same instant as the source's mtime is treated as unverifiable and rehashed
(the stamp cannot prove the bytes were not rewritten afterwards).
Writes are buffered and land on flush(), after a fully successful build.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path

from .canon import canonical_bytes
from .compile import CompiledModule


@dataclass
class CacheEntry:
    source_hash: str
    env_hash: str
    mtime_ns: int
    size: int
    stamp_ns: int
    dict_used: list[str]
    fragment: CompiledModule | None = field(default=None, repr=False)

    def fast_path_valid(self, st) -> bool:
        return (st.st_mtime_ns == self.mtime_ns and st.st_size == self.size
                and self.stamp_ns > self.mtime_ns)


class BuildCache:
    """In-memory when dir_path is None; otherwise backed by a directory."""

    def __init__(self, dir_path=None):
        self.dir = Path(dir_path) if dir_path is not None else None
        self.entries: dict[str, CacheEntry] = {}
        self._pending: dict[str, CacheEntry] = {}
        if self.dir is not None and self.dir.is_dir():
            self._load()

    def _load(self):
        for meta_path in sorted(self.dir.glob("*.meta.json")):
            name = meta_path.name[:-len(".meta.json")]
            try:
                meta = json.loads(meta_path.read_text())
                entry = CacheEntry(meta["source_hash"], meta["env_hash"],
                                   meta["mtime_ns"], meta["size"],
                                   meta["stamp_ns"], meta["dict_used"])
            except (ValueError, KeyError, TypeError):
                continue        # unreadable entry: treat as a miss
            if not (self.dir / f"{name}.frag").is_file():
                continue
            self.entries[name] = entry

    def fragment(self, name: str) -> CompiledModule:
        entry = self.entries[name]
        if entry.fragment is None:
            raw = (self.dir / f"{name}.frag").read_text()
            entry.fragment = CompiledModule.from_obj(json.loads(raw))
        return entry.fragment

    def put(self, name: str, compiled: CompiledModule, st, dict_used):
        self._pending[name] = CacheEntry(
            compiled.source_hash, compiled.env_hash, st.st_mtime_ns,
            st.st_size, time.time_ns(), sorted(dict_used), compiled)

    def refresh_stamp(self, name: str, st):
        """Source touched but byte-identical: re-validate the fast path."""
        old = self.entries[name]
        self._pending[name] = CacheEntry(
            old.source_hash, old.env_hash, st.st_mtime_ns, st.st_size,
            time.time_ns(), old.dict_used, old.fragment)

    def drop(self, name: str):
        self.entries.pop(name, None)
        self._pending.pop(name, None)
        if self.dir is not None:
            for suffix in (".meta.json", ".frag"):
                p = self.dir / f"{name}{suffix}"
                if p.exists():
                    p.unlink()

    def flush(self):
        for name, entry in self._pending.items():
            prior = self.entries.get(name)
            if self.dir is not None:
                self.dir.mkdir(parents=True, exist_ok=True)
                meta = {"source_hash": entry.source_hash,
                        "env_hash": entry.env_hash,
                        "mtime_ns": entry.mtime_ns, "size": entry.size,
                        "stamp_ns": entry.stamp_ns,
                        "dict_used": entry.dict_used}
                (self.dir / f"{name}.meta.json").write_text(
                    json.dumps(meta, sort_keys=True, indent=1))
                if prior is None or prior.source_hash != entry.source_hash \
                        or prior.env_hash != entry.env_hash:
                    frag = canonical_bytes(entry.fragment.to_obj())
                    (self.dir / f"{name}.frag").write_bytes(frag)
            self.entries[name] = entry
        self._pending.clear()
