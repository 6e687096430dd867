"""Canonical JSON serialization: the byte layer under every content hash."""

from __future__ import annotations

import hashlib
import json


def canonical_bytes(obj) -> bytes:
    # sorted keys + fixed separators + ascii: platform-independent bytes
    return json.dumps(obj, sort_keys=True, separators=(",", ":"),
                      ensure_ascii=True, allow_nan=False).encode("ascii")


def digest_of(obj) -> str:
    return hashlib.sha256(canonical_bytes(obj)).hexdigest()
