"""Image container: canonical, digest-protected, versioned."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import CorruptImage, IoError, VersionMismatch
from .canon import canonical_bytes, digest_of

FORMAT_VERSION = 1


@dataclass
class VEcuImage:
    payload: dict
    image_hash: str = field(default="", compare=False)

    # convenience views over the payload
    @property
    def modules(self) -> list[dict]:
        return self.payload["modules"]

    @property
    def os_events(self) -> list[dict]:
        return self.payload["os"]

    @property
    def signal_table(self) -> list[list]:
        return self.payload["signal_table"]

    @property
    def exposed(self) -> dict:
        return self.payload["exposed"]

    @property
    def crank_angle_signal(self) -> str:
        return self.payload["crank_angle_signal"]

    @property
    def default_recorded(self) -> list[str]:
        return self.payload["default_recorded"]


def image_from_payload(payload: dict) -> VEcuImage:
    return VEcuImage(payload, digest_of(payload))


def save_image(image: VEcuImage, path) -> None:
    obj = {"digest": image.image_hash, "payload": image.payload}
    Path(path).write_bytes(canonical_bytes(obj))


def load_image_file(path) -> VEcuImage:
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise IoError(f"cannot read image: {exc}") from exc
    try:
        obj = json.loads(raw)
    except ValueError as exc:
        raise CorruptImage(f"not valid image JSON ({exc})") from exc
    if not isinstance(obj, dict) or "payload" not in obj or "digest" not in obj:
        raise CorruptImage("missing digest or payload")
    payload = obj["payload"]
    version = payload.get("format_version") if isinstance(payload, dict) else None
    if version != FORMAT_VERSION:
        raise VersionMismatch(version, FORMAT_VERSION)
    if digest_of(payload) != obj["digest"]:
        raise CorruptImage("digest check failed")
    return VEcuImage(payload, obj["digest"])
