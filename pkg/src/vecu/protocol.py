"""Live-tuning protocol: length-delimited JSON frames, proto 1.

Wire format per frame: the payload byte length as ASCII decimal digits,
a single "\\n", then that many bytes of UTF-8 JSON. One JSON object per
frame. Every message carries proto: 1.

client -> server:
    {type:"subscribe", signals:[...], decimation:k}
    {type:"set_param", name, value}
    {type:"inject", event}
    {type:"control", action:"run"|"pause"|"step", n?}
    {type:"describe"}
server -> client:
    {type:"hello", image_hash, exposed:[...]}   (+ signals, events)
    {type:"sample", seq, t_ms, values:{...}}
    {type:"ack", of}                            (+ name/event echo)
    {type:"error", code, message}
    {type:"dropped", count}
"""

from __future__ import annotations

import json

PROTO = 1
MAX_FRAME = 4 * 1024 * 1024


class FrameError(Exception):
    """Unrecoverable framing violation; the connection should close."""


def encode_frame(obj: dict) -> bytes:
    data = json.dumps(obj, sort_keys=True, separators=(",", ":")).encode("utf-8")
    return str(len(data)).encode("ascii") + b"\n" + data


class FrameDecoder:
    """Incremental decoder: feed() bytes, get complete payloads back.

    Payloads are returned as raw bytes; JSON errors are the caller's to
    handle per-message (a bad payload does not poison the stream).
    """

    def __init__(self):
        self._buf = bytearray()
        self._need = None   # payload length once the header is complete

    def feed(self, data: bytes) -> list[bytes]:
        self._buf.extend(data)
        out = []
        while True:
            if self._need is None:
                nl = self._buf.find(b"\n")
                if nl < 0:
                    if len(self._buf) > 20:
                        raise FrameError("frame header too long")
                    break
                head = bytes(self._buf[:nl])
                if not head.isdigit():
                    raise FrameError(f"bad frame length {head!r}")
                self._need = int(head)
                if self._need > MAX_FRAME:
                    raise FrameError(f"frame of {self._need} bytes exceeds limit")
                del self._buf[:nl + 1]
            if len(self._buf) < self._need:
                break
            payload = bytes(self._buf[:self._need])
            del self._buf[:self._need]
            self._need = None
            out.append(payload)
        return out


def parse_message(payload: bytes):
    """Returns (obj, None) or (None, reason)."""
    try:
        obj = json.loads(payload)
    except ValueError as exc:
        return None, f"not valid JSON: {exc}"
    if not isinstance(obj, dict):
        return None, "message must be a JSON object"
    if obj.get("proto") != PROTO:
        return None, f"unsupported proto {obj.get('proto')!r}"
    if not isinstance(obj.get("type"), str):
        return None, "message has no type"
    return obj, None


def msg_hello(image_hash: str, exposed: list, signals: list, events: list) -> dict:
    return {"proto": PROTO, "type": "hello", "image_hash": image_hash,
            "exposed": exposed, "signals": signals, "events": events}


def msg_sample(seq: int, t_ms: int, values: dict) -> dict:
    return {"proto": PROTO, "type": "sample", "seq": seq, "t_ms": t_ms,
            "values": values}


def msg_ack(of: str, **extra) -> dict:
    return {"proto": PROTO, "type": "ack", "of": of, **extra}


def msg_error(code: str, message: str) -> dict:
    return {"proto": PROTO, "type": "error", "code": code, "message": message}


def msg_dropped(count: int) -> dict:
    return {"proto": PROTO, "type": "dropped", "count": count}
