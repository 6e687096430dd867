"""Live tuning server: one simulated instance, many subscribers.

The simulation loop owns the instance; client commands land in a queue
that is drained between ticks, in arrival order, so no command is ever
applied mid-tick. Outbound messages go through bounded per-client
buffers with drop-oldest overflow and an explicit dropped counter.

Two carriers share the port: raw TCP with length-delimited JSON frames
(first bytes are digits), and WebSocket (first bytes are "GET ") for
browser clients. Frame clients receive the hello once their first frame
arrives; WebSocket clients right after the handshake.
"""

from __future__ import annotations

import base64
import hashlib
import queue
import socket
import threading
import time
from collections import deque

from .errors import (AmbiguousParameter, NotExposed, TypeMismatch,
                     UnknownEvent, UnknownSignal, VecuError)
from .plant.harness import PLANT_COLUMNS, TickDriver
from .protocol import (FrameDecoder, FrameError, encode_frame, msg_ack,
                       msg_dropped, msg_error, msg_hello, msg_sample,
                       parse_message)

_WS_GUID = "258EAFA5-E914-47DA-95CA-C5AB0DC85B11"
OUTBOX_LIMIT = 1024
DEFAULT_DECIMATION = 10


def _error_code(exc: VecuError) -> str:
    if isinstance(exc, NotExposed):
        return "not_exposed"
    if isinstance(exc, AmbiguousParameter):
        return "ambiguous_parameter"
    if isinstance(exc, TypeMismatch):
        return "type_mismatch"
    if isinstance(exc, UnknownSignal):
        return "unknown_signal"
    if isinstance(exc, UnknownEvent):
        return "unknown_event"
    return "error"


class _Client:
    def __init__(self, sock: socket.socket, addr):
        self.sock = sock
        self.addr = addr
        self.carrier = "frame"
        self.cond = threading.Condition()
        self.outbox: deque = deque()
        self.dropped = 0
        self.closed = False
        self.subscribed = False
        self.signals: list = []
        self.decimation = DEFAULT_DECIMATION
        self.seq = 0

    def enqueue(self, msg: dict) -> None:
        with self.cond:
            if self.closed:
                return
            if len(self.outbox) >= OUTBOX_LIMIT:
                self.outbox.popleft()
                self.dropped += 1
            self.outbox.append(msg)
            self.cond.notify()

    def close(self) -> None:
        with self.cond:
            self.closed = True
            self.cond.notify()


class LiveServer:
    def __init__(self, instance, *, plant=None, scenario=None, bindings=None,
                 host: str = "127.0.0.1", port: int = 0, rate: float = 1000.0):
        self.instance = instance
        self.driver = TickDriver(instance, plant=plant, scenario=scenario,
                                 bindings=bindings)
        self.rate = rate
        self.host = host
        self._want_port = port
        self.port = None
        self.mode = "paused"
        self._step_budget = 0
        self.commands: queue.Queue = queue.Queue()
        self._pending_events: list = []
        self._clients: list = []
        self._clients_lock = threading.Lock()
        self._stop = threading.Event()
        self._sock = None
        self._aperiodic = [ev["name"] for ev in instance.schedule
                           if ev["kind"] == "aperiodic"]

    # ------------------------------------------------------------ lifecycle

    def start(self) -> int:
        self._sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        self._sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        self._sock.bind((self.host, self._want_port))
        self._sock.listen(16)
        self.port = self._sock.getsockname()[1]
        threading.Thread(target=self._acceptor, daemon=True).start()
        return self.port

    def stop(self) -> None:
        self._stop.set()
        if self._sock is not None:
            try:
                self._sock.close()
            except OSError:
                pass
        with self._clients_lock:
            clients = list(self._clients)
        for c in clients:
            c.close()

    def serve_forever(self) -> None:
        deadline = time.monotonic()
        while not self._stop.is_set():
            self._drain_commands()
            if self.mode == "running" or self._step_budget > 0:
                t = self._tick()
                self._fanout(t)
                if self.rate > 0:
                    deadline += 1.0 / self.rate
                    delay = deadline - time.monotonic()
                    if delay > 0:
                        time.sleep(delay)
                    else:
                        deadline = time.monotonic()
            else:
                time.sleep(0.002)
                deadline = time.monotonic()

    def _tick(self) -> int:
        events, self._pending_events = self._pending_events, []
        t = self.driver.tick(events)
        if self._step_budget > 0:
            self._step_budget -= 1
            if self._step_budget == 0 and self.mode == "stepping":
                self.mode = "paused"
        return t

    # ------------------------------------------------------------ commands

    def _drain_commands(self) -> None:
        while True:
            try:
                client, obj = self.commands.get_nowait()
            except queue.Empty:
                return
            self._apply(client, obj)

    def _hello(self) -> dict:
        inst = self.instance
        exposed = [{"name": q, "type": t, "value": inst.params[q]}
                   for q, t in sorted(inst.tunables.items())]
        signals = sorted(inst.sig_types)
        if self.driver.plant is not None:
            signals += sorted(PLANT_COLUMNS)
        return msg_hello(inst.image.image_hash, exposed, signals,
                         list(self._aperiodic))

    def _apply(self, client: _Client, obj: dict) -> None:
        kind = obj["type"]
        if kind == "describe":
            client.enqueue(self._hello())
            return
        if kind == "subscribe":
            signals = obj.get("signals")
            decimation = obj.get("decimation", DEFAULT_DECIMATION)
            if (not isinstance(signals, list)
                    or not all(isinstance(s, str) for s in signals)):
                client.enqueue(msg_error("bad_request",
                                         "subscribe needs a signal list"))
                return
            if not isinstance(decimation, int) or isinstance(decimation, bool) \
                    or decimation < 1:
                client.enqueue(msg_error("bad_request",
                                         "decimation must be an integer >= 1"))
                return
            for name in signals:
                if not self.driver.can_read(name):
                    client.enqueue(msg_error("unknown_signal",
                                             f"unknown signal '{name}'"))
                    return
            client.signals = list(signals)
            client.decimation = decimation
            client.subscribed = True
            client.enqueue(msg_ack("subscribe"))
            return
        if kind == "set_param":
            name = obj.get("name")
            if not isinstance(name, str):
                client.enqueue(msg_error("bad_request", "set_param needs a name"))
                return
            try:
                self.instance.set_parameter(name, obj.get("value"))
            except VecuError as exc:
                client.enqueue(msg_error(_error_code(exc), str(exc)))
                return
            client.enqueue(msg_ack("set_param", name=name))
            return
        if kind == "inject":
            event = obj.get("event")
            if event not in self._aperiodic:
                client.enqueue(msg_error(
                    "unknown_event", f"unknown aperiodic event '{event}'"))
                return
            self._pending_events.append(event)
            client.enqueue(msg_ack("inject", event=event))
            return
        if kind == "control":
            action = obj.get("action")
            if action == "run":
                self.mode = "running"
                self._step_budget = 0
            elif action == "pause":
                self.mode = "paused"
                self._step_budget = 0
            elif action == "step":
                n = obj.get("n", 1)
                if not isinstance(n, int) or isinstance(n, bool) or n < 1:
                    client.enqueue(msg_error("bad_request",
                                             "step count must be >= 1"))
                    return
                self.mode = "stepping"
                self._step_budget += n
            else:
                client.enqueue(msg_error("bad_request",
                                         f"unknown action {action!r}"))
                return
            client.enqueue(msg_ack("control", action=action))
            return
        client.enqueue(msg_error("unknown_type", f"unknown type {kind!r}"))

    def _fanout(self, t: int) -> None:
        with self._clients_lock:
            clients = list(self._clients)
        for client in clients:
            if client.closed or not client.subscribed:
                continue
            if t % client.decimation:
                continue
            values = {name: self.driver.read(name) for name in client.signals}
            client.seq += 1
            client.enqueue(msg_sample(client.seq, t, values))

    # ------------------------------------------------------------ transport

    def _acceptor(self) -> None:
        while not self._stop.is_set():
            try:
                sock, addr = self._sock.accept()
            except OSError:
                return
            sock.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
            client = _Client(sock, addr)
            with self._clients_lock:
                self._clients.append(client)
            threading.Thread(target=self._reader, args=(client,),
                             daemon=True).start()

    def _drop_client(self, client: _Client) -> None:
        client.close()
        with self._clients_lock:
            if client in self._clients:
                self._clients.remove(client)
        try:
            client.sock.close()
        except OSError:
            pass

    def _reader(self, client: _Client) -> None:
        try:
            first = client.sock.recv(65536)
        except OSError:
            self._drop_client(client)
            return
        if not first:
            self._drop_client(client)
            return
        if first.startswith(b"GET "):
            client.carrier = "ws"
            rest = self._ws_handshake(client, first)
            if rest is None:
                self._drop_client(client)
                return
            threading.Thread(target=self._writer, args=(client,),
                             daemon=True).start()
            client.enqueue(self._hello())
            self._ws_read_loop(client, rest)
        else:
            threading.Thread(target=self._writer, args=(client,),
                             daemon=True).start()
            client.enqueue(self._hello())
            self._frame_read_loop(client, first)

    def _handle_payload(self, client: _Client, payload: bytes) -> None:
        obj, reason = parse_message(payload)
        if reason is not None:
            client.enqueue(msg_error("bad_message", reason))
            return
        self.commands.put((client, obj))

    def _frame_read_loop(self, client: _Client, first: bytes) -> None:
        decoder = FrameDecoder()
        data = first
        while True:
            try:
                payloads = decoder.feed(data)
            except FrameError as exc:
                client.enqueue(msg_error("bad_frame", str(exc)))
                break
            for payload in payloads:
                self._handle_payload(client, payload)
            try:
                data = client.sock.recv(65536)
            except OSError:
                break
            if not data:
                break
        client.close()

    # -- websocket carrier

    def _ws_handshake(self, client: _Client, first: bytes):
        buf = bytearray(first)
        while b"\r\n\r\n" not in buf:
            try:
                data = client.sock.recv(65536)
            except OSError:
                return None
            if not data or len(buf) > 65536:
                return None
            buf.extend(data)
        head, rest = bytes(buf).split(b"\r\n\r\n", 1)
        headers = {}
        for line in head.decode("latin-1").split("\r\n")[1:]:
            if ":" in line:
                k, v = line.split(":", 1)
                headers[k.strip().lower()] = v.strip()
        key = headers.get("sec-websocket-key")
        if not key or "websocket" not in headers.get("upgrade", "").lower():
            try:
                client.sock.sendall(b"HTTP/1.1 400 Bad Request\r\n\r\n")
            except OSError:
                pass
            return None
        accept = base64.b64encode(
            hashlib.sha1((key + _WS_GUID).encode("ascii")).digest()).decode()
        resp = ("HTTP/1.1 101 Switching Protocols\r\n"
                "Upgrade: websocket\r\n"
                "Connection: Upgrade\r\n"
                f"Sec-WebSocket-Accept: {accept}\r\n\r\n")
        try:
            client.sock.sendall(resp.encode("ascii"))
        except OSError:
            return None
        return rest

    def _ws_read_loop(self, client: _Client, rest: bytes) -> None:
        sock = client.sock
        buf = bytearray(rest)

        def read_exact(n: int):
            while len(buf) < n:
                try:
                    data = sock.recv(65536)
                except OSError:
                    return None
                if not data:
                    return None
                buf.extend(data)
            out = bytes(buf[:n])
            del buf[:n]
            return out

        parts: list = []
        while True:
            head = read_exact(2)
            if head is None:
                break
            fin = head[0] & 0x80
            opcode = head[0] & 0x0F
            masked = head[1] & 0x80
            length = head[1] & 0x7F
            if length == 126:
                ext = read_exact(2)
                if ext is None:
                    break
                length = int.from_bytes(ext, "big")
            elif length == 127:
                ext = read_exact(8)
                if ext is None:
                    break
                length = int.from_bytes(ext, "big")
            mask = b"\x00" * 4
            if masked:
                mask = read_exact(4)
                if mask is None:
                    break
            payload = read_exact(length) if length else b""
            if payload is None:
                break
            if masked:
                payload = bytes(b ^ mask[i % 4] for i, b in enumerate(payload))
            if opcode == 0x8:      # close
                break
            if opcode == 0x9:      # ping -> pong
                client.enqueue({"_ws_raw": _ws_encode(payload, opcode=0xA)})
                continue
            if opcode in (0x1, 0x2, 0x0):
                parts.append(payload)
                if fin:
                    self._handle_payload(client, b"".join(parts))
                    parts = []
        client.close()

    # -- writer

    def _send(self, client: _Client, msg: dict) -> None:
        raw = msg.get("_ws_raw")
        if raw is not None:
            client.sock.sendall(raw)
            return
        if client.carrier == "ws":
            frame = encode_frame(msg)
            payload = frame.split(b"\n", 1)[1]
            client.sock.sendall(_ws_encode(payload))
        else:
            client.sock.sendall(encode_frame(msg))

    def _writer(self, client: _Client) -> None:
        while True:
            with client.cond:
                while not client.outbox and not client.dropped \
                        and not client.closed:
                    client.cond.wait()
                batch = list(client.outbox)
                client.outbox.clear()
                dropped, client.dropped = client.dropped, 0
                done = client.closed and not batch
            if dropped:
                batch.insert(0, msg_dropped(dropped))
            try:
                for msg in batch:
                    self._send(client, msg)
            except OSError:
                break
            if done:
                break
        self._drop_client(client)


def _ws_encode(payload: bytes, opcode: int = 0x1) -> bytes:
    n = len(payload)
    if n < 126:
        head = bytes([0x80 | opcode, n])
    elif n < 65536:
        head = bytes([0x80 | opcode, 126]) + n.to_bytes(2, "big")
    else:
        head = bytes([0x80 | opcode, 127]) + n.to_bytes(8, "big")
    return head + payload
