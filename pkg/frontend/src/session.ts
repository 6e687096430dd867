/** Client-side session state: catalog, sample history, command pairing.
 *
 * The server answers every command in arrival order with exactly one
 * reply (ack or error; describe gets a fresh hello), so replies are
 * paired with a FIFO of commands in flight. Slider updates coalesce:
 * at most one set_param per parameter is ever in flight, the newest
 * queued value is sent once the previous one settles.
 */

import {
  AckMsg,
  ClientMsg,
  ErrorMsg,
  HelloMsg,
  SampleMsg,
  ServerMsg,
  asServerMsg,
  controlMsg,
  injectMsg,
  setParamMsg,
  subscribeMsg,
} from "./protocol.js";

export interface Channel {
  send(msg: ClientMsg): void;
}

export interface SamplePoint {
  t: number;
  v: number;
}

/** Fixed-capacity history; pushing past capacity evicts the oldest. */
export class SignalRing {
  private data: SamplePoint[] = [];
  private start = 0;

  constructor(readonly capacity: number) {
    if (!Number.isInteger(capacity) || capacity < 1) {
      throw new Error(`ring capacity must be a positive integer, got ${capacity}`);
    }
  }

  get length(): number {
    return this.data.length;
  }

  push(t: number, v: number): void {
    if (this.data.length < this.capacity) {
      this.data.push({ t, v });
      return;
    }
    this.data[this.start] = { t, v };
    this.start = (this.start + 1) % this.capacity;
  }

  /** Oldest to newest. */
  toArray(): SamplePoint[] {
    return [...this.data.slice(this.start), ...this.data.slice(0, this.start)];
  }

  last(): SamplePoint | undefined {
    if (this.data.length === 0) return undefined;
    const i = (this.start + this.data.length - 1) % this.data.length;
    return this.data[i];
  }
}

export interface Catalog {
  imageHash: string;
  exposed: Map<string, { type: string; value: number }>;
  signals: string[];
  events: string[];
}

interface PendingParam {
  inflight: number;
  queued?: number;
}

export interface SessionEvents {
  onHello?(catalog: Catalog): void;
  onSample?(msg: SampleMsg): void;
  /** A set_param settled server-side (acked). */
  onParamAcked?(name: string, value: number): void;
  /** A set_param was refused; lastGood is the last server-accepted value. */
  onParamRejected?(name: string, error: ErrorMsg, lastGood: number | undefined): void;
  onServerError?(error: ErrorMsg): void;
  onGap?(missed: number): void;
  onDropped?(total: number): void;
}

export class TunerSession {
  catalog: Catalog | null = null;
  subscribed: string[] = [];
  decimation = 10;
  gaps = 0;
  droppedTotal = 0;
  readonly rings = new Map<string, SignalRing>();

  private expectSeq = 1;
  private inflight: ClientMsg[] = [];
  private pendingParams = new Map<string, PendingParam>();

  constructor(
    private readonly channel: Channel,
    private readonly events: SessionEvents = {},
    private readonly ringCapacity = 1200,
  ) {}

  // ------------------------------------------------------------ commands

  subscribe(signals: string[], decimation = 10): void {
    this.subscribed = [...signals];
    this.decimation = decimation;
    this.sendCommand(subscribeMsg(signals, decimation));
  }

  setParam(name: string, value: number): void {
    const pending = this.pendingParams.get(name);
    if (pending) {
      pending.queued = value; // overwrite: only the newest value matters
      return;
    }
    this.pendingParams.set(name, { inflight: value });
    this.sendCommand(setParamMsg(name, value));
  }

  inject(event: string): void {
    this.sendCommand(injectMsg(event));
  }

  control(action: "run" | "pause" | "step", n?: number): void {
    this.sendCommand(controlMsg(action, n));
  }

  describe(): void {
    this.sendCommand({ proto: 1, type: "describe" });
  }

  private sendCommand(msg: ClientMsg): void {
    this.inflight.push(msg);
    this.channel.send(msg);
  }

  // ------------------------------------------------------------ inbound

  handle(raw: unknown): void {
    const msg: ServerMsg = asServerMsg(raw);
    switch (msg.type) {
      case "hello":
        this.onHello(msg);
        return;
      case "sample":
        this.onSample(msg);
        return;
      case "ack":
        this.onAck(msg);
        return;
      case "error":
        this.onError(msg);
        return;
      case "dropped":
        this.droppedTotal += msg.count;
        this.events.onDropped?.(this.droppedTotal);
        return;
    }
  }

  private onHello(msg: HelloMsg): void {
    // an unsolicited hello greets the connection; a describe gets one too
    if (this.inflight[0]?.type === "describe") this.inflight.shift();
    this.catalog = {
      imageHash: msg.image_hash,
      exposed: new Map(msg.exposed.map((p) => [p.name, { type: p.type, value: p.value }])),
      signals: [...msg.signals],
      events: [...msg.events],
    };
    this.events.onHello?.(this.catalog);
  }

  private onSample(msg: SampleMsg): void {
    if (msg.seq !== this.expectSeq) {
      const missed = msg.seq - this.expectSeq;
      if (missed > 0) {
        this.gaps += missed;
        this.events.onGap?.(missed);
      }
    }
    this.expectSeq = msg.seq + 1;
    for (const [name, value] of Object.entries(msg.values)) {
      let ring = this.rings.get(name);
      if (!ring) {
        ring = new SignalRing(this.ringCapacity);
        this.rings.set(name, ring);
      }
      ring.push(msg.t_ms, Number(value));
    }
    this.events.onSample?.(msg);
  }

  private settleParam(name: string, accepted: number | null): void {
    const pending = this.pendingParams.get(name);
    if (!pending) return;
    if (accepted !== null && this.catalog) {
      const entry = this.catalog.exposed.get(name);
      if (entry) entry.value = accepted;
    }
    if (pending.queued !== undefined) {
      const next = pending.queued;
      this.pendingParams.set(name, { inflight: next });
      this.sendCommand(setParamMsg(name, next));
    } else {
      this.pendingParams.delete(name);
    }
  }

  private onAck(msg: AckMsg): void {
    const cmd = this.inflight.shift();
    if (msg.of === "set_param") {
      const name = msg.name ?? (cmd?.type === "set_param" ? cmd.name : undefined);
      if (name !== undefined && cmd?.type === "set_param") {
        const value = cmd.value;
        this.settleParam(name, value);
        this.events.onParamAcked?.(name, value);
      }
    }
  }

  private onError(msg: ErrorMsg): void {
    const cmd = this.inflight.shift();
    if (cmd?.type === "set_param") {
      const lastGood = this.catalog?.exposed.get(cmd.name)?.value;
      this.settleParam(cmd.name, null);
      this.events.onParamRejected?.(cmd.name, msg, lastGood);
      return;
    }
    this.events.onServerError?.(msg);
  }
}
