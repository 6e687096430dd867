/** Wire protocol: length-delimited JSON frames, proto 1.
 *
 * A frame is the ASCII decimal byte length of the body, a newline, then
 * the UTF-8 JSON body. The WebSocket carrier sends bare JSON per message
 * instead, so the framing here is only used by the raw TCP channel.
 */

export const PROTO = 1;
const MAX_FRAME = 16 * 1024 * 1024;
const MAX_HEADER_DIGITS = 9;

export interface ExposedParam {
  name: string;
  type: string;
  value: number;
}

export interface HelloMsg {
  proto: 1;
  type: "hello";
  image_hash: string;
  exposed: ExposedParam[];
  signals: string[];
  events: string[];
}

export interface SampleMsg {
  proto: 1;
  type: "sample";
  seq: number;
  t_ms: number;
  values: Record<string, number | boolean>;
}

export interface AckMsg {
  proto: 1;
  type: "ack";
  of: string;
  name?: string;
  event?: string;
  action?: string;
}

export interface ErrorMsg {
  proto: 1;
  type: "error";
  code: string;
  message: string;
}

export interface DroppedMsg {
  proto: 1;
  type: "dropped";
  count: number;
}

export type ServerMsg = HelloMsg | SampleMsg | AckMsg | ErrorMsg | DroppedMsg;

export type ClientMsg =
  | { proto: 1; type: "subscribe"; signals: string[]; decimation: number }
  | { proto: 1; type: "set_param"; name: string; value: number }
  | { proto: 1; type: "inject"; event: string }
  | { proto: 1; type: "control"; action: "run" | "pause" | "step"; n?: number }
  | { proto: 1; type: "describe" };

export function subscribeMsg(signals: string[], decimation = 10): ClientMsg {
  return { proto: PROTO, type: "subscribe", signals, decimation };
}

export function setParamMsg(name: string, value: number): ClientMsg {
  return { proto: PROTO, type: "set_param", name, value };
}

export function injectMsg(event: string): ClientMsg {
  return { proto: PROTO, type: "inject", event };
}

export function controlMsg(action: "run" | "pause" | "step", n?: number): ClientMsg {
  const msg: ClientMsg = { proto: PROTO, type: "control", action };
  if (n !== undefined) msg.n = n;
  return msg;
}

export class FrameError extends Error {}

const SERVER_TYPES = new Set(["hello", "sample", "ack", "error", "dropped"]);

/** Validate a decoded JSON value as a server message. */
export function asServerMsg(value: unknown): ServerMsg {
  if (typeof value !== "object" || value === null || Array.isArray(value)) {
    throw new FrameError("server message must be a JSON object");
  }
  const obj = value as Record<string, unknown>;
  if (obj.proto !== PROTO) {
    throw new FrameError(`unsupported proto ${String(obj.proto)}`);
  }
  if (typeof obj.type !== "string" || !SERVER_TYPES.has(obj.type)) {
    throw new FrameError(`unknown server message type ${String(obj.type)}`);
  }
  return value as ServerMsg;
}

export function encodeFrame(msg: ClientMsg): Uint8Array {
  const body = new TextEncoder().encode(JSON.stringify(msg));
  const head = new TextEncoder().encode(`${body.byteLength}\n`);
  const out = new Uint8Array(head.byteLength + body.byteLength);
  out.set(head, 0);
  out.set(body, head.byteLength);
  return out;
}

/** Incremental decoder for the byte stream; tolerates arbitrary chunking. */
export class FrameDecoder {
  private buf = new Uint8Array(0);
  private readonly utf8 = new TextDecoder("utf-8", { fatal: true });

  feed(chunk: Uint8Array): unknown[] {
    if (chunk.byteLength > 0) {
      const joined = new Uint8Array(this.buf.byteLength + chunk.byteLength);
      joined.set(this.buf, 0);
      joined.set(chunk, this.buf.byteLength);
      this.buf = joined;
    }
    const out: unknown[] = [];
    for (;;) {
      const nl = this.buf.indexOf(0x0a);
      if (nl < 0) {
        if (this.buf.byteLength > MAX_HEADER_DIGITS) {
          throw new FrameError("frame header is not a digit run");
        }
        return out;
      }
      const headText = this.utf8.decode(this.buf.subarray(0, nl));
      if (!/^[0-9]+$/.test(headText) || headText.length > MAX_HEADER_DIGITS) {
        throw new FrameError(`bad frame header ${JSON.stringify(headText)}`);
      }
      const length = Number(headText);
      if (length > MAX_FRAME) {
        throw new FrameError(`frame of ${length} bytes exceeds limit`);
      }
      if (this.buf.byteLength < nl + 1 + length) return out;
      const body = this.buf.subarray(nl + 1, nl + 1 + length);
      this.buf = this.buf.slice(nl + 1 + length);
      out.push(JSON.parse(this.utf8.decode(body)));
    }
  }
}
