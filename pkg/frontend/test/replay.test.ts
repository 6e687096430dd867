/** Conformance: replay the recorded tuning transcript against a real
 * headless server over raw TCP. The server is `vecu serve` on a fresh
 * build of the demo workspace, paused until the transcript says run.
 */

import { ChildProcess, spawn } from "node:child_process";
import { mkdtempSync, readFileSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import path from "node:path";
import { fileURLToPath } from "node:url";

import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ClientMsg, SampleMsg, ServerMsg, asServerMsg } from "../src/protocol.js";
import { TunerSession } from "../src/session.js";
import { TcpChannel } from "../src/tcp.js";

const HERE = path.dirname(fileURLToPath(import.meta.url));
const REPO = path.resolve(HERE, "..", "..");
const DEMO = path.join(REPO, "demo");
const FIXTURE = path.join(HERE, "..", "fixtures", "tuning_session.json");

interface Transcript {
  subscribe_decimation: number;
  steps: Step[];
}

type Step =
  | { send: ClientMsg }
  | { expect: Record<string, unknown> }
  | { collect_samples: { count: number } }
  | { expect_sample_value: { signal: string; value: number; within_samples: number } }
  | { quiesce_ms: number };

class Inbox {
  private queue: ServerMsg[] = [];
  private waiter: ((msg: ServerMsg) => void) | null = null;

  push(msg: ServerMsg): void {
    if (this.waiter) {
      const w = this.waiter;
      this.waiter = null;
      w(msg);
    } else {
      this.queue.push(msg);
    }
  }

  next(timeoutMs = 5000): Promise<ServerMsg> {
    const head = this.queue.shift();
    if (head) return Promise.resolve(head);
    return new Promise((resolve, reject) => {
      const timer = setTimeout(() => {
        this.waiter = null;
        reject(new Error(`no server message within ${timeoutMs} ms`));
      }, timeoutMs);
      this.waiter = (msg) => {
        clearTimeout(timer);
        resolve(msg);
      };
    });
  }

  /** Resolves with true if any message arrives inside the window. */
  async anythingWithin(ms: number): Promise<boolean> {
    try {
      await this.next(ms);
      return true;
    } catch {
      return false;
    }
  }
}

function runOnce(cmd: string, args: string[]): Promise<void> {
  return new Promise((resolve, reject) => {
    const child = spawn(cmd, args, { stdio: ["ignore", "ignore", "pipe"] });
    let stderr = "";
    child.stderr.on("data", (d: Buffer) => (stderr += d.toString()));
    child.on("exit", (code) =>
      code === 0 ? resolve() : reject(new Error(`${cmd} exited ${code}: ${stderr}`)),
    );
    child.on("error", reject);
  });
}

function startServer(image: string): Promise<{ proc: ChildProcess; port: number }> {
  return new Promise((resolve, reject) => {
    const proc = spawn(
      "python3",
      ["-m", "vecu.cli", "serve", image, "--port", "0"],
      { stdio: ["ignore", "pipe", "pipe"] },
    );
    let out = "";
    let err = "";
    const timer = setTimeout(
      () => reject(new Error(`server never announced a port: ${out} ${err}`)),
      10000,
    );
    proc.stdout.on("data", (d: Buffer) => {
      out += d.toString();
      const m = out.match(/listening on 127\.0\.0\.1:(\d+)/);
      if (m) {
        clearTimeout(timer);
        resolve({ proc, port: Number(m[1]) });
      }
    });
    proc.stderr.on("data", (d: Buffer) => (err += d.toString()));
    proc.on("error", reject);
    proc.on("exit", (code) => {
      clearTimeout(timer);
      reject(new Error(`server exited early (${code}): ${err}`));
    });
  });
}

describe("transcript replay", () => {
  let work = "";
  let server: ChildProcess | null = null;
  let port = 0;

  beforeAll(async () => {
    work = mkdtempSync(path.join(tmpdir(), "tuner-"));
    const image = path.join(work, "ems.vimg");
    await runOnce("python3", [
      "-m", "vecu.cli", "build", DEMO,
      "--cache", path.join(work, "cache"),
      "--out", image,
    ]);
    const started = await startServer(image);
    server = started.proc;
    port = started.port;
  }, 30000);

  afterAll(() => {
    server?.kill();
    if (work) rmSync(work, { recursive: true, force: true });
  });

  it("replays every ack and sample expectation", { timeout: 30000 }, async () => {
    const transcript = JSON.parse(readFileSync(FIXTURE, "utf-8")) as Transcript;
    const channel = await TcpChannel.connect("127.0.0.1", port);
    const inbox = new Inbox();
    const session = new TunerSession(channel);
    const samples: SampleMsg[] = [];
    let firstSeq: number | null = null;

    channel.onMessage = (raw) => {
      const msg = asServerMsg(raw);
      session.handle(msg);
      if (msg.type === "sample") {
        samples.push(msg);
        if (firstSeq === null) firstSeq = msg.seq;
      }
      inbox.push(msg);
    };

    const nextNonSample = async (): Promise<ServerMsg> => {
      for (;;) {
        const msg = await inbox.next();
        if (msg.type !== "sample") return msg;
      }
    };

    for (const step of transcript.steps) {
      if ("send" in step) {
        channel.send(step.send);
      } else if ("expect" in step) {
        const msg = await nextNonSample();
        expect(msg).toMatchObject(step.expect);
      } else if ("collect_samples" in step) {
        let got = 0;
        while (got < step.collect_samples.count) {
          const msg = await inbox.next();
          if (msg.type !== "sample") throw new Error(`expected sample, got ${msg.type}`);
          expect(msg.t_ms % transcript.subscribe_decimation).toBe(0);
          got += 1;
        }
      } else if ("expect_sample_value" in step) {
        const want = step.expect_sample_value;
        let inspected = 0;
        let hit = false;
        while (inspected < want.within_samples) {
          const msg = await inbox.next();
          if (msg.type !== "sample") throw new Error(`expected sample, got ${msg.type}`);
          inspected += 1;
          if (msg.values[want.signal] === want.value) {
            hit = true;
            break;
          }
        }
        expect(hit, `${want.signal} did not reach ${want.value} within ` +
          `${want.within_samples} samples of the ack`).toBe(true);
      } else if ("quiesce_ms" in step) {
        expect(await inbox.anythingWithin(step.quiesce_ms)).toBe(false);
      }
    }

    // stream invariants across the whole replay
    expect(firstSeq).toBe(1);
    expect(session.gaps).toBe(0);
    expect(session.droppedTotal).toBe(0);
    const seqs = samples.map((s) => s.seq);
    for (let i = 1; i < seqs.length; i++) {
      expect(seqs[i]).toBe(seqs[i - 1]! + 1);
    }

    // the slider change survived into the streamed samples
    expect(session.rings.get("IdleGov.Kp")?.last()?.v).toBe(0.25);
    // and the injected event left the engine state high in the stream
    expect(session.rings.get("EngState")?.last()?.v).toBe(1);

    channel.close();
  });
});
