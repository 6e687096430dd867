/** Browser tuner: WebSocket carrier, sliders for exposed parameters,
 * strip charts for subscribed signals. Served as a static page; the
 * target host:port is whatever `vecu serve` printed.
 */

import { ClientMsg, SampleMsg } from "./protocol.js";
import { Catalog, Channel, TunerSession } from "./session.js";

const PLOT_WINDOW_MS = 10_000;
const COLORS = ["#4fc3f7", "#ffb74d", "#aed581", "#f06292", "#ba68c8", "#fff176"];

class WsChannel implements Channel {
  constructor(private readonly ws: WebSocket) {}
  send(msg: ClientMsg): void {
    this.ws.send(JSON.stringify(msg));
  }
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text = "",
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  if (text) node.textContent = text;
  return node;
}

function need(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node;
}

let session: TunerSession | null = null;
let running = false;

function setStatus(text: string): void {
  need("status").textContent = text;
}

function sliderBounds(value: number): { min: number; max: number } {
  if (value > 0) return { min: value / 10, max: value * 10 };
  if (value < 0) return { min: value * 10, max: value / 10 };
  return { min: -1, max: 1 };
}

function buildControls(catalog: Catalog): void {
  const params = need("params");
  params.replaceChildren();
  for (const [name, info] of catalog.exposed) {
    const row = el("div", { class: "param" });
    const label = el("span", { class: "name" }, `${name} (${info.type})`);
    const readout = el("span", { class: "readout" }, String(info.value));
    const { min, max } = sliderBounds(info.value);
    const slider = el("input", {
      type: "range",
      min: String(min),
      max: String(max),
      step: String((max - min) / 200),
      value: String(info.value),
    });
    slider.addEventListener("input", () => {
      const v = Number(slider.value);
      readout.textContent = v.toFixed(4);
      session?.setParam(name, v);
    });
    row.append(label, slider, readout);
    params.append(row);
    paramWidgets.set(name, { slider, readout });
  }

  const events = need("events");
  events.replaceChildren();
  for (const event of catalog.events) {
    const btn = el("button", {}, `inject ${event}`);
    btn.addEventListener("click", () => session?.inject(event));
    events.append(btn);
  }

  const picker = need("signals");
  picker.replaceChildren();
  const preselect = new Set(catalog.signals.slice(0, 4));
  for (const sig of catalog.signals) {
    const label = el("label");
    const box = el("input", { type: "checkbox" });
    box.checked = preselect.has(sig);
    label.append(box, document.createTextNode(sig));
    picker.append(label);
  }
}

const paramWidgets = new Map<
  string,
  { slider: HTMLInputElement; readout: HTMLSpanElement }
>();

function chosenSignals(): string[] {
  const out: string[] = [];
  need("signals")
    .querySelectorAll("label")
    .forEach((label) => {
      const box = label.querySelector("input");
      if (box?.checked) out.push(label.textContent ?? "");
    });
  return out;
}

function drawCharts(): void {
  const canvas = need("chart") as HTMLCanvasElement;
  const ctx = canvas.getContext("2d");
  if (!ctx || !session) return;
  const { width, height } = canvas;
  ctx.fillStyle = "#111418";
  ctx.fillRect(0, 0, width, height);

  const names = session.subscribed.filter((n) => session!.rings.has(n));
  const bands = Math.max(names.length, 1);
  names.forEach((name, i) => {
    const ring = session!.rings.get(name)!;
    const points = ring.toArray();
    if (points.length < 2) return;
    const tEnd = points[points.length - 1]!.t;
    const tStart = tEnd - PLOT_WINDOW_MS;
    const visible = points.filter((p) => p.t >= tStart);
    if (visible.length < 2) return;
    let lo = Infinity;
    let hi = -Infinity;
    for (const p of visible) {
      lo = Math.min(lo, p.v);
      hi = Math.max(hi, p.v);
    }
    if (hi - lo < 1e-9) {
      hi += 0.5;
      lo -= 0.5;
    }
    const bandTop = (i * height) / bands;
    const bandH = height / bands - 8;
    ctx.strokeStyle = COLORS[i % COLORS.length]!;
    ctx.beginPath();
    visible.forEach((p, j) => {
      const x = ((p.t - tStart) / PLOT_WINDOW_MS) * width;
      const y = bandTop + bandH - ((p.v - lo) / (hi - lo)) * bandH + 4;
      if (j === 0) ctx.moveTo(x, y);
      else ctx.lineTo(x, y);
    });
    ctx.stroke();
    ctx.fillStyle = COLORS[i % COLORS.length]!;
    const lastV = visible[visible.length - 1]!.v;
    ctx.fillText(`${name} = ${lastV.toPrecision(6)}`, 6, bandTop + 12);
  });
  requestAnimationFrame(drawCharts);
}

function connect(): void {
  const target = (need("target") as HTMLInputElement).value.trim();
  const ws = new WebSocket(`ws://${target}`);
  ws.addEventListener("open", () => setStatus(`connected to ${target}`));
  ws.addEventListener("close", () => setStatus("disconnected"));
  ws.addEventListener("error", () => setStatus(`cannot reach ${target}`));

  const s = new TunerSession(new WsChannel(ws), {
    onHello(catalog) {
      buildControls(catalog);
      setStatus(`image ${catalog.imageHash.slice(0, 12)}… | ` +
        `${catalog.exposed.size} tunables, ${catalog.signals.length} signals`);
    },
    onSample(_msg: SampleMsg) {
      // charts poll the rings on their own schedule
    },
    onParamRejected(name, error, lastGood) {
      const widget = paramWidgets.get(name);
      if (widget && lastGood !== undefined) {
        widget.slider.value = String(lastGood);
        widget.readout.textContent = String(lastGood);
      }
      setStatus(`${name}: ${error.code} ${error.message}`);
    },
    onGap(missed) {
      setStatus(`lost ${missed} samples (slow consumer)`);
    },
    onDropped(total) {
      setStatus(`server dropped ${total} frames so far`);
    },
  });
  session = s;

  ws.addEventListener("message", (ev) => {
    try {
      s.handle(JSON.parse(String(ev.data)));
    } catch (err) {
      setStatus(`protocol error: ${String(err)}`);
      ws.close();
    }
  });
}

function wire(): void {
  need("connect").addEventListener("click", connect);
  need("subscribe").addEventListener("click", () => {
    const decimation = Number((need("decimation") as HTMLInputElement).value) || 10;
    session?.subscribe(chosenSignals(), decimation);
  });
  need("run").addEventListener("click", () => {
    running = !running;
    session?.control(running ? "run" : "pause");
    need("run").textContent = running ? "pause" : "run";
  });
  need("step").addEventListener("click", () => session?.control("step", 100));
  requestAnimationFrame(drawCharts);
}

wire();
