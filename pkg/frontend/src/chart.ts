// Hand-rolled SVG time-series chart: line per visible variable, marker rails
// for terminated/diverged/fuel boundaries, a crosshair pin for point queries,
// and a drag-brush that reports the selected time window so the app can
// re-request the trace at finer resolution (no client-side interpolation).

import type { TraceMarker } from "./api.js";
import type { Series } from "./series.js";
import { extent } from "./series.js";

export interface Scale {
  domain: [number, number];
  range: [number, number];
}

export function scaleValue(s: Scale, x: number): number {
  const [d0, d1] = s.domain;
  const [r0, r1] = s.range;
  if (d1 === d0) return (r0 + r1) / 2;
  return r0 + ((x - d0) / (d1 - d0)) * (r1 - r0);
}

export function invertValue(s: Scale, px: number): number {
  const [d0, d1] = s.domain;
  const [r0, r1] = s.range;
  if (r1 === r0) return d0;
  return d0 + ((px - r0) / (r1 - r0)) * (d1 - d0);
}

export function pathOf(points: { t: number; y: number }[], xs: Scale, ys: Scale): string {
  if (points.length === 0) return "";
  const parts = points.map((p, i) => {
    const cmd = i === 0 ? "M" : "L";
    return `${cmd}${scaleValue(xs, p.t).toFixed(2)},${scaleValue(ys, p.y).toFixed(2)}`;
  });
  return parts.join(" ");
}

export function niceTicks(lo: number, hi: number, count = 6): number[] {
  if (hi <= lo) return [lo];
  const span = hi - lo;
  const step = Math.pow(10, Math.floor(Math.log10(span / count)));
  const candidates = [step, 2 * step, 2.5 * step, 5 * step, 10 * step];
  const chosen = candidates.find((c) => span / c <= count) ?? 10 * step;
  const ticks: number[] = [];
  for (let v = Math.ceil(lo / chosen) * chosen; v <= hi + chosen * 1e-9; v += chosen) {
    ticks.push(Math.round(v * 1e9) / 1e9);
  }
  return ticks;
}

const SVG = "http://www.w3.org/2000/svg";
const COLORS = ["#2563eb", "#dc2626", "#059669", "#d97706", "#7c3aed"];

export interface ChartCallbacks {
  onZoom?: (w0: number, w1: number) => void;
  onPick?: (t: number) => void;
}

export class TimeSeriesChart {
  readonly root: SVGSVGElement;
  private width = 760;
  private height = 320;
  private margin = { left: 48, right: 12, top: 10, bottom: 24 };
  private xs: Scale = { domain: [0, 1], range: [0, 1] };
  private ys: Scale = { domain: [0, 1], range: [0, 1] };
  private brushStart: number | null = null;
  private brushRect: SVGRectElement | null = null;

  constructor(private callbacks: ChartCallbacks = {}) {
    this.root = document.createElementNS(SVG, "svg") as SVGSVGElement;
    this.root.setAttribute("viewBox", `0 0 ${this.width} ${this.height}`);
    this.root.setAttribute("class", "chart");
    this.root.addEventListener("mousedown", (e) => this.brushBegin(e as MouseEvent));
    this.root.addEventListener("mousemove", (e) => this.brushMove(e as MouseEvent));
    this.root.addEventListener("mouseup", (e) => this.brushEnd(e as MouseEvent));
    this.root.addEventListener("dblclick", () => this.callbacks.onZoom?.(NaN, NaN));
  }

  private px(e: MouseEvent): number {
    const rect = this.root.getBoundingClientRect();
    const w = rect.width || this.width;
    return ((e.clientX - rect.left) / w) * this.width;
  }

  private brushBegin(e: MouseEvent) {
    this.brushStart = this.px(e);
  }

  private brushMove(e: MouseEvent) {
    if (this.brushStart === null) return;
    const now = this.px(e);
    if (!this.brushRect) {
      this.brushRect = document.createElementNS(SVG, "rect") as SVGRectElement;
      this.brushRect.setAttribute("class", "brush");
      this.root.appendChild(this.brushRect);
    }
    const lo = Math.min(this.brushStart, now);
    this.brushRect.setAttribute("x", String(lo));
    this.brushRect.setAttribute("y", String(this.margin.top));
    this.brushRect.setAttribute("width", String(Math.abs(now - this.brushStart)));
    this.brushRect.setAttribute("height", String(this.height - this.margin.top - this.margin.bottom));
  }

  private brushEnd(e: MouseEvent) {
    if (this.brushStart === null) return;
    const a = this.brushStart;
    const b = this.px(e);
    this.brushStart = null;
    if (this.brushRect) {
      this.brushRect.remove();
      this.brushRect = null;
    }
    if (Math.abs(b - a) > 6) {
      const w0 = invertValue(this.xs, Math.min(a, b));
      const w1 = invertValue(this.xs, Math.max(a, b));
      this.callbacks.onZoom?.(w0, w1);
    } else {
      this.callbacks.onPick?.(invertValue(this.xs, a));
    }
  }

  /** Programmatic zoom, used by tests and the reset button. */
  zoomTo(w0: number, w1: number) {
    this.callbacks.onZoom?.(w0, w1);
  }

  render(series: Series[], markers: TraceMarker[], window: [number, number],
         pin: { t: number; label: string } | null = null) {
    while (this.root.firstChild) this.root.removeChild(this.root.firstChild);
    const inner = {
      x0: this.margin.left,
      x1: this.width - this.margin.right,
      y0: this.height - this.margin.bottom,
      y1: this.margin.top,
    };
    this.xs = { domain: window, range: [inner.x0, inner.x1] };
    const { min, max } = extent(series);
    const pad = (max - min) * 0.08;
    this.ys = { domain: [min - pad, max + pad], range: [inner.y0, inner.y1] };

    for (const tick of niceTicks(this.ys.domain[0], this.ys.domain[1])) {
      const y = scaleValue(this.ys, tick);
      this.line(inner.x0, y, inner.x1, y, "grid");
      this.text(4, y + 4, tick.toPrecision(3).replace(/\.?0+$/, ""), "tick");
    }
    for (const tick of niceTicks(window[0], window[1], 8)) {
      const x = scaleValue(this.xs, tick);
      this.line(x, inner.y0, x, inner.y0 + 4, "axis");
      this.text(x - 8, this.height - 8, String(tick), "tick");
    }
    if (this.ys.domain[0] < 0 && this.ys.domain[1] > 0) {
      const zero = scaleValue(this.ys, 0);
      this.line(inner.x0, zero, inner.x1, zero, "zero");
    }

    series.forEach((s, i) => {
      if (s.points.length === 0) return;
      const path = document.createElementNS(SVG, "path");
      path.setAttribute("d", pathOf(s.points, this.xs, this.ys));
      path.setAttribute("class", "series");
      path.setAttribute("data-name", s.name);
      path.setAttribute("stroke", COLORS[i % COLORS.length]);
      path.setAttribute("fill", "none");
      this.root.appendChild(path);
    });

    for (const m of markers) {
      if (m.t < window[0] || m.t > window[1]) continue;
      const x = scaleValue(this.xs, m.t);
      this.line(x, inner.y0, x, inner.y1, `marker marker-${m.kind}`);
      this.text(x + 3, inner.y1 + 10, m.kind, "marker-label");
    }

    if (pin !== null && pin.t >= window[0] && pin.t <= window[1]) {
      const x = scaleValue(this.xs, pin.t);
      this.line(x, inner.y0, x, inner.y1, "crosshair");
      this.text(Math.min(x + 4, this.width - 160), inner.y1 + 22, pin.label, "pin-label");
    }
  }

  private line(x1: number, y1: number, x2: number, y2: number, cls: string) {
    const el = document.createElementNS(SVG, "line");
    el.setAttribute("x1", String(x1));
    el.setAttribute("y1", String(y1));
    el.setAttribute("x2", String(x2));
    el.setAttribute("y2", String(y2));
    el.setAttribute("class", cls);
    this.root.appendChild(el);
  }

  private text(x: number, y: number, content: string, cls: string) {
    const el = document.createElementNS(SVG, "text");
    el.setAttribute("x", String(x));
    el.setAttribute("y", String(y));
    el.setAttribute("class", cls);
    el.textContent = content;
    this.root.appendChild(el);
  }
}
