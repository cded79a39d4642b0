// Inspector app: an editor with a gallery, a trajectory plot with
// zoom-triggered re-sampling, a time-instant query panel, and a step-through
// view of the reduction rules. Every displayed number comes from the
// service; the client never recomputes semantics.

import { ApiClient, ApiError, TraceResponse } from "./api.js";
import { TimeSeriesChart } from "./chart.js";
import { EXAMPLES, exampleByName } from "./examples.js";
import { toSeries, windowed } from "./series.js";
import {
  ViewState, decodeState, defaultState, encodeState, evalRequestOf,
  stepRequestOf, traceRequestOf,
} from "./state.js";
import { formatEnv, formatNumber, splitSpan, stepRows } from "./steps.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K, cls = "", text = "",
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (cls) node.className = cls;
  if (text) node.textContent = text;
  return node;
}

export class InspectorApp {
  state: ViewState;
  variables: string[] = [];
  lastTrace: TraceResponse | null = null;
  pin: { t: number; label: string } | null = null;

  readonly editor: HTMLTextAreaElement;
  readonly status: HTMLElement;
  readonly chart: TimeSeriesChart;
  readonly legend: HTMLElement;
  readonly queryInput: HTMLInputElement;
  readonly queryOutput: HTMLElement;
  readonly historyList: HTMLUListElement;
  readonly stepList: HTMLOListElement;
  readonly stepSource: HTMLElement;
  readonly tMaxInput: HTMLInputElement;
  readonly samplesInput: HTMLInputElement;

  private stepCursorRows = 0;

  constructor(root: HTMLElement, private api: ApiClient, hash = "") {
    this.state = decodeState(hash) ?? defaultState(EXAMPLES[0].source);
    if (!this.state.source) this.state.source = EXAMPLES[0].source;

    const editorPane = el("section", "pane editor-pane");
    editorPane.appendChild(el("h2", "", "program"));
    const gallery = el("div", "gallery");
    for (const ex of EXAMPLES) {
      const btn = el("button", "gallery-btn", ex.title);
      btn.dataset.example = ex.name;
      btn.addEventListener("click", () => this.loadExample(ex.name));
      gallery.appendChild(btn);
    }
    editorPane.appendChild(gallery);
    this.editor = el("textarea", "editor");
    this.editor.value = this.state.source;
    this.editor.rows = 10;
    editorPane.appendChild(this.editor);
    const controls = el("div", "controls");
    this.tMaxInput = el("input", "tmax");
    this.tMaxInput.value = String(this.state.tMax);
    this.samplesInput = el("input", "samples");
    this.samplesInput.value = String(this.state.samples);
    const runBtn = el("button", "run-btn", "run");
    runBtn.addEventListener("click", () => void this.run());
    controls.append("t_max ", this.tMaxInput, " samples ", this.samplesInput, runBtn);
    editorPane.appendChild(controls);
    this.status = el("div", "status");
    editorPane.appendChild(this.status);

    const plotPane = el("section", "pane plot-pane");
    plotPane.appendChild(el("h2", "", "trajectory"));
    this.chart = new TimeSeriesChart({
      onZoom: (w0, w1) => void this.applyZoom(w0, w1),
      onPick: (t) => void this.queryPoint(t),
    });
    plotPane.appendChild(this.chart.root as unknown as Node);
    this.legend = el("div", "legend");
    plotPane.appendChild(this.legend);
    const resetBtn = el("button", "reset-btn", "reset zoom");
    resetBtn.addEventListener("click", () => void this.applyZoom(NaN, NaN));
    plotPane.appendChild(resetBtn);

    const queryPane = el("section", "pane query-pane");
    queryPane.appendChild(el("h2", "", "evaluate at a time instant"));
    this.queryInput = el("input", "query-t");
    this.queryInput.placeholder = "t";
    const queryBtn = el("button", "query-btn", "evaluate");
    queryBtn.addEventListener("click", () => {
      const t = Number(this.queryInput.value);
      if (Number.isFinite(t) && t >= 0) void this.queryPoint(t);
    });
    this.queryOutput = el("div", "query-output");
    this.historyList = el("ul", "query-history");
    queryPane.append(this.queryInput, queryBtn, this.queryOutput, this.historyList);

    const stepPane = el("section", "pane step-pane");
    stepPane.appendChild(el("h2", "", "step debugger"));
    const stepControls = el("div", "step-controls");
    const stepT = el("input", "step-t");
    stepT.placeholder = "t";
    stepT.value = "0.5";
    const stepBtn = el("button", "step-btn", "derive");
    stepBtn.addEventListener("click", () => void this.loadSteps(Number(stepT.value)));
    const back = el("button", "step-back", "◀");
    back.addEventListener("click", () => this.moveCursor(-1));
    const fwd = el("button", "step-fwd", "▶");
    fwd.addEventListener("click", () => this.moveCursor(1));
    stepControls.append(stepT, stepBtn, back, fwd);
    this.stepSource = el("pre", "step-source");
    this.stepList = el("ol", "step-list");
    stepPane.append(stepControls, this.stepSource, this.stepList);

    root.append(editorPane, plotPane, queryPane, stepPane);
  }

  private say(text: string, isError = false) {
    this.status.textContent = text;
    this.status.classList.toggle("error", isError);
  }

  loadExample(name: string) {
    const ex = exampleByName(name);
    if (!ex) return;
    this.state = defaultState(ex.source);
    this.state.tMax = ex.tMax;
    this.state.window = [0, ex.tMax];
    this.editor.value = ex.source;
    this.tMaxInput.value = String(ex.tMax);
    this.samplesInput.value = String(this.state.samples);
    this.syncHash();
  }

  async run(): Promise<void> {
    this.state.source = this.editor.value;
    this.state.tMax = Number(this.tMaxInput.value) || 10;
    this.state.samples = Math.max(2, Number(this.samplesInput.value) || 500);
    this.state.window = [0, this.state.tMax];
    try {
      const parsed = await this.api.parse(this.state.source);
      if (!parsed.ok) {
        const d = parsed.diagnostics[0];
        this.say(`parse error at ${d.line}:${d.col}: ${d.message}`, true);
        return;
      }
      this.variables = parsed.variables;
      await this.refreshTrace();
      this.say(`ok (variables: ${this.variables.join(", ")})`);
    } catch (e) {
      this.say(e instanceof ApiError ? `service error ${e.status}` : String(e), true);
    }
    this.syncHash();
  }

  async refreshTrace(): Promise<void> {
    const req = traceRequestOf(this.state);
    this.lastTrace = await this.api.trace(req);
    this.renderPlot();
  }

  renderPlot() {
    if (!this.lastTrace) return;
    const visible = this.variables.filter((v) => !this.state.hidden.includes(v));
    const series = windowed(toSeries(this.lastTrace, visible), ...this.state.window);
    this.chart.render(series, this.lastTrace.markers, this.state.window, this.pin);
    this.renderLegend();
  }

  private renderLegend() {
    this.legend.textContent = "";
    for (const v of this.variables) {
      const label = el("label", "legend-item");
      const box = el("input") as HTMLInputElement;
      box.type = "checkbox";
      box.checked = !this.state.hidden.includes(v);
      box.addEventListener("change", () => {
        this.state.hidden = box.checked
          ? this.state.hidden.filter((h) => h !== v)
          : [...this.state.hidden, v];
        this.renderPlot();
        this.syncHash();
      });
      label.append(box, ` ${v}`);
      this.legend.appendChild(label);
    }
  }

  async applyZoom(w0: number, w1: number): Promise<void> {
    if (!Number.isFinite(w0) || !Number.isFinite(w1)) {
      this.state.window = [0, this.state.tMax];
    } else {
      this.state.window = [Math.max(0, w0), Math.min(this.state.tMax, w1)];
    }
    try {
      await this.refreshTrace(); // genuine re-sampling, not interpolation
    } catch (e) {
      if ((e as Error).name !== "AbortError") {
        this.say(String(e), true);
        return;
      }
    }
    this.syncHash();
  }

  async queryPoint(t: number): Promise<void> {
    this.state.queryT = t;
    try {
      const out = await this.api.evalAt(evalRequestOf(this.state, t));
      let text: string;
      if (out.status === "value" && out.env) {
        text = formatEnv(out.env);
      } else if (out.status === "terminated" && out.env) {
        text = `terminated after ${formatNumber(out.duration ?? 0)}: ${formatEnv(out.env)}`;
      } else if (out.status === "diverged") {
        text = `diverged before ${formatNumber(out.duration ?? 0)}`;
      } else {
        text = out.timeout ? "fuel exhausted (timeout)" : "fuel exhausted";
      }
      this.queryOutput.textContent = `t = ${formatNumber(t)}: ${text}`;
      this.queryOutput.dataset.status = out.status;
      this.pin = { t, label: text };
      const item = el("li", "history-item", `t = ${formatNumber(t)} → ${text}`);
      this.historyList.prepend(item);
      this.renderPlot();
    } catch (e) {
      if ((e as Error).name !== "AbortError") this.say(String(e), true);
    }
    this.syncHash();
  }

  async loadSteps(t: number): Promise<void> {
    this.state.source = this.editor.value;
    try {
      const resp = await this.api.step(stepRequestOf(this.state, t));
      const zero: Record<string, number> = {};
      for (const v of this.variables) zero[v] = 0;
      const rows = stepRows(resp, zero);
      this.stepList.textContent = "";
      rows.forEach((row) => {
        const li = el("li", "step-row");
        li.dataset.rule = row.rule;
        if (row.span) {
          li.dataset.spanStart = String(row.span[0]);
          li.dataset.spanEnd = String(row.span[1]);
        }
        const tick = row.guardTick ? " ✓guard" : "";
        li.textContent =
          `(${row.rule})${tick}  ${formatEnv(row.env, row.changed)}  t=${formatNumber(row.t)}`;
        li.addEventListener("click", () => this.setCursor(row.index));
        this.stepList.appendChild(li);
      });
      const outcomeLi = el("li", "step-outcome",
        resp.terminal ? `⇒ ${resp.outcome}` : "… truncated");
      this.stepList.appendChild(outcomeLi);
      this.stepCursorRows = rows.length;
      this.setCursor(Math.min(this.state.stepCursor, rows.length - 1));
    } catch (e) {
      if ((e as Error).name !== "AbortError") this.say(String(e), true);
    }
  }

  moveCursor(delta: number) {
    this.setCursor(this.state.stepCursor + delta);
  }

  setCursor(index: number) {
    if (this.stepCursorRows === 0) return;
    index = Math.max(0, Math.min(this.stepCursorRows - 1, index));
    this.state.stepCursor = index;
    const rows = this.stepList.querySelectorAll("li.step-row");
    rows.forEach((row, i) => row.classList.toggle("active", i === index));
    this.highlightSpan(this.spanOfRow(index));
    this.syncHash();
  }

  private spanOfRow(index: number): [number, number] | null {
    const row = this.stepList.querySelectorAll("li.step-row")[index] as HTMLElement | undefined;
    if (row?.dataset.spanStart !== undefined) {
      return [Number(row.dataset.spanStart), Number(row.dataset.spanEnd)];
    }
    return null;
  }

  private highlightSpan(span: [number, number] | null) {
    const [before, active, after] = splitSpan(this.state.source, span);
    this.stepSource.textContent = "";
    this.stepSource.append(before);
    const mark = el("mark", "active-span", active);
    this.stepSource.appendChild(mark);
    this.stepSource.append(after);
  }

  syncHash() {
    const hash = encodeState(this.state);
    if (typeof history !== "undefined" && history.replaceState) {
      history.replaceState(null, "", hash);
    }
  }
}

export function mountApp(root: HTMLElement, api: ApiClient, hash = ""): InspectorApp {
  return new InspectorApp(root, api, hash);
}

declare global {
  interface Window {
    __HYB_API__?: string;
  }
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  const base = window.__HYB_API__ ?? "http://127.0.0.1:8787";
  mountApp(document.getElementById("app") as HTMLElement, new ApiClient(base),
           location.hash);
}
