// Typed client for the four workbench endpoints. Each UI panel names itself
// when it issues a request; a newer request from the same panel aborts the
// one still in flight.

export type Env = Record<string, number>;

export interface EvalRequest {
  source: string;
  t: number;
  fuel?: number;
  guard_tolerance?: number;
  semantics?: "small" | "big" | "den";
}

export interface EvalResponse {
  status: "value" | "terminated" | "diverged" | "fuel";
  env?: Env;
  duration?: number;
  timeout?: boolean;
}

export interface TraceRequest {
  source: string;
  t_max: number;
  samples: number;
  fuel?: number;
}

export interface TracePoint {
  t: number;
  env?: Env;
  marker?: string;
}

export interface TraceMarker {
  kind: string;
  t: number;
  env?: Env;
}

export interface TraceResponse {
  points: TracePoint[];
  markers: TraceMarker[];
}

export interface StepRequest {
  source: string;
  t: number;
  max_steps?: number;
}

export interface StepEntry {
  rule: string;
  env: Env;
  t: number;
  code_span?: [number, number];
}

export interface StepResponse {
  steps: StepEntry[];
  terminal: boolean;
  outcome: string;
}

export interface Diagnostic {
  message: string;
  line: number;
  col: number;
}

export interface ParseResponse {
  ok: boolean;
  variables: string[];
  diagnostics: Diagnostic[];
}

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  private inflight = new Map<string, AbortController>();

  constructor(
    private baseUrl: string,
    private fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async post<T>(path: string, body: unknown, panel: string): Promise<T> {
    const previous = this.inflight.get(panel);
    if (previous) previous.abort();
    const controller = new AbortController();
    this.inflight.set(panel, controller);
    try {
      const response = await this.fetchFn(this.baseUrl + path, {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify(body),
        signal: controller.signal,
      });
      if (!response.ok) {
        const text = await response.text();
        throw new ApiError(response.status, text || response.statusText);
      }
      return (await response.json()) as T;
    } finally {
      if (this.inflight.get(panel) === controller) this.inflight.delete(panel);
    }
  }

  parse(source: string): Promise<ParseResponse> {
    return this.post("/parse", { source }, "parse");
  }

  evalAt(req: EvalRequest): Promise<EvalResponse> {
    return this.post("/eval", req, "eval");
  }

  trace(req: TraceRequest): Promise<TraceResponse> {
    return this.post("/trace", req, "trace");
  }

  step(req: StepRequest): Promise<StepResponse> {
    return this.post("/step", req, "step");
  }
}
