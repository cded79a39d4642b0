// @vitest-environment node
// Optional end-to-end check against a live backend:
//   hyb serve --port 8787 &
//   INSPECTOR_API=http://127.0.0.1:8787 npm test
import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { exampleByName } from "../src/examples.js";

const base = process.env.INSPECTOR_API;

describe.skipIf(!base)("live backend", () => {
  const api = () => new ApiClient(base as string);

  it("evaluates the cruise example at t=1.5 to v=6.5", async () => {
    const out = await api().evalAt({ source: exampleByName("cruise")!.source, t: 1.5 });
    expect(out.status).toBe("value");
    expect(out.env!.v).toBeCloseTo(6.5, 9);
  });

  it("steps the canonical loop with the annotated rule chain", async () => {
    const out = await api().step({ source: exampleByName("loop")!.source, t: 0.5 });
    expect(out.steps.map((s) => s.rule)).toEqual([
      "asg,seq-skip", "wh-true", "asg,seq-skip", "diff-stop,seq-stop",
    ]);
  });

  it("traces the ball below zero at the first bounce", async () => {
    const out = await api().trace({ source: exampleByName("ball")!.source,
                                    t_max: 1.2, samples: 400 });
    const ps = out.points.filter((p) => p.env).map((p) => p.env!.p);
    expect(Math.min(...ps)).toBeLessThan(0);
  });
});
