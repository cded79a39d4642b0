"""Wire shapes shared by the HTTP service and the CLI's --json mode.

One shaping function per endpoint so the two surfaces emit byte-identical
JSON.  Floats serialize as Python's shortest round-trip decimals.
"""

from __future__ import annotations

import json

from . import bigstep, smallstep
from .denotational import DivergedBefore, TerminatedAt, ValueAt


def dumps(obj):
    return json.dumps(obj, ensure_ascii=False, allow_nan=False,
                      separators=(",", ":"))


def _env_out(env, order):
    return {x: env[x] for x in order}


def eval_response(outcome, order):
    """Map any of the three evaluators' outcomes onto the /eval shape."""
    if isinstance(outcome, (smallstep.AtTime,)):
        return {"status": "value", "env": _env_out(outcome.env, order)}
    if isinstance(outcome, bigstep.StopAt):
        return {"status": "value", "env": _env_out(outcome.env, order)}
    if isinstance(outcome, ValueAt):
        return {"status": "value", "env": _env_out(outcome.env, order)}
    if isinstance(outcome, smallstep.Terminated):
        return {"status": "terminated", "env": _env_out(outcome.env, order),
                "duration": outcome.total_duration}
    if isinstance(outcome, bigstep.SkipAt):
        return {"status": "terminated", "env": _env_out(outcome.env, order),
                "duration": outcome.consumed}
    if isinstance(outcome, TerminatedAt):
        return {"status": "terminated", "env": _env_out(outcome.env, order),
                "duration": outcome.duration}
    if isinstance(outcome, DivergedBefore):
        return {"status": "diverged", "duration": outcome.duration}
    reason = getattr(outcome, "reason", "fuel")
    out = {"status": "fuel"}
    if reason == "timeout":
        out["timeout"] = True
    return out


def trace_response(points, order):
    """Map sem_trace output onto the /trace shape."""
    out_points = []
    markers = []
    seen = set()
    for t, r in points:
        if isinstance(r, ValueAt):
            out_points.append({"t": t, "env": _env_out(r.env, order)})
        elif isinstance(r, TerminatedAt):
            out_points.append({"t": t, "marker": "terminated",
                               "env": _env_out(r.env, order)})
            if "terminated" not in seen:
                seen.add("terminated")
                markers.append({"kind": "terminated", "t": r.duration,
                                "env": _env_out(r.env, order)})
        elif isinstance(r, DivergedBefore):
            out_points.append({"t": t, "marker": "diverged"})
            if "diverged" not in seen:
                seen.add("diverged")
                markers.append({"kind": "diverged", "t": r.duration})
        else:
            out_points.append({"t": t, "marker": "fuel"})
            if "fuel" not in seen:
                seen.add("fuel")
                markers.append({"kind": "fuel", "t": t})
    return {"points": out_points, "markers": markers}


def step_response(trace, outcome, order, max_steps):
    steps = []
    for e in trace[:max_steps]:
        entry = {"rule": e.rule, "env": _env_out(e.after.env, order), "t": e.after.t}
        if e.focus_span is not None:
            entry["code_span"] = [e.focus_span.start, e.focus_span.end]
        steps.append(entry)
    terminal = not isinstance(outcome, smallstep.FuelExhausted) and len(trace) <= max_steps
    out = {"steps": steps, "terminal": terminal}
    if isinstance(outcome, smallstep.AtTime):
        out["outcome"] = "stop"
    elif isinstance(outcome, smallstep.Terminated):
        out["outcome"] = "skip"
    else:
        out["outcome"] = "fuel"
    return out


def parse_response(result, diagnostics):
    if result is not None:
        return {"ok": True, "variables": list(result.variables), "diagnostics": []}
    return {"ok": False, "variables": [],
            "diagnostics": [{"message": d.message,
                             "line": d.span.line if d.span else 0,
                             "col": d.span.col if d.span else 0}
                            for d in diagnostics]}
