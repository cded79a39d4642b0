"""HTTP facade over the evaluators: parse, evaluate at an instant, sample a
trajectory, step through reductions.

Requests are evaluated in isolation (no state between requests; identical
requests give byte-identical responses).  A bounded worker pool sheds load
with 429, and every evaluation runs under a wall-clock deadline independent
of fuel, reported as status "fuel" with a timeout flag.  Malformed JSON is a
400; validation failures (negative t, bad ranges) are 422.
"""

from __future__ import annotations

import threading
import time

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import bigstep, denotational, smallstep, wire
from .parser import try_parse
from .smallstep import NegativeDuration


class EvalRequest(BaseModel):
    source: str
    t: float = Field(ge=0, allow_inf_nan=False)
    fuel: int = Field(default=10 ** 6, ge=1)
    guard_tolerance: float = Field(default=0.0, ge=0)
    semantics: str = Field(default="small", pattern="^(small|big|den)$")


class TraceRequest(BaseModel):
    source: str
    t_max: float = Field(gt=0, allow_inf_nan=False)
    samples: int = Field(ge=2, le=100_000)
    fuel: int = Field(default=10 ** 6, ge=1)
    guard_tolerance: float = Field(default=0.0, ge=0)


class StepRequest(BaseModel):
    source: str
    t: float = Field(ge=0, allow_inf_nan=False)
    max_steps: int = Field(default=1000, ge=1, le=10_000)
    guard_tolerance: float = Field(default=0.0, ge=0)


class ParseBody(BaseModel):
    source: str


def zero_env(variables):
    return {x: 0.0 for x in variables}


def _deadline(seconds):
    end = time.monotonic() + seconds
    return lambda: time.monotonic() > end


def evaluate_source(source, t, fuel=10 ** 6, tol=0.0, semantics="small",
                    should_stop=None):
    """Parse + evaluate from the all-zero env; returns (wire dict, order)."""
    result, diags = try_parse(source)
    if result is None:
        return None, diags
    env = zero_env(result.variables)
    if semantics == "small":
        out, _ = smallstep.run(result.prog, env, t, fuel=fuel, tol=tol,
                               trace_limit=0, should_stop=should_stop)
    elif semantics == "big":
        out = bigstep.evaluate(result.prog, env, t, fuel=fuel, tol=tol,
                               should_stop=should_stop)
    else:
        out = denotational.sem_at(result.prog, env, t, fuel=fuel, tol=tol,
                                  should_stop=should_stop)
    return wire.eval_response(out, result.variables), None


def trace_source(source, t_max, samples, fuel=10 ** 6, tol=0.0, should_stop=None):
    result, diags = try_parse(source)
    if result is None:
        return None, diags
    points = denotational.sem_trace(result.prog, zero_env(result.variables),
                                    t_max, samples, fuel=fuel, tol=tol,
                                    should_stop=should_stop)
    return wire.trace_response(points, result.variables), None


def step_source(source, t, max_steps, tol=0.0, should_stop=None):
    result, diags = try_parse(source)
    if result is None:
        return None, diags
    out, trace = smallstep.run(result.prog, zero_env(result.variables), t,
                               fuel=max_steps, tol=tol,
                               trace_limit=max_steps, should_stop=should_stop)
    return wire.step_response(trace, out, result.variables, max_steps), None


def _diag_response(diags):
    return wire.parse_response(None, diags)


def create_app(workers=8, timeout=5.0, cors_origins=()):
    app = FastAPI(title="hybrid while-language workbench")
    slots = threading.BoundedSemaphore(workers)
    app.state.slots = slots  # exposed so saturation is testable

    if cors_origins:
        from fastapi.middleware.cors import CORSMiddleware

        app.add_middleware(CORSMiddleware, allow_origins=list(cors_origins),
                           allow_methods=["*"], allow_headers=["*"])

    @app.exception_handler(RequestValidationError)
    async def validation_handler(request: Request, exc: RequestValidationError):
        # missing/undecodable body is the caller's formatting problem: 400;
        # a well-formed body with out-of-range fields is 422
        for err in exc.errors():
            if err.get("type") in ("json_invalid", "missing") and err.get("loc") == ("body",):
                return JSONResponse(status_code=400, content={"detail": "malformed JSON body"})
            if err.get("type") == "json_invalid":
                return JSONResponse(status_code=400, content={"detail": "malformed JSON body"})
        return JSONResponse(status_code=422, content={"detail": exc.errors()})

    def _guarded(work):
        if not slots.acquire(blocking=False):
            return JSONResponse(status_code=429, content={"detail": "server is saturated"})
        try:
            return work()
        finally:
            slots.release()

    @app.post("/parse")
    def parse_endpoint(body: ParseBody):
        def work():
            result, diags = try_parse(body.source)
            return JSONResponse(wire.parse_response(result, diags))

        return _guarded(work)

    @app.post("/eval")
    def eval_endpoint(req: EvalRequest):
        def work():
            try:
                out, diags = evaluate_source(
                    req.source, req.t, fuel=req.fuel, tol=req.guard_tolerance,
                    semantics=req.semantics, should_stop=_deadline(timeout))
            except NegativeDuration as e:
                return JSONResponse(status_code=422, content={"detail": str(e)})
            if out is None:
                return JSONResponse(status_code=422, content=_diag_response(diags))
            return JSONResponse(out)

        return _guarded(work)

    @app.post("/trace")
    def trace_endpoint(req: TraceRequest):
        def work():
            try:
                out, diags = trace_source(
                    req.source, req.t_max, req.samples, fuel=req.fuel,
                    tol=req.guard_tolerance, should_stop=_deadline(timeout))
            except NegativeDuration as e:
                return JSONResponse(status_code=422, content={"detail": str(e)})
            if out is None:
                return JSONResponse(status_code=422, content=_diag_response(diags))
            return JSONResponse(out)

        return _guarded(work)

    @app.post("/step")
    def step_endpoint(req: StepRequest):
        def work():
            try:
                out, diags = step_source(req.source, req.t, req.max_steps,
                                         tol=req.guard_tolerance,
                                         should_stop=_deadline(timeout))
            except NegativeDuration as e:
                return JSONResponse(status_code=422, content={"detail": str(e)})
            if out is None:
                return JSONResponse(status_code=422, content=_diag_response(diags))
            return JSONResponse(out)

        return _guarded(work)

    return app
