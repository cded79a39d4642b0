"""One-step reduction of configurations <code, env, remaining time>.

The reducer consumes time only at differential statements: a statement whose
duration exceeds the remaining budget ends the run at the queried instant
(stop, with 0 time left); otherwise it finishes, hands the leftover time to
the continuation (skip), and sequencing proceeds.  Exactly one rule applies
to any configuration; `applicable_rules` re-checks that claim guard by guard
so the property can be tested rather than trusted.

A reduction under sequencing is reported as a rule chain, innermost first
("asg,seq-skip"), which is how derivations are usually annotated when the
step happens inside a `;` context.

While-loop unfolding appends the loop continuation right-associatively
(hyb.syntax.seq_append), keeping traces in the canonical shape the parser
produces.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .dynamics import FlowFn, compile_system, eval_bexpr, eval_lterm, update_env
from .syntax import Assign, DiffFor, If, Seq, While, while_unfold


class Terminal:
    __slots__ = ("name",)

    def __init__(self, name):
        self.name = name

    def __repr__(self):
        return self.name


SKIP = Terminal("skip")
STOP = Terminal("stop")


class NegativeDuration(ValueError):
    """A differential statement's duration term evaluated to < 0.

    The reduction rules leave this case undefined; we fail loudly.
    """


class NoRule(RuntimeError):
    pass


@dataclass
class Config:
    code: object  # Prog | SKIP | STOP
    env: dict
    t: float

    def is_terminal(self):
        return self.code is SKIP or self.code is STOP


@dataclass
class StepEntry:
    rules: tuple
    focus_span: object
    before: Config
    after: Config
    consumed: float | None = None

    @property
    def rule(self):
        return ",".join(self.rules)


@dataclass
class AtTime:
    env: dict


@dataclass
class Terminated:
    env: dict
    total_duration: float


@dataclass
class FuelExhausted:
    steps: int
    reason: str = "fuel"
    last: Config | None = None


def _linsys_for(diff, env_order):
    cached = getattr(diff, "_linsys", None)
    if cached is not None and cached.order == env_order:
        return cached
    sys = compile_system(diff.eqs, env_order)
    diff._linsys = sys
    return sys


def _diff_order(diff):
    return tuple(x for x, _ in diff.eqs)


def _step(code, env, t, tol):
    """Returns (rules, focus, code', env', t', consumed)."""
    if isinstance(code, Assign):
        return (("asg",), code, SKIP, update_env(env, {code.var: eval_lterm(code.expr, env)}),
                t, None)
    if isinstance(code, DiffFor):
        dur = eval_lterm(code.duration, env)
        if dur < 0:
            raise NegativeDuration(f"duration evaluated to {dur}")
        sys = _linsys_for(code, _diff_order(code))
        if sys.is_constant:  # all-zero dynamics hold the state exactly
            if t < dur:
                return (("diff-stop",), code, STOP, env, 0.0, t)
            return (("diff-skip",), code, SKIP, env, t - dur, dur)
        flow = FlowFn(sys, env)
        if t < dur:
            return (("diff-stop",), code, STOP, update_env(env, flow.at(t)), 0.0, t)
        return (("diff-skip",), code, SKIP, update_env(env, flow.at(dur)), t - dur, dur)
    if isinstance(code, If):
        if eval_bexpr(code.cond, env, tol):
            return (("if-true",), code, code.then, env, t, None)
        return (("if-false",), code, code.orelse, env, t, None)
    if isinstance(code, While):
        if eval_bexpr(code.cond, env, tol):
            return (("wh-true",), code, while_unfold(code), env, t, None)
        return (("wh-false",), code, SKIP, env, t, None)
    if isinstance(code, Seq):
        rules, focus, sub, env2, t2, consumed = _step(code.first, env, t, tol)
        if sub is SKIP:
            return (rules + ("seq-skip",), focus, code.rest, env2, t2, consumed)
        if sub is STOP:
            return (rules + ("seq-stop",), focus, STOP, env2, t2, consumed)
        return (rules + ("seq",), focus, Seq(sub, code.rest, span=code.span),
                env2, t2, consumed)
    raise NoRule(f"no reduction rule for {code!r}")


def step(config, tol=0.0):
    """Apply the unique applicable rule to a non-terminal config."""
    if config.is_terminal():
        raise NoRule("terminal configuration")
    rules, focus, code, env, t, consumed = _step(config.code, config.env, config.t, tol)
    return rules, focus, Config(code, env, t), consumed


def applicable_rules(code, env, t, tol=0.0):
    """Names of rules whose guards hold, each guard checked independently.

    Deterministic semantics means this always has length <= 1 for
    non-terminal configs (and 0 for terminal ones).
    """
    names = []
    if isinstance(code, Assign):
        names.append("asg")
    if isinstance(code, DiffFor):
        dur = eval_lterm(code.duration, env)
        if t < dur:
            names.append("diff-stop")
        if t >= dur:
            names.append("diff-skip")
    if isinstance(code, If):
        if eval_bexpr(code.cond, env, tol):
            names.append("if-true")
        if not eval_bexpr(code.cond, env, tol):
            names.append("if-false")
    if isinstance(code, While):
        if eval_bexpr(code.cond, env, tol):
            names.append("wh-true")
        if not eval_bexpr(code.cond, env, tol):
            names.append("wh-false")
    if isinstance(code, Seq):
        # the three guards are shapes of the premise's unique result; an
        # undefined premise (negative duration) propagates
        _, _, sub, _, _, _ = _step(code.first, env, t, tol)
        if sub is STOP:
            names.append("seq-stop")
        if sub is SKIP:
            names.append("seq-skip")
        if sub is not STOP and sub is not SKIP:
            names.append("seq")
    return names


def run(prog, env, t, fuel=10 ** 6, tol=0.0, trace_limit=10_000, should_stop=None):
    """Iterate `step` at most `fuel` times.

    Returns (Outcome, trace) where the trace retains at most `trace_limit`
    entries (the most recent ones; 0 disables recording).
    """
    if t < 0:
        raise ValueError(f"time instant must be >= 0, got {t}")
    code, env, t = prog, dict(env), float(t)
    t0 = t
    trace = deque(maxlen=trace_limit) if trace_limit else None
    steps = 0
    while True:
        if code is SKIP:
            return Terminated(env, t0 - t), list(trace or ())
        if code is STOP:
            assert t == 0.0, "stop configurations always carry zero remaining time"
            return AtTime(env), list(trace or ())
        if steps >= fuel:
            return (FuelExhausted(steps, "fuel", Config(code, env, t)),
                    list(trace or ()))
        if should_stop is not None and (steps & 1023) == 0 and should_stop():
            return (FuelExhausted(steps, "timeout", Config(code, env, t)),
                    list(trace or ()))
        before = Config(code, env, t) if trace is not None else None
        rules, focus, code2, env2, t2, consumed = _step(code, env, t, tol)
        assert t2 >= 0.0, "remaining time never goes negative"
        if trace is not None:
            trace.append(StepEntry(rules, getattr(focus, "span", None), before,
                                   Config(code2, env2, t2), consumed))
        code, env, t = code2, env2, t2
        steps += 1
