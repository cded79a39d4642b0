"""Big-step evaluation: one structural recursion instead of a step loop.

The relational judgement "p with env sigma evaluates to r, sigma' at time
instant t" is read functionally: sequencing evaluates the left part first and
hands whatever time is left to the right part.  That reading is forced by
determinism of the small-step reducer, which the property suite
cross-checks.

Internally the evaluator threads *remaining* time (the same repeated
subtraction the reducer performs, so the two agree bit for bit even at
denormal scales); the judgement's consumed time in SkipAt is recovered as
initial budget minus leftover.  While-loops unfold iteratively (never by
Python recursion), so stack depth is proportional to program size only; fuel
decrements on atomic statements and on every loop/conditional check.
"""

from __future__ import annotations

from dataclasses import dataclass

from .dynamics import FlowFn, eval_bexpr, eval_lterm, update_env
from .smallstep import NegativeDuration, _diff_order, _linsys_for
from .syntax import Assign, DiffFor, If, Seq, While


@dataclass
class StopAt:
    env: dict


@dataclass
class SkipAt:
    env: dict
    consumed: float


@dataclass
class FuelExhausted:
    reason: str = "fuel"


@dataclass
class _Skip:
    env: dict
    remaining: float


class _Budget:
    __slots__ = ("left", "should_stop", "ticks")

    def __init__(self, fuel, should_stop):
        self.left = fuel
        self.should_stop = should_stop
        self.ticks = 0

    def spend(self):
        if self.left <= 0:
            return "fuel"
        self.left -= 1
        self.ticks += 1
        if self.should_stop is not None and (self.ticks & 1023) == 0 and self.should_stop():
            return "timeout"
        return None


def _eval(p, env, t, tol, budget):
    if isinstance(p, Assign):
        out = budget.spend()
        if out:
            return FuelExhausted(out)
        return _Skip(update_env(env, {p.var: eval_lterm(p.expr, env)}), t)
    if isinstance(p, DiffFor):
        out = budget.spend()
        if out:
            return FuelExhausted(out)
        dur = eval_lterm(p.duration, env)
        if dur < 0:
            raise NegativeDuration(f"duration evaluated to {dur}")
        sys = _linsys_for(p, _diff_order(p))
        if sys.is_constant:
            if t < dur:
                return StopAt(env)
            return _Skip(env, t - dur)
        flow = FlowFn(sys, env)
        if t < dur:
            return StopAt(update_env(env, flow.at(t)))
        return _Skip(update_env(env, flow.at(dur)), t - dur)
    if isinstance(p, Seq):
        r = _eval(p.first, env, t, tol, budget)
        if not isinstance(r, _Skip):
            return r
        return _eval(p.rest, r.env, r.remaining, tol, budget)
    if isinstance(p, If):
        out = budget.spend()
        if out:
            return FuelExhausted(out)
        branch = p.then if eval_bexpr(p.cond, env, tol) else p.orelse
        return _eval(branch, env, t, tol, budget)
    if isinstance(p, While):
        while True:
            out = budget.spend()
            if out:
                return FuelExhausted(out)
            if not eval_bexpr(p.cond, env, tol):
                return _Skip(env, t)
            r = _eval(p.body, env, t, tol, budget)
            if not isinstance(r, _Skip):
                return r
            env = r.env
            t = r.remaining
    raise TypeError(f"not a program: {p!r}")


def evaluate(p, env, t, fuel=10 ** 6, tol=0.0, should_stop=None):
    """Evaluate p at time instant t; consumed time in SkipAt is within [0, t]."""
    if t < 0:
        raise ValueError(f"time instant must be >= 0, got {t}")
    budget = _Budget(fuel, should_stop)
    r = _eval(p, dict(env), float(t), tol, budget)
    if isinstance(r, _Skip):
        return SkipAt(r.env, t - r.remaining)
    return r
