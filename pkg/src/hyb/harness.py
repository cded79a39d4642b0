"""Random program generation and differential testing of the three
semantics.

Generated literals (durations, coefficients, initial values, query times)
come from a dyadic quarter grid, so duration bookkeeping is exact in float64
and the three evaluators cannot disagree on boundary classification through
rounding alone.  Query times mix 0, grid draws, and boundaries collected
from a pilot run, because the equivalence theorems' case splits bite exactly
at segment boundaries.

Fuel accounting differs between the semantics (the reducer charges per
reduction, the others per atomic/unfolding), so a case where only some
evaluators exhaust fuel is retried with escalated fuel before being flagged.
"""

from __future__ import annotations

import json
import math
import zlib
from dataclasses import dataclass
from random import Random

from . import bigstep, denotational, smallstep
from .smallstep import NegativeDuration
from .syntax import (
    And, Assign, BoolLit, Cmp, Const, DiffFor, If, Not, Or, Scaled, Seq, Sum,
    While, pretty, seq_append, well_formed,
)

QUARTERS = [i * 0.25 for i in range(-8, 9)]  # [-2, 2]
DURATIONS = [0.0, 0.25, 0.25, 0.5, 0.5, 0.75, 1.0, 1.0, 1.5, 2.0, 3.0, 4.0]


def stable_seed(*parts):
    return zlib.crc32(repr(parts).encode())


@dataclass
class GenConfig:
    max_depth: int = 3
    variables: tuple = ("x", "y")
    loop_probability: float = 0.25
    seed: int = 0

    def __post_init__(self):
        if not 1 <= len(self.variables) <= 3:
            raise ValueError("variable count must be within [1, 3]")


def _gen_lterm(rng, variables, depth=1):
    # left-nested sums only: the lterm grammar has no parentheses, so only
    # parser-shaped sums round-trip through the pretty printer
    def atom():
        if rng.random() < 0.4:
            return Const(rng.choice(QUARTERS))
        coeff = rng.choice(QUARTERS)
        if coeff == 0.0 or rng.random() < 0.3:
            coeff = float(rng.choice([1, 1, 1, -1, 2]))
        return Scaled(coeff, rng.choice(variables))

    t = atom()
    for _ in range(rng.randrange(0, depth + 1)):
        t = Sum(t, atom())
    return t


def _gen_cmp(rng, variables):
    op = rng.choice(["<=", ">="])
    lhs = Scaled(1.0, rng.choice(variables))
    # integer thresholds keep guard flips away from float rounding
    rhs = Const(float(rng.randrange(-3, 7)))
    if rng.random() < 0.3:
        lhs = _gen_lterm(rng, variables, depth=1)
    return Cmp(op, lhs, rhs)


def _gen_bexpr(rng, variables, depth=1):
    r = rng.random()
    if depth <= 0 or r < 0.55:
        return _gen_cmp(rng, variables)
    if r < 0.65:
        return BoolLit(rng.random() < 0.5)
    if r < 0.78:
        return Not(_gen_bexpr(rng, variables, depth - 1))
    ctor = And if r < 0.9 else Or
    return ctor(_gen_bexpr(rng, variables, depth - 1), _gen_bexpr(rng, variables, depth - 1))


def _gen_duration(rng, variables):
    if rng.random() < 0.1:
        # variable durations happen (the halving-waits program needs them);
        # negative evaluations surface as NegativeDuration in all semantics
        return Scaled(1.0, rng.choice(variables))
    return Const(rng.choice(DURATIONS))


def _gen_diff(rng, variables):
    eqs = []
    for x in variables:
        r = rng.random()
        if r < 0.45:
            rhs = Const(rng.choice(QUARTERS))
        elif r < 0.8:
            rhs = Scaled(rng.choice([-1.0, -0.5, 0.5, 1.0]), rng.choice(variables))
        else:
            rhs = _gen_lterm(rng, variables, depth=1)
        eqs.append((x, rhs))
    return DiffFor(tuple(eqs), _gen_duration(rng, variables))


def _gen_atomic(rng, variables):
    if rng.random() < 0.55:
        return Assign(rng.choice(variables), _gen_lterm(rng, variables))
    return _gen_diff(rng, variables)


def _gen_stmt(rng, variables, depth, loop_p):
    if depth <= 0:
        return _gen_atomic(rng, variables)
    r = rng.random()
    if r < loop_p:
        body = _gen_seq(rng, variables, depth - 1, loop_p, max_len=2)
        if rng.random() < 0.97 and not _consumes_time(body):
            # keep runaway instant loops rare: nearly all bodies take time
            dur = Const(rng.choice([0.25, 0.25, 0.5, 1.0]))
            eqs = _gen_diff(rng, variables).eqs
            body = seq_append(body, DiffFor(eqs, dur))
        guard = BoolLit(True) if rng.random() < 0.06 else _gen_bexpr(rng, variables)
        return While(guard, body)
    if r < loop_p + 0.2:
        return If(_gen_bexpr(rng, variables),
                  _gen_seq(rng, variables, depth - 1, loop_p, max_len=2),
                  _gen_seq(rng, variables, depth - 1, loop_p, max_len=2))
    return _gen_atomic(rng, variables)


def _consumes_time(p):
    """Certainly consumes time on every pass: a diff with a positive
    constant duration along all paths."""
    if isinstance(p, DiffFor):
        return isinstance(p.duration, Const) and p.duration.value > 0
    if isinstance(p, Seq):
        return _consumes_time(p.first) or _consumes_time(p.rest)
    if isinstance(p, If):
        return _consumes_time(p.then) and _consumes_time(p.orelse)
    return False  # inner loops may exit instantly; do not count them


def _gen_seq(rng, variables, depth, loop_p, max_len=3):
    stmts = [_gen_stmt(rng, variables, depth, loop_p)
             for _ in range(rng.randrange(1, max_len + 1))]
    prog = stmts[-1]
    for s in reversed(stmts[:-1]):
        prog = Seq(s, prog)
    return prog


def gen_program(cfg):
    """Reproducible random program over cfg.variables; always well-formed."""
    rng = Random(stable_seed("prog", cfg.seed))
    if cfg.max_depth <= 0:
        return _gen_atomic(rng, cfg.variables)
    prog = _gen_seq(rng, cfg.variables, cfg.max_depth, cfg.loop_probability)
    assert not well_formed(prog, cfg.variables)
    return prog


def gen_env(cfg):
    rng = Random(stable_seed("env", cfg.seed))
    return {x: float(rng.randrange(-2, 5)) for x in cfg.variables}


def gen_time(cfg, prog, env, pilot_fuel=3000):
    """0, a dyadic grid draw, or a boundary collected from a pilot run."""
    rng = Random(stable_seed("time", cfg.seed))
    r = rng.random()
    if r < 0.15:
        return 0.0
    if r < 0.55:
        return rng.randrange(0, 33) * 0.25
    try:
        _, trace = smallstep.run(prog, env, 8.0, fuel=pilot_fuel, trace_limit=pilot_fuel)
    except NegativeDuration:
        return rng.randrange(0, 33) * 0.25
    boundaries = []
    acc = 0.0
    for e in trace:
        if e.consumed:
            acc += e.consumed
            # only dyadic boundaries: sums of grid durations are exact under
            # every association order, so all three evaluators classify the
            # boundary identically; a transcendental boundary sits one ulp
            # from a case split and float addition orders legitimately differ
            if acc == round(acc * 1048576) / 1048576:
                boundaries.append(acc)
    if not boundaries:
        return rng.randrange(0, 33) * 0.25
    return rng.choice(boundaries)


# --- differential check ------------------------------------------------------

@dataclass
class Discrepancy:
    program: str
    env: dict
    t: float
    outcomes: dict
    detail: str

    def to_json(self):
        return json.dumps({
            "program": self.program, "env": self.env, "t": self.t,
            "outcomes": {k: repr(v) for k, v in self.outcomes.items()},
            "detail": self.detail,
        })


def _summary(kind, env=None, duration=None):
    return {"kind": kind, "env": env, "duration": duration}


def _run_small(p, env, t, fuel):
    try:
        out, _ = smallstep.run(p, env, t, fuel=fuel, trace_limit=0)
    except NegativeDuration:
        return _summary("error")
    if isinstance(out, smallstep.AtTime):
        return _summary("value", out.env)
    if isinstance(out, smallstep.Terminated):
        return _summary("terminated", out.env, out.total_duration)
    return _summary("fuel")


def _run_big(p, env, t, fuel):
    try:
        out = bigstep.evaluate(p, env, t, fuel=fuel)
    except NegativeDuration:
        return _summary("error")
    if isinstance(out, bigstep.StopAt):
        return _summary("value", out.env)
    if isinstance(out, bigstep.SkipAt):
        return _summary("terminated", out.env, out.consumed)
    return _summary("fuel")


def _run_den(p, env, t, fuel):
    try:
        out = denotational.sem_at(p, env, t, fuel=fuel)
    except NegativeDuration:
        return _summary("error")
    if isinstance(out, denotational.ValueAt):
        return _summary("value", out.env)
    if isinstance(out, denotational.TerminatedAt):
        return _summary("terminated", out.env, out.duration)
    if isinstance(out, denotational.DivergedBefore):
        return _summary("diverged", duration=out.duration)
    return _summary("fuel")


_RUNNERS = {"small": _run_small, "big": _run_big, "den": _run_den}


def _floats_close(x, y, tol):
    if x == y:  # covers identical values including +-inf
        return True
    if math.isnan(x) and math.isnan(y):
        return True
    return abs(x - y) <= tol * max(1.0, abs(x), abs(y))


def _env_close(a, b, tol):
    if a.keys() != b.keys():
        return False
    return all(_floats_close(a[k], b[k], tol) for k in a)


def check_equivalence(p, env, t, fuel=10 ** 5, tol=1e-9, stats=None):
    """Run all three semantics and compare per the equivalence and
    soundness/adequacy case tables.  Returns None (ok) or a Discrepancy.

    A value/terminated split where every reported duration equals t within
    tol and all envs agree is boundary agreement, not a discrepancy: the
    program's own duration arithmetic put t within an ulp of a case split
    (the finite-precision problem), and the evaluators' different float
    association orders legitimately land on either side.  Such cases count
    into stats["boundary"] when a stats dict is passed.
    """
    results = {name: fn(p, env, t, fuel) for name, fn in _RUNNERS.items()}

    kinds = {r["kind"] for r in results.values()}
    if kinds == {"fuel"}:
        return None
    if "fuel" in kinds:
        # fuel events are counted differently per semantics: escalate the
        # starved side before concluding anything
        for name in list(results):
            if results[name]["kind"] == "fuel":
                for factor in (10, 100):
                    retry = _RUNNERS[name](p, env, t, fuel * factor)
                    if retry["kind"] != "fuel":
                        results[name] = retry
                        break
        kinds = {r["kind"] for r in results.values()}

    def fail(detail):
        return Discrepancy(pretty(p), env, t, results, detail)

    if kinds == {"value", "terminated"}:
        envs = [r["env"] for r in results.values()]
        durations_at_t = all(
            _floats_close(r["duration"], t, tol)
            for r in results.values() if r["kind"] == "terminated")
        envs_agree = all(_env_close(envs[0], e, tol) for e in envs[1:])
        if durations_at_t and envs_agree:
            if stats is not None:
                stats["boundary"] = stats.get("boundary", 0) + 1
            return None
    if len(kinds) != 1:
        return fail(f"outcome kinds differ: { {k: v['kind'] for k, v in results.items()} }")
    kind = kinds.pop()
    if kind in ("error", "fuel"):
        return None
    small = results["small"]
    for other in ("big", "den"):
        r = results[other]
        if not _env_close(small["env"], r["env"], tol):
            return fail(f"env mismatch small vs {other}")
        if kind == "terminated":
            d1, d2 = small["duration"], r["duration"]
            if abs(d1 - d2) > tol * max(1.0, abs(d1), abs(d2)):
                return fail(f"duration mismatch small vs {other}: {d1} vs {d2}")
    return None


def shrink(p):
    """Structurally smaller candidates, largest reductions first."""
    if isinstance(p, Seq):
        yield p.first
        yield p.rest
        for s in shrink(p.first):
            yield Seq(s, p.rest)
        for s in shrink(p.rest):
            yield Seq(p.first, s)
    elif isinstance(p, If):
        yield p.then
        yield p.orelse
    elif isinstance(p, While):
        yield p.body
        yield While(BoolLit(False), p.body)


def shrink_discrepancy(p, env, t, fuel=10 ** 5, tol=1e-9, rounds=50):
    """Greedily shrink a failing program; the result still fails."""
    current = p
    for _ in range(rounds):
        for cand in shrink(current):
            if check_equivalence(cand, env, t, fuel, tol) is not None:
                current = cand
                break
        else:
            return current
    return current


def find_discrepancies(cases, seed=0, fuel=10 ** 5, tol=1e-9, variables=("x", "y"),
                       on_case=None, stats=None):
    """Differential-test `cases` random (program, env, t) triples."""
    found = []
    for i in range(cases):
        cfg = GenConfig(seed=stable_seed(seed, i), variables=variables)
        prog = gen_program(cfg)
        env = gen_env(cfg)
        t = gen_time(cfg, prog, env)
        d = check_equivalence(prog, env, t, fuel, tol, stats=stats)
        if d is not None:
            small = shrink_discrepancy(prog, env, t, fuel, tol)
            if small is not prog:
                d.detail += f" | shrunk: {pretty(small)}"
            found.append(d)
        if on_case is not None:
            on_case(i, d)
    return found
