"""Acceptance suite: one test per exit criterion, at the stated tolerances.

Each test prints a PASS line on success so a -s run reads as a checklist.
The differential corpus (10k generated programs) is evaluated once and
shared by the two criteria that consume it.
"""

import time
from random import Random

import pytest

from hyb import bigstep, corpus, denotational, smallstep
from hyb.denotational import ValueAt
from hyb.harness import (
    GenConfig, check_equivalence, gen_env, gen_program, gen_time, stable_seed,
)
from hyb.laws import run_law_suites
from hyb.parser import parse
from hyb.service import create_app
from hyb.smallstep import STOP, AtTime, Config, NegativeDuration, applicable_rules, run, step

from test_dynamics import check_rk4_agreement, _flow_env, _random_system
from hyb.dynamics import FlowFn, flow_at

CORPUS_SIZE = 10_000
CONFIG_SAMPLES = 10_000


def _ok(name, detail=""):
    print(f"PASS: {name}" + (f" ({detail})" if detail else ""))


def _configs(count, seed):
    """Generated (code, env, t) triples: fresh programs plus mid-run shapes."""
    out = []
    i = 0
    while len(out) < count:
        cfg = GenConfig(seed=stable_seed("acc-cfg", seed, i))
        i += 1
        prog = gen_program(cfg)
        env = gen_env(cfg)
        t = gen_time(cfg, prog, env)
        out.append((prog, env, t))
        try:
            _, trace = run(prog, env, t, fuel=40, trace_limit=40)
        except NegativeDuration:
            continue
        rng = Random(stable_seed("acc-pick", seed, i))
        for e in trace:
            if len(out) >= count:
                break
            if rng.random() < 0.35 and not e.after.is_terminal():
                out.append((e.after.code, e.after.env, e.after.t))
    return out


def test_determinism_thm1():
    start = time.monotonic()
    configs = _configs(CONFIG_SAMPLES, seed=101)
    checked = 0
    for code, env, t in configs:
        try:
            names = applicable_rules(code, env, t)
        except NegativeDuration:
            continue
        assert len(names) <= 1, f"two rules claim {names}"
        assert len(names) == 1
        checked += 1
    reruns = 0
    for prog, env, t in configs[:2000]:
        try:
            a = run(prog, env, t, fuel=3000, trace_limit=25)
            b = run(prog, env, t, fuel=3000, trace_limit=25)
        except NegativeDuration:
            continue
        assert a == b
        reruns += 1
    elapsed = time.monotonic() - start
    assert elapsed < 60, f"determinism check took {elapsed:.1f}s"
    assert checked >= CONFIG_SAMPLES * 0.95
    _ok("determinism: at most one applicable rule",
        f"{checked} configs, {reruns} double-runs, {elapsed:.1f}s")


def test_time_shift_prop3():
    start = time.monotonic()
    configs = _configs(CONFIG_SAMPLES, seed=202)
    rng = Random(7)
    checked = 0
    for code, env, t in configs:
        s = rng.choice([0.25, 0.5, 1.0, 2.0, 3.75])
        try:
            rules1, _, after1, _ = step(Config(code, env, t))
        except NegativeDuration:
            continue
        if after1.code is STOP:
            continue  # the proposition excludes stop results
        rules2, _, after2, _ = step(Config(code, env, t + s))
        assert rules2 == rules1
        assert after2.env == after1.env  # exact: same float operations
        assert after2.code is after1.code or after2.code == after1.code
        assert abs(after2.t - (after1.t + s)) <= 1e-12 * max(1.0, abs(after2.t))
        checked += 1
    elapsed = time.monotonic() - start
    assert elapsed < 60, f"time-shift check took {elapsed:.1f}s"
    assert checked >= CONFIG_SAMPLES * 0.5
    _ok("time shift: reductions treat time as a resource",
        f"{checked} shifted pairs, {elapsed:.1f}s")


@pytest.fixture(scope="module")
def differential_corpus():
    start = time.monotonic()
    discrepancies = []
    stats = {}
    for i in range(CORPUS_SIZE):
        cfg = GenConfig(seed=stable_seed("acc-corpus", i))
        prog = gen_program(cfg)
        env = gen_env(cfg)
        t = gen_time(cfg, prog, env)
        d = check_equivalence(prog, env, t, fuel=10 ** 5, tol=1e-9, stats=stats)
        if d is not None:
            discrepancies.append(d)
    return discrepancies, stats, time.monotonic() - start


def test_smallstep_equals_bigstep_thm3(differential_corpus):
    discrepancies, stats, elapsed = differential_corpus
    assert elapsed < 300, f"corpus run took {elapsed:.1f}s"
    assert discrepancies == [], "\n".join(d.to_json() for d in discrepancies)
    _ok("small-step == big-step on the generated corpus",
        f"{CORPUS_SIZE} cases, {stats.get('boundary', 0)} near-boundary, {elapsed:.1f}s")


def test_soundness_adequacy_thm6(differential_corpus):
    discrepancies, stats, elapsed = differential_corpus
    assert elapsed < 300, f"corpus run took {elapsed:.1f}s"
    assert discrepancies == [], "\n".join(d.to_json() for d in discrepancies)
    _ok("operational outcomes match the sampled denotations",
        f"{CORPUS_SIZE} cases, {stats.get('boundary', 0)} near-boundary, {elapsed:.1f}s")


def test_remark_reproduction():
    src = "x := 0 ; while true { x := x + 1 ; wait 1 }"
    prog, xs = parse(src)
    env = {"x": 0.0}

    out, _ = run(prog, env, 0.5, fuel=100)
    assert isinstance(out, AtTime) and out.env["x"] == 1.0

    big = bigstep.evaluate(prog, env, 0.5, fuel=100)
    assert isinstance(big, bigstep.StopAt) and big.env["x"] == 1.0

    den = denotational.sem_at(prog, env, 0.5, fuel=100)
    assert isinstance(den, ValueAt) and den.env["x"] == 1.0

    from fastapi.testclient import TestClient

    client = TestClient(create_app())
    r = client.post("/step", json={"source": src, "t": 0.5})
    rules = [s["rule"] for s in r.json()["steps"]]
    flat = [name for chain in rules for name in chain.split(",")]
    assert flat == ["asg", "seq-skip", "wh-true", "asg", "seq-skip",
                    "diff-stop", "seq-stop"]
    _ok("canonical loop at t=1/2: stop with x=1 in all three semantics, "
        "rule chain as annotated")


def test_zeno_behaviour():
    prog, _ = parse(corpus.source("zeno"))
    env = {"x": 0.0}

    out, _ = run(prog, env, 1.9, fuel=10 ** 4, trace_limit=0)
    assert isinstance(out, AtTime) and out.env["x"] == 0.0625  # exact dyadics
    big = bigstep.evaluate(prog, env, 1.9, fuel=10 ** 4)
    assert isinstance(big, bigstep.StopAt) and big.env["x"] == 0.0625
    den = denotational.sem_at(prog, env, 1.9, fuel=10 ** 4)
    assert isinstance(den, ValueAt) and den.env["x"] == 0.0625

    budgets = {}
    t0 = time.monotonic()
    small2, _ = run(prog, env, 2.0, fuel=10 ** 6, trace_limit=0)
    budgets["small"] = time.monotonic() - t0
    assert isinstance(small2, smallstep.FuelExhausted)

    t0 = time.monotonic()
    big2 = bigstep.evaluate(prog, env, 2.0, fuel=10 ** 6)
    budgets["big"] = time.monotonic() - t0
    assert isinstance(big2, bigstep.FuelExhausted)

    t0 = time.monotonic()
    den2 = denotational.sem_at(prog, env, 2.0, fuel=10 ** 6)
    budgets["den"] = time.monotonic() - t0
    assert isinstance(den2, denotational.FuelExhausted)

    worst = max(budgets.values())
    assert worst < 5.0, f"fuel exhaustion exceeded the 5 s timeout: {budgets}"
    _ok("halving-waits program: x=0.0625 at t=1.9 exactly; fuel exhaustion "
        "at t=2", f"worst {worst:.2f}s")


def test_cruise_controller_profile():
    start = time.monotonic()
    prog, _ = parse(corpus.source("cruise"))
    env = {"v": 0.0}
    expected = {1.5: 6.5, 5.5: 10.5, 6.0: 11.0, 7.0: 10.0, 8.0: 11.0}
    for t, want in expected.items():
        out, _ = run(prog, env, t, fuel=10 ** 4, trace_limit=0)
        assert isinstance(out, AtTime)
        assert out.env["v"] == pytest.approx(want, abs=1e-6)
        den = denotational.sem_at(prog, env, t, fuel=10 ** 4)
        assert den.env["v"] == pytest.approx(want, abs=1e-6)
    # v(t) = 5 + t while accelerating toward the target speed
    for t in (0.25, 2.0, 4.75):
        out, _ = run(prog, env, t, fuel=10 ** 4, trace_limit=0)
        assert out.env["v"] == pytest.approx(5.0 + t, abs=1e-6)
    elapsed = time.monotonic() - start
    assert elapsed < 1.0, f"cruise profile took {elapsed:.2f}s"
    _ok("cruise controller: ramp 5+t then a period-2 triangle between 10 and 11",
        f"{elapsed * 1000:.0f}ms")


def test_bouncing_ball_profile():
    start = time.monotonic()
    prog, xs = parse(corpus.source("ball"))
    points = denotational.sem_trace(prog, {x: 0.0 for x in xs}, 10.0, 2001,
                                    fuel=10 ** 6)
    ps = [(t, r.env["p"]) for t, r in points if isinstance(r, ValueAt)]
    assert len(ps) == 2001

    first_neg = next(t for t, p in ps if p < 0.0)
    assert 1.010 <= first_neg <= 1.021, f"first sign change at {first_neg}"

    low = min(p for _, p in ps)
    assert -0.15 < low <= 0.0, f"minimum position {low}"

    apexes = [5.0]
    for i in range(1, len(ps) - 1):
        if ps[i][1] > ps[i - 1][1] and ps[i][1] >= ps[i + 1][1] and ps[i][1] > 0.05:
            apexes.append(ps[i][1])
    assert len(apexes) >= 3, "expected at least two bounces"
    ratios = [b / a for a, b in zip(apexes, apexes[1:])]
    for r in ratios[:3]:
        assert 0.2 <= r <= 0.3, f"apex decay {ratios}"
    elapsed = time.monotonic() - start
    assert elapsed < 5.0, f"ball profile took {elapsed:.2f}s"
    _ok("bouncing ball: sign change in [1.010, 1.021], overshoot in (-0.15, 0], "
        "apex decay in [0.2, 0.3]", f"{elapsed:.2f}s")


def test_algebra_law_suites():
    start = time.monotonic()
    report = run_law_suites(seed=7, cases=1000, negative_controls=True)
    for name, entry in report.items():
        assert entry["failures"] == [], f"{name}: {entry['failures'][:3]}"
        assert entry["mutant_failed"], f"{name}: negative control went silent"
    elapsed = time.monotonic() - start
    assert elapsed < 120, f"law suites took {elapsed:.1f}s"
    _ok("algebra law suites: 1000 cases each, all clean, all mutants caught",
        f"{len(report)} suites, {elapsed:.1f}s")


def test_ode_engine():
    start = time.monotonic()
    compared = check_rk4_agreement(500, seed=77)
    assert compared >= 250, f"only {compared} systems inside the comparison bound"

    rng = Random(13)
    checked = 0
    while checked < 500:
        n = rng.randrange(1, 5)
        a, b, x0 = _random_system(rng, n)
        s, t = rng.uniform(0, 10), rng.uniform(0, 10)
        flow, order = _flow_env(a, b, x0)
        direct = flow_at(flow, s + t)
        if max(abs(v) for v in direct.values()) > 1e3:
            continue
        two_stage = flow_at(FlowFn(flow.linsys, flow_at(flow, s)), t)
        for x in order:
            scale = max(1.0, abs(direct[x]), abs(two_stage[x]))
            assert abs(direct[x] - two_stage[x]) <= 1e-9 * scale
        checked += 1
    elapsed = time.monotonic() - start
    assert elapsed < 60, f"ODE checks took {elapsed:.1f}s"
    _ok("closed-form flows: RK4 agreement at 1e-6, semigroup law at 1e-9",
        f"{compared} + {checked} systems, {elapsed:.1f}s")


def test_unfold_economy():
    ok1, env1, unfolds1 = denotational.example_unfold_check({"x": 0.0}, 0.5)
    assert ok1 and unfolds1 == 1 and env1 == {"x": 1.0}
    ok2, env2, unfolds2 = denotational.example_unfold_check({"x": 0.0}, 1.5)
    assert ok2 and unfolds2 == 2 and env2 == {"x": 2.0}
    _ok("unfold economy: exactly 1 unfolding at t=1/2, exactly 2 at t=3/2")
