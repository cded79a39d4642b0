import pytest

from hyb.denotational import (
    EvalStats, FuelExhausted, TerminatedAt, ValueAt, example_unfold_check,
    sem_at, sem_trace,
)
from hyb.parser import parse
from hyb.smallstep import NegativeDuration


def prog_of(src):
    return parse(src)[0]


def test_value_inside_the_trajectory():
    out = sem_at(prog_of("wait 1 ; x := 1"), {"x": 0.0}, 0.5)
    assert out == ValueAt({"x": 0.0})


def test_cruise_value_at_90_seconds_in():
    prog = prog_of("v := 5 ; while true { if v <= 10 then { v' = 1 for 1 } "
                   "else { v' = -1 for 1 } }")
    out = sem_at(prog, {"v": 0.0}, 1.5)
    assert isinstance(out, ValueAt)
    assert out.env["v"] == pytest.approx(6.5, abs=1e-9)


def test_zero_duration_program_terminates_instantly():
    out = sem_at(prog_of("x := 5"), {"x": 0.0}, 3.0)
    assert out == TerminatedAt({"x": 5.0}, 0.0)


def test_zeno_value_before_the_accumulation_point():
    prog = prog_of("x := 1 ; while true { wait x ; x := 0.5 * x }")
    out = sem_at(prog, {"x": 0.0}, 1.9, fuel=10 ** 4)
    assert isinstance(out, ValueAt)
    assert out.env["x"] == 0.0625


def test_zeno_exhausts_fuel_at_two():
    prog = prog_of("x := 1 ; while true { wait x ; x := 0.5 * x }")
    out = sem_at(prog, {"x": 0.0}, 2.0, fuel=10 ** 5)
    assert isinstance(out, FuelExhausted)


def test_termination_boundary_uses_the_endpoint():
    out = sem_at(prog_of("wait 1 ; x := 9"), {"x": 0.0}, 1.0)
    assert out == TerminatedAt({"x": 9.0}, 1.0)


def test_negative_time_rejected():
    with pytest.raises(NegativeDuration):
        sem_at(prog_of("x := 1"), {"x": 0.0}, -0.5)


def test_statements_past_the_query_are_not_demanded():
    # the second statement is undefined (negative duration) but unreachable
    # within the sampled horizon
    prog = prog_of("wait 1 ; wait x")
    out = sem_at(prog, {"x": -1.0}, 0.5)
    assert out == ValueAt({"x": -1.0})
    with pytest.raises(NegativeDuration):
        sem_at(prog, {"x": -1.0}, 1.0)


def test_trace_is_marker_tagged_after_termination():
    points = sem_trace(prog_of("x := 1"), {"x": 0.0}, 1.0, 3)
    assert [t for t, _ in points] == [0.0, 0.5, 1.0]
    assert all(isinstance(r, TerminatedAt) and r.env == {"x": 1.0} for _, r in points)


def test_trace_cruise_triangle_wave():
    prog = prog_of("v := 5 ; while true { if v <= 10 then { v' = 1 for 1 } "
                   "else { v' = -1 for 1 } }")
    points = sem_trace(prog, {"v": 0.0}, 12.0, 121)
    env_of = {round(t, 6): r.env["v"] for t, r in points if isinstance(r, ValueAt)}
    for t, expected in [(1.5, 6.5), (5.0, 10.0), (5.5, 10.5), (6.0, 11.0),
                        (7.0, 10.0), (8.0, 11.0), (11.0, 10.0)]:
        assert env_of[t] == pytest.approx(expected, abs=1e-9)


def test_trace_finer_sampling_is_consistent():
    prog = prog_of("v := 5 ; while true { if v <= 10 then { v' = 1 for 1 } "
                   "else { v' = -1 for 1 } }")
    coarse = dict()
    for t, r in sem_trace(prog, {"v": 0.0}, 8.0, 17):
        coarse[t] = r
    for t, r in sem_trace(prog, {"v": 0.0}, 8.0, 33):
        if t in coarse:
            assert r == coarse[t]


def test_single_unfold_example():
    ok, env, unfolds = example_unfold_check({"x": 0.0}, 0.5)
    assert ok and env == {"x": 1.0} and unfolds == 1
    ok, env, unfolds = example_unfold_check({"x": 41.0}, 0.5)
    assert ok and env == {"x": 42.0} and unfolds == 1


def test_two_unfolds_at_three_halves():
    ok, env, unfolds = example_unfold_check({"x": 0.0}, 1.5)
    assert ok and env == {"x": 2.0} and unfolds == 2


def test_unfold_economy_bound_on_wait_loops():
    # unfoldings never exceed ceil(t / iteration duration) + 1
    for delta, t in [(0.25, 2.0), (0.5, 3.0), (1.0, 0.25)]:
        prog = prog_of(f"while true {{ x := x + 1 ; wait {delta} }}")
        stats = EvalStats()
        out = sem_at(prog, {"x": 0.0}, t, fuel=10 ** 4, stats=stats)
        assert isinstance(out, ValueAt)
        assert stats.unfolds <= int(t / delta) + 1


def test_trace_across_the_fuel_boundary():
    prog = prog_of("x := 1 ; while true { wait x ; x := 0.5 * x }")
    points = sem_trace(prog, {"x": 0.0}, 3.0, 13, fuel=3000)
    kinds = [type(r).__name__ for _, r in points]
    assert kinds[0] == "ValueAt"  # early samples resolve
    assert kinds[-1] == "FuelExhausted"  # past the accumulation point
    assert "DivergedBefore" not in kinds
    # resolved values are untouched by the later starvation
    assert points[4][1].env["x"] == 0.5  # t = 1.0 sits in the second wait
    assert points[6][1].env["x"] == 0.25  # t = 1.5 in the third


def test_shared_denotation_is_safe_under_concurrent_observers():
    import threading

    from hyb.denotational import _classify, _observe_for, denote
    from hyb.hmonad import Budget

    prog = prog_of("v := 5 ; while true { if v <= 10 then { v' = 1 for 1 } "
                   "else { v' = -1 for 1 } }")
    times = [0.25 * k for k in range(1, 33)]
    sequential = {t: sem_at(prog, {"v": 0.0}, t, fuel=10 ** 5) for t in times}

    budget = Budget(10 ** 5)
    shared = denote(prog, {"v": 0.0}, budget)
    results = {}
    lock = threading.Lock()

    def worker(ts):
        for t in ts:
            r = _classify(_observe_for(shared, t), t, budget)
            with lock:
                results[t] = r

    threads = [threading.Thread(target=worker, args=(times[i::4],)) for i in range(4)]
    for th in threads:
        th.start()
    for th in threads:
        th.join()
    assert results == sequential


def test_diverged_before_never_confused_with_fuel():
    # an instant loop cannot be proven divergent with finite fuel
    prog = prog_of("while true { x := x + 1 }")
    out = sem_at(prog, {"x": 0.0}, 1.0, fuel=1000)
    assert isinstance(out, FuelExhausted)
