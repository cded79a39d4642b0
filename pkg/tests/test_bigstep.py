import pytest

from hyb import smallstep
from hyb.bigstep import FuelExhausted, SkipAt, StopAt, evaluate
from hyb.harness import GenConfig, gen_env, gen_program, gen_time, stable_seed
from hyb.parser import parse
from hyb.smallstep import NegativeDuration


def prog_of(src):
    return parse(src)[0]


def test_diff_stop_within_duration():
    out = evaluate(prog_of("x' = 1 for 2"), {"x": 0.0}, 0.5)
    assert isinstance(out, StopAt)
    assert out.env["x"] == pytest.approx(0.5, abs=1e-12)


def test_seq_threads_consumed_time():
    out = evaluate(prog_of("x := 2 ; wait 1"), {"x": 0.0}, 3.0)
    assert out == SkipAt({"x": 2.0}, 1.0)


def test_remark_style_loop_at_half():
    prog = prog_of("x := 0 ; while true { x := x + 1 ; wait 1 }")
    out = evaluate(prog, {"x": 9.0}, 0.5, fuel=100)
    assert isinstance(out, StopAt)
    assert out.env == {"x": 1.0}


def test_zeno_exhausts_fuel():
    prog = prog_of("x := 1 ; while true { wait x ; x := 0.5 * x }")
    out = evaluate(prog, {"x": 0.0}, 2.0, fuel=10 ** 6)
    assert isinstance(out, FuelExhausted)


def test_consumed_stays_within_budget():
    out = evaluate(prog_of("wait 1 ; wait 1"), {"x": 0.0}, 5.0)
    assert out == SkipAt({"x": 0.0}, 2.0)
    out2 = evaluate(prog_of("x := 5"), {"x": 0.0}, 2.0)
    assert out2 == SkipAt({"x": 5.0}, 0.0)


def test_while_false_consumes_nothing():
    out = evaluate(prog_of("while x >= 1 { wait 1 }"), {"x": 0.0}, 4.0)
    assert out == SkipAt({"x": 0.0}, 0.0)


def test_negative_duration_propagates():
    with pytest.raises(NegativeDuration):
        evaluate(prog_of("wait x"), {"x": -2.0}, 1.0)


def test_deep_while_unfolding_does_not_recurse():
    # 200k unfoldings would overflow any recursive implementation
    prog = prog_of("x := 0 ; while x <= 100000 { x := x + 1 ; wait 0 }")
    out = evaluate(prog, {"x": 0.0}, 1.0, fuel=10 ** 7)
    assert isinstance(out, SkipAt)
    assert out.env["x"] == 100001.0


def test_matches_smallstep_on_generated_programs():
    agreed = 0
    for i in range(250):
        cfg = GenConfig(seed=stable_seed("equiv-bg", i))
        prog, env = gen_program(cfg), gen_env(cfg)
        t = gen_time(cfg, prog, env)
        try:
            small, _ = smallstep.run(prog, env, t, fuel=10 ** 4, trace_limit=0)
            big = evaluate(prog, env, t, fuel=10 ** 4)
        except NegativeDuration:
            continue
        if isinstance(small, smallstep.FuelExhausted) or isinstance(big, FuelExhausted):
            continue
        if isinstance(small, smallstep.AtTime):
            assert isinstance(big, StopAt)
            assert big.env == small.env
        else:
            assert isinstance(big, SkipAt)
            assert big.env == small.env
            assert big.consumed == pytest.approx(small.total_duration, abs=1e-9)
        agreed += 1
    assert agreed > 180
