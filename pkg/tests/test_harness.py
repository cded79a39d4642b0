from hyb.harness import (
    Discrepancy, GenConfig, check_equivalence, find_discrepancies, gen_env,
    gen_program, gen_time, shrink, shrink_discrepancy, stable_seed,
)
from hyb.parser import parse
from hyb.syntax import is_atomic, pretty, well_formed


def test_generator_smallest_depth_is_atomic():
    prog = gen_program(GenConfig(max_depth=0, seed=0))
    assert is_atomic(prog)


def test_generator_is_deterministic():
    a = gen_program(GenConfig(seed=42))
    b = gen_program(GenConfig(seed=42))
    assert a == b
    assert gen_env(GenConfig(seed=42)) == gen_env(GenConfig(seed=42))


def test_generated_programs_are_well_formed():
    for i in range(300):
        cfg = GenConfig(seed=stable_seed("audit", i))
        prog = gen_program(cfg)
        assert well_formed(prog, cfg.variables) == []


def test_generated_programs_reparse():
    for i in range(100):
        cfg = GenConfig(seed=stable_seed("reparse", i))
        prog = gen_program(cfg)
        assert parse(pretty(prog))[0] == prog


def test_check_equivalence_on_the_named_programs():
    remark, _ = parse("x := 0 ; while true { x := x + 1 ; wait 1 }")
    assert check_equivalence(remark, {"x": 0.0}, 0.5) is None

    cruise, _ = parse("v := 5 ; while true { if v <= 10 then { v' = 1 for 1 } "
                      "else { v' = -1 for 1 } }")
    assert check_equivalence(cruise, {"v": 0.0}, 1.5) is None

    zeno, _ = parse("x := 1 ; while true { wait x ; x := 0.5 * x }")
    assert check_equivalence(zeno, {"x": 0.0}, 2.0, fuel=2 * 10 ** 4) is None


def test_check_equivalence_reports_a_broken_interpreter(monkeypatch):
    import hyb.harness as hz

    real = hz._run_big

    def broken(p, env, t, fuel):
        out = real(p, env, t, fuel)
        if out["kind"] == "value":
            out = dict(out)
            out["env"] = {k: v + 1.0 for k, v in out["env"].items()}
        return out

    monkeypatch.setitem(hz._RUNNERS, "big", broken)
    prog, _ = parse("wait 1 ; x := 1")
    d = check_equivalence(prog, {"x": 0.0}, 0.5)
    assert isinstance(d, Discrepancy)
    assert "env mismatch" in d.detail
    assert '"program"' in d.to_json()


def test_shrink_produces_subprograms():
    prog, _ = parse("x := 1 ; while x <= 2 { x := x + 1 ; wait 1 }")
    cands = list(shrink(prog))
    assert prog.first in cands
    assert prog.rest in cands


def test_shrunk_counterexample_still_fails(monkeypatch):
    import hyb.harness as hz

    def broken(p, env, t, fuel):
        out = hz._run_small(p, env, t, fuel)
        if out["kind"] == "terminated":
            out = dict(out)
            out["duration"] = out["duration"] + 1.0
        return out

    monkeypatch.setitem(hz._RUNNERS, "big", broken)
    prog, _ = parse("x := 1 ; x := 2 ; wait 1")
    assert check_equivalence(prog, {"x": 0.0}, 4.0) is not None
    small = shrink_discrepancy(prog, {"x": 0.0}, 4.0)
    assert check_equivalence(small, {"x": 0.0}, 4.0) is not None


def test_find_discrepancies_smoke():
    found = find_discrepancies(40, seed=123, fuel=10 ** 4)
    assert found == []


def test_gen_time_hits_boundaries_and_zero():
    kinds = set()
    for i in range(200):
        cfg = GenConfig(seed=stable_seed("times", i))
        prog, env = gen_program(cfg), gen_env(cfg)
        t = gen_time(cfg, prog, env)
        assert t >= 0.0
        if t == 0.0:
            kinds.add("zero")
        elif t == round(t * 4) / 4:
            kinds.add("grid")
        else:
            kinds.add("boundary")
    assert "zero" in kinds and "grid" in kinds
