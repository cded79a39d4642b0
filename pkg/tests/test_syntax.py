import pytest

from hyb.parser import parse
from hyb.syntax import (
    Assign, BoolLit, Cmp, Const, DiffFor, Not, Scaled, Seq, While,
    NonPositiveEpsilon, desugar_until, desugar_wait, pretty, seq_append,
    variables_of, well_formed,
)


def test_well_formed_cruise_is_clean():
    prog, xs = parse("v := 5 ; while true { if v <= 10 then { v' = 1 for 1 } "
                     "else { v' = -1 for 1 } }")
    assert xs == ("v",)
    assert well_formed(prog, xs) == []


def test_well_formed_unknown_variable():
    diags = well_formed(Assign("y", Const(1.0)), ("x",))
    assert len(diags) == 1
    assert "unknown variable 'y'" in diags[0].message


def test_well_formed_incomplete_system():
    d = DiffFor((("x", Const(1.0)),), Const(1.0))
    diags = well_formed(d, ("x", "y"))
    assert any("incomplete system" in g.message and "'y'" in g.message for g in diags)


def test_well_formed_duplicate_equation():
    d = DiffFor((("x", Const(1.0)), ("x", Const(2.0))), Const(1.0))
    diags = well_formed(d, ("x",))
    assert any("duplicate equation" in g.message for g in diags)


def test_well_formed_is_pure():
    d = DiffFor((("x", Const(1.0)),), Const(1.0))
    a = [g.message for g in well_formed(d, ("x", "y"))]
    b = [g.message for g in well_formed(d, ("x", "y"))]
    assert a == b


def test_desugar_wait_zeroes_every_variable():
    d = desugar_wait(Const(1.0), ("x",))
    assert d == DiffFor((("x", Const(0.0)),), Const(1.0))
    d0 = desugar_wait(Const(0.0), ("x",))
    assert d0.duration == Const(0.0)
    d2 = desugar_wait(Scaled(1.0, "t"), ("x", "y"))
    assert [x for x, _ in d2.eqs] == ["x", "y"]
    assert all(rhs == Const(0.0) for _, rhs in d2.eqs)


def test_desugar_until_shape():
    eqs = (("p", Scaled(1.0, "v")), ("v", Const(-9.8)))
    psi = Cmp("<=", Scaled(1.0, "p"), Const(0.0))
    w = desugar_until(eqs, 0.01, psi)
    assert w == While(Not(psi), DiffFor(eqs, Const(0.01)))


def test_desugar_until_rejects_nonpositive_eps():
    with pytest.raises(NonPositiveEpsilon):
        desugar_until((("x", Const(0.0)),), 0.0, BoolLit(True))


def test_desugar_until_true_guard_never_entered():
    w = desugar_until((("x", Const(0.0)),), 0.5, BoolLit(True))
    assert w.cond == Not(BoolLit(True))


def test_variables_first_occurrence_order():
    prog, _ = parse("b := 1 ; a := b ; c' = 1, b' = 0, a' = 0 for 1")
    assert variables_of(prog) == ("b", "a", "c")


def test_seq_append_right_associates():
    a, b, k = Assign("x", Const(1.0)), Assign("x", Const(2.0)), Assign("x", Const(3.0))
    out = seq_append(Seq(a, b), k)
    assert out == Seq(a, Seq(b, k))


def test_pretty_round_trips_corpus():
    srcs = [
        "x := 0 ; while true { x := x + 1 ; wait 1 }",
        "v := 5 ; while true { if v <= 10 then { v' = 1 for 1 } else { v' = -1 for 1 } }",
        "p := 5 ; v := 0 ; p' = v, v' = -9.8 until [0.01] p <= 0 && v <= 0",
        "if !(x <= 1) || x >= 4 && true then { wait 1 } else { x := 0.5 * x }",
    ]
    for src in srcs:
        prog, xs = parse(src)
        again, xs2 = parse(pretty(prog))
        assert again == prog
        assert xs2 == xs
