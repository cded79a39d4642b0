"""Abstract syntax of the hybrid while-language.

Statements are assignments, differential statements ("run this linear ODE
system for a duration"), sequencing, conditionals and while-loops.  Linear
terms are sums of scaled variables and constants; Boolean expressions form a
free Boolean algebra over <= and >= atoms.  Two pieces of surface sugar
(`wait`, `until [eps]`) desugar into the core forms here.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Span:
    """Half-open character range [start, end) with 1-based line/col of start."""

    start: int
    end: int
    line: int
    col: int


_VAR_HEAD = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ")
_VAR_TAIL = _VAR_HEAD | set("0123456789_")


def is_valid_var(name):
    if not name or name[0] not in _VAR_HEAD:
        return False
    return all(c in _VAR_TAIL for c in name[1:])


# --- linear terms -----------------------------------------------------------

@dataclass(eq=True)
class Const:
    value: float
    span: Span | None = field(default=None, compare=False, repr=False)


@dataclass(eq=True)
class Scaled:
    coeff: float
    var: str
    span: Span | None = field(default=None, compare=False, repr=False)


@dataclass(eq=True)
class Sum:
    left: "LTerm"
    right: "LTerm"
    span: Span | None = field(default=None, compare=False, repr=False)


LTerm = Const | Scaled | Sum


# --- Boolean expressions ----------------------------------------------------

@dataclass(eq=True)
class BoolLit:
    value: bool
    span: Span | None = field(default=None, compare=False, repr=False)


@dataclass(eq=True)
class Cmp:
    op: str  # "<=" or ">="
    left: LTerm
    right: LTerm
    span: Span | None = field(default=None, compare=False, repr=False)


@dataclass(eq=True)
class And:
    left: "BExpr"
    right: "BExpr"
    span: Span | None = field(default=None, compare=False, repr=False)


@dataclass(eq=True)
class Or:
    left: "BExpr"
    right: "BExpr"
    span: Span | None = field(default=None, compare=False, repr=False)


@dataclass(eq=True)
class Not:
    expr: "BExpr"
    span: Span | None = field(default=None, compare=False, repr=False)


BExpr = BoolLit | Cmp | And | Or | Not


# --- programs ---------------------------------------------------------------

@dataclass(eq=True)
class Assign:
    var: str
    expr: LTerm
    span: Span | None = field(default=None, compare=False, repr=False)


@dataclass(eq=True)
class DiffFor:
    """x1' = t1, ..., xn' = tn for dur.

    `eqs` must cover the program's variable set exactly once each (checked by
    well_formed); the duration term is evaluated once at statement entry.
    """

    eqs: tuple
    duration: LTerm
    span: Span | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        self.eqs = tuple(self.eqs)


@dataclass(eq=True)
class Seq:
    first: "Prog"
    rest: "Prog"
    span: Span | None = field(default=None, compare=False, repr=False)


@dataclass(eq=True)
class If:
    cond: BExpr
    then: "Prog"
    orelse: "Prog"
    span: Span | None = field(default=None, compare=False, repr=False)


@dataclass(eq=True)
class While:
    cond: BExpr
    body: "Prog"
    span: Span | None = field(default=None, compare=False, repr=False)
    # cached right-associated unfolding Seq(body, self); see seq_append
    _unfold: "Prog" = field(default=None, compare=False, repr=False)


Prog = Assign | DiffFor | Seq | If | While

ATOMIC = (Assign, DiffFor)


def is_atomic(p):
    return isinstance(p, ATOMIC)


class NonPositiveEpsilon(ValueError):
    """until-step width must be strictly positive."""


def desugar_wait(duration, order):
    """wait t == run the all-zero system x1'=0,...,xn'=0 for t."""
    return DiffFor(tuple((x, Const(0.0)) for x in order), duration)


def desugar_until(eqs, eps, psi, span=None):
    """Event-triggered statement as sugar: step the system in eps-chunks
    until psi holds, i.e. While(Not psi, DiffFor(eqs, eps))."""
    if not eps > 0:
        raise NonPositiveEpsilon(f"until step width must be > 0, got {eps}")
    return While(Not(psi, span=span), DiffFor(tuple(eqs), Const(float(eps)), span=span), span=span)


# --- variable collection ----------------------------------------------------

def _lterm_vars(t, out):
    if isinstance(t, Const):
        return
    if isinstance(t, Scaled):
        out.setdefault(t.var, None)
        return
    _lterm_vars(t.left, out)
    _lterm_vars(t.right, out)


def _bexpr_vars(b, out):
    if isinstance(b, BoolLit):
        return
    if isinstance(b, Cmp):
        _lterm_vars(b.left, out)
        _lterm_vars(b.right, out)
    elif isinstance(b, Not):
        _bexpr_vars(b.expr, out)
    else:
        _bexpr_vars(b.left, out)
        _bexpr_vars(b.right, out)


def _prog_vars(p, out):
    if isinstance(p, Assign):
        out.setdefault(p.var, None)
        _lterm_vars(p.expr, out)
    elif isinstance(p, DiffFor):
        for x, t in p.eqs:
            out.setdefault(x, None)
            _lterm_vars(t, out)
        _lterm_vars(p.duration, out)
    elif isinstance(p, Seq):
        _prog_vars(p.first, out)
        _prog_vars(p.rest, out)
    elif isinstance(p, If):
        _bexpr_vars(p.cond, out)
        _prog_vars(p.then, out)
        _prog_vars(p.orelse, out)
    else:
        _bexpr_vars(p.cond, out)
        _prog_vars(p.body, out)


def variables_of(p):
    """All variables mentioned in p, in first-occurrence order."""
    out = {}
    _prog_vars(p, out)
    return tuple(out)


# --- well-formedness --------------------------------------------------------

@dataclass
class Diagnostic:
    message: str
    span: Span | None = None

    def __str__(self):
        if self.span is not None:
            return f"{self.span.line}:{self.span.col}: {self.message}"
        return self.message


def well_formed(p, variables):
    """Diagnostics for p over the variable set `variables`.

    Empty result means: every variable used is known, and every differential
    statement lists each variable exactly once.  Pure: same input, same
    diagnostics.
    """
    known = set(variables)
    diags = []

    def check_lterm(t):
        if isinstance(t, Scaled):
            if t.var not in known:
                diags.append(Diagnostic(f"unknown variable {t.var!r}", t.span))
        elif isinstance(t, Sum):
            check_lterm(t.left)
            check_lterm(t.right)

    def check_bexpr(b):
        if isinstance(b, Cmp):
            check_lterm(b.left)
            check_lterm(b.right)
        elif isinstance(b, Not):
            check_bexpr(b.expr)
        elif isinstance(b, (And, Or)):
            check_bexpr(b.left)
            check_bexpr(b.right)

    def check(p):
        if isinstance(p, Assign):
            if p.var not in known:
                diags.append(Diagnostic(f"unknown variable {p.var!r}", p.span))
            check_lterm(p.expr)
        elif isinstance(p, DiffFor):
            seen = []
            for x, t in p.eqs:
                if x not in known:
                    diags.append(Diagnostic(f"unknown variable {x!r}", p.span))
                if x in seen:
                    diags.append(Diagnostic(f"duplicate equation for {x!r}", p.span))
                seen.append(x)
                check_lterm(t)
            missing = [x for x in variables if x not in seen]
            if missing:
                diags.append(Diagnostic(
                    "incomplete system: no equation for " + ", ".join(repr(m) for m in missing),
                    p.span))
            check_lterm(p.duration)
        elif isinstance(p, Seq):
            check(p.first)
            check(p.rest)
        elif isinstance(p, If):
            check_bexpr(p.cond)
            check(p.then)
            check(p.orelse)
        else:
            check_bexpr(p.cond)
            check(p.body)

    check(p)
    return diags


# --- canonical sequencing ---------------------------------------------------

def seq_append(p, k):
    """Right-associated p ; k: the left element of any produced Seq is a
    statement, never a Seq.  Keeps reduction traces canonical."""
    if isinstance(p, Seq):
        return Seq(p.first, seq_append(p.rest, k), span=p.span)
    return Seq(p, k, span=p.span)


def while_unfold(w):
    """body ; while(b){body}, right-associated and cached on the node."""
    if w._unfold is None:
        w._unfold = seq_append(w.body, w)
    return w._unfold


# --- pretty printer ---------------------------------------------------------

def _fmt_num(r):
    return repr(float(r))


def pretty_lterm(t):
    # sums print flat; only parser-shaped (left-nested) sums round-trip,
    # since the lterm grammar has no parentheses
    if isinstance(t, Const):
        return _fmt_num(t.value)
    if isinstance(t, Scaled):
        if t.coeff == 1.0:
            return t.var
        return f"{_fmt_num(t.coeff)} * {t.var}"
    return f"{pretty_lterm(t.left)} + {pretty_lterm(t.right)}"


def _pretty_b(b, parent):
    # parent: 0 = or-context, 1 = and-context, 2 = not/atom context
    if isinstance(b, BoolLit):
        return "true" if b.value else "false"
    if isinstance(b, Cmp):
        return f"{pretty_lterm(b.left)} {b.op} {pretty_lterm(b.right)}"
    if isinstance(b, Not):
        return "!" + _pretty_b(b.expr, 2)
    if isinstance(b, And):
        s = f"{_pretty_b(b.left, 2)} && {_pretty_b(b.right, 1)}"
        return f"({s})" if parent >= 2 else s
    s = f"{_pretty_b(b.left, 1)} || {_pretty_b(b.right, 0)}"
    return f"({s})" if parent >= 1 else s


def pretty_bexpr(b):
    return _pretty_b(b, 0)


def pretty(p):
    if isinstance(p, Assign):
        return f"{p.var} := {pretty_lterm(p.expr)}"
    if isinstance(p, DiffFor):
        eqs = ", ".join(f"{x}' = {pretty_lterm(t)}" for x, t in p.eqs)
        return f"{eqs} for {pretty_lterm(p.duration)}"
    if isinstance(p, Seq):
        return f"{pretty(p.first)} ; {pretty(p.rest)}"
    if isinstance(p, If):
        return (f"if {pretty_bexpr(p.cond)} then {{ {pretty(p.then)} }}"
                f" else {{ {pretty(p.orelse)} }}")
    return f"while {pretty_bexpr(p.cond)} {{ {pretty(p.body)} }}"
