"""Concrete syntax for the hybrid while-language.

Grammar (whitespace-insensitive, "#" starts a line comment):

    program  := stmt { ";" stmt }                      (right-associated)
    stmt     := ident ":=" lterm
              | diffspec "for" lterm
              | diffspec "until" "[" number "]" bexpr
              | "wait" lterm
              | "if" bexpr "then" "{" program "}" "else" "{" program "}"
              | "while" bexpr "{" program "}"
    diffspec := ident "'" "=" lterm { "," ident "'" "=" lterm }
    lterm    := term { "+" term }
    term     := number [ "*" ident ] | ident
    bexpr    := "||"-disjunctions of "&&"-conjunctions of
                [ "!" ] ( "true" | "false" | lterm ("<="|">=") lterm | "(" bexpr ")" )
    number   := decimal literal, optional leading "-"

A bare identifier in an lterm is Scaled(1, x).  There is no subtraction
operator; write `+` with negative literals.  Strict comparisons are not in
the language and get a targeted error.  `wait` and `until [eps]` are sugar
and desugar after the whole program has been read (they need the full
variable set).

This concrete syntax is one faithful rendering of the typeset language; the
abstract syntax in `hyb.syntax` is the definition.
"""

from __future__ import annotations

from dataclasses import dataclass

from .syntax import (
    And, Assign, BoolLit, Cmp, Const, DiffFor, Diagnostic, If, Not, Or,
    Scaled, Seq, Span, Sum, While, _bexpr_vars, _lterm_vars, desugar_until,
    desugar_wait, well_formed,
)

KEYWORDS = {"wait", "if", "then", "else", "while", "for", "until", "true", "false"}

_PUNCT = (":=", "<=", ">=", "&&", "||", ";", ",", "'", "=", "+", "*", "!",
          "(", ")", "{", "}", "[", "]")


class ParseError(Exception):
    def __init__(self, message, line, col, expected=()):
        self.message = message
        self.line = line
        self.col = col
        self.expected = tuple(expected)
        loc = f"{line}:{col}"
        if expected:
            message = f"{message} (expected {' or '.join(expected)})"
        super().__init__(f"{loc}: {message}")


@dataclass
class Token:
    kind: str  # "ident", "number", "punct", "eof"
    text: str
    span: Span


def tokenize(src):
    tokens = []
    i, line, col = 0, 1, 1
    n = len(src)

    def span(start, start_line, start_col):
        return Span(start, i, start_line, start_col)

    while i < n:
        c = src[i]
        if c == "#":
            while i < n and src[i] != "\n":
                i += 1
            continue
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        start, sl, sc = i, line, col
        if c.isalpha():
            while i < n and (src[i].isalnum() or src[i] == "_"):
                i += 1
            col += i - start
            tokens.append(Token("ident", src[start:i], span(start, sl, sc)))
            continue
        if c.isdigit() or (c == "-" and i + 1 < n and (src[i + 1].isdigit() or src[i + 1] == ".")) \
                or (c == "." and i + 1 < n and src[i + 1].isdigit()):
            j = i
            if src[j] == "-":
                j += 1
            while j < n and src[j].isdigit():
                j += 1
            if j < n and src[j] == ".":
                j += 1
                while j < n and src[j].isdigit():
                    j += 1
            if j < n and src[j] in "eE":
                k = j + 1
                if k < n and src[k] in "+-":
                    k += 1
                if k < n and src[k].isdigit():
                    j = k
                    while j < n and src[j].isdigit():
                        j += 1
            i = j
            col += i - start
            tokens.append(Token("number", src[start:i], span(start, sl, sc)))
            continue
        if c in "<>" and not (i + 1 < n and src[i + 1] == "="):
            raise ParseError(
                f"strict comparison {c!r} is not in the language; use <= or >=",
                line, col)
        two = src[i:i + 2]
        if two in _PUNCT:
            i += 2
            col += 2
            tokens.append(Token("punct", two, span(start, sl, sc)))
            continue
        if c in _PUNCT:
            i += 1
            col += 1
            tokens.append(Token("punct", c, span(start, sl, sc)))
            continue
        raise ParseError(f"unexpected character {c!r}", line, col)
    tokens.append(Token("eof", "", Span(n, n, line, col)))
    return tokens


# surface statement for `wait`; desugared once the variable set is known
@dataclass
class _Wait:
    duration: object
    span: Span


class _Parser:
    def __init__(self, src):
        self.src = src
        self.toks = tokenize(src)
        self.pos = 0

    def peek(self):
        return self.toks[self.pos]

    def next(self):
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def error(self, message, tok=None, expected=()):
        tok = tok or self.peek()
        if tok.kind == "eof":
            message += " at end of input"
        raise ParseError(message, tok.span.line, tok.span.col, expected)

    def expect(self, text):
        t = self.peek()
        if (t.kind == "punct" and t.text == text) or (t.kind == "ident" and t.text == text):
            return self.next()
        self.error(f"found {t.text!r}" if t.kind != "eof" else "input ended",
                   expected=(repr(text),))

    def at_punct(self, text):
        t = self.peek()
        return t.kind == "punct" and t.text == text

    def at_keyword(self, word):
        t = self.peek()
        return t.kind == "ident" and t.text == word

    def ident(self):
        t = self.peek()
        if t.kind != "ident" or t.text in KEYWORDS:
            self.error("expected identifier")
        return self.next()

    def number(self):
        t = self.peek()
        if t.kind != "number":
            self.error("expected number")
        self.next()
        return float(t.text)

    # lterm --------------------------------------------------------------
    def lterm(self):
        t = self.term()
        while self.at_punct("+"):
            self.next()
            s = self.term()
            t = Sum(t, s, span=Span(t.span.start, s.span.end, t.span.line, t.span.col))
        return t

    def term(self):
        t = self.peek()
        if t.kind == "number":
            self.next()
            value = float(t.text)
            if self.at_punct("*"):
                self.next()
                var = self.ident()
                return Scaled(value, var.text, span=Span(t.span.start, var.span.end,
                                                         t.span.line, t.span.col))
            return Const(value, span=t.span)
        if t.kind == "ident" and t.text not in KEYWORDS:
            self.next()
            return Scaled(1.0, t.text, span=t.span)
        self.error("expected term", expected=("number", "identifier"))

    # bexpr --------------------------------------------------------------
    def bexpr(self):
        left = self.bconj()
        if self.at_punct("||"):
            self.next()
            right = self.bexpr()
            return Or(left, right, span=left.span)
        return left

    def bconj(self):
        left = self.batom()
        if self.at_punct("&&"):
            self.next()
            right = self.bconj()
            return And(left, right, span=left.span)
        return left

    def batom(self):
        t = self.peek()
        if self.at_punct("!"):
            self.next()
            return Not(self.batom(), span=t.span)
        if self.at_punct("("):
            self.next()
            inner = self.bexpr()
            self.expect(")")
            return inner
        if t.kind == "ident" and t.text == "true":
            self.next()
            return BoolLit(True, span=t.span)
        if t.kind == "ident" and t.text == "false":
            self.next()
            return BoolLit(False, span=t.span)
        left = self.lterm()
        op = self.peek()
        if op.kind == "punct" and op.text in ("<=", ">="):
            self.next()
            right = self.lterm()
            return Cmp(op.text, left, right,
                       span=Span(left.span.start, right.span.end, left.span.line, left.span.col))
        self.error("expected comparison", expected=("'<='", "'>='"))

    # statements ----------------------------------------------------------
    def program(self):
        first = self.stmt()
        if self.at_punct(";"):
            self.next()
            rest = self.program()
            return Seq(first, rest, span=first.span)
        return first

    def stmt(self):
        t = self.peek()
        if t.kind == "ident" and t.text == "wait":
            self.next()
            dur = self.lterm()
            return _Wait(dur, Span(t.span.start, dur.span.end, t.span.line, t.span.col))
        if t.kind == "ident" and t.text == "if":
            self.next()
            cond = self.bexpr()
            self.expect("then")
            self.expect("{")
            then = self.program()
            self.expect("}")
            self.expect("else")
            self.expect("{")
            orelse = self.program()
            close = self.expect("}")
            return If(cond, then, orelse,
                      span=Span(t.span.start, close.span.end, t.span.line, t.span.col))
        if t.kind == "ident" and t.text == "while":
            self.next()
            cond = self.bexpr()
            self.expect("{")
            body = self.program()
            close = self.expect("}")
            return While(cond, body,
                         span=Span(t.span.start, close.span.end, t.span.line, t.span.col))
        if t.kind != "ident" or t.text in KEYWORDS:
            self.error("expected statement")
        name = self.ident()
        if self.at_punct(":="):
            self.next()
            expr = self.lterm()
            return Assign(name.text, expr,
                          span=Span(name.span.start, expr.span.end, name.span.line, name.span.col))
        if self.at_punct("'"):
            return self.diff_tail(name)
        self.error("expected ':=' or \"'\" after identifier")

    def diff_tail(self, first_name):
        eqs = []
        name = first_name
        while True:
            self.expect("'")
            self.expect("=")
            rhs = self.lterm()
            eqs.append((name.text, rhs))
            if self.at_punct(","):
                self.next()
                name = self.ident()
                continue
            break
        t = self.peek()
        if self.at_keyword("for"):
            self.next()
            dur = self.lterm()
            return DiffFor(tuple(eqs), dur,
                           span=Span(first_name.span.start, dur.span.end,
                                     first_name.span.line, first_name.span.col))
        if self.at_keyword("until"):
            kw = self.next()
            self.expect("[")
            eps = self.number()
            self.expect("]")
            psi = self.bexpr()
            if not eps > 0:
                raise ParseError(f"until step width must be > 0, got {eps}",
                                 kw.span.line, kw.span.col)
            return desugar_until(eqs, eps, psi,
                                 span=Span(first_name.span.start, psi.span.end,
                                           first_name.span.line, first_name.span.col))
        self.error("expected 'for' or 'until' after differential equations",
                   expected=("'for'", "'until'"))


def _resolve_waits(p, order):
    if isinstance(p, _Wait):
        d = desugar_wait(p.duration, order)
        d.span = p.span
        return d
    if isinstance(p, Seq):
        return Seq(_resolve_waits(p.first, order), _resolve_waits(p.rest, order), span=p.span)
    if isinstance(p, If):
        return If(p.cond, _resolve_waits(p.then, order), _resolve_waits(p.orelse, order),
                  span=p.span)
    if isinstance(p, While):
        return While(p.cond, _resolve_waits(p.body, order), span=p.span)
    return p


def _surface_vars(p):
    # first-occurrence variable order over the surface tree, waits included
    out = {}

    def walk(p):
        if isinstance(p, _Wait):
            _lterm_vars(p.duration, out)
        elif isinstance(p, Assign):
            out.setdefault(p.var, None)
            _lterm_vars(p.expr, out)
        elif isinstance(p, DiffFor):
            for x, t in p.eqs:
                out.setdefault(x, None)
                _lterm_vars(t, out)
            _lterm_vars(p.duration, out)
        elif isinstance(p, Seq):
            walk(p.first)
            walk(p.rest)
        elif isinstance(p, If):
            _bexpr_vars(p.cond, out)
            walk(p.then)
            walk(p.orelse)
        elif isinstance(p, While):
            _bexpr_vars(p.cond, out)
            walk(p.body)

    walk(p)
    return tuple(out)


@dataclass
class ParseResult:
    prog: object
    variables: tuple


def try_parse(src):
    """Parse without raising: returns (ParseResult | None, diagnostics)."""
    try:
        parser = _Parser(src)
        surface = parser.program()
        t = parser.peek()
        if t.kind != "eof":
            parser.error(f"unexpected {t.text!r} after program", tok=t, expected=("';'",))
    except ParseError as e:
        return None, [Diagnostic(e.message, Span(0, 0, e.line, e.col))]
    order = _surface_vars(surface)
    prog = _resolve_waits(surface, order)
    diags = well_formed(prog, order)
    if diags:
        return None, diags
    return ParseResult(prog, order), []


def parse(src):
    """Parse src to (Prog, variables); raises ParseError on any problem."""
    result, diags = try_parse(src)
    if result is None:
        d = diags[0]
        if d.span is not None:
            raise ParseError(d.message, d.span.line, d.span.col)
        raise ParseError(d.message, 1, 1)
    return result.prog, result.variables
