"""Problem files: group declarations, ledger overrides and one exponential equation.

Example::

    factor A = Z;
    factor B = Z^2 x Z/6;
    gen a in A = (1);
    gen b in B = (0, 0, 1);
    ledger M = 1000;
    equation ((a*b)^-5) * (a*b)^x = 1;

Instead of ``equation`` a problem may list its terms one by one with
``term <var> : <coefficient>, <base>;``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

from .abelian import AbelianSignature
from .freeprod import FreeProductElement, GroupSpec, format_element, invert, multiply, power
from .solver import ExponentialEquation, Term


class ProblemSyntaxError(ValueError):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.line, self.col = line, col
        super().__init__(f"{line}:{col}: {message}" if line else message)


_TOKEN = re.compile(
    r"(?P<ws>[ \t\r]+)|(?P<nl>\n)|(?P<comment>#[^\n]*)"
    r"|(?P<int>\d+)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<sym>[;=()^*,:/\-])"
)


@dataclass
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> list:
    out = []
    pos, line, start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ProblemSyntaxError(f"unexpected character {text[pos]!r}", line, pos - start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            start = m.end()
        elif kind not in ("ws", "comment"):
            out.append(Token(kind, m.group(), line, m.start() - start + 1))
        pos = m.end()
    out.append(Token("eof", "", line, pos - start + 1))
    return out


class _Parser:
    def __init__(self, text: str, spec: GroupSpec = None):
        self.toks = tokenize(text)
        self.i = 0
        self.spec = spec

    # token helpers
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def error(self, msg: str, tok: Token = None):
        tok = tok or self.tok
        raise ProblemSyntaxError(msg, tok.line, tok.col)

    def accept(self, text: str) -> bool:
        if self.tok.text == text and self.tok.kind in ("sym", "ident"):
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        tok = self.tok
        if not self.accept(text):
            self.error(f"expected {text!r}, found {tok.text or 'end of input'!r}")
        return tok

    def ident(self) -> Token:
        tok = self.tok
        if tok.kind != "ident":
            self.error(f"expected a name, found {tok.text or 'end of input'!r}")
        self.i += 1
        return tok

    def integer(self) -> int:
        neg = self.accept("-")
        tok = self.tok
        if tok.kind != "int":
            self.error(f"expected an integer, found {tok.text or 'end of input'!r}")
        self.i += 1
        return -int(tok.text) if neg else int(tok.text)

    def number(self) -> Fraction:
        num = self.integer()
        if self.accept("/"):
            return Fraction(num, self.integer())
        return Fraction(num)

    # grammar
    def signature(self) -> AbelianSignature:
        free, torsion = 0, []
        while True:
            tok = self.ident()
            if tok.text != "Z":
                self.error("expected 'Z'", tok)
            if self.accept("^"):
                free += self.integer()
            elif self.accept("/"):
                torsion.append(self.integer())
            else:
                free += 1
            if not self.accept("x"):
                break
        try:
            return AbelianSignature(free, tuple(torsion))
        except ValueError as e:
            self.error(str(e), tok)

    def coords(self) -> list:
        self.expect("(")
        vals = [self.integer()]
        while self.accept(","):
            vals.append(self.integer())
        self.expect(")")
        return vals

    def element(self) -> FreeProductElement:
        out = self.factor()
        while self.accept("*"):
            out = multiply(out, self.factor())
        return out

    def atom(self) -> FreeProductElement:
        tok = self.tok
        spec = self.spec
        if self.accept("("):
            e = self.element()
            self.expect(")")
            return e
        if tok.kind == "int" and tok.text == "1":
            self.i += 1
            return spec.identity()
        if tok.kind == "ident":
            self.i += 1
            if spec.has_generator(tok.text):
                return spec.gen(tok.text)
            if tok.text in spec._factor_index and self.tok.text == "(":
                f = spec.factor_index(tok.text)
                vals = self.coords()
                try:
                    return spec.syllable(f, vals)
                except ValueError as e:
                    self.error(str(e), tok)
            self.error(f"unknown generator {tok.text!r}", tok)
        self.error(f"expected an element, found {tok.text or 'end of input'!r}")

    def factor(self) -> FreeProductElement:
        base = self.atom()
        while self.accept("^"):
            base = power(base, self.integer())
        return base

    def element_only(self) -> FreeProductElement:
        e = self.element()
        if self.tok.kind != "eof":
            self.error(f"unexpected {self.tok.text!r}")
        return e


def parse_element(spec: GroupSpec, text: str) -> FreeProductElement:
    return _Parser(text, spec).element_only()


@dataclass
class Problem:
    spec: GroupSpec
    equation: ExponentialEquation
    ledger_overrides: dict = field(default_factory=dict)

    def __eq__(self, other):
        return (
            isinstance(other, Problem)
            and self.spec == other.spec
            and self.equation == other.equation
            and self.ledger_overrides == other.ledger_overrides
        )


def _equation_terms(p: _Parser, spec: GroupSpec) -> list:
    """Parse ``product = 1`` into ``(coefficient, base, variable)`` triples."""
    pieces = []  # ("const", element) | ("var", base, name, token)

    def piece():
        tok = p.tok
        if p.accept("("):
            e = p.element()
            p.expect(")")
        else:
            e = p.atom()
        while p.tok.text == "^":
            p.i += 1
            if p.tok.kind == "ident":
                vtok = p.ident()
                pieces.append(("var", e, vtok.text, vtok))
                return
            e = power(e, p.integer())
        pieces.append(("const", e))

    piece()
    while p.accept("*"):
        piece()
    p.expect("=")
    one = p.tok
    if p.integer() != 1:
        p.error("equations must have right-hand side 1", one)

    terms, coef, seen = [], spec.identity(), set()
    for item in pieces:
        if item[0] == "const":
            coef = multiply(coef, item[1])
            continue
        _, base, name, vtok = item
        if name in seen:
            p.error(f"variable {name!r} used twice", vtok)
        seen.add(name)
        terms.append([coef, base, name])
        coef = spec.identity()
    if not terms:
        p.error("equation has no variables")
    # trailing constant c: a_1 ... g_n^x_n c = 1  <=>  (c a_1) ... g_n^x_n = 1
    terms[0][0] = multiply(coef, terms[0][0])
    return [Term(*t) for t in terms]


def parse_problem(text: str) -> Problem:
    p = _Parser(text)
    factors, gens, overrides = [], [], {}
    terms, eq_tok = None, None
    term_list = []
    while p.tok.kind != "eof":
        kw = p.ident()
        if kw.text == "factor":
            name = p.ident().text
            p.expect("=")
            factors.append((name, p.signature()))
            p.expect(";")
        elif kw.text == "gen":
            name = p.ident()
            p.expect("in")
            fname = p.ident().text
            p.expect("=")
            gens.append((name, fname, p.coords()))
            p.expect(";")
        elif kw.text == "ledger":
            key = p.ident().text
            p.expect("=")
            overrides[key] = p.number()
            p.expect(";")
        elif kw.text in ("equation", "term"):
            if p.spec is None:
                try:
                    p.spec = GroupSpec(factors, [(t.text, f, c) for t, f, c in gens])
                except ValueError as e:
                    p.error(str(e), kw)
            if kw.text == "equation":
                if terms is not None or term_list:
                    p.error("only one equation per problem", kw)
                terms, eq_tok = _equation_terms(p, p.spec), kw
            else:
                if terms is not None:
                    p.error("cannot mix 'term' with 'equation'", kw)
                var = p.ident()
                if any(t.variable == var.text for t in term_list):
                    p.error(f"variable {var.text!r} used twice", var)
                p.expect(":")
                coef = p.element()
                p.expect(",")
                base = p.element()
                term_list.append(Term(coef, base, var.text))
            p.expect(";")
        else:
            p.error(f"unknown statement {kw.text!r}", kw)
        if kw.text in ("factor", "gen") and p.spec is not None:
            p.error("declarations must precede the equation", kw)
    if p.spec is None:
        p.error("missing equation")
    terms = terms if terms is not None else term_list
    from .bounds import LEDGER_KEYS

    for key in overrides:
        if key not in LEDGER_KEYS:
            raise ProblemSyntaxError(f"unknown ledger key {key!r}")
    return Problem(p.spec, ExponentialEquation(p.spec, tuple(terms)), overrides)


def format_signature(sig: AbelianSignature) -> str:
    parts = []
    if sig.free_rank == 1:
        parts.append("Z")
    elif sig.free_rank > 1 or not sig.torsion_moduli:
        parts.append(f"Z^{sig.free_rank}")
    parts += [f"Z/{m}" for m in sig.torsion_moduli]
    return " x ".join(parts)


def _fmt_number(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def format_problem(problem: Problem) -> str:
    spec = problem.spec
    lines = [f"factor {n} = {format_signature(sig)};" for n, sig in spec.factors]
    for g in spec.generators:
        coords = ", ".join(str(c) for c in g.value.coords)
        lines.append(f"gen {g.name} in {spec.factor_name(g.factor)} = ({coords});")
    for key, val in sorted(problem.ledger_overrides.items()):
        lines.append(f"ledger {key} = {_fmt_number(Fraction(val))};")
    for t in problem.equation.terms:
        lines.append(f"term {t.variable} : {format_element(t.coefficient)}, {format_element(t.base)};")
    return "\n".join(lines) + "\n"
