"""Infix expression parser and printer.

Grammar (EBNF; whitespace free between tokens):

    expr     = term , { ("+" | "-") , term } ;
    term     = unary , { ("*" | "/") , unary } ;
    unary    = "-" , unary | power ;
    power    = primary , [ "^" , exponent ] ;
    exponent = [ "-" ] , integer
             | "(" , [ "-" ] , integer , [ "/" , integer ] , ")" ;
    primary  = integer | identifier
             | "(" , expr , ")"
             | "ln" , "(" , expr , ")"
             | "sqrt" , "(" , expr , ")" ;

Rationals are written with "/" (e.g. 3/4); exponents may be fractional in
parentheses (x^(1/2)).  `sqrt(p)` over a polynomial argument is sugar for a
radical atom with defining relation r^2 = p: it resolves to a declared atom
of the chart, or (in declaring mode) adds one named r, r1, r2, ...

The printer emits the same grammar; parsing its output yields a semantically
equal expression (equal canonical form, or equal term-by-term under ln).
"""

from __future__ import annotations

from fractions import Fraction

from .chart import Chart, RadicalAtom
from .errors import ExprSyntaxError, UnknownSymbol
from .expr import Atom, Const, Coord, Expr, Ln, Power, Product, Sum, normalize
from .rational import _sqrt_exact

_OPS = set("+-*/^()")


def tokenize(text: str):
    toks = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c in _OPS:
            toks.append((c, c, i))
            i += 1
            continue
        if c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            toks.append(("int", text[i:j], i))
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            toks.append(("ident", text[i:j], i))
            i = j
            continue
        raise ExprSyntaxError(f"unexpected character {c!r}", i)
    toks.append(("end", "", n))
    return toks


class _Parser:
    def __init__(self, text: str, chart: Chart, declare_radicals: bool):
        self.text = text
        self.toks = tokenize(text)
        self.pos = 0
        self.chart = chart
        self.declare = declare_radicals

    def peek(self):
        return self.toks[self.pos]

    def next(self):
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def expect(self, kind):
        t = self.next()
        if t[0] != kind:
            raise ExprSyntaxError(f"expected {kind!r}, found {t[1]!r}", t[2])
        return t

    def parse(self) -> Expr:
        e = self.expr()
        t = self.peek()
        if t[0] != "end":
            raise ExprSyntaxError(f"trailing input {t[1]!r}", t[2])
        return e

    def expr(self) -> Expr:
        parts = [self.term()]
        while self.peek()[0] in ("+", "-"):
            op = self.next()[0]
            rhs = self.term()
            parts.append(rhs if op == "+" else Product((Const(-1), rhs)))
        return parts[0] if len(parts) == 1 else Sum(tuple(parts))

    def term(self) -> Expr:
        out = self.unary()
        while self.peek()[0] in ("*", "/"):
            op = self.next()[0]
            rhs = self.unary()
            out = out * rhs if op == "*" else out / rhs
        return out

    def unary(self) -> Expr:
        if self.peek()[0] == "-":
            self.next()
            return Product((Const(-1), self.unary()))
        return self.power()

    def power(self) -> Expr:
        base = self.primary()
        if self.peek()[0] == "^":
            self.next()
            return Power(base, self.exponent())
        return base

    def exponent(self) -> Fraction:
        t = self.peek()
        sign = 1
        if t[0] == "-":
            self.next()
            sign = -1
            t = self.peek()
        if t[0] == "int":
            self.next()
            return Fraction(sign * int(t[1]))
        if t[0] == "(":
            self.next()
            inner_sign = sign
            t = self.peek()
            if t[0] == "-":
                self.next()
                inner_sign = -inner_sign
            num = int(self.expect("int")[1])
            den = 1
            if self.peek()[0] == "/":
                self.next()
                den = int(self.expect("int")[1])
            self.expect(")")
            if den == 0:
                raise ExprSyntaxError("zero denominator in exponent", t[2])
            return Fraction(inner_sign * num, den)
        raise ExprSyntaxError("expected an integer or rational exponent", t[2])

    def primary(self) -> Expr:
        t = self.next()
        if t[0] == "int":
            return Const(int(t[1]))
        if t[0] == "(":
            e = self.expr()
            self.expect(")")
            return e
        if t[0] == "ident":
            name = t[1]
            if name == "ln":
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Ln(arg)
            if name == "sqrt":
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return self._resolve_sqrt(arg, t[2])
            if name in self.chart.coord_names:
                return Coord(name)
            if self.chart.atom_index(name) is not None:
                return Atom(name)
            raise UnknownSymbol(f"{name!r} is not declared in the chart")
        raise ExprSyntaxError(f"unexpected token {t[1]!r}", t[2])

    def _resolve_sqrt(self, arg: Expr, at: int) -> Expr:
        cr = normalize(arg, self.chart)
        if not (cr.den.is_const and cr.den.const_value() == 1) or cr.num.has_atoms():
            raise ExprSyntaxError(
                "sqrt() argument must be a polynomial in the coordinates", at)
        if cr.num.is_const:
            ex = _sqrt_exact(cr.num.const_value())
            if ex is not None:
                return Const(ex)
        radicand = {m[: self.chart.dim]: c for m, c in cr.num.terms.items()}
        atom = self.chart.find_atom_for(radicand)
        if atom is not None:
            return Atom(atom.name)
        if not self.declare:
            raise UnknownSymbol(
                "sqrt() radicand matches no declared radical atom "
                "(declare one, or parse in declaring mode)")
        name = self._fresh_atom_name()
        self.chart = self.chart.with_atom(RadicalAtom.make(name, radicand))
        return Atom(name)

    def _fresh_atom_name(self) -> str:
        taken = set(self.chart.var_names)
        if "r" not in taken:
            return "r"
        k = 1
        while f"r{k}" in taken:
            k += 1
        return f"r{k}"


def parse_expr(text: str, chart: Chart) -> Expr:
    """Parse over a fixed chart; sqrt() may only reference declared atoms."""
    return _Parser(text, chart, declare_radicals=False).parse()


def parse_declaring(text: str, chart: Chart):
    """Parse, auto-declaring radical atoms for new sqrt() radicands.

    Returns (expr, chart); the chart is extended when new atoms appear.
    """
    p = _Parser(text, chart, declare_radicals=True)
    e = p.parse()
    return e, p.chart


# -- printing --------------------------------------------------------------------

_PREC_SUM, _PREC_PROD, _PREC_POW, _PREC_ATOMIC = 1, 2, 3, 4


def pretty(e: Expr) -> str:
    """Render in the input grammar; parse(pretty(e)) is semantically equal to e."""
    s, _ = _render(e)
    return s


def _paren(s, prec, need):
    return f"({s})" if prec < need else s


def _render(e: Expr):
    if isinstance(e, Const):
        v = e.value
        if v < 0:
            return f"-{_frac(-v)}", _PREC_SUM
        return _frac(v), _PREC_ATOMIC if v.denominator == 1 else _PREC_PROD
    if isinstance(e, (Coord, Atom)):
        return e.name, _PREC_ATOMIC
    if isinstance(e, Sum):
        out = ""
        for i, a in enumerate(e.args):
            s, _ = _render(a)
            if i == 0:
                out = s
            elif s.startswith("-"):
                out += " - " + s[1:]
            else:
                out += " + " + s
        return out or "0", _PREC_SUM
    if isinstance(e, Product):
        neg, factors = _split_sign(e)
        parts = [_paren(*_pair(a), _PREC_PROD) for a in factors] or ["1"]
        body = "*".join(parts)
        return ("-" + body, _PREC_SUM) if neg else (body, _PREC_PROD)
    if isinstance(e, Power):
        bs, bp = _render(e.base)
        bs = _paren(bs, bp, _PREC_ATOMIC)
        q = e.exponent
        if q.denominator == 1 and q >= 0:
            return f"{bs}^{q.numerator}", _PREC_POW
        if q.denominator == 1:
            return f"{bs}^({q.numerator})", _PREC_POW
        return f"{bs}^({q.numerator}/{q.denominator})", _PREC_POW
    if isinstance(e, Ln):
        s, _ = _render(e.arg)
        return f"ln({s})", _PREC_ATOMIC
    raise TypeError(f"not an Expr: {e!r}")


def _pair(e):
    s, p = _render(e)
    return s, p


def _split_sign(e: Product):
    neg = False
    factors = []
    for a in e.args:
        if isinstance(a, Const) and a.value == -1:
            neg = not neg
        elif isinstance(a, Const) and a.value < 0:
            neg = not neg
            factors.append(Const(-a.value))
        else:
            factors.append(a)
    return neg, factors


def _frac(v: Fraction) -> str:
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
