"""Expression ASTs for potentials and inputs.

Tensor components live in CanonicalRational; the AST exists for what that
form cannot hold: ln (allowed in potentials and exactness witnesses) and the
raw shape of user input.  Nodes are immutable and hashable, so shared
subterms behave as a DAG and normalization results can be cached.

Node kinds: rational constant, coordinate, radical atom, sum, product,
rational power, natural logarithm.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

from .chart import Chart
from .errors import NonRationalExpression, SingularPoint
from .poly import Poly
from .rational import CanonicalRational, _point_values


class Expr:
    __slots__ = ()

    def __add__(self, other):
        return Sum((self, _wrap(other)))

    def __radd__(self, other):
        return Sum((_wrap(other), self))

    def __sub__(self, other):
        return Sum((self, Product((Const(Fraction(-1)), _wrap(other)))))

    def __rsub__(self, other):
        return Sum((_wrap(other), Product((Const(Fraction(-1)), self))))

    def __mul__(self, other):
        return Product((self, _wrap(other)))

    def __rmul__(self, other):
        return Product((_wrap(other), self))

    def __truediv__(self, other):
        return Product((self, Power(_wrap(other), Fraction(-1))))

    def __rtruediv__(self, other):
        return Product((_wrap(other), Power(self, Fraction(-1))))

    def __neg__(self):
        return Product((Const(Fraction(-1)), self))

    def __pow__(self, k):
        return Power(self, Fraction(k))


def _wrap(v) -> Expr:
    if isinstance(v, Expr):
        return v
    if isinstance(v, (int, Fraction)):
        return Const(Fraction(v))
    raise TypeError(f"cannot treat {type(v).__name__} as an expression")


class Const(Expr):
    __slots__ = ("value",)

    def __init__(self, value):
        object.__setattr__(self, "value", Fraction(value))

    def __setattr__(self, *a):
        raise AttributeError("immutable")

    def __eq__(self, o):
        return isinstance(o, Const) and o.value == self.value

    def __hash__(self):
        return hash(("c", self.value))

    def __repr__(self):
        return f"Const({self.value})"


class Coord(Expr):
    __slots__ = ("name",)

    def __init__(self, name: str):
        object.__setattr__(self, "name", name)

    def __setattr__(self, *a):
        raise AttributeError("immutable")

    def __eq__(self, o):
        return isinstance(o, Coord) and o.name == self.name

    def __hash__(self):
        return hash(("x", self.name))

    def __repr__(self):
        return f"Coord({self.name})"


class Atom(Expr):
    """A radical atom reference; the defining polynomial lives in the chart."""

    __slots__ = ("name",)

    def __init__(self, name: str):
        object.__setattr__(self, "name", name)

    def __setattr__(self, *a):
        raise AttributeError("immutable")

    def __eq__(self, o):
        return isinstance(o, Atom) and o.name == self.name

    def __hash__(self):
        return hash(("r", self.name))

    def __repr__(self):
        return f"Atom({self.name})"


class Sum(Expr):
    __slots__ = ("args",)

    def __init__(self, args):
        object.__setattr__(self, "args", tuple(args))

    def __setattr__(self, *a):
        raise AttributeError("immutable")

    def __eq__(self, o):
        return isinstance(o, Sum) and o.args == self.args

    def __hash__(self):
        return hash(("+",) + self.args)

    def __repr__(self):
        return f"Sum{self.args!r}"


class Product(Expr):
    __slots__ = ("args",)

    def __init__(self, args):
        object.__setattr__(self, "args", tuple(args))

    def __setattr__(self, *a):
        raise AttributeError("immutable")

    def __eq__(self, o):
        return isinstance(o, Product) and o.args == self.args

    def __hash__(self):
        return hash(("*",) + self.args)

    def __repr__(self):
        return f"Product{self.args!r}"


class Power(Expr):
    __slots__ = ("base", "exponent")

    def __init__(self, base: Expr, exponent):
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "exponent", Fraction(exponent))

    def __setattr__(self, *a):
        raise AttributeError("immutable")

    def __eq__(self, o):
        return isinstance(o, Power) and o.base == self.base and o.exponent == self.exponent

    def __hash__(self):
        return hash(("^", self.base, self.exponent))

    def __repr__(self):
        return f"Power({self.base!r}, {self.exponent})"


class Ln(Expr):
    __slots__ = ("arg",)

    def __init__(self, arg: Expr):
        object.__setattr__(self, "arg", arg)

    def __setattr__(self, *a):
        raise AttributeError("immutable")

    def __eq__(self, o):
        return isinstance(o, Ln) and o.arg == self.arg

    def __hash__(self):
        return hash(("ln", self.arg))

    def __repr__(self):
        return f"Ln({self.arg!r})"


# -- differentiation -----------------------------------------------------------


def diff(e: Expr, coord: str, chart: Chart) -> Expr:
    """Exact partial derivative; total on well-formed expressions.

    Atoms follow dr/dx = p_,x / (2 r); ln follows d ln(g) = g'/g.  The result
    is an AST; normalize() collapses it when it is ln-free.
    """
    if isinstance(e, Const):
        return Const(0)
    if isinstance(e, Coord):
        return Const(1 if e.name == coord else 0)
    if isinstance(e, Atom):
        idx = chart.atom_index(e.name)
        if idx is None:
            raise KeyError(f"atom {e.name!r} not in chart")
        radicand = _radicand_expr(chart, e.name)
        dp = diff(radicand, coord, chart)
        return Product((Const(Fraction(1, 2)), dp, Power(Atom(e.name), Fraction(-1))))
    if isinstance(e, Sum):
        return Sum(tuple(diff(a, coord, chart) for a in e.args))
    if isinstance(e, Product):
        parts = []
        for i in range(len(e.args)):
            factors = tuple(diff(a, coord, chart) if j == i else a
                            for j, a in enumerate(e.args))
            parts.append(Product(factors))
        return Sum(tuple(parts))
    if isinstance(e, Power):
        dbase = diff(e.base, coord, chart)
        return Product((Const(e.exponent), Power(e.base, e.exponent - 1), dbase))
    if isinstance(e, Ln):
        darg = diff(e.arg, coord, chart)
        return Product((darg, Power(e.arg, Fraction(-1))))
    raise TypeError(f"not an Expr: {e!r}")


def _radicand_expr(chart: Chart, atom_name: str) -> Expr:
    atom = next(a for a in chart.atoms if a.name == atom_name)
    terms = []
    for mono, c in atom.radicand:
        factors = [Const(c)]
        for exp, nm in zip(mono, chart.coord_names):
            if exp:
                factors.append(Power(Coord(nm), Fraction(exp)) if exp != 1 else Coord(nm))
        terms.append(Product(tuple(factors)) if len(factors) > 1 else factors[0])
    return Sum(tuple(terms)) if len(terms) != 1 else terms[0]


# -- normalization to canonical form ----------------------------------------------


@lru_cache(maxsize=65536)
def _normalize_cached(e: Expr, chart: Chart) -> CanonicalRational:
    if isinstance(e, Const):
        return CanonicalRational.const(chart, e.value)
    if isinstance(e, Coord):
        if e.name not in chart.coord_names:
            raise KeyError(f"coordinate {e.name!r} not in chart")
        return CanonicalRational.var(chart, e.name)
    if isinstance(e, Atom):
        if chart.atom_index(e.name) is None:
            raise KeyError(f"atom {e.name!r} not in chart")
        return CanonicalRational.var(chart, e.name)
    if isinstance(e, Sum):
        out = CanonicalRational.zero(chart)
        for a in e.args:
            out = out + _normalize_cached(a, chart)
        return out
    if isinstance(e, Product):
        out = CanonicalRational.const(chart, 1)
        for a in e.args:
            out = out * _normalize_cached(a, chart)
            if out.is_zero:
                return out
        return out
    if isinstance(e, Power):
        q = e.exponent
        base = _normalize_cached(e.base, chart)
        if q.denominator == 1:
            return base ** q.numerator
        if q.denominator == 2:
            # p^(k/2) is representable when p is a declared radicand
            if base.den.is_const and base.den.const_value() == 1 and not base.num.has_atoms():
                atom = chart.find_atom_for(
                    {m[:chart.dim]: c for m, c in base.num.terms.items()})
                if atom is not None:
                    r = CanonicalRational.var(chart, atom.name)
                    return r ** q.numerator
        raise NonRationalExpression(
            f"fractional power {q} has no declared radical atom for its base")
    if isinstance(e, Ln):
        raise NonRationalExpression("ln admits no canonical rational form")
    raise TypeError(f"not an Expr: {e!r}")


def normalize(e: Expr, chart: Chart) -> CanonicalRational:
    """Canonical rational form of an ln-free expression."""
    return _normalize_cached(e, chart)


def is_zero(e: Expr, chart: Chart) -> bool:
    """Exact zero test on the chart minus its singular set (ln-free input)."""
    return normalize(e, chart).is_zero


def contains_ln(e: Expr) -> bool:
    if isinstance(e, Ln):
        return True
    if isinstance(e, Sum) or isinstance(e, Product):
        return any(contains_ln(a) for a in e.args)
    if isinstance(e, Power):
        return contains_ln(e.base)
    return False


# -- evaluation -------------------------------------------------------------------


def eval_expr(e: Expr, point, chart: Chart):
    """Evaluate at {coord: value}; exact Fraction when nothing irrational intervenes."""
    values = dict(zip(chart.coord_names, _point_values(chart, point)))
    atom_vals = {}
    pv = _point_values(chart, point)
    for i, a in enumerate(chart.atoms):
        atom_vals[a.name] = pv[chart.dim + i]
    return _eval(e, values, atom_vals)


def _eval(e, coords, atoms):
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Coord):
        return coords[e.name]
    if isinstance(e, Atom):
        return atoms[e.name]
    if isinstance(e, Sum):
        return sum(_eval(a, coords, atoms) for a in e.args)
    if isinstance(e, Product):
        out = Fraction(1)
        for a in e.args:
            out = out * _eval(a, coords, atoms)
        return out
    if isinstance(e, Power):
        b = _eval(e.base, coords, atoms)
        q = e.exponent
        if q.denominator == 1:
            k = q.numerator
            if k < 0 and b == 0:
                raise SingularPoint("zero base to a negative power")
            return b ** k
        if b == 0 and q > 0:
            return 0.0
        bf = float(b)
        if bf < 0:
            raise SingularPoint(f"negative base {bf} under fractional power {q}")
        return math.pow(bf, float(q))
    if isinstance(e, Ln):
        v = _eval(e.arg, coords, atoms)
        vf = float(v)
        if vf <= 0:
            raise SingularPoint(f"ln of non-positive value {vf}")
        return math.log(vf)
    raise TypeError(f"not an Expr: {e!r}")
