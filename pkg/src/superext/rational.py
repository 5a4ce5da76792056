"""Canonical rational functions: the exact scalar every tensor component lives in.

A value is num/den with both sides sparse polynomials over the chart
(coordinates plus radical atoms).  The canonical form is unique per
equivalence class:

  * the denominator is atom-free (atoms in a denominator are cleared by
    conjugate multiplication, r -> -r, using r**2 = p);
  * numerator and denominator are coprime (gcd over Q[coords] of the
    denominator and all atom-coefficients of the numerator is cancelled);
  * the denominator is monic under the grlex order.

Equality of canonical forms is plain term-dict equality, and a value is zero
iff its numerator is the zero polynomial.  That makes `is_zero` a decision
procedure, which is what every exact "this tensor vanishes" verdict rests on.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .chart import Chart
from .errors import PerfectSquareRadicand, SingularPoint
from .poly import Poly, divexact, poly_gcd

ZERO = Fraction(0)
ONE = Fraction(1)


class CanonicalRational:
    __slots__ = ("chart", "num", "den", "_hash")

    def __init__(self, chart: Chart, num: Poly, den: Poly, _canonical=False):
        self.chart = chart
        self._hash = None
        if _canonical:
            self.num, self.den = num, den
            return
        self.num, self.den = _canonicalize(chart, num, den)

    # -- constructors ----------------------------------------------------------

    @staticmethod
    def zero(chart: Chart) -> "CanonicalRational":
        return CanonicalRational(chart, Poly.zero(chart), Poly.const(chart, 1), _canonical=True)

    @staticmethod
    def const(chart: Chart, c) -> "CanonicalRational":
        return CanonicalRational(chart, Poly.const(chart, c), Poly.const(chart, 1), _canonical=True)

    @staticmethod
    def var(chart: Chart, name: str) -> "CanonicalRational":
        return CanonicalRational(chart, Poly.var(chart, name), Poly.const(chart, 1), _canonical=True)

    @staticmethod
    def from_poly(p: Poly) -> "CanonicalRational":
        return CanonicalRational(p.chart, p, Poly.const(p.chart, 1))

    # -- predicates --------------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return self.num.is_zero

    @property
    def is_const(self) -> bool:
        return self.num.is_const and self.den.is_const

    def const_value(self) -> Fraction:
        if not self.is_const:
            raise ValueError(f"not a constant: {self}")
        if self.num.is_zero:
            return ZERO
        return self.num.const_value() / self.den.const_value()

    # -- field arithmetic -----------------------------------------------------------

    def _check(self, other):
        if self.chart != other.chart:
            raise ValueError("mixed charts in arithmetic")

    def __add__(self, other):
        other = _coerce(self.chart, other)
        self._check(other)
        if self.den == other.den:
            return CanonicalRational(self.chart, self.num + other.num, self.den)
        return CanonicalRational(self.chart,
                                 self.num * other.den + other.num * self.den,
                                 self.den * other.den)

    def __radd__(self, other):
        return self.__add__(other)

    def __sub__(self, other):
        other = _coerce(self.chart, other)
        self._check(other)
        if self.den == other.den:
            return CanonicalRational(self.chart, self.num - other.num, self.den)
        return CanonicalRational(self.chart,
                                 self.num * other.den - other.num * self.den,
                                 self.den * other.den)

    def __rsub__(self, other):
        return _coerce(self.chart, other).__sub__(self)

    def __neg__(self):
        return CanonicalRational(self.chart, -self.num, self.den, _canonical=True)

    def __mul__(self, other):
        other = _coerce(self.chart, other)
        self._check(other)
        if self.is_zero or other.is_zero:
            return CanonicalRational.zero(self.chart)
        return CanonicalRational(self.chart, self.num * other.num, self.den * other.den)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __truediv__(self, other):
        other = _coerce(self.chart, other)
        self._check(other)
        if other.is_zero:
            raise ZeroDivisionError("division by the zero rational function")
        return CanonicalRational(self.chart, self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        return _coerce(self.chart, other).__truediv__(self)

    def __pow__(self, k: int):
        if k == 0:
            return CanonicalRational.const(self.chart, 1)
        if k < 0:
            if self.is_zero:
                raise ZeroDivisionError("zero to a negative power")
            return CanonicalRational(self.chart, self.den ** (-k), self.num ** (-k))
        return CanonicalRational(self.chart, self.num ** k, self.den ** k)

    # -- calculus ----------------------------------------------------------------------

    def diff(self, coord: str) -> "CanonicalRational":
        """Exact partial derivative with respect to a chart coordinate."""
        if not self.chart.is_coord(coord):
            raise KeyError(f"{coord!r} is not a coordinate")
        dnum = _poly_diff(self.num, coord)
        dden = _poly_diff(self.den, coord)
        den_cr = CanonicalRational.from_poly(self.den)
        num_cr = CanonicalRational.from_poly(self.num)
        return (dnum * den_cr - num_cr * dden) / (den_cr * den_cr)

    # -- evaluation -----------------------------------------------------------------------

    def eval(self, point):
        """Evaluate at {coord_name: value}; atoms take the positive square root.

        Exact Fraction when every intermediate (including atom values) is
        rational; float otherwise.  Raises SingularPoint on a vanishing
        denominator or a negative radicand.
        """
        values = _point_values(self.chart, point)
        den = self.den.eval_values(values)
        if den == 0:
            raise SingularPoint(f"denominator vanishes at {point}")
        return self.num.eval_values(values) / den

    # -- equality / ordering-free ---------------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, CanonicalRational):
            if isinstance(other, (int, Fraction)):
                other = CanonicalRational.const(self.chart, other)
            else:
                return NotImplemented
        return (self.chart == other.chart and self.num.terms == other.num.terms
                and self.den.terms == other.den.terms)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((frozenset(self.num.terms.items()),
                               frozenset(self.den.terms.items())))
        return self._hash

    def __str__(self):
        if self.den.is_const and self.den.const_value() == 1:
            return str(self.num)
        ns = str(self.num)
        if len(self.num.terms) > 1:
            ns = f"({ns})"
        ds = str(self.den)
        if len(self.den.terms) > 1:
            ds = f"({ds})"
        return f"{ns}/{ds}"

    def __repr__(self):
        return f"CanonicalRational({self})"


def _coerce(chart, v):
    if isinstance(v, CanonicalRational):
        return v
    if isinstance(v, (int, Fraction)):
        return CanonicalRational.const(chart, v)
    raise TypeError(f"cannot coerce {type(v).__name__} to CanonicalRational")


def _canonicalize(chart, num, den):
    if den.is_zero:
        raise ZeroDivisionError("zero denominator")
    if num.is_zero:
        return Poly.zero(chart), Poly.const(chart, 1)
    # clear atoms out of the denominator by conjugation, one atom at a time
    d = chart.dim
    while den.has_atoms():
        pos = next(i for i in range(d, chart.nvars) if den.max_degree(i) > 0)
        u, v = den.split_linear_in(pos)
        conj = u - Poly.var(chart, chart.var_names[pos]) * v
        rad = den.atom_radicand(pos)
        new_den = u * u - v * v * rad
        if new_den.is_zero:
            raise PerfectSquareRadicand(
                f"radicand of {chart.var_names[pos]!r} is a perfect square; "
                "the adjoined ring has zero divisors")
        num = num * conj
        den = new_den
    # cancel the polynomial gcd of den and all atom-coefficients of num
    g = den
    for coef in num.coeffs_by_atom_part().values():
        g = poly_gcd(g, coef)
        if g.is_const:
            g = None
            break
    if g is not None and not g.is_const:
        num = divexact(num, g)
        den = divexact(den, g)
    # monic denominator
    _, lc = den.leading()
    if lc != 1:
        num = num.scale(1 / lc)
        den = den.scale(1 / lc)
    return num, den


def _poly_diff(p: Poly, coord: str) -> CanonicalRational:
    """d/dcoord of a polynomial; rational because atoms differentiate to p'/(2r)."""
    chart = p.chart
    ci = chart.var_index(coord)
    plain = {}
    for m, c in p.terms.items():
        if m[ci]:
            mm = list(m)
            mm[ci] -= 1
            key = tuple(mm)
            plain[key] = plain.get(key, ZERO) + c * m[ci]
    out = CanonicalRational.from_poly(Poly(chart, plain, _reduce=False))
    for pos in range(chart.dim, chart.nvars):
        dpart = {}
        for m, c in p.terms.items():
            if m[pos]:
                mm = list(m)
                mm[pos] -= 1
                key = tuple(mm)
                dpart[key] = dpart.get(key, ZERO) + c * m[pos]
        if not dpart:
            continue
        dp = Poly(chart, dpart, _reduce=False)
        rad = p.atom_radicand(pos)
        drad = _poly_diff(rad, coord)  # atom-free, recursion terminates
        r = Poly.var(chart, chart.var_names[pos])
        # dr/dcoord = rad' * r / (2 rad)
        chain = drad * CanonicalRational(chart, r, rad.scale(2))
        out = out + CanonicalRational.from_poly(dp) * chain
    return out


def _sqrt_exact(v: Fraction):
    """Exact rational square root, or None."""
    if v < 0:
        return None
    n, d = v.numerator, v.denominator
    rn = math.isqrt(n)
    rd = math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def _point_values(chart: Chart, point):
    missing = [c for c in chart.coord_names if c not in point]
    if missing:
        raise KeyError(f"point is missing coordinates {missing}")
    vals = []
    exact = True
    for c in chart.coord_names:
        v = point[c]
        if isinstance(v, float):
            exact = False
            vals.append(v)
        else:
            vals.append(Fraction(v))
    for a in chart.atoms:
        radp = Poly(chart, {m: c for m, c in a.radicand}, _reduce=False)
        rv = radp.eval_values(tuple(vals) + (ZERO,) * len(chart.atoms))
        if isinstance(rv, Fraction):
            if rv < 0:
                raise SingularPoint(f"negative radicand for {a.name!r} at {point}")
            ex = _sqrt_exact(rv)
            vals.append(ex if (ex is not None and exact) else math.sqrt(rv))
        else:
            if rv < 0:
                raise SingularPoint(f"negative radicand for {a.name!r} at {point}")
            vals.append(math.sqrt(rv))
    return tuple(vals)
