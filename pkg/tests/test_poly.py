from fractions import Fraction

import pytest

from superext.chart import Chart, RadicalAtom
from superext.errors import PerfectSquareRadicand
from superext.poly import Poly, divexact, poly_gcd
from superext.rational import CanonicalRational as CR


@pytest.fixture(scope="module")
def ch():
    rad = RadicalAtom.make("r", {(2, 0): Fraction(1), (0, 2): Fraction(1)})
    return Chart(("x", "y"), (rad,))


def test_atom_square_reduces_to_radicand(ch):
    r = Poly.var(ch, "r")
    x = Poly.var(ch, "x")
    y = Poly.var(ch, "y")
    assert (r * r - (x * x + y * y)).is_zero
    # odd powers keep a single atom factor
    p = r * r * r
    assert p == (x * x + y * y) * r


def test_grlex_leading_term(ch):
    x = Poly.var(ch, "x")
    y = Poly.var(ch, "y")
    p = x * y + y * y * y + Poly.const(ch, 4)
    mono, coef = p.leading()
    assert mono == (0, 3, 0) and coef == 1
    # same total degree: earlier variable wins
    q = x * x * y + x * y * y
    assert q.leading()[0] == (2, 1, 0)


def test_content_and_primitive(ch):
    x = Poly.var(ch, "x")
    p = (x * x).scale(Fraction(4, 3)) + x.scale(Fraction(2, 3))
    c, prim = p.primitive()
    assert c == Fraction(2, 3)
    assert prim == x * x.scale(2) + x  # 2x^2 + x


def test_divexact_roundtrip(ch):
    x = Poly.var(ch, "x")
    y = Poly.var(ch, "y")
    a = x + y
    b = x * x + y.scale(3) + Poly.const(ch, 1)
    prod = a * b
    assert divexact(prod, a) == b
    assert divexact(prod, b) == a
    with pytest.raises(ValueError):
        divexact(a * b + Poly.const(ch, 1), a)


def test_divexact_with_atoms_in_dividend(ch):
    x = Poly.var(ch, "x")
    r = Poly.var(ch, "r")
    g = x + Poly.const(ch, 2)
    num = g * (r + x)
    assert divexact(num, g) == r + x


def test_gcd_known_factors(ch):
    x = Poly.var(ch, "x")
    y = Poly.var(ch, "y")
    one = Poly.const(ch, 1)
    a = (x + y) * (x - y) * (x + one)
    b = (x + y) * (x * x + y)
    assert poly_gcd(a, b) == x + y
    assert poly_gcd(a, one) == one
    # coprime
    assert poly_gcd(x + one, y + one) == one


def test_gcd_rejects_atoms(ch):
    r = Poly.var(ch, "r")
    with pytest.raises(ValueError):
        poly_gcd(r, r)


def test_perfect_square_radicand_rejected():
    # q^2 = x^2 makes the extension ring have zero divisors
    ch = Chart(("x", "y"), (RadicalAtom.make("q", {(2, 0): Fraction(1)}),))
    x = Poly.var(ch, "x")
    q = Poly.var(ch, "q")
    with pytest.raises(PerfectSquareRadicand):
        CR(ch, Poly.const(ch, 1), x + q)


def test_eval_values(ch):
    x = Poly.var(ch, "x")
    y = Poly.var(ch, "y")
    p = x * x + y.scale(3)
    assert p.eval_values((Fraction(2), Fraction(1), Fraction(0))) == Fraction(7)
    assert abs(p.eval_values((2.0, 1.0, 0.0)) - 7.0) < 1e-15
