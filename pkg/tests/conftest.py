import random
from fractions import Fraction

import pytest

from superext.chart import Chart, RadicalAtom
from superext.expr import normalize
from superext.parser import parse_expr
from superext.rational import CanonicalRational as CR
from superext.structure import PotentialFamily
from superext.tensor import Metric, Tensor


@pytest.fixture(scope="session")
def chart3():
    return Chart(("x", "y", "z"))


@pytest.fixture(scope="session")
def euclid3(chart3):
    return Metric.euclidean(chart3)


@pytest.fixture(scope="session")
def chart_r():
    rad = RadicalAtom.make("r", {(2, 0, 0): Fraction(1), (0, 2, 0): Fraction(1),
                                 (0, 0, 2): Fraction(1)})
    return Chart(("x", "y", "z"), (rad,))


@pytest.fixture(scope="session")
def euclid_r(chart_r):
    return Metric.euclidean(chart_r)


@pytest.fixture(scope="session")
def chart2():
    return Chart(("x", "y"))


@pytest.fixture(scope="session")
def euclid2(chart2):
    return Metric.euclidean(chart2)


def rat(chart, text):
    return normalize(parse_expr(text, chart), chart)


def tensor_from(chart, variance, entries):
    """entries: {index tuple: expression string}; everything else zero."""
    t = Tensor.zeros(chart, variance)
    for idx, txt in entries.items():
        t.comp[idx] = rat(chart, txt)
    return t


def random_const_tensor(chart, variance, rng, lo=-9, hi=9, den=5):
    t = Tensor.zeros(chart, variance)
    import itertools
    for idx in itertools.product(range(chart.dim), repeat=len(variance)):
        t.comp[idx] = CR.const(chart, Fraction(rng.randint(lo, hi), rng.randint(1, den)))
    return t


def random_poly_cr(chart, rng, terms=3, max_deg=2):
    total = CR.zero(chart)
    for _ in range(terms):
        c = CR.const(chart, Fraction(rng.randint(-5, 5), rng.randint(1, 3)))
        mono = c
        for name in chart.coord_names:
            e = rng.randint(0, max_deg)
            if e:
                mono = mono * CR.var(chart, name) ** e
        total = total + mono
    return total


@pytest.fixture(scope="session")
def family42(chart3, euclid3):
    P = lambda s: parse_expr(s, chart3)
    return PotentialFamily(chart3, euclid3,
                           [P("1"), P("1/x^2"), P("1/y^2"), P("1/z^2")])


@pytest.fixture(scope="session")
def family_osc(chart3, euclid3):
    P = lambda s: parse_expr(s, chart3)
    return PotentialFamily(chart3, euclid3, [P("1"), P("x"), P("y"), P("z")])


@pytest.fixture(scope="session")
def family_kepler(chart_r, euclid_r):
    P = lambda s: parse_expr(s, chart_r)
    return PotentialFamily(chart_r, euclid_r,
                           [P("1"), P("1/x^2"), P("1/y^2"), P("1/r")])


@pytest.fixture(scope="session")
def rng():
    return random.Random(20240817)
