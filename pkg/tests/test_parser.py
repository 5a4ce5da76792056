import pytest
from fractions import Fraction

from superext.chart import Chart
from superext.errors import ExprSyntaxError, UnknownSymbol
from superext.expr import normalize
from superext.parser import parse_declaring, parse_expr, pretty, tokenize

from conftest import rat


CH = Chart(("x", "y", "z"))


def test_unknown_symbol():
    with pytest.raises(UnknownSymbol):
        parse_expr("a", CH)


def test_negative_division():
    e = parse_expr("-3/x", CH)
    assert (normalize(e, CH) - rat(CH, "-3/x")).is_zero


def test_radical_atom_reference(chart_r):
    e = parse_expr("7/r", chart_r)
    n = normalize(e, chart_r)
    assert not n.den.has_atoms()  # rationalized
    assert (n * rat(chart_r, "r") - rat(chart_r, "7")).is_zero


def test_sqrt_resolves_declared_atom(chart_r):
    e = parse_expr("7/sqrt(x^2+y^2+z^2)", chart_r)
    assert (normalize(e, chart_r) - normalize(parse_expr("7/r", chart_r), chart_r)).is_zero


def test_sqrt_declares_new_atom():
    e, ch2 = parse_declaring("1/sqrt(x^2+y^2)", CH)
    assert len(ch2.atoms) == 1
    assert ch2.atoms[0].name == "r"
    # strict mode refuses the same text
    with pytest.raises(UnknownSymbol):
        parse_expr("1/sqrt(x^2+y^2)", CH)


def test_sqrt_of_square_constant():
    e = parse_expr("sqrt(9/4)", CH)
    assert (normalize(e, CH) - rat(CH, "3/2")).is_zero


def test_syntax_error_positions():
    with pytest.raises(ExprSyntaxError) as ei:
        parse_expr("x + * y", CH)
    assert ei.value.position == 4
    with pytest.raises(ExprSyntaxError) as ei:
        parse_expr("x + (y", CH)
    with pytest.raises(ExprSyntaxError) as ei:
        parse_expr("x ? y", CH)
    assert ei.value.position == 2


def test_exponent_forms():
    assert (normalize(parse_expr("x^2", CH), CH) - rat(CH, "x*x")).is_zero
    assert (normalize(parse_expr("x^-2", CH), CH) - rat(CH, "1/(x*x)")).is_zero
    assert (normalize(parse_expr("x^(2)", CH), CH) - rat(CH, "x*x")).is_zero
    e = parse_expr("(x^2+y^2+z^2)^(-1)", CH)
    assert (normalize(e, CH) - rat(CH, "1/(x^2+y^2+z^2)")).is_zero


def test_precedence_and_unary():
    assert (normalize(parse_expr("-x^2", CH), CH) + rat(CH, "x^2")).is_zero
    assert (normalize(parse_expr("2*x + 3*y - -z", CH), CH)
            - rat(CH, "2*x + 3*y + z")).is_zero
    assert (normalize(parse_expr("x - y - z", CH), CH)
            - rat(CH, "x - y - z")).is_zero
    assert (normalize(parse_expr("6/z/2", CH), CH) - rat(CH, "3/z")).is_zero


def test_pretty_round_trip(rng):
    texts = ["-3/x", "x^2 + y^2 + z^2", "1/x^2", "(x+y)*(x-y)/z",
             "x^(-3)", "2/3 * x", "x - (y - z)", "-(x*y)^2"]
    for t in texts:
        e = parse_expr(t, CH)
        back = parse_expr(pretty(e), CH)
        assert (normalize(e, CH) - normalize(back, CH)).is_zero


def test_pretty_round_trip_with_ln(chart_r):
    from superext.expr import diff
    for t in ["-3*ln(x*y*z)", "3*ln(z^2/(x*y))", "ln(x) + r"]:
        e = parse_expr(t, chart_r)
        back = parse_expr(pretty(e), chart_r)
        # semantic equality via the gradient (both contain ln)
        for c in ("x", "y", "z"):
            delta = normalize(diff(e, c, chart_r), chart_r) \
                - normalize(diff(back, c, chart_r), chart_r)
            assert delta.is_zero


def test_tokenizer_positions():
    toks = tokenize("x + 12*foo")
    assert [t[:2] for t in toks[:-1]] == [("ident", "x"), ("+", "+"),
                                          ("int", "12"), ("*", "*"), ("ident", "foo")]
    assert toks[2][2] == 4
