import itertools

import pytest

from superext.chart import Chart
from superext.errors import GradientsDependent
from superext.expr import normalize
from superext.parser import parse_expr
from superext.rational import CanonicalRational as CR
from superext.structure import (PotentialFamily, check_closed, check_D_integrability,
                                decompose_D, ds_formula_check, extract_D,
                                find_exactness_witness, structure_residual, verdict)
from superext.tensor import Metric, Tensor, hook_project_21

from conftest import rat, tensor_from


R2 = "(x^2+y^2+z^2)"


def expected_D_42(ch):
    return tensor_from(ch, ("l", "l", "u"),
                       {(0, 0, 0): "-3/x", (1, 1, 1): "-3/y", (2, 2, 2): "-3/z"})


def expected_D_kepler(ch):
    return tensor_from(ch, ("l", "l", "u"), {
        (0, 0, 0): "-3/x", (1, 1, 1): "-3/y",
        (2, 2, 2): f"(x^2+y^2-2*z^2)/(z*{R2})",
        (0, 0, 2): f"(x^2+4*y^2+4*z^2)/(z*{R2})",
        (1, 1, 2): f"(4*x^2+y^2+4*z^2)/(z*{R2})",
        (0, 1, 2): f"-3*x*y/(z*{R2})", (1, 0, 2): f"-3*x*y/(z*{R2})",
        (0, 2, 2): f"-3*x/{R2}", (2, 0, 2): f"-3*x/{R2}",
        (1, 2, 2): f"-3*y/{R2}", (2, 1, 2): f"-3*y/{R2}",
    })


def expected_N_kepler(ch):
    """The displayed obstruction tensor; symmetric-product bookkeeping is
    dx dy = (dx ox dy + dy ox dx)/2."""
    phi = f"1/(z*{R2})"
    ent = {}
    ent[(0, 0, 1)] = f"-z*y*{phi}"
    ent[(0, 0, 2)] = f"(y^2-x^2)*{phi}"
    for ij in ((0, 1), (1, 0)):
        ent[ij + (0,)] = f"z*y*{phi}/2"
        ent[ij + (1,)] = f"z*x*{phi}/2"
        ent[ij + (2,)] = f"-2*x*y*{phi}"
    for ij in ((0, 2), (2, 0)):
        ent[ij + (0,)] = f"(x^2-y^2)*{phi}/2"
        ent[ij + (1,)] = f"x*y*{phi}"
        ent[ij + (2,)] = f"-z*x*{phi}/2"
    ent[(1, 1, 0)] = f"-x*z*{phi}"
    ent[(1, 1, 2)] = f"(x^2-y^2)*{phi}"
    for ij in ((1, 2), (2, 1)):
        ent[ij + (0,)] = f"x*y*{phi}"
        ent[ij + (1,)] = f"-(x^2-y^2)*{phi}/2"
        ent[ij + (2,)] = f"-z*y*{phi}/2"
    ent[(2, 2, 0)] = f"z*x*{phi}"
    ent[(2, 2, 1)] = f"z*y*{phi}"
    return tensor_from(ch, ("l", "l", "l"), ent)


def test_extract_oscillator_zero(family_osc):
    assert extract_D(family_osc).is_zero()


def test_extract_42_exact(family42, chart3):
    d = extract_D(family42)
    assert (d - expected_D_42(chart3)).is_zero()


def test_extract_kepler_all_27_components(family_kepler, chart_r):
    d = extract_D(family_kepler)
    want = expected_D_kepler(chart_r)
    for idx in itertools.product(range(3), repeat=3):
        assert (d.comp[idx] - want.comp[idx]).is_zero, f"component {idx}"


def test_structure_equation_exact_on_family(family42, family_kepler):
    assert structure_residual(extract_D(family42), family42).is_zero()
    assert structure_residual(extract_D(family_kepler), family_kepler).is_zero()


def test_family_invariants(chart3, euclid3):
    P = lambda s: parse_expr(s, chart3)
    with pytest.raises(ValueError):
        PotentialFamily(chart3, euclid3, [P("1"), P("2"), P("x"), P("y")])
    with pytest.raises(ValueError):
        PotentialFamily(chart3, euclid3, [P("x"), P("y"), P("z"), P("x+y")])
    # dependent gradients: x, 2*x, y span a singular matrix
    fam = PotentialFamily(chart3, euclid3, [P("1"), P("x"), P("2*x"), P("y")])
    with pytest.raises(GradientsDependent):
        extract_D(fam)


def test_constant_detected_not_literal_one(chart3, euclid3):
    P = lambda s: parse_expr(s, chart3)
    fam = PotentialFamily(chart3, euclid3, [P("7/2"), P("x"), P("y"), P("z")])
    assert fam.constant_index == 0
    assert extract_D(fam).is_zero()


def test_integrability_residual_zero_on_fixtures(family42, family_kepler,
                                                 euclid3, euclid_r):
    assert check_D_integrability(extract_D(family42), euclid3).is_zero()
    assert check_D_integrability(extract_D(family_kepler), euclid_r).is_zero()


def test_decompose_42(family42, euclid3):
    rep = decompose_D(extract_D(family42), euclid3)
    ch = family42.chart
    assert rep.N.is_zero()
    assert verdict(rep) == "Extendable"
    for k, s_k in enumerate(("-3/x", "-3/y", "-3/z")):
        assert (rep.s.comp[k] - rat(ch, s_k)).is_zero
    assert (rep.d - rep.s).is_zero()  # diagonal structure tensor
    assert rep.residuals["decomposition-reassembly"].is_zero()


def test_decompose_kepler(family_kepler, euclid_r, chart_r):
    rep = decompose_D(extract_D(family_kepler), euclid_r)
    assert verdict(rep) == "NonExtendable"
    for k, s_k in enumerate(("-3/x", "-3/y", "6/z")):
        assert (rep.s.comp[k] - rat(chart_r, s_k)).is_zero
    want_n = expected_N_kepler(chart_r)
    for idx in itertools.product(range(3), repeat=3):
        assert (rep.N.comp[idx] - want_n.comp[idx]).is_zero, f"N component {idx}"
    assert rep.residuals["decomposition-reassembly"].is_zero()


def test_hook_on_D_equals_N_of_report(family_kepler, euclid_r):
    d = extract_D(family_kepler)
    rep = decompose_D(d, euclid_r)
    direct = hook_project_21(rep.D_lll, euclid_r)
    assert (direct - rep.N).is_zero()


def test_closedness_and_witnesses(family42, family_kepler, euclid3, euclid_r):
    rep42 = decompose_D(extract_D(family42), euclid3)
    repk = decompose_D(extract_D(family_kepler), euclid_r)
    ch, chk = family42.chart, family_kepler.chart
    assert check_closed(rep42.d, euclid3)
    assert check_closed(repk.d, euclid_r)   # closed even when N != 0
    assert check_closed(repk.s, euclid_r)   # closed despite the obstruction
    assert find_exactness_witness(rep42.s, parse_expr("-3*ln(x*y*z)", ch), euclid3)
    assert find_exactness_witness(repk.s, parse_expr("3*ln(z^2/(x*y))", chk), euclid_r)
    assert not find_exactness_witness(rep42.s, parse_expr("x", ch), euclid3)


def test_t_closed_iff_s_closed(family42, family_kepler, euclid3, euclid_r):
    for fam, met in ((family42, euclid3), (family_kepler, euclid_r)):
        rep = decompose_D(extract_D(fam), met)
        assert check_closed(rep.t, met) == check_closed(rep.s, met)


def test_ds_formula_zero_on_fixtures(family42, family_kepler, euclid3, euclid_r):
    rep42 = decompose_D(extract_D(family42), euclid3)
    repk = decompose_D(extract_D(family_kepler), euclid_r)
    assert ds_formula_check(rep42, euclid3).is_zero()
    res = ds_formula_check(repk, euclid_r)
    assert res.is_zero()


def test_two_dimensional_family_has_zero_obstruction(chart2, euclid2):
    P = lambda s: parse_expr(s, chart2)
    fam = PotentialFamily(chart2, euclid2, [P("1"), P("1/x^2"), P("1/y^2")])
    rep = decompose_D(extract_D(fam), euclid2)
    assert rep.N.is_zero()
    assert rep.verdict == "Extendable"
