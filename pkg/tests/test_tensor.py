import itertools
import random
from fractions import Fraction

import numpy as np
import pytest

from superext.chart import Chart
from superext.errors import MixedVariance, SlotOutOfRange, WrongOrder
from superext.rational import CanonicalRational as CR
from superext.tensor import (Metric, Tensor, antisymmetrize, cov_derivative,
                             christoffel, hook_project_21, lower_slot,
                             one_form, raise_slot, sym_tracefree_part,
                             symmetrize, trace)
from superext import numerics

from conftest import rat, random_const_tensor, tensor_from


def test_christoffel_flat_is_zero(chart3, euclid3):
    assert euclid3.christoffel.is_zero()


@pytest.fixture(scope="module")
def polar_like():
    ch = Chart(("x", "th"))
    g = Tensor.zeros(ch, ("l", "l"))
    g.comp[0, 0] = CR.const(ch, 1)
    g.comp[1, 1] = rat(ch, "x^2")
    return ch, Metric(ch, g)


def test_christoffel_polar_hand_values(polar_like):
    ch, met = polar_like
    gam = met.christoffel
    assert (gam.comp[0, 1, 1] - rat(ch, "-x")).is_zero
    assert (gam.comp[1, 0, 1] - rat(ch, "1/x")).is_zero
    assert (gam.comp[1, 1, 0] - rat(ch, "1/x")).is_zero
    others = [(0, 0, 0), (0, 0, 1), (0, 1, 0), (1, 0, 0), (1, 1, 1)]
    for idx in others:
        assert gam.comp[idx].is_zero


def test_christoffel_finite_difference_oracle():
    """Independent oracle: assemble Gamma from numeric metric derivatives."""
    ch = Chart(("x", "th"))
    g = Tensor.zeros(ch, ("l", "l"))
    g.comp[0, 0] = CR.const(ch, 1)
    g.comp[1, 1] = rat(ch, "1 + x^2")
    met = Metric(ch, g)
    gam_fn = numerics.compile_tensor(met.christoffel)
    g_fn = numerics.compile_tensor(met.g)
    ginv_fn = numerics.compile_tensor(met.g_inv)
    rng = random.Random(5)
    h = 1e-6
    for _ in range(10):
        pt = np.array([rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0)])
        dg = np.zeros((2, 2, 2))
        for k in range(2):
            up = pt.copy(); up[k] += h
            dn = pt.copy(); dn[k] -= h
            dg[:, :, k] = (g_fn(up) - g_fn(dn)) / (2 * h)
        ginv = ginv_fn(pt)
        want = np.zeros((2, 2, 2))
        for kk, i, j in itertools.product(range(2), repeat=3):
            want[kk, i, j] = 0.5 * sum(
                ginv[kk, a] * (dg[a, i, j] + dg[a, j, i] - dg[i, j, a])
                for a in range(2))
        got = gam_fn(pt)
        assert np.max(np.abs(got - want)) < 1e-6


def test_riemann_ricci_identity_convention(polar_like):
    ch, met = polar_like
    v = Tensor.scalar(ch, rat(ch, "x*th"))
    c1 = cov_derivative(v, met)
    c3 = cov_derivative(cov_derivative(c1, met), met)
    riem = met.riemann
    for i, j, k in itertools.product(range(2), repeat=3):
        lhs = c3.comp[i, j, k] - c3.comp[i, k, j]
        rhs = CR.zero(ch)
        for m in range(2):
            rhs = rhs + riem.comp[i, j, k, m] * c1.comp[m]
        assert (lhs - rhs).is_zero


def test_riemann_flat_and_bianchi(euclid3):
    assert euclid3.riemann.is_zero()
    assert euclid3.ricci.is_zero()
    ch = Chart(("x", "th"))
    g = Tensor.zeros(ch, ("l", "l"))
    g.comp[0, 0] = CR.const(ch, 1)
    g.comp[1, 1] = rat(ch, "1 + x^2")
    met = Metric(ch, g)
    assert not met.riemann.is_zero()
    assert antisymmetrize(met.riemann, (0, 1, 2)).is_zero()


def test_cov_derivative_metricity_and_scalars(chart3, euclid3):
    assert cov_derivative(euclid3.g, euclid3).is_zero()
    ch = Chart(("x", "th"))
    g = Tensor.zeros(ch, ("l", "l"))
    g.comp[0, 0] = CR.const(ch, 1)
    g.comp[1, 1] = rat(ch, "1 + x^2")
    met = Metric(ch, g)
    assert cov_derivative(met.g, met).is_zero()

    v = Tensor.scalar(chart3, rat(chart3, "x^2"))
    grad = cov_derivative(v, euclid3)
    assert (grad.comp[0] - rat(chart3, "2*x")).is_zero
    assert grad.comp[1].is_zero and grad.comp[2].is_zero


def test_second_cov_derivative_hessian(chart3, euclid3):
    v = Tensor.scalar(chart3, rat(chart3, "1/x^2"))
    hess = cov_derivative(cov_derivative(v, euclid3), euclid3)
    assert (hess.comp[0, 0] - rat(chart3, "6/x^4")).is_zero
    for i, j in itertools.product(range(3), repeat=2):
        if (i, j) != (0, 0):
            assert hess.comp[i, j].is_zero


def test_trace_identity_and_m_oracle(chart3, euclid3, rng):
    assert (trace(Tensor.delta(chart3), 0, 1, euclid3).comp[()]
            - CR.const(chart3, 3)).is_zero
    # m_j as trace(1,3) - trace(1,2), against direct expansion
    m = random_const_tensor(chart3, ("l", "l", "l"), rng)
    up = raise_slot(m, 0, euclid3)
    t13 = up.contract_pair(0, 2)  # M^i_ji
    t12 = up.contract_pair(0, 1)  # M^i_ij
    got = t13 - t12
    for j in range(3):
        want = CR.zero(chart3)
        for i in range(3):
            want = want + m.comp[i, j, i] - m.comp[i, i, j]
        assert (got.comp[j] - want).is_zero


def test_symmetrize_unnormalized(chart3):
    t = tensor_from(chart3, ("l", "l", "l"), {(0, 1, 2): "1"})  # dx ox dy ox dz
    s = symmetrize(t, (0, 1))
    assert (s.comp[0, 1, 2] - CR.const(chart3, 1)).is_zero
    assert (s.comp[1, 0, 2] - CR.const(chart3, 1)).is_zero
    assert s.comp[2, 1, 0].is_zero


def test_antisymmetrize_kills_symmetric(chart3, rng):
    t = random_const_tensor(chart3, ("l", "l"), rng)
    sym = symmetrize(t, (0, 1))
    assert antisymmetrize(sym, (0, 1)).is_zero()


def test_variance_guards(chart3, euclid3):
    d = Tensor.delta(chart3)
    with pytest.raises(MixedVariance):
        symmetrize(d, (0, 1))
    with pytest.raises(SlotOutOfRange):
        trace(d, 0, 5, euclid3)
    with pytest.raises(WrongOrder):
        hook_project_21(d.tensor_product(d), euclid3)


def test_raise_lower_inverse(chart3, euclid3, rng):
    t = random_const_tensor(chart3, ("l", "l", "l"), rng)
    back = lower_slot(raise_slot(t, 1, euclid3), 1, euclid3)
    assert (back - t).is_zero()


# -- hook projector ------------------------------------------------------------------


def test_hook_kills_symmetric_tracefree(chart3, euclid3, rng):
    s = sym_tracefree_part(random_const_tensor(chart3, ("l", "l", "l"), rng), euclid3)
    assert hook_project_21(s, euclid3).is_zero()


def test_hook_idempotent_random(chart3, euclid3, rng):
    for _ in range(25):
        m = random_const_tensor(chart3, ("l", "l", "l"), rng)
        p1 = hook_project_21(m, euclid3)
        assert (hook_project_21(p1, euclid3) - p1).is_zero()


def test_hook_image_properties(chart3, euclid3, rng):
    m = random_const_tensor(chart3, ("l", "l", "l"), rng)
    p = hook_project_21(m, euclid3)
    assert symmetrize(p, (0, 1, 2)).is_zero()
    for pair in ((0, 1), (0, 2), (1, 2)):
        assert trace(p, *pair, euclid3).is_zero()


def test_hook_vanishes_in_2d(chart2, euclid2, rng):
    for _ in range(10):
        m = random_const_tensor(chart2, ("l", "l", "l"), rng)
        assert hook_project_21(m, euclid2).is_zero()


def test_hook_compositional_oracle(chart3, euclid3, rng):
    """Independent reconstruction: raw hook symmetrizer then solve for the
    trace correction, compared against the one-shot projector.

    The raw hook part H = (1/3) sym01(antisym12(M)) is symmetric in its
    first pair with zero total symmetrization, so its (0,1)-trace u and
    (0,2)-trace v satisfy v = -u/2.  The trace correction has the ansatz
    C = a g_ij u_k + b (g_ik u_j + g_jk u_i); making both traces of H - C
    vanish gives the 2x2 system a n + 2 b = 1, a + b (n+1) = -1/2.
    """
    n = 3
    g = euclid3.g.comp
    a, b = _solve2(Fraction(n), Fraction(2), Fraction(1),
                   Fraction(1), Fraction(n + 1), Fraction(-1, 2))
    for _ in range(20):
        m = random_const_tensor(chart3, ("l", "l", "l"), rng)
        hooked = symmetrize(antisymmetrize(m, (1, 2)), (0, 1)).scale(Fraction(1, 3))
        u = trace(hooked, 0, 1, euclid3)
        v = trace(hooked, 0, 2, euclid3)
        assert (u.scale(Fraction(-1, 2)) - v).is_zero()
        corr = Tensor.zeros(chart3, ("l", "l", "l"))
        for i, j, k in itertools.product(range(3), repeat=3):
            corr.comp[i, j, k] = (g[i, j] * u.comp[k] * a
                                  + (g[i, k] * u.comp[j] + g[j, k] * u.comp[i]) * b)
        candidate = hooked - corr
        assert (candidate - hook_project_21(m, euclid3)).is_zero()


def _solve2(a11, a12, b1, a21, a22, b2):
    det = a11 * a22 - a12 * a21
    return (b1 * a22 - b2 * a12) / det, (a11 * b2 - a21 * b1) / det


def test_one_form_and_curl(chart3, euclid3):
    omega = one_form(chart3, [rat(chart3, "y"), rat(chart3, "x"), CR.zero(chart3)])
    from superext.tensor import exterior_derivative_residual
    assert exterior_derivative_residual(omega, euclid3).is_zero()
    omega2 = one_form(chart3, [rat(chart3, "y"), CR.zero(chart3), CR.zero(chart3)])
    assert not exterior_derivative_residual(omega2, euclid3).is_zero()
