"""Non-degenerate extension: structure tensor T, its integrability suite,
potential reconstruction by prolongation, the restricting equation for the
trace 1-form, and the torsion reformulation of the verdict.

Everything symbolic here is exact; the prolongation integrator is numeric
with certified path-independence (the symbolic conditions are precisely the
integrability of that linear system).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .chart import Chart, RadicalAtom
from .errors import (FamilyNotContained, NotExtendable, PathDependence,
                     SingularPath)
from .expr import Expr, diff, normalize
from .poly import Poly
from .rational import CanonicalRational as CR
from .structure import PotentialFamily, StructureReport, decompose_D
from .tensor import (Metric, Tensor, cov_derivative, exterior_derivative_residual,
                     lower_slot, raise_slot, sym_tracefree_part, trace)
from . import numerics


@dataclass
class NonDegStructure:
    """Tentative non-degenerate structure tensor with its derived objects.

    Q here is the curvature-free part T_ij^m_,k + T_ij^l T_lk^m (slots
    i, j, k, ^m); on flat charts this is the full Q since R = 0.  The
    curvature enters the condition residuals once, with its built-in
    antisymmetry, and q subtracts the Ricci tensor explicitly.
    """

    chart: Chart
    metric: Metric
    T: Tensor             # (l, l, u)
    T_lll: Tensor
    t: Tensor             # 1-form T_ka^a
    tbar: Tensor          # n/((n-1)(n+2)) t
    Q: Tensor             # (l, l, l, u)
    q: Tensor             # (l, u)
    condition_residuals: dict = field(default_factory=dict)

    @property
    def dim(self):
        return self.chart.dim


def build_T(d_tensor: Tensor, metric: Metric, report: StructureReport = None) -> NonDegStructure:
    """T_ij^k = D_ij^k - (1/n) g_ij s^k; requires the obstruction to vanish."""
    chart = d_tensor.chart
    n = chart.dim
    if report is None:
        report = decompose_D(d_tensor, metric)
    if not report.extendable:
        idx, wit = report.N.nonzero_witness()
        raise NotExtendable(f"obstruction tensor is nonzero, e.g. N{list(idx)} = {wit}")
    s_up = raise_slot(report.s, 0, metric)
    g = metric.g.comp
    T = Tensor.zeros(chart, ("l", "l", "u"))
    for i, j, m in itertools.product(range(n), repeat=3):
        T.comp[i, j, m] = d_tensor.comp[i, j, m] - g[i, j] * s_up.comp[m] * Fraction(1, n)
    T_lll = lower_slot(T, 2, metric)
    t_form = trace(T_lll, 1, 2, metric)
    tbar = t_form.scale(Fraction(n, (n - 1) * (n + 2)))
    Q = _q_tensor(T, metric)
    q = _q_trace(Q, metric)
    return NonDegStructure(chart, metric, T, T_lll, t_form, tbar, Q, q)


def _q_tensor(T: Tensor, metric: Metric) -> Tensor:
    """Q_ijk^m = T_ij^m_,k + T_ij^l T_lk^m (curvature handled at the residuals)."""
    chart = T.chart
    n = chart.dim
    dT = cov_derivative(T, metric)  # (i, j, ^m, k)
    out = Tensor.zeros(chart, ("l", "l", "l", "u"))
    for i, j, k, m in itertools.product(range(n), repeat=4):
        total = dT.comp[i, j, m, k]
        for l in range(n):
            total = total + T.comp[i, j, l] * T.comp[l, k, m]
        out.comp[i, j, k, m] = total
    return out


def _q_trace(Q: Tensor, metric: Metric) -> Tensor:
    """q_j^m = g^{ik} Q_ijk^m - Ric_j^m."""
    chart = Q.chart
    n = chart.dim
    ginv = metric.g_inv.comp
    ric_mixed = raise_slot(metric.ricci, 1, metric)  # Ric_j^m
    out = Tensor.zeros(chart, ("l", "u"))
    for j, m in itertools.product(range(n), repeat=2):
        total = CR.zero(chart)
        for i, k in itertools.product(range(n), repeat=2):
            total = total + ginv[i, k] * Q.comp[i, j, k, m]
        out.comp[j, m] = total - ric_mixed.comp[j, m]
    return out


def check_nondeg_conditions(nd: NonDegStructure, metric: Metric) -> dict:
    """All four antisymmetrized integrability residuals plus the side checks.

    Returns named residual tensors; every one is exactly zero for a valid
    non-degenerate structure tensor:
      star1: antisym_(jk)[Q_ijk^m + 1/(n-1) g_ij q_k^m] - R^m_ijk
      star2: antisym_(jk)[T_ijk + 1/(n-1) g_ij t_k]
      star3: antisym_(kl)[q_k^m_,l + T_jl^m q_k^j + 1/(n-1) t_k q_l^m]
      star4: antisym_(kl)[t_k,l + q_kl]
      q-symmetric, t-closed, lemma51-decomposition.
    """
    chart = nd.chart
    n = chart.dim
    g = metric.g.comp
    riem = metric.riemann.comp
    res = {}

    star1 = Tensor.zeros(chart, ("l", "l", "l", "u"))
    for i, j, k, m in itertools.product(range(n), repeat=4):
        if k <= j:
            continue
        b = lambda jj, kk: nd.Q.comp[i, jj, kk, m] + g[i, jj] * nd.q.comp[kk, m] * Fraction(1, n - 1)
        val = b(j, k) - b(k, j) - riem[i, j, k, m]
        star1.comp[i, j, k, m] = val
        star1.comp[i, k, j, m] = -val
    res["star1"] = star1

    star2 = Tensor.zeros(chart, ("l", "l", "l"))
    for i, j, k in itertools.product(range(n), repeat=3):
        if k <= j:
            continue
        b = lambda jj, kk: nd.T_lll.comp[i, jj, kk] + g[i, jj] * nd.t.comp[kk] * Fraction(1, n - 1)
        val = b(j, k) - b(k, j)
        star2.comp[i, j, k] = val
        star2.comp[i, k, j] = -val
    res["star2"] = star2

    dq = cov_derivative(nd.q, metric)  # (k, ^m, l)
    star3 = Tensor.zeros(chart, ("l", "l", "u"))
    for k, l, m in itertools.product(range(n), repeat=3):
        if l <= k:
            continue
        def b(kk, ll):
            total = dq.comp[kk, m, ll] + nd.t.comp[kk] * nd.q.comp[ll, m] * Fraction(1, n - 1)
            for jj in range(n):
                total = total + nd.T.comp[jj, ll, m] * nd.q.comp[kk, jj]
            return total
        val = b(k, l) - b(l, k)
        star3.comp[k, l, m] = val
        star3.comp[l, k, m] = -val
    res["star3"] = star3

    q_ll = lower_slot(nd.q, 1, metric)
    dt = cov_derivative(nd.t, metric)  # (k, l)
    star4 = Tensor.zeros(chart, ("l", "l"))
    for k, l in itertools.product(range(n), repeat=2):
        if l <= k:
            continue
        val = (dt.comp[k, l] + q_ll.comp[k, l]) - (dt.comp[l, k] + q_ll.comp[l, k])
        star4.comp[k, l] = val
        star4.comp[l, k] = -val
    res["star4"] = star4

    qsym = Tensor.zeros(chart, ("l", "l"))
    for k, l in itertools.product(range(n), repeat=2):
        qsym.comp[k, l] = q_ll.comp[k, l] - q_ll.comp[l, k]
    res["q-symmetric"] = qsym

    res["t-closed"] = exterior_derivative_residual(nd.t, metric)

    lemma51 = Tensor.zeros(chart, ("l", "l", "l"))
    T0 = sym_tracefree_part(nd.T_lll, metric)
    tb = nd.tbar.comp
    for i, j, k in itertools.product(range(n), repeat=3):
        rhs = (T0.comp[i, j, k]
               + tb[i] * g[j, k] - g[i, j] * tb[k] * Fraction(1, n)
               + tb[j] * g[i, k] - g[j, i] * tb[k] * Fraction(1, n))
        lemma51.comp[i, j, k] = nd.T_lll.comp[i, j, k] - rhs
    res["lemma51-decomposition"] = lemma51

    nd.condition_residuals = res
    return res


# -- prolongation ---------------------------------------------------------------------


@dataclass
class ProlongationState:
    """(V, V_,1..n, laplacian) at a point; evolves linearly along paths."""

    point: np.ndarray
    value: float
    grad: np.ndarray
    lap: float

    def vector(self):
        return np.concatenate(([self.value], self.grad, [self.lap]))

    @staticmethod
    def from_vector(point, vec):
        n = len(vec) - 2
        return ProlongationState(np.asarray(point, float), float(vec[0]),
                                 np.asarray(vec[1:1 + n], float), float(vec[-1]))


def prolong_rhs(nd: NonDegStructure, metric: Metric, point, state_vec):
    """Exact coordinate derivatives of the prolongation state.

    Returns an (n, n+2) array: row k is d/dx_k of (V, V_,i, lap):
      d_k V     = V_,k
      d_k V_,i  = T_ik^a V_,a + (1/n) g_ik lap + Gamma^a_ik V_,a
      d_k lap   = n/(n-1) (q_k^a V_,a + (1/n) t_k lap)
    """
    n = nd.dim
    coeff = _prolongation_coeffs(nd, metric)(np.asarray(point, dtype=float))
    return np.stack([coeff[k] @ np.asarray(state_vec, dtype=float) for k in range(n)])


def _prolongation_coeffs(nd: NonDegStructure, metric: Metric):
    """Compiled map point -> (n, n+2, n+2) generator matrices; cached on nd."""
    cache = getattr(nd, "_coeff_cache", None)
    if cache is not None:
        return cache
    n = nd.dim
    T_fn = numerics.compile_tensor(nd.T)
    q_fn = numerics.compile_tensor(nd.q)
    t_fn = numerics.compile_tensor(nd.t)
    g_fn = numerics.compile_tensor(metric.g)
    gam_fn = numerics.compile_tensor(metric.christoffel)

    def coeffs(x):
        T = T_fn(x)
        q = q_fn(x)
        tv = t_fn(x)
        g = g_fn(x)
        gam = gam_fn(x)
        mats = np.zeros((n, n + 2, n + 2))
        for k in range(n):
            mats[k, 0, 1 + k] = 1.0
            for i in range(n):
                for a in range(n):
                    mats[k, 1 + i, 1 + a] += T[i, k, a] + gam[a, i, k]
                mats[k, 1 + i, n + 1] += g[i, k] / n
            for a in range(n):
                mats[k, n + 1, 1 + a] = q[k, a] * n / (n - 1.0)
            mats[k, n + 1, n + 1] = tv[k] / (n - 1.0)
        return mats

    nd._coeff_cache = coeffs
    return coeffs


def integrate_basis(nd: NonDegStructure, metric: Metric, base_point, targets,
                    rtol=1e-10, atol=1e-12, path_tol=1e-8, margin=1e-9):
    """Fundamental solutions of the prolongation system at each target.

    The (n+2)x(n+2) fundamental matrix is integrated along a straight path
    and re-integrated along an axis-ordered polyline; the pair must agree to
    `path_tol` (linear-system integrability), else PathDependence.  Returns
    a list over targets of (n+2, n+2) matrices whose columns are the states
    reached from the unit initial conditions at base_point.
    """
    n = nd.dim
    coeffs = _prolongation_coeffs(nd, metric)
    guarded = numerics.guarded_coords(
        [nd.T, nd.q, nd.t, metric.g, metric.christoffel])
    eye = np.eye(n + 2)
    out = []
    for target in targets:
        if np.allclose(np.asarray(target, float), np.asarray(base_point, float)):
            out.append(eye.copy())
            continue
        direct, poly = numerics.two_paths(base_point, target, guarded, margin)
        y1 = numerics.integrate_along_path(coeffs, direct, eye, rtol=rtol, atol=atol)
        y2 = numerics.integrate_along_path(coeffs, poly, eye, rtol=rtol, atol=atol)
        disagreement = float(np.max(np.abs(y1 - y2)))
        if disagreement > path_tol:
            raise PathDependence(
                f"paths to {list(target)} disagree by {disagreement:.3e} "
                f"(> {path_tol:.1e}); the prolongation is not integrable")
        out.append(y1)
    return out


@dataclass
class ExtensionFit:
    """Result of embedding the family and fitting the complementary direction."""

    targets: list
    basis_matrices: list          # fundamental matrices per target
    family_coefficients: list     # lstsq coefficients per family potential
    family_residual: float
    complement_vector: np.ndarray
    complement_samples: np.ndarray  # (len(targets), n+2) states of the new direction
    fit_ok: bool = False
    fit_coefficients: dict = field(default_factory=dict)
    fit_residual: float = float("nan")
    fit_message: str = ""


def extension_direction(nd: NonDegStructure, metric: Metric, family: PotentialFamily,
                        base_point, targets, candidate_dict=None,
                        family_tol=1e-7, fit_tol=1e-7, rtol=1e-10) -> ExtensionFit:
    """Embed the family into the reconstructed solution space; return the
    complementary direction and (optionally) its exact-form fit.

    Sampled values and gradients at the targets are least-squares matched
    against the n+2 fundamental solutions.  A family residual above
    family_tol raises FamilyNotContained.  candidate_dict maps labels to
    Expr candidates for the complementary potential (fitted together with
    the family, which spans the rest of the solution space).
    """
    chart = nd.chart
    n = chart.dim
    mats = integrate_basis(nd, metric, base_point, targets, rtol=rtol)
    rows_per_target = 1 + n  # value and gradient samples
    A = np.zeros((len(targets) * rows_per_target, n + 2))
    for ti, m in enumerate(mats):
        A[ti * rows_per_target, :] = m[0, :]
        A[ti * rows_per_target + 1: ti * rows_per_target + 1 + n, :] = m[1:1 + n, :]

    def sample_expr(v: Expr):
        vals = np.zeros(len(targets) * rows_per_target)
        vcr = normalize(v, chart)
        grads = [normalize(diff(v, c, chart), chart) for c in chart.coord_names]
        for ti, tgt in enumerate(targets):
            pt = dict(zip(chart.coord_names, [float(c) for c in tgt]))
            vals[ti * rows_per_target] = float(vcr.eval(pt))
            for gi, gcr in enumerate(grads):
                vals[ti * rows_per_target + 1 + gi] = float(gcr.eval(pt))
        return vals

    fam_coeffs = []
    worst = 0.0
    for v in family.basis:
        y = sample_expr(v)
        c, *_ = np.linalg.lstsq(A, y, rcond=None)
        resid = float(np.max(np.abs(A @ c - y))) / max(1.0, float(np.max(np.abs(y))))
        worst = max(worst, resid)
        fam_coeffs.append(c)
    if worst > family_tol:
        raise FamilyNotContained(
            f"family fit residual {worst:.3e} exceeds {family_tol:.1e}")

    fam_matrix = np.stack(fam_coeffs)
    _, _, vh = np.linalg.svd(fam_matrix)
    comp = vh[-1]
    comp_samples = np.stack([m @ comp for m in mats])

    fit = ExtensionFit(targets=list(targets), basis_matrices=mats,
                       family_coefficients=fam_coeffs, family_residual=worst,
                       complement_vector=comp, complement_samples=comp_samples)

    if not candidate_dict:
        fit.fit_message = "no candidate dictionary supplied"
        return fit
    labels = list(candidate_dict.keys())
    cols = [sample_expr(candidate_dict[lb]) for lb in labels]
    cols += [sample_expr(v) for v in family.basis]
    B = np.stack(cols, axis=1)
    y = np.zeros(len(targets) * rows_per_target)
    for ti in range(len(targets)):
        y[ti * rows_per_target] = comp_samples[ti, 0]
        y[ti * rows_per_target + 1: ti * rows_per_target + 1 + n] = comp_samples[ti, 1:1 + n]
    c, *_ = np.linalg.lstsq(B, y, rcond=None)
    resid = float(np.max(np.abs(B @ c - y))) / max(1.0, float(np.max(np.abs(y))))
    dict_part = c[:len(labels)]
    scale = dict_part[np.argmax(np.abs(dict_part))] if len(dict_part) else 0.0
    if resid > fit_tol or abs(scale) < 1e-12:
        fit.fit_ok = False
        fit.fit_residual = resid
        fit.fit_message = ("candidate dictionary cannot represent the sampled "
                           f"extension (residual {resid:.3e})")
        return fit
    fit.fit_ok = True
    fit.fit_residual = resid
    fit.fit_coefficients = {lb: float(val / scale) for lb, val in zip(labels, dict_part)}
    fit.fit_message = f"normalized against {labels[int(np.argmax(np.abs(dict_part)))]!r}"
    return fit


# -- restricting equation --------------------------------------------------------------


def restriction_rhs(nd: NonDegStructure, s_values, metric: Metric, point):
    """Second derivatives of the trace function from its first derivatives.

    s_,ak = n/(n-1) q_ka + ( 1/(n-1) t_k g_ab - T_bka - (1/n) s_,k g_ab ) s^,b
    evaluated at the point with the supplied 1-form values s_values.
    """
    n = nd.dim
    pt = np.asarray(point, dtype=float)
    sv = np.asarray(s_values, dtype=float)
    q = numerics.compile_tensor(nd.q)(pt)          # q_k^m
    t = numerics.compile_tensor(nd.t)(pt)
    T = numerics.compile_tensor(nd.T_lll)(pt)
    g = numerics.compile_tensor(metric.g)(pt)
    ginv = numerics.compile_tensor(metric.g_inv)(pt)
    q_ll = q @ g
    s_up = ginv @ sv
    out = np.zeros((n, n))
    for a, k in itertools.product(range(n), repeat=2):
        val = q_ll[k, a] * n / (n - 1.0)
        for b in range(n):
            val += (t[k] * g[a, b] / (n - 1.0) - T[b, k, a] - sv[k] * g[a, b] / n) * s_up[b]
        out[a, k] = val
    return out


def restriction_equation_residual(nd: NonDegStructure, s_form: Tensor, metric: Metric) -> Tensor:
    """Exact residual of the restricting equation for a given closed 1-form s."""
    chart = nd.chart
    n = chart.dim
    g = metric.g.comp
    q_ll = lower_slot(nd.q, 1, metric).comp
    s_up = raise_slot(s_form, 0, metric).comp
    ds = cov_derivative(s_form, metric).comp  # s_{a,k} at [a, k]
    out = Tensor.zeros(chart, ("l", "l"))
    for a, k in itertools.product(range(n), repeat=2):
        rhs = q_ll[k, a] * Fraction(n, n - 1)
        for b in range(n):
            rhs = rhs + (nd.t.comp[k] * g[a, b] * Fraction(1, n - 1)
                         - nd.T_lll.comp[b, k, a]
                         - s_form.comp[k] * g[a, b] * Fraction(1, n)) * s_up[b]
        out.comp[a, k] = ds[a, k] - rhs
    return out


def restriction_integrability_residual(nd: NonDegStructure, metric: Metric) -> dict:
    """Formal integrability of the restricting equation.

    The first derivatives of the trace function are replaced by formal
    symbols sigma_k; their derivatives are substituted from the restricting
    equation itself.  The Ricci identity residual must vanish identically in
    sigma, which is exactly the statement that the equation is solvable from
    any initial data.  Returns {(a, k, b): residual-CR-over-extended-chart}
    for k < b; all residuals are exact zeros for a valid structure.

    Only flat charts are supported (the shipped fixtures are flat); curved
    charts would add curvature terms to the substitution.
    """
    if not metric.riemann.is_zero():
        raise ValueError("formal restriction integrability implemented for flat charts")
    chart = nd.chart
    n = chart.dim
    ext, embed = _sigma_chart(chart)
    sig = [CR.var(ext, f"sig{i}") for i in range(n)]
    g = [[embed(metric.g.comp[i, j]) for j in range(n)] for i in range(n)]
    ginv = [[embed(metric.g_inv.comp[i, j]) for j in range(n)] for i in range(n)]
    q_ll_t = lower_slot(nd.q, 1, metric).comp
    q_ll = [[embed(q_ll_t[i, j]) for j in range(n)] for i in range(n)]
    t_v = [embed(nd.t.comp[i]) for i in range(n)]
    T = nd.T_lll.comp
    Te = {}
    for idx in itertools.product(range(n), repeat=3):
        Te[idx] = embed(T[idx])
    s_up = [sum((ginv[b][c] * sig[c] for c in range(n)), CR.zero(ext)) for b in range(n)]

    def F(a, k):
        val = q_ll[k][a] * Fraction(n, n - 1)
        for b in range(n):
            val = val + (t_v[k] * g[a][b] * Fraction(1, n - 1)
                         - Te[(b, k, a)]
                         - sig[k] * g[a][b] * Fraction(1, n)) * s_up[b]
        return val

    Fv = {}
    for a, k in itertools.product(range(n), repeat=2):
        Fv[(a, k)] = F(a, k)

    def dhat(expr: CR, b: int) -> CR:
        out = expr.diff(ext.coord_names[b])
        for m in range(n):
            out = out + expr.diff(f"sig{m}") * Fv[(m, b)]
        return out

    residuals = {}
    for a in range(n):
        for k in range(n):
            for b in range(k + 1, n):
                residuals[(a, k, b)] = dhat(Fv[(a, k)], b) - dhat(Fv[(a, b)], k)
    return residuals


def _sigma_chart(chart: Chart):
    """Chart extended by formal sigma coordinates, plus a scalar embedding."""
    n = chart.dim
    names = chart.coord_names + tuple(f"sig{i}" for i in range(n))
    atoms = []
    for a in chart.atoms:
        radic = {m + (0,) * n: c for m, c in a.radicand}
        atoms.append(RadicalAtom.make(a.name, radic))
    ext = Chart(names, tuple(atoms))

    def embed(cr: CR) -> CR:
        def remap(p: Poly) -> Poly:
            terms = {}
            for mono, c in p.terms.items():
                coords, at = mono[:n], mono[n:]
                terms[coords + (0,) * n + at] = c
            return Poly(ext, terms, _reduce=False)
        return CR(ext, remap(cr.num), remap(cr.den), _canonical=True)

    return ext, embed


# -- torsion view ------------------------------------------------------------------------


def torsion_view(d_tensor: Tensor, metric: Metric) -> dict:
    """Torsion of the connection shifted by D, and its vectorial residual.

    The difference tensor raises the first slot of the all-lower D, so the
    torsion is tau^m_kl = g^{mi} (D_ikl - D_ilk).  Its pure-trace (vectorial)
    part is u_l delta^m_k - u_k delta^m_l with u = trace/(n-1); the residual
    after removing it vanishes exactly iff the obstruction tensor does.
    """
    chart = d_tensor.chart
    n = chart.dim
    d_lll = lower_slot(d_tensor, 2, metric)
    tau_l = Tensor.zeros(chart, ("l", "l", "l"))
    for i, k, l in itertools.product(range(n), repeat=3):
        tau_l.comp[i, k, l] = d_lll.comp[i, k, l] - d_lll.comp[i, l, k]
    tau = raise_slot(tau_l, 0, metric)  # tau^m_kl at [m, k, l]
    u = Tensor.zeros(chart, ("l",))
    for l in range(n):
        total = CR.zero(chart)
        for a in range(n):
            total = total + tau.comp[a, a, l]
        u.comp[l] = total * Fraction(1, n - 1)
    resid = Tensor.zeros(chart, ("u", "l", "l"))
    one = CR.const(chart, 1)
    for m, k, l in itertools.product(range(n), repeat=3):
        dkm = one if m == k else CR.zero(chart)
        dlm = one if m == l else CR.zero(chart)
        resid.comp[m, k, l] = tau.comp[m, k, l] - (u.comp[l] * dkm - u.comp[k] * dlm)
    return {"torsion": tau, "vectorial_residual": resid, "u": u}
