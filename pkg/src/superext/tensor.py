"""Dense tensor algebra over canonical rational scalars.

Components are CanonicalRational values in a dense n^k array; variance is a
string of 'l'/'u' per slot.  Everything here is exact: curvature, covariant
derivatives, traces, Young symmetrizations and the hook projector all reduce
to canonical form, so a vanishing residual is a proof, not an approximation.

Index conventions fixed by tests rather than by fiat:

  * cov_derivative appends the derivative slot last, and the third covariant
    derivative of a scalar V satisfies V_,ijk - V_,ikj = R^m_ijk V_,m with
    the Riemann tensor stored as riem[i, j, k, m] = R^m_ijk (upper slot
    last); the Ricci tensor is the (i, a, j, a) trace of that storage.
  * symmetrize/antisymmetrize are UNNORMALIZED Young sums: each returns the
    plain (signed) sum over slot permutations.  Normalized projectors divide
    by the factorial at the call site.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np

from .chart import Chart
from .errors import (DegenerateMetric, MixedVariance, SlotOutOfRange,
                     WrongOrder)
from .rational import CanonicalRational as CR


class Tensor:
    __slots__ = ("chart", "variance", "comp")

    def __init__(self, chart: Chart, variance, comp):
        self.chart = chart
        self.variance = tuple(variance)
        if any(v not in ("l", "u") for v in self.variance):
            raise ValueError("variance entries must be 'l' or 'u'")
        self.comp = np.asarray(comp, dtype=object)
        if self.comp.shape != (chart.dim,) * len(self.variance):
            raise ValueError(
                f"component shape {self.comp.shape} does not match "
                f"order {len(self.variance)} over dim {chart.dim}")

    # -- constructors ----------------------------------------------------------

    @staticmethod
    def zeros(chart: Chart, variance) -> "Tensor":
        variance = tuple(variance)
        z = CR.zero(chart)
        comp = np.empty((chart.dim,) * len(variance), dtype=object)
        comp[...] = z
        return Tensor(chart, variance, comp)

    @staticmethod
    def scalar(chart: Chart, value: CR) -> "Tensor":
        comp = np.empty((), dtype=object)
        comp[()] = value
        return Tensor(chart, (), comp)

    @staticmethod
    def delta(chart: Chart) -> "Tensor":
        t = Tensor.zeros(chart, ("u", "l"))
        one = CR.const(chart, 1)
        for i in range(chart.dim):
            t.comp[i, i] = one
        return t

    @property
    def order(self) -> int:
        return len(self.variance)

    def clone(self) -> "Tensor":
        return Tensor(self.chart, self.variance, self.comp.copy())

    # -- elementwise -------------------------------------------------------------

    def __add__(self, other: "Tensor") -> "Tensor":
        self._compat(other)
        return Tensor(self.chart, self.variance, self.comp + other.comp)

    def __sub__(self, other: "Tensor") -> "Tensor":
        self._compat(other)
        return Tensor(self.chart, self.variance, self.comp - other.comp)

    def __neg__(self) -> "Tensor":
        return self.scale(-1)

    def scale(self, c) -> "Tensor":
        if not isinstance(c, CR):
            c = CR.const(self.chart, c)
        return Tensor(self.chart, self.variance,
                      np.frompyfunc(lambda v: v * c, 1, 1)(self.comp))

    def _compat(self, other):
        if self.chart != other.chart or self.variance != other.variance:
            raise ValueError("tensor shape/variance mismatch")

    def is_zero(self) -> bool:
        return all(v.is_zero for v in self.comp.flat)

    def nonzero_witness(self):
        """(index tuple, component) of the first nonzero slot, or None."""
        for idx in itertools.product(range(self.chart.dim), repeat=self.order):
            if not self.comp[idx].is_zero:
                return idx, self.comp[idx]
        return None

    # -- structural -----------------------------------------------------------------

    def permute(self, perm) -> "Tensor":
        """Slot permutation: new slot i holds old slot perm[i]."""
        perm = tuple(perm)
        if sorted(perm) != list(range(self.order)):
            raise SlotOutOfRange(f"bad permutation {perm}")
        return Tensor(self.chart, tuple(self.variance[p] for p in perm),
                      np.transpose(self.comp, perm))

    def tensor_product(self, other: "Tensor") -> "Tensor":
        if self.chart != other.chart:
            raise ValueError("mixed charts")
        a = self.comp.reshape(self.comp.shape + (1,) * other.order)
        return Tensor(self.chart, self.variance + other.variance, a * other.comp)

    def contract_pair(self, slot_a: int, slot_b: int) -> "Tensor":
        """Contract an upper slot against a lower slot (no metric needed)."""
        self._check_slot(slot_a)
        self._check_slot(slot_b)
        if slot_a == slot_b:
            raise SlotOutOfRange("slots must differ")
        if {self.variance[slot_a], self.variance[slot_b]} != {"l", "u"}:
            raise MixedVariance("contract_pair needs one upper and one lower slot")
        n = self.chart.dim
        lo, hi = min(slot_a, slot_b), max(slot_a, slot_b)
        rest = [q for q in range(self.order) if q not in (lo, hi)]
        var = tuple(self.variance[q] for q in rest)
        out = Tensor.zeros(self.chart, var)
        for idx in itertools.product(range(n), repeat=len(rest)):
            total = CR.zero(self.chart)
            for a in range(n):
                full = [None] * self.order
                for q, v in zip(rest, idx):
                    full[q] = v
                full[lo] = a
                full[hi] = a
                total = total + self.comp[tuple(full)]
            out.comp[idx] = total
        return out

    def _check_slot(self, s):
        if not (0 <= s < self.order):
            raise SlotOutOfRange(f"slot {s} outside order {self.order}")

    def map(self, fn) -> "Tensor":
        return Tensor(self.chart, self.variance, np.frompyfunc(fn, 1, 1)(self.comp))

    def __getitem__(self, idx):
        return self.comp[idx]

    def __repr__(self):
        return f"Tensor(order={self.order}, variance={''.join(self.variance)})"


# -- metric ----------------------------------------------------------------------------


class Metric:
    """Metric with exact inverse and cached connection/curvature."""

    def __init__(self, chart: Chart, g: Tensor):
        if g.variance != ("l", "l"):
            raise ValueError("metric must be order-2 all-lower")
        n = chart.dim
        for i in range(n):
            for j in range(i + 1, n):
                if not (g.comp[i, j] - g.comp[j, i]).is_zero:
                    raise ValueError("metric must be symmetric")
        self.chart = chart
        self.g = g
        mat = [[g.comp[i, j] for j in range(n)] for i in range(n)]
        det, adj = det_adjugate(mat)
        if det.is_zero:
            raise DegenerateMetric("det g is identically zero")
        inv = Tensor.zeros(chart, ("u", "u"))
        for i in range(n):
            for j in range(n):
                inv.comp[i, j] = adj[i][j] / det
        self.g_inv = inv
        self.det = det
        self._christoffel = None
        self._riemann = None
        self._ricci = None

    @staticmethod
    def euclidean(chart: Chart) -> "Metric":
        g = Tensor.zeros(chart, ("l", "l"))
        one = CR.const(chart, 1)
        for i in range(chart.dim):
            g.comp[i, i] = one
        return Metric(chart, g)

    @property
    def christoffel(self) -> Tensor:
        if self._christoffel is None:
            self._christoffel = christoffel(self)
        return self._christoffel

    @property
    def riemann(self) -> Tensor:
        if self._riemann is None:
            self._riemann = riemann(self)
        return self._riemann

    @property
    def ricci(self) -> Tensor:
        if self._ricci is None:
            self._ricci = ricci(self)
        return self._ricci

    def is_flat_identity(self) -> bool:
        n = self.chart.dim
        one = CR.const(self.chart, 1)
        return all((self.g.comp[i, j] - (one if i == j else CR.zero(self.chart))).is_zero
                   for i in range(n) for j in range(n))


def det_adjugate(mat):
    """Exact determinant and adjugate of a small square CR matrix."""
    n = len(mat)
    if n == 1:
        chart = mat[0][0].chart
        return mat[0][0], [[CR.const(chart, 1)]]

    def minor(m, r, c):
        return [[m[i][j] for j in range(n) if j != c] for i in range(n) if i != r]

    def det(m):
        k = len(m)
        if k == 1:
            return m[0][0]
        if k == 2:
            return m[0][0] * m[1][1] - m[0][1] * m[1][0]
        total = None
        for j in range(k):
            if m[0][j].is_zero:
                continue
            sub = [[m[i][q] for q in range(k) if q != j] for i in range(1, k)]
            term = m[0][j] * det(sub)
            if j % 2:
                term = -term
            total = term if total is None else total + term
        if total is None:
            total = CR.zero(m[0][0].chart)
        return total

    d = det(mat)
    adj = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            cof = det(minor(mat, i, j))
            if (i + j) % 2:
                cof = -cof
            adj[j][i] = cof  # transpose of the cofactor matrix
    return d, adj


# -- derivatives -----------------------------------------------------------------------


def partial_derivative(t: Tensor) -> Tensor:
    """Componentwise coordinate derivative, new lower slot appended last."""
    chart = t.chart
    out = Tensor.zeros(chart, t.variance + ("l",))
    for idx in itertools.product(range(chart.dim), repeat=t.order):
        v = t.comp[idx]
        for k, name in enumerate(chart.coord_names):
            out.comp[idx + (k,)] = v.diff(name)
    return out


def cov_derivative(t: Tensor, metric: Metric) -> Tensor:
    """Levi-Civita covariant derivative; derivative slot appended last.

    Reduces to the plain partial derivative on flat identity charts.
    """
    chart = t.chart
    out = partial_derivative(t)
    if t.order == 0:
        return out
    gam = metric.christoffel  # gam[k, i, j] = Gamma^k_{ij}
    n = chart.dim
    for idx in itertools.product(range(n), repeat=t.order):
        for k in range(n):
            corr = CR.zero(chart)
            for slot in range(t.order):
                for a in range(n):
                    swapped = idx[:slot] + (a,) + idx[slot + 1:]
                    if t.variance[slot] == "l":
                        corr = corr - gam.comp[a, idx[slot], k] * t.comp[swapped]
                    else:
                        corr = corr + gam.comp[idx[slot], a, k] * t.comp[swapped]
            if not corr.is_zero:
                out.comp[idx + (k,)] = out.comp[idx + (k,)] + corr
    return out


def christoffel(metric: Metric) -> Tensor:
    """Gamma^k_ij = (1/2) g^{ka} (g_{ai,j} + g_{aj,i} - g_{ij,a}); slots (k, i, j)."""
    chart = metric.chart
    n = chart.dim
    g = metric.g.comp
    ginv = metric.g_inv.comp
    names = chart.coord_names
    dg = [[[g[i][j].diff(names[k]) for k in range(n)] for j in range(n)] for i in range(n)]
    out = Tensor.zeros(chart, ("u", "l", "l"))
    half = Fraction(1, 2)
    for k, i, j in itertools.product(range(n), repeat=3):
        if j < i:
            out.comp[k, i, j] = out.comp[k, j, i]
            continue
        total = CR.zero(chart)
        for a in range(n):
            total = total + ginv[k, a] * (dg[a][i][j] + dg[a][j][i] - dg[i][j][a])
        out.comp[k, i, j] = total * half
    return out


def riemann(metric: Metric) -> Tensor:
    """Riemann tensor stored as riem[i, j, k, m] = R^m_ijk, variance (l, l, l, u).

    The convention is the one pinned by the scalar Ricci identity
    V_,ijk - V_,ikj = R^m_ijk V_,m (see the module docstring):
    R^m_ijk = d_j Gamma^m_ik - d_k Gamma^m_ij
              + Gamma^m_ja Gamma^a_ik - Gamma^m_ka Gamma^a_ij.
    """
    chart = metric.chart
    n = chart.dim
    gam = metric.christoffel.comp
    names = chart.coord_names
    dgam = [[[[gam[m, i, j].diff(names[k]) for k in range(n)]
              for j in range(n)] for i in range(n)] for m in range(n)]
    out = Tensor.zeros(chart, ("l", "l", "l", "u"))
    for i, j, k, m in itertools.product(range(n), repeat=4):
        if k < j:
            out.comp[i, j, k, m] = -out.comp[i, k, j, m]
            continue
        if k == j:
            continue
        total = dgam[m][i][k][j] - dgam[m][i][j][k]
        for a in range(n):
            total = total + gam[m, j, a] * gam[a, i, k] - gam[m, k, a] * gam[a, i, j]
        out.comp[i, j, k, m] = total
    return out


def ricci(metric: Metric) -> Tensor:
    """Ric_ij = R^a_iaj in the storage above; zero on flat charts."""
    chart = metric.chart
    n = chart.dim
    riem = metric.riemann.comp
    out = Tensor.zeros(chart, ("l", "l"))
    for i, j in itertools.product(range(n), repeat=2):
        total = CR.zero(chart)
        for a in range(n):
            total = total + riem[i, a, j, a]
        out.comp[i, j] = total
    return out


# -- metric contractions -----------------------------------------------------------------


def raise_slot(t: Tensor, slot: int, metric: Metric) -> Tensor:
    t._check_slot(slot)
    if t.variance[slot] == "u":
        return t
    return _flip(t, slot, metric.g_inv.comp, "u")


def lower_slot(t: Tensor, slot: int, metric: Metric) -> Tensor:
    t._check_slot(slot)
    if t.variance[slot] == "l":
        return t
    return _flip(t, slot, metric.g.comp, "l")


def _flip(t, slot, gmat, newv):
    chart = t.chart
    n = chart.dim
    var = list(t.variance)
    var[slot] = newv
    out = Tensor.zeros(chart, var)
    for idx in itertools.product(range(n), repeat=t.order):
        total = CR.zero(chart)
        for a in range(n):
            swapped = idx[:slot] + (a,) + idx[slot + 1:]
            total = total + gmat[idx[slot], a] * t.comp[swapped]
        out.comp[idx] = total
    return out


def trace(t: Tensor, slot_a: int, slot_b: int, metric: Metric) -> Tensor:
    """Metric-contracted trace over two slots (any variance combination)."""
    t._check_slot(slot_a)
    t._check_slot(slot_b)
    if slot_a == slot_b:
        raise SlotOutOfRange("slots must differ")
    va, vb = t.variance[slot_a], t.variance[slot_b]
    if va == vb:
        t = raise_slot(t, slot_a, metric) if va == "l" else lower_slot(t, slot_a, metric)
    return t.contract_pair(slot_a, slot_b)


# -- Young operations -------------------------------------------------------------------


def _perm_sum(t: Tensor, slots, signed: bool) -> Tensor:
    slots = tuple(slots)
    for s in slots:
        t._check_slot(s)
    if len(set(slots)) != len(slots):
        raise SlotOutOfRange("slots must be distinct")
    if len({t.variance[s] for s in slots}) != 1:
        raise MixedVariance("cannot (anti)symmetrize slots of mixed variance")
    out = None
    for perm in itertools.permutations(slots):
        full = list(range(t.order))
        for tgt, src in zip(slots, perm):
            full[tgt] = src
        term = t.permute(full)
        if signed and _parity(slots, perm) < 0:
            term = -term
        out = term if out is None else out + term
    return out


def _parity(base, perm):
    perm = list(perm)
    base = list(base)
    sign = 1
    for i in range(len(base)):
        if perm[i] != base[i]:
            j = perm.index(base[i])
            perm[i], perm[j] = perm[j], perm[i]
            sign = -sign
    return sign


def symmetrize(t: Tensor, slots) -> Tensor:
    """Unnormalized Young symmetrizer: plain sum over slot permutations."""
    return _perm_sum(t, slots, signed=False)


def antisymmetrize(t: Tensor, slots) -> Tensor:
    """Unnormalized Young antisymmetrizer: signed sum over slot permutations."""
    return _perm_sum(t, slots, signed=True)


# -- the hook projector --------------------------------------------------------------------


def hook_project_21(m: Tensor, metric: Metric) -> Tensor:
    """Trace-free hook projection of an order-3 all-lower tensor.

    out_ijk = (1/3)(2 M_(ij)k - M_ikj - M_jki)
              + 2/(3(n-1)) g_ij m_k - 2/(3(n-1)) g_k(i m_j),
    with normalized round brackets and m_j = M^i_ji - M^i_ij.  The image is
    the hook-symmetric totally trace-free component: idempotent, killed by
    full symmetrization, and identically zero when n = 2.
    """
    if m.variance != ("l", "l", "l"):
        raise WrongOrder("hook projector expects an order-3 all-lower tensor")
    chart = m.chart
    n = chart.dim
    ginv = metric.g_inv.comp
    g = metric.g.comp
    mc = m.comp
    mvec = []
    for j in range(n):
        total = CR.zero(chart)
        for i in range(n):
            for a in range(n):
                total = total + ginv[i, a] * (mc[a, j, i] - mc[a, i, j])
        mvec.append(total)
    out = Tensor.zeros(chart, ("l", "l", "l"))
    third = Fraction(1, 3)
    ctr = Fraction(2, 3 * (n - 1))
    half = Fraction(1, 2)
    for i, j, k in itertools.product(range(n), repeat=3):
        first = (mc[i, j, k] + mc[j, i, k] - mc[i, k, j] - mc[j, k, i]) * third
        tr = (g[i, j] * mvec[k] - (g[k, i] * mvec[j] + g[k, j] * mvec[i]) * half) * ctr
        out.comp[i, j, k] = first + tr
    return out


def sym_tracefree_part(m: Tensor, metric: Metric) -> Tensor:
    """Totally symmetric trace-free part: (1/6) Young sum, then trace removal."""
    if m.variance != ("l", "l", "l"):
        raise WrongOrder("expected an order-3 all-lower tensor")
    chart = m.chart
    n = chart.dim
    sym = symmetrize(m, (0, 1, 2)).scale(Fraction(1, 6))
    ginv = metric.g_inv.comp
    g = metric.g.comp
    a = []
    for k in range(n):
        total = CR.zero(chart)
        for p in range(n):
            for q in range(n):
                total = total + ginv[p, q] * sym.comp[p, q, k]
        a.append(total)
    out = Tensor.zeros(chart, ("l", "l", "l"))
    c = Fraction(1, n + 2)
    for i, j, k in itertools.product(range(n), repeat=3):
        out.comp[i, j, k] = sym.comp[i, j, k] - (
            g[i, j] * a[k] + g[j, k] * a[i] + g[k, i] * a[j]) * c
    return out


def one_form(chart: Chart, values) -> Tensor:
    t = Tensor.zeros(chart, ("l",))
    for i, v in enumerate(values):
        t.comp[i] = v
    return t


def exterior_derivative_residual(omega: Tensor, metric: Metric) -> Tensor:
    """d(omega) of a 1-form as the antisymmetrized covariant derivative."""
    if omega.variance != ("l",):
        raise WrongOrder("expected a 1-form")
    grad = cov_derivative(omega, metric)  # slots (j, k) = (form, derivative)
    return antisymmetrize(grad, (0, 1))
