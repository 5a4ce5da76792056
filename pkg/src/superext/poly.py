"""Sparse multivariate polynomials over Q with radical-atom reduction.

Variables are the chart's coordinates followed by its atoms; a monomial is an
exponent tuple over all of them.  Whenever a product raises an atom exponent
to 2 or more, the defining relation r**2 = p(coords) is substituted, so every
stored polynomial has atom exponents 0 or 1.

The monomial order is graded lexicographic (total degree first, then lex with
coordinates ranked before atoms), which fixes leading terms, monic
normalization and therefore canonical printing.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd as int_gcd

from .chart import Chart

ZERO = Fraction(0)
ONE = Fraction(1)


class Poly:
    __slots__ = ("chart", "terms", "_hash")

    def __init__(self, chart: Chart, terms=None, _reduce=True):
        self.chart = chart
        t = {}
        if terms:
            for mono, coef in terms.items():
                if coef:
                    t[tuple(mono)] = Fraction(coef)
        self.terms = t
        self._hash = None
        if _reduce and self._needs_reduction():
            self._reduce_atoms()

    # -- constructors ----------------------------------------------------------

    @staticmethod
    def zero(chart: Chart) -> "Poly":
        return Poly(chart, {}, _reduce=False)

    @staticmethod
    def const(chart: Chart, c) -> "Poly":
        c = Fraction(c)
        if c == 0:
            return Poly.zero(chart)
        return Poly(chart, {(0,) * chart.nvars: c}, _reduce=False)

    @staticmethod
    def var(chart: Chart, name: str) -> "Poly":
        i = chart.var_index(name)
        mono = [0] * chart.nvars
        mono[i] = 1
        return Poly(chart, {tuple(mono): ONE}, _reduce=False)

    def _pad(self, coord_mono):
        return tuple(coord_mono) + (0,) * len(self.chart.atoms)

    def atom_radicand(self, atom_pos: int) -> "Poly":
        """Radicand of the atom at full-variable index atom_pos, as a Poly."""
        atom = self.chart.atoms[atom_pos - self.chart.dim]
        return Poly(self.chart, {self._pad(m): c for m, c in atom.radicand}, _reduce=False)

    # -- atom reduction --------------------------------------------------------

    def _needs_reduction(self) -> bool:
        d = self.chart.dim
        return any(any(e >= 2 for e in mono[d:]) for mono in self.terms)

    def _reduce_atoms(self):
        d = self.chart.dim
        while True:
            bad = None
            for mono in self.terms:
                for j, e in enumerate(mono[d:]):
                    if e >= 2:
                        bad = (mono, d + j)
                        break
                if bad:
                    break
            if not bad:
                return
            mono, pos = bad
            coef = self.terms.pop(mono)
            e = mono[pos]
            rest = list(mono)
            rest[pos] = e % 2
            base = Poly(self.chart, {tuple(rest): coef}, _reduce=False)
            rad = self.atom_radicand(pos)
            repl = base
            for _ in range(e // 2):
                repl = repl._raw_mul(rad)
            for m, c in repl.terms.items():
                new = self.terms.get(m, ZERO) + c
                if new:
                    self.terms[m] = new
                else:
                    self.terms.pop(m, None)
            self._hash = None

    # -- ring operations -------------------------------------------------------

    def __add__(self, other: "Poly") -> "Poly":
        t = dict(self.terms)
        for m, c in other.terms.items():
            n = t.get(m, ZERO) + c
            if n:
                t[m] = n
            else:
                t.pop(m, None)
        return Poly(self.chart, t, _reduce=False)

    def __sub__(self, other: "Poly") -> "Poly":
        t = dict(self.terms)
        for m, c in other.terms.items():
            n = t.get(m, ZERO) - c
            if n:
                t[m] = n
            else:
                t.pop(m, None)
        return Poly(self.chart, t, _reduce=False)

    def __neg__(self) -> "Poly":
        return Poly(self.chart, {m: -c for m, c in self.terms.items()}, _reduce=False)

    def _raw_mul(self, other: "Poly") -> "Poly":
        t = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                n = t.get(m, ZERO) + c1 * c2
                if n:
                    t[m] = n
                else:
                    t.pop(m, None)
        return Poly(self.chart, t, _reduce=False)

    def __mul__(self, other: "Poly") -> "Poly":
        out = self._raw_mul(other)
        if out._needs_reduction():
            out._reduce_atoms()
        return out

    def scale(self, c) -> "Poly":
        c = Fraction(c)
        if c == 0:
            return Poly.zero(self.chart)
        return Poly(self.chart, {m: co * c for m, co in self.terms.items()}, _reduce=False)

    def __pow__(self, k: int) -> "Poly":
        if k < 0:
            raise ValueError("negative power on Poly")
        out = Poly.const(self.chart, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # -- queries ---------------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_const(self) -> bool:
        return not self.terms or (len(self.terms) == 1
                                  and next(iter(self.terms)) == (0,) * self.chart.nvars)

    def const_value(self) -> Fraction:
        if not self.terms:
            return ZERO
        return self.terms[(0,) * self.chart.nvars]

    def has_atoms(self) -> bool:
        d = self.chart.dim
        return any(any(mono[d:]) for mono in self.terms)

    def max_degree(self, var_idx: int) -> int:
        return max((m[var_idx] for m in self.terms), default=0)

    def total_degree(self) -> int:
        return max((sum(m) for m in self.terms), default=0)

    # -- monomial order (grlex, coords before atoms) ----------------------------

    @staticmethod
    def _key(mono):
        return (sum(mono), mono)

    def leading(self):
        """(monomial, coefficient) of the grlex-leading term."""
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        m = max(self.terms, key=Poly._key)
        return m, self.terms[m]

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: Poly._key(kv[0]), reverse=True)

    # -- content and normalization ----------------------------------------------

    def content(self) -> Fraction:
        """Positive rational c with self/c integer, coprime, content 1."""
        if not self.terms:
            return ONE
        num = 0
        den = 1
        for c in self.terms.values():
            num = int_gcd(num, abs(c.numerator))
            den = den * c.denominator // int_gcd(den, c.denominator)
        return Fraction(num, den)

    def primitive(self):
        """(content-with-sign, primitive part); leading coefficient > 0."""
        if not self.terms:
            return ONE, self
        c = self.content()
        _, lc = self.leading()
        if lc < 0:
            c = -c
        return c, self.scale(1 / c)

    # -- atom split / grouping ---------------------------------------------------

    def coeffs_by_atom_part(self):
        """Group terms by the atom part of the monomial.

        Returns {atom_mono: Poly-over-coords-only-padded}.  Atom exponents are
        already <= 1, so keys range over square-free atom monomials.
        """
        d = self.chart.dim
        out = {}
        for m, c in self.terms.items():
            key = m[d:]
            coordm = m[:d] + (0,) * (len(m) - d)
            grp = out.setdefault(key, {})
            grp[coordm] = grp.get(coordm, ZERO) + c
        return {k: Poly(self.chart, v, _reduce=False) for k, v in out.items()}

    def split_linear_in(self, atom_pos: int):
        """Write self = u + v * atom for the atom variable: return (u, v)."""
        u, v = {}, {}
        for m, c in self.terms.items():
            if m[atom_pos] == 0:
                u[m] = c
            else:
                mm = list(m)
                mm[atom_pos] = 0
                v[tuple(mm)] = c
        return Poly(self.chart, u, _reduce=False), Poly(self.chart, v, _reduce=False)

    # -- evaluation ----------------------------------------------------------------

    def eval_values(self, values):
        """Evaluate at a full-length tuple of values (coordinates then atoms).

        Values may be Fraction or float; the result type follows Python's
        numeric coercion (all-Fraction input stays exact).
        """
        total = ZERO
        for m, c in self.terms.items():
            v = c
            for e, val in zip(m, values):
                if e:
                    v = v * val ** e
            total = total + v
        return total

    # -- equality / hashing ----------------------------------------------------------

    def __eq__(self, other):
        return isinstance(other, Poly) and self.chart == other.chart and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.chart, frozenset(self.terms.items())))
        return self._hash

    # -- printing ----------------------------------------------------------------------

    def __str__(self):
        if not self.terms:
            return "0"
        names = self.chart.var_names
        parts = []
        for m, c in self.sorted_terms():
            factors = []
            for e, nm in zip(m, names):
                if e == 1:
                    factors.append(nm)
                elif e > 1:
                    factors.append(f"{nm}^{e}")
            mag = abs(c)
            if not factors:
                body = _frac_str(mag)
            elif mag == 1:
                body = "*".join(factors)
            else:
                body = _frac_str(mag) + "*" + "*".join(factors)
            parts.append(("- " if c < 0 else "+ ") + body)
        out = " ".join(parts)
        return out[2:] if out.startswith("+ ") else "-" + out[2:]

    def __repr__(self):
        return f"Poly({self})"


def _frac_str(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


# -- exact division and gcd (coordinate-only polynomials) ------------------------


def divexact(a: Poly, b: Poly) -> Poly:
    """Exact quotient a/b; raises ValueError if b does not divide a."""
    if b.is_zero:
        raise ZeroDivisionError("division by zero polynomial")
    if a.is_zero:
        return a
    chart = a.chart
    q = {}
    rem = Poly(chart, dict(a.terms), _reduce=False)
    bm, bc = b.leading()
    while not rem.is_zero:
        am, ac = rem.leading()
        if any(e1 < e2 for e1, e2 in zip(am, bm)):
            raise ValueError("polynomials do not divide exactly")
        qm = tuple(e1 - e2 for e1, e2 in zip(am, bm))
        qc = ac / bc
        q[qm] = qc
        rem = rem - Poly(chart, {qm: qc}, _reduce=False)._raw_mul(b)
    return Poly(chart, q, _reduce=False)


def _poly_from_univ(chart, univ, var):
    t = {}
    for e, coef_poly in univ.items():
        for m, c in coef_poly.terms.items():
            mm = list(m)
            mm[var] += e
            key = tuple(mm)
            t[key] = t.get(key, ZERO) + c
    return Poly(chart, t, _reduce=False)


def _to_univ(p: Poly, var: int):
    """View p as a univariate polynomial in `var` with Poly coefficients."""
    out = {}
    for m, c in p.terms.items():
        e = m[var]
        mm = list(m)
        mm[var] = 0
        grp = out.setdefault(e, {})
        key = tuple(mm)
        grp[key] = grp.get(key, ZERO) + c
    return {e: Poly(p.chart, t, _reduce=False) for e, t in out.items()}

def _univ_degree(u):
    return max(u.keys(), default=-1)


def _univ_scale_poly(u, p):
    return {e: c * p for e, c in u.items() if not (c * p).is_zero}


def _univ_sub(u, w):
    out = dict(u)
    for e, c in w.items():
        n = out.get(e)
        n = c.__neg__() if n is None else n - c
        if n.is_zero:
            out.pop(e, None)
        else:
            out[e] = n
    return out


def _univ_shift(u, k):
    return {e + k: c for e, c in u.items()}


def _pseudo_rem(u, v, var):
    """Pseudo-remainder of univariate-with-Poly-coefficient polys."""
    du, dv = _univ_degree(u), _univ_degree(v)
    lv = v[dv]
    r = dict(u)
    while True:
        dr = _univ_degree(r)
        if dr < dv or dr < 0:
            return r
        lr = r[dr]
        # lv * r - lr * x^(dr-dv) * v
        r = _univ_sub(_univ_scale_poly(r, lv), _univ_shift(_univ_scale_poly(v, lr), dr - dv))


def _content_wrt(u):
    """GCD of the Poly coefficients of a univariate view."""
    g = None
    for c in u.values():
        g = c if g is None else poly_gcd(g, c)
        if g.is_const and not g.is_zero:
            break
    return g


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """GCD over Q[coords]; primitive with positive leading coefficient.

    Both inputs must be atom-free (cancellation only ever needs the
    coordinate ring).  Units normalize to 1.
    """
    if a.has_atoms() or b.has_atoms():
        raise ValueError("gcd is defined over the coordinate ring only")
    if a.is_zero:
        return b.primitive()[1] if not b.is_zero else Poly.const(a.chart, 1)
    if b.is_zero:
        return a.primitive()[1]
    if a.is_const or b.is_const:
        return Poly.const(a.chart, 1)
    var = None
    for v in range(a.chart.dim):
        if a.max_degree(v) > 0 or b.max_degree(v) > 0:
            var = v
            break
    ua, ub = _to_univ(a, var), _to_univ(b, var)
    ca, cb = _content_wrt(ua), _content_wrt(ub)
    gc = poly_gcd(ca, cb)
    pa = {e: divexact(c, ca) for e, c in ua.items()}
    pb = {e: divexact(c, cb) for e, c in ub.items()}
    if _univ_degree(pa) < _univ_degree(pb):
        pa, pb = pb, pa
    while True:
        r = _pseudo_rem(pa, pb, var)
        if not r:
            break
        if _univ_degree(r) == 0:
            pb = {0: Poly.const(a.chart, 1)}
            break
        cr = _content_wrt(r)
        pa, pb = pb, {e: divexact(c, cr) for e, c in r.items()}
    g = _poly_from_univ(a.chart, pb, var) * gc
    return g.primitive()[1]
