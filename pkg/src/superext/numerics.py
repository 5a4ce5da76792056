"""Floating-point support: compiled evaluators, adaptive RK, paths, leapfrog.

The symbolic layer proves identities; this layer integrates the prolongation
ODEs and path integrals those identities guarantee to be well posed.  The
integrator is an embedded Cash-Karp 4(5) pair with standard step control,
run at tight tolerance (default 1e-10 relative) since the right-hand sides
are cheap compiled rational functions.
"""

from __future__ import annotations

import math

import numpy as np

from .chart import Chart
from .errors import SingularPath, SingularPoint
from .rational import CanonicalRational as CR

# -- compiled scalar evaluation -----------------------------------------------------


def _poly_src(terms, argnames, atomnames):
    names = list(argnames) + list(atomnames)
    parts = []
    for mono, coef in sorted(terms.items()):
        factors = [repr(float(coef))]
        for e, nm in zip(mono, names):
            if e == 1:
                factors.append(nm)
            elif e > 1:
                factors.append(f"{nm}**{e}")
        parts.append("*".join(factors))
    return " + ".join(parts) if parts else "0.0"


def compile_scalar(cr: CR):
    """Compile a canonical rational to a float function of the coordinates.

    Raises SingularPoint at evaluation when the denominator or a radicand
    degenerates.
    """
    chart = cr.chart
    args = [f"_c{i}" for i in range(chart.dim)]
    atoms = [f"_a{i}" for i in range(len(chart.atoms))]
    lines = [f"def _f({', '.join(args)}):"]
    for i, atom in enumerate(chart.atoms):
        rad_src = _poly_src(dict(atom.radicand), args, [])
        lines.append(f"    _rad{i} = {rad_src}")
        lines.append(f"    if _rad{i} < 0.0: raise SingularPoint('negative radicand')")
        lines.append(f"    _a{i} = sqrt(_rad{i})")
    lines.append(f"    _den = {_poly_src(cr.den.terms, args, atoms)}")
    lines.append("    if _den == 0.0: raise SingularPoint('denominator vanishes')")
    lines.append(f"    return ({_poly_src(cr.num.terms, args, atoms)}) / _den")
    ns = {"sqrt": math.sqrt, "SingularPoint": SingularPoint}
    exec("\n".join(lines), ns)
    return ns["_f"]


def compile_tensor(t):
    """Compile every component; returns fn(point_array) -> ndarray of values."""
    shape = t.comp.shape
    fns = np.empty(shape, dtype=object)
    for idx in np.ndindex(*shape) if shape else [()]:
        fns[idx] = compile_scalar(t.comp[idx])
    def evaluate(x):
        out = np.empty(shape, dtype=float)
        for idx in np.ndindex(*shape) if shape else [()]:
            out[idx] = fns[idx](*x)
        return out
    return evaluate


# -- adaptive Cash-Karp 4(5) ---------------------------------------------------------

_CK_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [3 / 10, -9 / 10, 6 / 5],
    [-11 / 54, 5 / 2, -70 / 27, 35 / 27],
    [1631 / 55296, 175 / 512, 575 / 13824, 44275 / 110592, 253 / 4096],
]
_CK_B5 = [37 / 378, 0.0, 250 / 621, 125 / 594, 0.0, 512 / 1771]
_CK_B4 = [2825 / 27648, 0.0, 18575 / 48384, 13525 / 55296, 277 / 14336, 1 / 4]


def adaptive_rk(f, t0: float, t1: float, y0, rtol=1e-10, atol=1e-12, max_steps=200000):
    """Integrate y' = f(t, y) from t0 to t1 with embedded 4(5) step control."""
    t = t0
    y = np.array(y0, dtype=float)
    h = (t1 - t0) * 0.05 or 1e-3
    steps = 0
    while t < t1 - 1e-15:
        if steps > max_steps:
            raise SingularPath("integration exceeded the step budget")
        h = min(h, t1 - t)
        if h < 1e-14 * max(1.0, abs(t1)):
            raise SingularPath("step size underflow near a singular point")
        k = [f(t, y)]
        for i in range(1, 6):
            yi = y + h * sum(a * kk for a, kk in zip(_CK_A[i], k))
            k.append(f(t + h * sum(_CK_A[i]), yi))
        y5 = y + h * sum(b * kk for b, kk in zip(_CK_B5, k))
        y4 = y + h * sum(b * kk for b, kk in zip(_CK_B4, k))
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y5))
        err = float(np.max(np.abs(y5 - y4) / scale)) if y.size else 0.0
        if err <= 1.0:
            t += h
            y = y5
            steps += 1
            h *= min(5.0, 0.9 * (err + 1e-300) ** -0.2)
        else:
            h *= max(0.1, 0.9 * err ** -0.25)
    return y


# -- paths ---------------------------------------------------------------------------


def guarded_coords(tensors) -> set:
    """Coordinate indices appearing in any component denominator.

    Paths must keep these coordinates away from zero; coordinates absent
    from every denominator are unconstrained (the oscillator integrates
    straight through the origin).
    """
    guarded = set()
    for t in tensors:
        for cr in t.comp.flat:
            for i in range(cr.chart.dim):
                if cr.den.max_degree(i) > 0:
                    guarded.add(i)
    return guarded


def plan_segment(a, b, guarded=(), margin=1e-9):
    """Straight segment a -> b; rejects crossings of guarded coordinate planes.

    The singular sets of every shipped fixture are coordinate planes and the
    origin, so a segment is safe iff each guarded coordinate keeps a fixed
    sign and stays `margin` away from zero.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    for i in guarded:
        ai, bi = a[i], b[i]
        lo, hi = min(ai, bi), max(ai, bi)
        if lo <= margin and hi >= -margin:
            raise SingularPath(
                f"segment crosses (or grazes) the coordinate plane x_{i} = 0")
    return a, b


def two_paths(base, target, guarded=(), margin=1e-9):
    """A direct segment and an axis-ordered polyline; both singularity-checked."""
    base = np.asarray(base, dtype=float)
    target = np.asarray(target, dtype=float)
    plan_segment(base, target, guarded, margin)
    direct = [base, target]
    poly = [base]
    cur = base.copy()
    for i in range(len(base)):
        nxt = cur.copy()
        nxt[i] = target[i]
        if not np.allclose(nxt, cur):
            plan_segment(cur, nxt, guarded, margin)
            poly.append(nxt)
            cur = nxt
    if len(poly) == 1:
        poly.append(target)
    return direct, poly


def integrate_along_path(coeff_fn, path, y0, rtol=1e-10, atol=1e-12):
    """Integrate dY/ds = sum_k gamma'_k A_k(gamma(s)) Y along a polyline.

    coeff_fn(point) must return the stacked per-coordinate generator
    matrices A with shape (n, m, m); y0 has shape (m,) or (m, m).
    """
    y = np.array(y0, dtype=float)
    for a, b in zip(path[:-1], path[1:]):
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        delta = b - a
        def f(t, yy, a=a, delta=delta):
            x = a + t * delta
            mats = coeff_fn(x)
            gen = np.tensordot(delta, mats, axes=(0, 0))
            return gen @ yy
        y = adaptive_rk(f, 0.0, 1.0, y, rtol=rtol, atol=atol)
    return y


def path_integral_1form(omega_fn, path, rtol=1e-10, atol=1e-12):
    """Integral of a 1-form along a polyline (as a 1D linear ODE)."""
    total = 0.0
    for a, b in zip(path[:-1], path[1:]):
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        delta = b - a
        def f(t, yy, a=a, delta=delta):
            x = a + t * delta
            return np.array([float(np.dot(omega_fn(x), delta))])
        total += adaptive_rk(f, 0.0, 1.0, np.array([0.0]), rtol=rtol, atol=atol)[0]
    return total


# -- leapfrog for H = g^{ij} p_i p_j + V (identity metric) ------------------------------


def leapfrog_hamiltonian(grad_v_fn, x0, p0, step: float, nsteps: int, observer=None):
    """Kick-drift-kick integration of xdot = 2p, pdot = -grad V.

    `observer(i, x, p)` is called after every completed step when given.
    Returns the final (x, p).
    """
    x = np.array(x0, dtype=float)
    p = np.array(p0, dtype=float)
    for i in range(nsteps):
        p = p - 0.5 * step * grad_v_fn(x)
        x = x + step * 2.0 * p
        p = p - 0.5 * step * grad_v_fn(x)
        if observer is not None:
            observer(i, x, p)
    return x, p
