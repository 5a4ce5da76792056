"""Killing tensors: defining equation, compatibility, scalar parts, transfer.

A quadratic integral of motion has a symmetric Killing tensor K and a scalar
part W with dW = K dV; the compatibility of K with a potential V is the
closedness of that 1-form.  For extendable systems the Killing tensors
transfer to the extension through a first-order prolongation in T, checked
here exactly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import NotClosed, PathDependence
from .expr import Expr, diff, normalize
from .extension import NonDegStructure
from .rational import CanonicalRational as CR
from .tensor import (Metric, Tensor, cov_derivative, exterior_derivative_residual,
                     one_form, raise_slot, symmetrize)
from . import numerics


@dataclass
class KillingCandidate:
    K: Tensor            # (l, l), symmetric
    provenance: str = ""

    def __post_init__(self):
        if self.K.variance != ("l", "l"):
            raise ValueError("Killing candidate must be order-2 all-lower")
        n = self.K.chart.dim
        for i in range(n):
            for j in range(i + 1, n):
                if not (self.K.comp[i, j] - self.K.comp[j, i]).is_zero:
                    raise ValueError("Killing candidate must be symmetric")


def is_killing(cand: KillingCandidate, metric: Metric) -> Tensor:
    """Normalized full symmetrization of the covariant derivative; zero iff Killing."""
    grad = cov_derivative(cand.K, metric)
    return symmetrize(grad, (0, 1, 2)).scale(Fraction(1, 6))


def k_dv_form(cand: KillingCandidate, potential: Expr, metric: Metric) -> Tensor:
    """The 1-form (K dV)_k = K_k^a V_,a (rational even when V carries ln)."""
    chart = cand.K.chart
    grads = [normalize(diff(potential, c, chart), chart) for c in chart.coord_names]
    k_mixed = raise_slot(cand.K, 1, metric)  # K_k^a
    vals = []
    for k in range(chart.dim):
        total = CR.zero(chart)
        for a in range(chart.dim):
            total = total + k_mixed.comp[k, a] * grads[a]
        vals.append(total)
    return one_form(chart, vals)


def bertrand_darboux(cand: KillingCandidate, potential: Expr, metric: Metric) -> Tensor:
    """Exterior-derivative residual of K dV; exactly zero iff compatible."""
    return exterior_derivative_residual(k_dv_form(cand, potential, metric), metric)


def reconstruct_W(cand: KillingCandidate, potential: Expr, metric: Metric,
                  base_point, targets, rtol=1e-10, path_tol=1e-8, margin=1e-9):
    """Scalar parts W(target) by path integration of K dV, with W(base) = 0.

    Requires the compatibility residual to vanish exactly (NotClosed
    otherwise); every value is certified by a second path to `path_tol`.
    """
    if not bertrand_darboux(cand, potential, metric).is_zero():
        raise NotClosed("K dV is not closed; W does not exist")
    omega = k_dv_form(cand, potential, metric)
    omega_fn = numerics.compile_tensor(omega)
    guarded = numerics.guarded_coords([omega])
    out = []
    for target in targets:
        if np.allclose(np.asarray(target, float), np.asarray(base_point, float)):
            out.append(0.0)
            continue
        direct, poly = numerics.two_paths(base_point, target, guarded, margin)
        w1 = numerics.path_integral_1form(omega_fn, direct, rtol=rtol)
        w2 = numerics.path_integral_1form(omega_fn, poly, rtol=rtol)
        if abs(w1 - w2) > path_tol:
            raise PathDependence(
                f"W paths to {list(target)} disagree by {abs(w1 - w2):.3e}")
        out.append(w1)
    return out


def killing_prolongation_residual(cand: KillingCandidate, nd: NonDegStructure,
                                  metric: Metric) -> Tensor:
    """Residual of the transfer prolongation grad_k K_ij = (1/3) hook[T*K].

    The hook operand is F(j, i, k) = T^b_{ji} K_{bk} with the contraction
    raising the tensor's first symmetric slot (the reading that matches the
    derivation from the compatibility condition); the (ji, k) hook is the
    unnormalized column-then-row symmetrizer, so

      3 grad_k K_ij = F(j,i,k) - F(k,i,j) + F(i,j,k) - F(k,j,i).
    """
    chart = cand.K.chart
    n = chart.dim
    grad = cov_derivative(cand.K, metric)           # (i, j, k)
    t_up1 = raise_slot(nd.T_lll, 0, metric).comp    # T^b_{ji} at [b, j, i]
    k_up = raise_slot(cand.K, 0, metric).comp       # K^b_k at [b, k]

    def f(a, b, c):
        total = CR.zero(chart)
        for m in range(n):
            total = total + t_up1[m, a, b] * k_up[m, c]
        return total

    out = Tensor.zeros(chart, ("l", "l", "l"))
    third = Fraction(1, 3)
    for i, j, k in itertools.product(range(n), repeat=3):
        hook = f(j, i, k) - f(k, i, j) + f(i, j, k) - f(k, j, i)
        out.comp[i, j, k] = grad.comp[i, j, k] - hook * third
    return out


def trajectory_conservation(cand: KillingCandidate, potential: Expr, metric: Metric,
                            x0, p0, step=1e-3, nsteps=10000, checkpoints=100):
    """Relative drift of F = K^{ij} p_i p_j + W along a Hamiltonian trajectory.

    Leapfrog with the stated fixed step on an identity metric; W is evaluated
    at checkpoints by adaptive path integration of K dV from the start point.
    Returns the maximum relative deviation of F from its initial value.
    """
    chart = cand.K.chart
    if not metric.is_flat_identity():
        raise ValueError("trajectory check supports the identity metric only")
    grads = [normalize(diff(potential, c, chart), chart) for c in chart.coord_names]
    grad_fn = numerics.compile_tensor(one_form(chart, grads))
    omega_fn = numerics.compile_tensor(k_dv_form(cand, potential, metric))
    k_up2 = raise_slot(raise_slot(cand.K, 0, metric), 1, metric)
    kfn = numerics.compile_tensor(k_up2)

    x0 = np.asarray(x0, dtype=float)
    p0 = np.asarray(p0, dtype=float)

    def f_value(x, p, w):
        km = kfn(x)
        return float(p @ km @ p) + w

    f0 = f_value(x0, p0, 0.0)
    scale = max(abs(f0), 1.0)
    drift = 0.0
    every = max(1, nsteps // checkpoints)
    state = {"max": 0.0}

    def observer(i, x, p):
        if (i + 1) % every:
            return
        w = numerics.path_integral_1form(omega_fn, [x0, x], rtol=1e-12)
        dev = abs(f_value(x, p, w) - f0) / scale
        if dev > state["max"]:
            state["max"] = dev

    numerics.leapfrog_hamiltonian(grad_fn, x0, p0, step, nsteps, observer)
    return state["max"]
