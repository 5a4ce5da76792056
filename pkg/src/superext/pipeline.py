"""End-to-end orchestration: description -> structure -> verdict -> checks.

The registry powers both `analyze` (run everything) and `check --only NAME`.
Prerequisites are computed lazily and cached on the context, so a single
named check does no more work than it must.
"""

from __future__ import annotations

import itertools

import numpy as np

from .errors import (FamilyNotContained, NotExtendable, PathDependence,
                     SingularPath, UnknownCheck)
from .expr import normalize
from .extension import (build_T, check_nondeg_conditions, extension_direction,
                        restriction_integrability_residual, torsion_view)
from .killing import (KillingCandidate, bertrand_darboux, is_killing,
                      killing_prolongation_residual)
from .parser import pretty
from .report import AnalysisReport, CheckOutcome, samples_table
from .structure import (PotentialFamily, check_closed, check_D_integrability,
                        decompose_D, ds_formula_check, extract_D,
                        find_exactness_witness, structure_residual)
from .sysdesc import SystemDescription


class PipelineContext:
    def __init__(self, desc: SystemDescription):
        self.desc = desc
        self.chart = desc.chart
        self.metric = desc.metric
        self._family = None
        self._d = None
        self._report = None
        self._nd = None

    @property
    def family(self) -> PotentialFamily:
        if self._family is None:
            self._family = PotentialFamily(self.chart, self.metric, self.desc.potentials)
        return self._family

    @property
    def d_tensor(self):
        if self._d is None:
            self._d = extract_D(self.family)
        return self._d

    @property
    def structure(self):
        if self._report is None:
            self._report = decompose_D(self.d_tensor, self.metric)
        return self._report

    @property
    def nd(self):
        if self._nd is None:
            self._nd = build_T(self.d_tensor, self.metric, self.structure)
        return self._nd


def _tensor_outcome(name, residual, guaranteed) -> CheckOutcome:
    if residual.is_zero():
        return CheckOutcome(name, "exact-zero", guaranteed)
    idx, val = residual.nonzero_witness()
    return CheckOutcome(name, "nonzero", guaranteed,
                        witness=f"component {list(idx)} = {val}")


# -- individual checks (registry entries) -------------------------------------------


def _chk_hessian_closure(ctx):
    return [_tensor_outcome("hessian-closure",
                            structure_residual(ctx.d_tensor, ctx.family), True)]


def _chk_structure_integrability(ctx):
    return [_tensor_outcome("structure-integrability",
                            check_D_integrability(ctx.d_tensor, ctx.metric), True)]


def _chk_decomposition(ctx):
    return [_tensor_outcome("decomposition-reassembly",
                            ctx.structure.residuals["decomposition-reassembly"], True)]


def _chk_traces(ctx):
    rep = ctx.structure
    out = []
    d_closed = check_closed(rep.d, ctx.metric)
    s_closed = check_closed(rep.s, ctx.metric)
    t_closed = check_closed(rep.t, ctx.metric)
    out.append(CheckOutcome("d-closed", "exact-zero" if d_closed else "nonzero", True))
    out.append(CheckOutcome("s-closed", "exact-zero" if s_closed else "nonzero", False))
    out.append(CheckOutcome("t-closed", "exact-zero" if t_closed else "nonzero", False))
    out.append(CheckOutcome("t-closed-iff-s-closed",
                            "pass" if (t_closed == s_closed) else "fail", True))
    return out


def _chk_witness(ctx):
    w = ctx.desc.options.witness
    if w is None:
        return [CheckOutcome("exactness-witness", "skipped", False,
                             detail="no witness supplied")]
    ok = find_exactness_witness(ctx.structure.s, w, ctx.metric)
    return [CheckOutcome("exactness-witness", "pass" if ok else "fail", False,
                         detail=f"candidate {pretty(w)}")]


def _chk_ds_formula(ctx):
    if ctx.chart.dim < 3:
        return [CheckOutcome("ds-formula", "skipped", False, detail="needs dimension >= 3")]
    return [_tensor_outcome("ds-formula", ds_formula_check(ctx.structure, ctx.metric), True)]


def _chk_star_conditions(ctx):
    if not ctx.structure.extendable:
        return [CheckOutcome("star-conditions", "skipped", False,
                             detail="system is non-extendable")]
    res = check_nondeg_conditions(ctx.nd, ctx.metric)
    out = []
    for key in ("star1", "star2", "star3", "star4", "q-symmetric",
                "t-closed", "lemma51-decomposition"):
        name = key if key.startswith("star") else f"nondeg-{key}"
        out.append(_tensor_outcome(name, res[key], True))
    return out


def _chk_restriction(ctx):
    if not ctx.structure.extendable:
        return [CheckOutcome("restriction-integrability", "skipped", False,
                             detail="system is non-extendable")]
    if not ctx.metric.riemann.is_zero():
        return [CheckOutcome("restriction-integrability", "skipped", False,
                             detail="implemented for flat charts")]
    res = restriction_integrability_residual(ctx.nd, ctx.metric)
    bad = [(k, v) for k, v in res.items() if not v.is_zero]
    if not bad:
        return [CheckOutcome("restriction-integrability", "exact-zero", True)]
    k, v = bad[0]
    return [CheckOutcome("restriction-integrability", "nonzero", True,
                         witness=f"slot {k}: {v}")]


def _chk_torsion(ctx):
    tv = torsion_view(ctx.d_tensor, ctx.metric)
    vanished = tv["vectorial_residual"].is_zero()
    consistent = vanished == ctx.structure.extendable
    out = [CheckOutcome("torsion", "exact-zero" if vanished else "nonzero", False,
                        detail="torsion is vectorial" if vanished
                        else "torsion has a non-trace part")]
    out.append(CheckOutcome("torsion-matches-verdict",
                            "pass" if consistent else "fail", True))
    if not vanished:
        idx, val = tv["vectorial_residual"].nonzero_witness()
        out[0].witness = f"component {list(idx)} = {val}"
    return out


def _chk_killing(ctx):
    out = []
    if not ctx.desc.killing:
        return [CheckOutcome("killing", "skipped", False, detail="no killing block")]
    for i, kt in enumerate(ctx.desc.killing):
        cand = KillingCandidate(kt, provenance=f"killing block {i}")
        defining = is_killing(cand, ctx.metric).is_zero()
        compat = all(bertrand_darboux(cand, v, ctx.metric).is_zero()
                     for v in ctx.desc.potentials)
        status = "pass" if (defining and compat) else "fail"
        out.append(CheckOutcome(f"killing[{i}]", status, False,
                                detail=f"defining={'ok' if defining else 'violated'}, "
                                       f"compatibility={'ok' if compat else 'violated'}"))
    return out


def _chk_killing_prolongation(ctx):
    if not ctx.desc.killing:
        return [CheckOutcome("killing-prolongation", "skipped", False,
                             detail="no killing block")]
    if not ctx.structure.extendable:
        return [CheckOutcome("killing-prolongation", "skipped", False,
                             detail="system is non-extendable")]
    out = []
    for i, kt in enumerate(ctx.desc.killing):
        cand = KillingCandidate(kt, provenance=f"killing block {i}")
        if not (is_killing(cand, ctx.metric).is_zero()
                and all(bertrand_darboux(cand, v, ctx.metric).is_zero()
                        for v in ctx.desc.potentials)):
            out.append(CheckOutcome(f"killing-prolongation[{i}]", "skipped", False,
                                    detail="tensor is not a compatible Killing tensor"))
            continue
        res = killing_prolongation_residual(cand, ctx.nd, ctx.metric)
        out.append(_tensor_outcome(f"killing-prolongation[{i}]", res, True))
    return out


def _chk_extension(ctx):
    if not ctx.structure.extendable:
        return [CheckOutcome("extension", "skipped", False,
                             detail="system is non-extendable")], {}
    opts = ctx.desc.options
    base = opts.base_point(ctx.chart.dim)
    grid = opts.grid_points(ctx.chart.dim)
    try:
        fit = extension_direction(ctx.nd, ctx.metric, ctx.family, base, grid,
                                  candidate_dict=opts.candidates or None,
                                  family_tol=max(opts.tol, 1e-7))
    except FamilyNotContained as exc:
        return [CheckOutcome("extension", "fail", True, detail=str(exc))], {}
    except (SingularPath, PathDependence) as exc:
        return [CheckOutcome("extension", "fail", True, detail=str(exc))], {}
    outcome = CheckOutcome("extension", "pass", True,
                           detail=f"family residual {fit.family_residual:.3e}")
    ext = {
        "base": [float(b) for b in base],
        "family_residual": fit.family_residual,
        "fit_ok": fit.fit_ok,
        "fit_coefficients": fit.fit_coefficients,
        "fit_residual": None if fit.fit_residual != fit.fit_residual else fit.fit_residual,
        "fit_message": fit.fit_message,
        "samples_table": samples_table(ctx.chart.coord_names, grid,
                                       fit.complement_samples),
    }
    return [outcome], ext


CHECK_REGISTRY = {
    "hessian-closure": _chk_hessian_closure,
    "structure-integrability": _chk_structure_integrability,
    "decomposition-reassembly": _chk_decomposition,
    "traces": _chk_traces,
    "exactness-witness": _chk_witness,
    "ds-formula": _chk_ds_formula,
    "star-conditions": _chk_star_conditions,
    "restriction-integrability": _chk_restriction,
    "torsion": _chk_torsion,
    "killing": _chk_killing,
    "killing-prolongation": _chk_killing_prolongation,
}


def check_names():
    return sorted(CHECK_REGISTRY.keys()) + ["extension"]


def run_check(desc: SystemDescription, name: str):
    """Run one named check; returns a list of CheckOutcome."""
    ctx = PipelineContext(desc)
    if name == "extension":
        outcomes, _ = _chk_extension(ctx)
        return outcomes
    try:
        fn = CHECK_REGISTRY[name]
    except KeyError:
        raise UnknownCheck(
            f"unknown check {name!r}; available: {', '.join(check_names())}") from None
    return fn(ctx)


def _input_echo(desc: SystemDescription) -> dict:
    chart = desc.chart
    echo = {
        "dim": chart.dim,
        "coords": list(chart.coord_names),
        "atoms": [{"name": a.name,
                   "radicand": str(_rad_poly(chart, a))} for a in chart.atoms],
        "metric_kind": "identity" if desc.metric.is_flat_identity() else "custom",
        "potentials": [pretty(p) for p in desc.potentials],
        "killing_count": len(desc.killing),
        "source": desc.source_text,
    }
    if echo["metric_kind"] == "custom":
        echo["metric"] = [[str(desc.metric.g.comp[i, j]) for j in range(chart.dim)]
                          for i in range(chart.dim)]
    return echo


def _rad_poly(chart, atom):
    from .poly import Poly
    return Poly(chart, {m + (0,) * len(chart.atoms): c for m, c in atom.radicand},
                _reduce=False)


def _structure_block(rep, chart) -> dict:
    n = chart.dim
    idx3 = list(itertools.product(range(n), repeat=3))
    block = {
        "D": [[[str(rep.D.comp[i, j, m]) for m in range(n)] for j in range(n)]
              for i in range(n)],
        "S": [[[str(rep.S.comp[i, j, k]) for k in range(n)] for j in range(n)]
              for i in range(n)],
        "N": [[[str(rep.N.comp[i, j, k]) for k in range(n)] for j in range(n)]
              for i in range(n)],
        "d": [str(v) for v in rep.d.comp],
        "s": [str(v) for v in rep.s.comp],
        "t": [str(v) for v in rep.t.comp],
        "N_nonzero": [{"index": list(i), "value": str(rep.N.comp[i])}
                      for i in idx3 if not rep.N.comp[i].is_zero],
    }
    return block


def analyze(desc: SystemDescription) -> AnalysisReport:
    """Full pipeline; the report carries every outcome and the exit code."""
    ctx = PipelineContext(desc)
    report = AnalysisReport()
    report.input_echo = _input_echo(desc)
    rep = ctx.structure
    report.structure = _structure_block(rep, ctx.chart)
    report.verdict = rep.verdict
    if not rep.extendable:
        idx, val = rep.N.nonzero_witness()
        report.verdict_witness = f"N[{','.join(map(str, idx))}] = {val}"

    for name in ("hessian-closure", "structure-integrability", "decomposition-reassembly",
                 "traces", "exactness-witness", "ds-formula", "star-conditions",
                 "restriction-integrability", "torsion"):
        report.checks.extend(CHECK_REGISTRY[name](ctx))

    killing_entries = []
    k_outcomes = _chk_killing(ctx)
    kp_outcomes = _chk_killing_prolongation(ctx)
    report.checks.extend(k_outcomes)
    report.checks.extend(kp_outcomes)
    if desc.killing:
        for i in range(len(desc.killing)):
            defining = compat = "n/a"
            for c in k_outcomes:
                if c.name == f"killing[{i}]":
                    defining = "ok" if "defining=ok" in c.detail else "violated"
                    compat = "ok" if "compatibility=ok" in c.detail else "violated"
            prol = "skipped"
            for c in kp_outcomes:
                if c.name == f"killing-prolongation[{i}]":
                    prol = c.status
            killing_entries.append({"index": i, "defining": defining,
                                    "compatibility": compat, "prolongation": prol})
    report.killing = killing_entries

    ext_outcomes, ext_block = _chk_extension(ctx)
    report.checks.extend(ext_outcomes)
    report.extension = ext_block
    return report
