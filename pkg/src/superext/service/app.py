"""FastAPI service wrapping the analysis engine.

The CLI is a thin client of these endpoints (in-process by default); any
other client can POST the same documents.  Input problems surface as 422,
unknown names as 404; a completed analysis always returns 200 with the
domain exit code inside the payload.
"""

from __future__ import annotations

import json
from fractions import Fraction

from fastapi import FastAPI, HTTPException

from ..errors import DescriptionError, SuperextError, UnknownCheck
from ..fixtures import fixture_names, fixture_text
from ..pipeline import analyze, check_names, run_check
from ..sysdesc import load_description
from .models import (AnalyzeRequest, AnalyzeResponse, CheckNamesResponse,
                     CheckOutcomeModel, CheckRequest, CheckResponse,
                     FixtureListResponse, FixtureShowResponse)

app = FastAPI(
    title="superext",
    description="Extendability analysis of (n+1)-parameter superintegrable systems",
    version="0.1.0",
)


def _load(description: str, options=None):
    try:
        desc = load_description(description)
    except (DescriptionError, SuperextError) as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc
    if options:
        try:
            _apply_options(desc, options)
        except (ValueError, DescriptionError) as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
    return desc


def _apply_options(desc, options):
    if options.grid:
        desc.options.grid = tuple(int(v) for v in options.grid.lower().split("x"))
        if any(v < 1 for v in desc.options.grid):
            raise ValueError("grid axes must be positive")
    if options.base:
        desc.options.base = [Fraction(v.strip()) for v in options.base.split(",")]
        if len(desc.options.base) != desc.chart.dim:
            raise ValueError(f"base needs {desc.chart.dim} coordinates")
    if options.spacing:
        desc.options.spacing = Fraction(options.spacing)
    if options.tol is not None:
        desc.options.tol = options.tol
    if options.fit_candidates is not None:
        from ..parser import parse_declaring
        parsed = {}
        chart = desc.chart
        for label, txt in options.fit_candidates.items():
            e, chart = parse_declaring(txt, chart)
            parsed[label] = e
        if chart != desc.chart:
            raise ValueError("fit candidates may not introduce new radical atoms")
        desc.options.candidates = parsed


@app.get("/health")
def health():
    return {"status": "ok"}


@app.post("/analyze", response_model=AnalyzeResponse)
def analyze_endpoint(req: AnalyzeRequest):
    desc = _load(req.description, req.options)
    try:
        report = analyze(desc)
    except SuperextError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc
    return AnalyzeResponse(verdict=report.verdict, exit_code=report.exit_code(),
                           report=json.loads(report.to_json()),
                           human=report.human())


@app.post("/check", response_model=CheckResponse)
def check_endpoint(req: CheckRequest):
    desc = _load(req.description)
    try:
        outcomes = run_check(desc, req.only)
    except UnknownCheck as exc:
        raise HTTPException(status_code=404, detail=str(exc)) from exc
    except SuperextError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc
    return CheckResponse(outcomes=[
        CheckOutcomeModel(name=o.name, status=o.status, guaranteed=o.guaranteed,
                          detail=o.detail, witness=o.witness) for o in outcomes])


@app.get("/checks", response_model=CheckNamesResponse)
def checks_endpoint():
    return CheckNamesResponse(checks=check_names())


@app.get("/fixtures", response_model=FixtureListResponse)
def fixtures_endpoint():
    return FixtureListResponse(fixtures=fixture_names())


@app.get("/fixtures/{name}", response_model=FixtureShowResponse)
def fixture_endpoint(name: str):
    try:
        return FixtureShowResponse(name=name, description=fixture_text(name))
    except UnknownCheck as exc:
        raise HTTPException(status_code=404, detail=str(exc)) from exc
