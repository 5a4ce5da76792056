"""Request/response schemas for the HTTP service."""

from __future__ import annotations

from typing import Dict, List, Optional

from pydantic import BaseModel, Field


class AnalyzeOptions(BaseModel):
    grid: Optional[str] = Field(None, description="grid spec AxBxC")
    base: Optional[str] = Field(None, description="comma-separated base point")
    spacing: Optional[str] = Field(None, description="grid spacing (rational)")
    tol: Optional[float] = Field(None, description="numeric tolerance override")
    fit_candidates: Optional[Dict[str, str]] = Field(
        None, description="label -> expression dictionary for the extension fit")


class AnalyzeRequest(BaseModel):
    description: str = Field(..., description="system description document")
    options: Optional[AnalyzeOptions] = None


class AnalyzeResponse(BaseModel):
    verdict: str
    exit_code: int
    report: dict
    human: str


class CheckRequest(BaseModel):
    description: str
    only: str = Field(..., description="registry name of the check to run")


class CheckOutcomeModel(BaseModel):
    name: str
    status: str
    guaranteed: bool
    detail: str = ""
    witness: str = ""


class CheckResponse(BaseModel):
    outcomes: List[CheckOutcomeModel]


class FixtureListResponse(BaseModel):
    fixtures: List[str]


class FixtureShowResponse(BaseModel):
    name: str
    description: str


class CheckNamesResponse(BaseModel):
    checks: List[str]
