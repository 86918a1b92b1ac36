"""Request and response models of the HTTP service."""

from __future__ import annotations

from typing import Any

from pydantic import BaseModel, ConfigDict, Field, PositiveFloat


class RunRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    config: dict[str, Any] | None = Field(default=None, description="config mapping; defaults when omitted")
    seed: int = 0
    tol_scale: PositiveFloat = 1.0
    include_artifacts: bool = False


class CheckModel(BaseModel):
    name: str
    expected: Any
    actual: Any
    residual: Any
    tolerance: Any
    provenance: str
    passed: bool


class RunResponse(BaseModel):
    schema_version: int
    scenario: str
    passed: bool
    exit_code: int
    seed: int
    tol_scale: float
    checks: list[CheckModel]
    artifacts: list[str]
    error: str | None
    environment: dict[str, str]
    elapsed_seconds: float | None = None
    timestamp: str | None = None
    artifact_data: dict[str, str] | None = None


class ScenarioInfo(BaseModel):
    name: str
    summary: str
