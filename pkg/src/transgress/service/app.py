"""HTTP front end: list scenarios and run one with an optional config."""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from ..errors import ConfigError
from ..verifier.config import SCHEMA_VERSION, default_config, parse_config
from ..verifier.runner import EXIT_CONFIG, run_scenario
from ..verifier.scenarios import SCENARIOS
from .schemas import RunRequest, RunResponse, ScenarioInfo

app = FastAPI(title="transgress verifier", version="1")


@app.get("/scenarios", response_model=list[ScenarioInfo])
def scenarios() -> list[ScenarioInfo]:
    return [ScenarioInfo(name=s.name, summary=s.summary) for s in SCENARIOS.values()]


@app.post("/scenarios/{name}/run", response_model=RunResponse)
def run(name: str, req: RunRequest) -> RunResponse:
    if name not in SCENARIOS:
        raise HTTPException(status_code=404, detail=f"unknown scenario {name!r}")
    try:
        cfg = default_config() if req.config is None else parse_config({"schema_version": SCHEMA_VERSION, **req.config})
    except ConfigError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc
    rep = run_scenario(name, cfg, req.seed, req.tol_scale)
    if rep.code() == EXIT_CONFIG:
        raise HTTPException(status_code=422, detail=rep.error)
    body = rep.to_json(with_timing=True)
    if req.include_artifacts:
        body["artifact_data"] = dict(rep.artifacts)
    return RunResponse.model_validate(body)
