"""Scenario configuration: a YAML file validated by pydantic models.

Unknown keys are rejected everywhere and every configurable tolerance must be
positive. Checks that are exact (integer equalities, symbolic residuals) have
no tolerance field.
"""

from __future__ import annotations

from pathlib import Path
from typing import Any

import yaml
from pydantic import BaseModel, ConfigDict, Field, PositiveFloat, PositiveInt, ValidationError, field_validator

from ..errors import ConfigError

SCHEMA_VERSION = 1


class Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class Tolerances(Strict):
    quadrature: PositiveFloat = 1e-6
    log_singular: PositiveFloat = 1e-3
    transgression: PositiveFloat = 1e-2
    extrapolation: PositiveFloat = 1e-2
    closure: PositiveFloat = 1e-3
    limit_line: PositiveFloat = 1e-3
    bidegree: PositiveFloat = 1e-10
    closedness: PositiveFloat = 1e-6
    superconnection_limit: PositiveFloat = 5e-2
    fit_residual: PositiveFloat = 0.1
    subspace: PositiveFloat = 1e-10
    metric_independence: PositiveFloat = 1e-9
    degree: PositiveFloat = 1e-6
    zero_section: PositiveFloat = 1e-8


class Bump(Strict):
    center: tuple[float, float] = (0.0, 0.0)
    radius: PositiveFloat = 0.5
    poly: str = "1"


def _default_bumps() -> list[Bump]:
    return [
        Bump(center=(0.0, 0.0), radius=0.5, poly="1"),
        Bump(center=(0.1, 0.05), radius=0.6, poly="1"),
        Bump(center=(0.0, -0.2), radius=0.7, poly="1 + (z + zb)/2"),
        Bump(center=(0.15, 0.0), radius=0.45, poly="1 + z*zb"),
        Bump(center=(-0.1, 0.1), radius=0.8, poly="2 - z*zb + I*(z - zb)"),
    ]


class Quadrature(Strict):
    depth: PositiveInt = 24
    n_theta: PositiveInt = 96
    p1_radial_order: PositiveInt = 32
    p1_n_theta: PositiveInt = 64


class PoincareLelong(Strict):
    section: str = "z"
    metric: str = "1"
    zero: tuple[float, float] = (0.0, 0.0)
    bumps: list[Bump] = Field(default_factory=_default_bumps)
    quadrature: Quadrature = Quadrature()


def _check_schedule(v: list[float]) -> list[float]:
    if any(b <= a for a, b in zip(v, v[1:])):
        raise ValueError("lambda schedule must be increasing")
    if v and len(v) < 4:
        raise ValueError("a lambda sweep needs at least four points")
    return v


class GeneralizedPL(Strict):
    section: list[str] = ["z**2", "z**3"]
    extra_sections: list[list[str]] = [["z**2", "0"]]
    sweep_sections: list[str] = ["z", "z**2", "z**3"]
    log10_lambdas: list[float] = [k / 2 for k in range(2, 13)]
    bumps: list[Bump] = Field(default_factory=_default_bumps)
    sweep_bumps: int = Field(default=2, ge=0)
    quadrature: Quadrature = Quadrature()

    @field_validator("log10_lambdas")
    @classmethod
    def _increasing(cls, v):
        return _check_schedule(v)


class ThomGysin(Strict):
    base_metric: str = "2 + z*zb"
    bumps: list[Bump] = Field(default_factory=_default_bumps)
    base_points: list[tuple[float, float]] = [(0.1, 0.0), (0.0, 0.4), (-0.3, 0.2)]
    quadrature: Quadrature = Quadrature()


class MultiplicityLocalization(Strict):
    use_corpus: bool = True
    product_law_max: PositiveInt = 3


class WeightedLimits(Strict):
    weights: list[int] = [0, 1, 2, 3]
    exponents: list[list[tuple[float, int]]] = [[(1.0, 0), (1.0, 1)], [(1.0, 2)], [(1.0, 5)], [(1.0, 9)]]
    log10_lambda_step: PositiveFloat = 0.5
    log10_lambda_max: PositiveFloat = 16.0
    n_radii: PositiveInt = 35
    n_phases: PositiveInt = 8
    min_points_per_line: PositiveInt = 10


class CStarClosure(Strict):
    max_k_symbolic: PositiveInt = 3
    max_k_count: PositiveInt = 5
    block_dim: PositiveInt = 1
    n_samples: PositiveInt = 100
    lam: PositiveFloat = 1e4


class Superconnection(Strict):
    lambdas: list[float] = [0.0, 1.0, 10.0]
    ranks: tuple[PositiveInt, PositiveInt] = (2, 2)
    n_points: PositiveInt = 4
    fd_step: PositiveFloat = 1e-3
    sweep_log10_lambdas: list[float] = [k / 4 for k in range(0, 13)]
    sweep_bumps: list[Bump] = Field(default_factory=lambda: _default_bumps()[:3])
    depth: PositiveInt = 14
    n_theta: PositiveInt = 48

    @field_validator("sweep_log10_lambdas")
    @classmethod
    def _increasing(cls, v):
        return _check_schedule(v)


class CorrespondenceAlgebra(Strict):
    cases: PositiveInt = 200
    max_dim: PositiveInt = 3


class MetricInvariance(Strict):
    perturbations: PositiveInt = 5
    radial_order: PositiveInt = 32
    n_theta: PositiveInt = 64


SCENARIO_MODELS: dict[str, type[Strict]] = {
    "poincare_lelong": PoincareLelong,
    "generalized_pl": GeneralizedPL,
    "thom_gysin": ThomGysin,
    "multiplicity_localization": MultiplicityLocalization,
    "weighted_limits": WeightedLimits,
    "cstar_closure": CStarClosure,
    "superconnection_transgression": Superconnection,
    "correspondence_algebra": CorrespondenceAlgebra,
    "metric_invariance": MetricInvariance,
}


class Scenarios(Strict):
    poincare_lelong: PoincareLelong = PoincareLelong()
    generalized_pl: GeneralizedPL = GeneralizedPL()
    thom_gysin: ThomGysin = ThomGysin()
    multiplicity_localization: MultiplicityLocalization = MultiplicityLocalization()
    weighted_limits: WeightedLimits = WeightedLimits()
    cstar_closure: CStarClosure = CStarClosure()
    superconnection_transgression: Superconnection = Superconnection()
    correspondence_algebra: CorrespondenceAlgebra = CorrespondenceAlgebra()
    metric_invariance: MetricInvariance = MetricInvariance()


class VerifierConfig(Strict):
    schema_version: int
    tolerances: Tolerances = Tolerances()
    scenarios: Scenarios = Scenarios()

    @field_validator("schema_version")
    @classmethod
    def _pinned(cls, v):
        if v != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema_version {v}; expected {SCHEMA_VERSION}")
        return v

    def scaled(self, factor: float) -> "VerifierConfig":
        if not factor > 0:
            raise ConfigError("tolerance scale must be positive")
        tol = {k: v * factor for k, v in self.tolerances.model_dump().items()}
        return self.model_copy(update={"tolerances": Tolerances(**tol)})


def parse_config(data: Any) -> VerifierConfig:
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError("configuration must be a mapping")
    try:
        return VerifierConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path: str | Path) -> VerifierConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML: {exc}") from exc
    return parse_config(data)


def default_config() -> VerifierConfig:
    return VerifierConfig(schema_version=SCHEMA_VERSION)
