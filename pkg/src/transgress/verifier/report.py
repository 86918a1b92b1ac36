"""Check records and scenario reports with deterministic JSON output."""

from __future__ import annotations

import json
import math
import platform
from dataclasses import dataclass, field
from typing import Any

PROVENANCE = ("PAPER", "TRIVIAL", "DERIVED")
REPORT_SCHEMA_VERSION = 1


def _jsonable(x: Any) -> Any:
    if isinstance(x, complex):
        return [_jsonable(x.real), _jsonable(x.imag)]
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if hasattr(x, "item"):  # numpy scalars
        return _jsonable(x.item())
    return x


@dataclass
class Check:
    name: str
    expected: Any
    actual: Any
    residual: float
    tolerance: float
    provenance: str

    def __post_init__(self):
        if self.provenance not in PROVENANCE:
            raise ValueError(f"unknown provenance tag {self.provenance}")
        self.residual = float(self.residual)
        self.tolerance = float(self.tolerance)

    @property
    def passed(self) -> bool:
        return math.isfinite(self.residual) and self.residual <= self.tolerance

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "expected": _jsonable(self.expected),
            "actual": _jsonable(self.actual),
            "residual": _jsonable(self.residual),
            "tolerance": _jsonable(self.tolerance),
            "provenance": self.provenance,
            "passed": self.passed,
        }


def exact(name: str, expected: Any, actual: Any, provenance: str) -> Check:
    """Equality check with tolerance 0."""
    return Check(name, expected, actual, 0.0 if expected == actual else 1.0, 0.0, provenance)


def close(name: str, expected: complex | float, actual: complex | float, tol: float, provenance: str, relative=False) -> Check:
    err = abs(complex(actual) - complex(expected))
    if relative:
        err /= max(abs(complex(expected)), 1e-300)
    exp_v = expected.real if isinstance(expected, complex) and expected.imag == 0 else expected
    act_v = actual.real if isinstance(actual, complex) and abs(actual.imag) <= 1e-300 else actual
    return Check(name, exp_v, act_v, err, tol, provenance)


def bound(name: str, value: float, tol: float, provenance: str, expected: Any = 0.0) -> Check:
    """value must not exceed tol."""
    return Check(name, expected, float(value), float(value), tol, provenance)


def predicate(name: str, holds: bool, actual: Any, expected: str, provenance: str) -> Check:
    """A yes/no condition such as `alpha > 0`; tolerance 0."""
    return Check(name, expected, actual, 0.0 if holds else 1.0, 0.0, provenance)


def environment() -> dict:
    import numpy
    import pydantic
    import sympy

    return {
        "python": platform.python_version(),
        "numpy": numpy.__version__,
        "sympy": sympy.__version__,
        "pydantic": pydantic.__version__,
    }


@dataclass
class Report:
    scenario: str
    seed: int
    tol_scale: float
    checks: list[Check] = field(default_factory=list)
    artifacts: dict[str, str] = field(default_factory=dict)  # file name -> CSV text
    error: str | None = None
    exit_code: int | None = None
    elapsed: float | None = None
    timestamp: str | None = None

    @property
    def passed(self) -> bool:
        return self.error is None and bool(self.checks) and all(c.passed for c in self.checks)

    def code(self) -> int:
        if self.exit_code is not None:
            return self.exit_code
        return 0 if self.passed else 1

    def add(self, check: Check) -> Check:
        self.checks.append(check)
        return check

    def to_json(self, with_timing: bool = True) -> dict:
        out = {
            "schema_version": REPORT_SCHEMA_VERSION,
            "scenario": self.scenario,
            "passed": self.passed,
            "exit_code": self.code(),
            "seed": self.seed,
            "tol_scale": self.tol_scale,
            "checks": [c.to_json() for c in self.checks],
            "artifacts": sorted(self.artifacts),
            "error": self.error,
            "environment": environment(),
        }
        if with_timing:
            out["elapsed_seconds"] = self.elapsed
            out["timestamp"] = self.timestamp
        return out

    def dumps(self, with_timing: bool = True) -> str:
        return json.dumps(self.to_json(with_timing), sort_keys=True, indent=2) + "\n"

    def table(self) -> str:
        lines = [f"{self.scenario}: {'PASS' if self.passed else 'FAIL'}"]
        for c in self.checks:
            mark = "ok  " if c.passed else "FAIL"
            lines.append(f"  [{mark}] {c.name}: residual {c.residual:.3e} <= {c.tolerance:.1e} ({c.provenance})")
        if self.error:
            lines.append(f"  error: {self.error}")
        return "\n".join(lines)
