"""Run scenarios, map failures to exit codes and write reports to disk."""

from __future__ import annotations

import datetime as _dt
import time
from pathlib import Path

import numpy as np

from ..errors import ConfigError, TransgressError
from .config import VerifierConfig
from .report import Report
from .scenarios import SCENARIOS, list_scenarios

EXIT_PASS, EXIT_RESIDUAL, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3

# ValueError here means a core routine rejected its numeric input
NUMERIC_ERRORS = (TransgressError, ArithmeticError, ValueError, np.linalg.LinAlgError)


def run_scenario(name: str, cfg: VerifierConfig, seed: int = 0, tol_scale: float = 1.0) -> Report:
    """Execute one scenario. Errors are recorded on the report, never raised."""
    rep = Report(name, seed, tol_scale)
    start = time.perf_counter()
    rep.timestamp = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    try:
        if name not in SCENARIOS:
            raise ConfigError(f"unknown scenario {name!r}; choose from {', '.join(list_scenarios())}")
        scaled = cfg.scaled(tol_scale) if tol_scale != 1.0 else cfg
        SCENARIOS[name].run(scaled, seed, rep)
    except ConfigError as exc:
        rep.error, rep.exit_code = f"config error: {exc}", EXIT_CONFIG
    except NUMERIC_ERRORS as exc:
        rep.error, rep.exit_code = f"numeric failure: {type(exc).__name__}: {exc}", EXIT_NUMERIC
    rep.elapsed = round(time.perf_counter() - start, 3)
    if rep.exit_code is None and not rep.checks:
        rep.error, rep.exit_code = "scenario produced no checks", EXIT_NUMERIC
    return rep


def run_many(names: list[str], cfg: VerifierConfig, seed: int = 0, tol_scale: float = 1.0) -> list[Report]:
    return [run_scenario(n, cfg, seed, tol_scale) for n in names]


def overall_exit(reports: list[Report]) -> int:
    """Worst outcome wins; the codes are ordered by severity."""
    return max((r.code() for r in reports), default=EXIT_PASS)


def write_report(rep: Report, out_dir: str | Path, with_timing: bool = True) -> list[Path]:
    """<out>/<scenario>.json plus one CSV per sweep under <out>/<scenario>/."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = [out / f"{rep.scenario}.json"]
    paths[0].write_text(rep.dumps(with_timing))
    if rep.artifacts:
        sub = out / rep.scenario
        sub.mkdir(exist_ok=True)
        for fname, text in sorted(rep.artifacts.items()):
            p = sub / fname
            p.write_text(text)
            paths.append(p)
    return paths

