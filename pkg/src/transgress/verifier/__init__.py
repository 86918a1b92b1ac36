"""Configuration-driven scenario runner with JSON reports."""

from .config import VerifierConfig, default_config, load_config, parse_config
from .report import Check, Report
from .runner import overall_exit, run_scenario, write_report
from .scenarios import list_scenarios

__all__ = [
    "Check",
    "Report",
    "VerifierConfig",
    "default_config",
    "list_scenarios",
    "load_config",
    "overall_exit",
    "parse_config",
    "run_scenario",
    "write_report",
]
