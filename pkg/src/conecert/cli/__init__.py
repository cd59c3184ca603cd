"""Command-line front end for conecert."""

from src.conecert.cli.scenario import (
    Scenario,
    ScenarioError,
    ScenarioModel,
    MeasureFileModel,
    build_scenario,
    load_scenario,
    load_measure,
)
from src.conecert.cli.commands import (
    EXIT_AFFIRMATIVE,
    EXIT_NEGATIVE,
    EXIT_INPUT_ERROR,
    build_parser,
    render_report,
    run,
    main,
)

__all__ = [
    "Scenario",
    "ScenarioError",
    "ScenarioModel",
    "MeasureFileModel",
    "build_scenario",
    "load_scenario",
    "load_measure",
    "EXIT_AFFIRMATIVE",
    "EXIT_NEGATIVE",
    "EXIT_INPUT_ERROR",
    "build_parser",
    "render_report",
    "run",
    "main",
]
