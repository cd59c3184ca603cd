"""Command dispatch for the conecert command line.

Exit codes:
- 0: affirmative (the measure exists, the condition holds)
- 1: certified negative
- 2: input error

Reports are JSON on standard output with every rational printed exactly;
diagnostics and logs go to standard error.
"""

from dataclasses import fields
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, TextIO, Tuple
import argparse
import json
import logging
import sys

from src.conecert.casebook.cases import CASE_REGISTRY, InvalidInputError
from src.conecert.cli.scenario import Scenario, ScenarioError, load_measure, load_scenario
from src.conecert.config.settings import Settings, load_settings
from src.conecert.construct.construct import MeasureCertificate, find_esm, find_esm_in_band
from src.conecert.criteria.criteria import (
    build_condition_c,
    c_min_b_star_star,
    check_condition_a,
    check_condition_d,
    check_na,
    convert_k_to_c,
    min_k_b,
    min_k_b_star,
    verify_condition_c,
)
from src.conecert.marginals.marginals import couple_with_marginals, evaluate_inf_criterion
from src.conecert.solver import PivotLimitError, verify_certificate
from src.conecert.space.space import Measure, measure_from_weights, parse_rational


# Configure module logger
logger = logging.getLogger(__name__)

EXIT_AFFIRMATIVE = 0
EXIT_NEGATIVE = 1
EXIT_INPUT_ERROR = 2

Payload = Dict[str, object]
CommandResult = Tuple[int, Payload]

KMIN_MODES = {
    "bstar": min_k_b_star,
    "b": min_k_b,
    "cstarstar": c_min_b_star_star,
}


def _exact(value: Optional[Fraction]) -> Optional[str]:
    return None if value is None else str(value)


def _exit(affirmative: bool) -> int:
    return EXIT_AFFIRMATIVE if affirmative else EXIT_NEGATIVE


def _certified(cert: MeasureCertificate) -> bool:
    verified = verify_certificate(cert.program, cert.outcome)
    if cert.obstruction is not None:
        verified = verified and verify_certificate(cert.obstruction_program, cert.obstruction)
    return verified


def _revalidate(measure: Optional[Measure]) -> None:
    if measure is not None:
        measure_from_weights(measure.space, measure.weights)


def _reference_or_file(scenario: Scenario, path: Optional[str]) -> Measure:
    if path is None:
        return scenario.space.reference_measure()
    return load_measure(path, scenario.space, scenario.labels or None)


def command_check(scenario: Scenario, args: argparse.Namespace) -> CommandResult:
    """Every criterion with Q = P0, plus the agreement of the equivalent verdicts."""
    space, cone = scenario.space, scenario.cone
    reference = space.reference_measure()
    na = check_na(space, cone)
    condition_a = check_condition_a(space, cone)
    condition_d = check_condition_d(space, cone)
    k_b = min_k_b(space, cone, reference)
    k_star = min_k_b_star(space, cone, reference)
    esm = find_esm(space, cone)

    verdicts = {
        "NA": na.holds,
        "A": condition_a.holds,
        "D": condition_d.holds,
        "b*": k_star.is_finite,
        "esm": esm.found,
    }
    constants: Payload = {
        "k_b": _exact(k_b.value),
        "k_b_star": _exact(k_star.value),
        "c_from_k_b_star": _exact(convert_k_to_c(k_star.value)) if k_star.is_finite else None,
        "c_b_star_star": None,
    }
    reports = [na, condition_a, condition_d, k_b, k_star]
    if cone.is_linear:
        c_report = c_min_b_star_star(space, cone, reference)
        constants["c_b_star_star"] = _exact(c_report.value)
        reports.append(c_report)

    condition_c: Optional[Payload] = None
    if k_b.is_finite:
        pairs = build_condition_c(space, cone, reference, k_b.value)
        condition_c = {
            "pairs": [
                {"n": p.index, "atoms": list(p.atoms), "k_n": str(p.constant)} for p in pairs
            ],
            "holds": verify_condition_c(space, cone, pairs),
        }

    certified = all(verify_certificate(r.program, r.outcome) for r in reports) and _certified(esm)
    payload: Payload = {
        "command": "check",
        "verdicts": verdicts,
        "agree": len(set(verdicts.values())) == 1,
        "constants": constants,
        "condition_c": condition_c,
        "certificates_verified": certified,
        "details": {
            "NA": na.to_dict(),
            "A": condition_a.to_dict(),
            "D": condition_d.to_dict(),
            "b": k_b.to_dict(),
            "b*": k_star.to_dict(),
            "esm": esm.to_dict(),
        },
    }
    return _exit(all(verdicts.values())), payload


def command_esm(scenario: Scenario, args: argparse.Namespace) -> CommandResult:
    cert = find_esm(scenario.space, scenario.cone)
    _revalidate(cert.measure)
    payload = {"command": "esm", **cert.to_dict(), "certificate_verified": _certified(cert)}
    return _exit(cert.found), payload


def command_kmin(scenario: Scenario, args: argparse.Namespace) -> CommandResult:
    """Minimal constant of the chosen criterion; (b**) is affirmative below 1."""
    Q = _reference_or_file(scenario, args.q)
    report = KMIN_MODES[args.mode](scenario.space, scenario.cone, Q)
    payload = {
        "command": "kmin",
        "mode": args.mode,
        **report.to_dict(),
        "certificate_verified": verify_certificate(report.program, report.outcome),
    }
    if args.mode == "cstarstar":
        return _exit(report.value < 1), payload
    return _exit(report.is_finite), payload


def command_band(scenario: Scenario, args: argparse.Namespace) -> CommandResult:
    Q = _reference_or_file(scenario, args.q)
    cert = find_esm_in_band(scenario.space, scenario.cone, Q, parse_rational(args.k))
    _revalidate(cert.measure)
    payload = {
        "command": "band",
        "k": str(parse_rational(args.k)),
        **cert.to_dict(),
        "certificate_verified": _certified(cert),
    }
    return _exit(cert.found), payload


def command_couple(scenario: Scenario, args: argparse.Namespace) -> CommandResult:
    if scenario.product is None or scenario.marginals is None:
        raise ScenarioError("couple needs a scenario with a product block")
    ps, m = scenario.product, scenario.marginals
    cert = couple_with_marginals(ps, m)
    _revalidate(cert.measure)
    coupling = None
    marginals_match = None
    if cert.measure is not None:
        coupling = [[str(w) for w in line] for line in ps.as_matrix(cert.measure)]
        first, second = ps.marginals_of(cert.measure)
        marginals_match = first == m.first.weights and second == m.second.weights
    criterion = evaluate_inf_criterion(ps, m, ps.space.reference_measure())
    payload = {
        "command": "couple",
        "rows": list(ps.rows),
        "cols": list(ps.cols),
        **cert.to_dict(),
        "coupling": coupling,
        "marginals_match": marginals_match,
        "inf_criterion": _exact(criterion.value),
        "certificate_verified": _certified(cert),
    }
    return _exit(cert.found), payload


CASE_OPTIONS = (
    "seed", "atoms", "generators", "n", "weights", "samples", "eps", "N", "M", "d", "horizon",
    "concentrate",
)


def _case_parameters(args: argparse.Namespace, input_type) -> Dict[str, object]:
    accepted = {f.name for f in fields(input_type)}
    parameters: Dict[str, object] = {}
    for option in CASE_OPTIONS:
        value = getattr(args, option, None)
        if value is None:
            continue
        if option not in accepted:
            raise InvalidInputError(f"Option --{option} does not apply to case {args.name}")
        if option == "eps":
            value = parse_rational(value)
        elif option == "weights":
            value = tuple(parse_rational(w) for w in value.split(","))
        parameters[option] = value
    return parameters


def command_case(args: argparse.Namespace, settings: Settings) -> CommandResult:
    processor = CASE_REGISTRY[args.name]()
    report = processor.process(processor.input_type(**_case_parameters(args, processor.input_type)))
    payload = {"command": "case", **report.to_dict(settings.float_digits)}
    return _exit(report.all_verified), payload


SCENARIO_COMMANDS: Dict[str, Callable[[Scenario, argparse.Namespace], CommandResult]] = {
    "check": command_check,
    "esm": command_esm,
    "kmin": command_kmin,
    "band": command_band,
    "couple": command_couple,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="conecert",
        description="Certified existence of equivalent super-martingale measures on finite spaces.",
    )
    parser.add_argument("--log-level", help="Logging level (overrides CONECERT_LOG_LEVEL)")
    commands = parser.add_subparsers(dest="command", required=True)

    commands.add_parser("check", help="All criteria with Q = P0").add_argument("scenario")
    commands.add_parser("esm", help="Find an ESM or a Farkas certificate").add_argument("scenario")

    kmin = commands.add_parser("kmin", help="Minimal constant of (b), (b*) or (b**)")
    kmin.add_argument("scenario")
    kmin.add_argument("--mode", choices=sorted(KMIN_MODES), default="bstar")
    kmin.add_argument("--q", help="JSON measure file {\"weights\": [...] or {label: weight}}; default P0")

    band = commands.add_parser("band", help="ESM inside the band Q/(k+1) <= P <= (k+1) Q")
    band.add_argument("scenario")
    band.add_argument("--k", required=True, help="Band constant, e.g. 1/2")
    band.add_argument("--q", help="JSON measure file for Q; default P0")

    commands.add_parser("couple", help="Equivalent coupling with given marginals").add_argument("scenario")

    case = commands.add_parser("case", help="Run a casebook case")
    case.add_argument("name", choices=sorted(CASE_REGISTRY))
    case.add_argument("--seed", type=int)
    case.add_argument("--atoms", type=int)
    case.add_argument("--generators", type=int)
    case.add_argument("--n", type=int)
    case.add_argument("--N", type=int)
    case.add_argument("--M", type=int)
    case.add_argument("--d", type=int)
    case.add_argument("--horizon", type=int)
    case.add_argument("--samples", type=int)
    case.add_argument("--eps", help="Rational, e.g. 1/10")
    case.add_argument("--weights", help="Comma-separated rationals")
    case.add_argument("--concentrate", action="store_true", default=None)
    return parser


def render_report(payload: Payload) -> str:
    return json.dumps(payload, indent=2) + "\n"


def run(
    argv: Sequence[str],
    stdout: Optional[TextIO] = None,
    stderr: Optional[TextIO] = None,
) -> int:
    """Parse arguments, run one command and write its report.

    Returns:
        The exit code (0 affirmative, 1 certified negative, 2 input error)
    """
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as e:
        return EXIT_INPUT_ERROR if e.code else EXIT_AFFIRMATIVE

    try:
        settings = load_settings()
    except ValueError as e:
        stderr.write(f"error: {e}\n")
        return EXIT_INPUT_ERROR
    level = (args.log_level or settings.log_level).upper()
    if not isinstance(logging.getLevelName(level), int):
        stderr.write(f"error: unknown log level {args.log_level!r}\n")
        return EXIT_INPUT_ERROR
    logging.basicConfig(level=level, stream=stderr, format="%(levelname)s %(name)s: %(message)s")

    try:
        if args.command == "case":
            code, payload = command_case(args, settings)
        else:
            scenario = load_scenario(args.scenario)
            code, payload = SCENARIO_COMMANDS[args.command](scenario, args)
    except (ScenarioError, InvalidInputError) as e:
        stderr.write(f"error: {e}\n")
        return EXIT_INPUT_ERROR
    except PivotLimitError as e:
        stderr.write(f"error: {e}\n")
        return EXIT_INPUT_ERROR
    except (ValueError, KeyError, TypeError) as e:
        logger.debug("Input rejected", exc_info=True)
        stderr.write(f"error: {e}\n")
        return EXIT_INPUT_ERROR

    stdout.write(render_report(payload))
    logger.info(f"{args.command} finished with exit code {code}")
    return code


def main(argv: Optional[List[str]] = None) -> None:
    sys.exit(run(sys.argv[1:] if argv is None else argv))
