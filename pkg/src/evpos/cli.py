"""
Command line entry point.

    evpos run <scenario.json> [--out DIR]
    evpos suite [--filter NAME] [--out DIR] [--jobs N]
    evpos analyze-matrix <matrix.csv> [--t-max T] [--tol E] [--out DIR]

Exit status: 0 on success, 2 for invalid input, 3 when an analysis fails.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Optional, Sequence

import pydantic

from .config import get_settings
from .errors import EvPosError, SpecError
from .reports import SCHEMA, write_json
from .scenarios import Kind, Parameters, Scenario, builtin_suite, load_scenario, output_dir_for, run_scenario
from .util import get_logger

logger = get_logger(name="evpos.cli")

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERICAL = 3


def _error_summary(scenario: Scenario, out: Path, error: EvPosError) -> None:
    write_json(out / "summary.json", {
        "schema": SCHEMA,
        "scenario": scenario.name,
        "kind": scenario.kind.value,
        "status": "error",
        "error": {"origin": error.origin, "type": type(error).__name__, "message": str(error)},
    })


def _run_one(scenario: Scenario, out: Optional[Path], base_dir: Optional[Path] = None) -> int:
    target = output_dir_for(scenario, out)
    try:
        result = run_scenario(scenario, target, base_dir)
    except SpecError as e:
        logger.error("%s: invalid scenario (%s): %s", scenario.name, e.origin, e)
        return EXIT_INPUT
    except EvPosError as e:
        logger.error("%s: %s failed: %s", scenario.name, e.origin, e)
        _error_summary(scenario, target, e)
        return EXIT_NUMERICAL
    logger.info("%s: wrote %d files to %s", scenario.name, len(result.files), result.output_dir)
    return EXIT_OK


def _cmd_run(args: argparse.Namespace) -> int:
    path = Path(args.scenario)
    try:
        scenario = load_scenario(path)
    except FileNotFoundError:
        logger.error("scenario file %s not found", path)
        return EXIT_INPUT
    except pydantic.ValidationError as e:
        for err in e.errors():
            logger.error("%s: %s at %s", path, err["msg"], "/".join(str(x) for x in err["loc"]) or "<root>")
        return EXIT_INPUT
    return _run_one(scenario, Path(args.out) if args.out else None, path.parent)


def _cmd_suite(args: argparse.Namespace) -> int:
    scenarios = [s for s in builtin_suite() if not args.filter or args.filter in s.name]
    if not scenarios:
        logger.error("no built-in scenario matches %r", args.filter)
        return EXIT_INPUT
    root = Path(args.out)
    jobs = args.jobs or get_settings().workers

    def run(s: Scenario) -> int:
        return _run_one(s, root / s.name)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            codes = list(pool.map(run, scenarios))
    else:
        codes = [run(s) for s in scenarios]
    for s, code in zip(scenarios, codes):
        logger.info("%-28s %s", s.name, "ok" if code == EXIT_OK else f"exit {code}")
    return max(codes)


def _cmd_analyze_matrix(args: argparse.Namespace) -> int:
    path = Path(args.matrix)
    try:
        scenario = Scenario(name=path.stem, kind=Kind.ANALYZE_MATRIX, matrix_file=str(path.resolve()),
                            parameters=Parameters(t_max=args.t_max, tol=args.tol))
    except pydantic.ValidationError as e:
        logger.error("invalid arguments: %s", e)
        return EXIT_INPUT
    return _run_one(scenario, Path(args.out) if args.out else Path("out") / "analyze-matrix")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="evpos", description="Eventual positivity analysis of linear evolution "
                                                               "equations.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="Run one scenario document.")
    run.add_argument("scenario", help="Path to the scenario JSON file.")
    run.add_argument("--out", default=None, help="Output directory (default: the scenario's output_dir).")
    run.set_defaults(handler=_cmd_run)

    suite = sub.add_parser("suite", help="Run the built-in scenarios.")
    suite.add_argument("--filter", default=None, help="Only run scenarios whose name contains this text.")
    suite.add_argument("--out", default="out", help="Root output directory.")
    suite.add_argument("--jobs", type=int, default=None, help="Scenarios to run concurrently (default EVPOS_WORKERS).")
    suite.set_defaults(handler=_cmd_suite)

    analyze = sub.add_parser("analyze-matrix", help="Classify the semigroup of a matrix given as CSV.")
    analyze.add_argument("matrix", help="CSV file, one row per line.")
    analyze.add_argument("--t-max", type=float, default=100.0, help="Horizon for witness and t0 searches.")
    analyze.add_argument("--tol", type=float, default=None, help="Eigenvector positivity tolerance.")
    analyze.add_argument("--out", default=None, help="Output directory.")
    analyze.set_defaults(handler=_cmd_analyze_matrix)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except json.JSONDecodeError as e:
        logger.error("malformed JSON: %s", e)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
