from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional, TextIO

from trackhom.config import DEFAULT_ENV_TEMPLATE, get_config_service, get_log_level
from trackhom.errors import CyclicSupport, GateError, InexactDetected, TrackhomError, ValidationError, VerificationError
from trackhom.orchestrator import ALL, BW, COMMANDS, Orchestrator
from trackhom.services.cohomology import THEORIES
from trackhom.services.report_service import emit_report, render_schema

logger = logging.getLogger("trackhom")

EXIT_OK = 0
EXIT_INTERNAL = 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="trackhom", description="Cohomology of finite track categories.")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG logs")
    sub = parser.add_subparsers(dest="command", required=True)

    for command in COMMANDS:
        cmd = sub.add_parser(command)
        cmd.add_argument("fixture", help="fixture file, or the name of a shipped fixture")
        cmd.add_argument("--max-degree", type=int, default=None, help="truncation degree N (default 2)")
        cmd.add_argument("--max-generators", type=int, default=None, help="gate bound on generators per level")
        cmd.add_argument("--cache-dir", type=Path, default=None, help="directory for cached resolution levels")
        cmd.add_argument("--format", choices=["text", "json"], default="text")
        if command == "cohomology":
            cmd.add_argument("--theory", choices=[*THEORIES, BW, ALL], default=ALL)
        if command == "les":
            cmd.add_argument("--strict", action="store_true", help="stop at the first inexact node")
        if command == "nerve":
            cmd.add_argument("--export", type=Path, default=None, help="write the truncated diagonal here")

    schema = sub.add_parser("schema", help="print a JSON schema")
    schema.add_argument("kind", choices=["fixture", "report"])
    sub.add_parser("init-config", help="write default settings to .env.local")
    return parser


def configure_logging(verbose: int) -> None:
    if verbose >= 2:
        level = logging.DEBUG
    elif verbose == 1:
        level = logging.INFO
    else:
        level = getattr(logging, get_log_level(), logging.WARNING)
    logging.basicConfig(
        level=level,
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


def _describe_error(exc: TrackhomError) -> List[str]:
    lines = [f"error: {exc}"]
    if isinstance(exc, ValidationError):
        lines.extend(f"  - {v}" for v in exc.violations)
    if isinstance(exc, CyclicSupport) and exc.witness:
        lines.append(f"  cycle witness: {' -> '.join(exc.witness)}")
    if isinstance(exc, InexactDetected) and exc.node:
        lines.append(f"  at node {exc.node}")
    return lines


def run(argv: Optional[List[str]] = None, out: TextIO = sys.stdout, err: TextIO = sys.stderr) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose)

    if args.command == "schema":
        out.write(render_schema(args.kind))
        return EXIT_OK
    if args.command == "init-config":
        service = get_config_service()
        added = service.ensure_defaults(DEFAULT_ENV_TEMPLATE)
        out.write(f"{service.env_path}: {len(added)} settings added\n")
        return EXIT_OK

    orchestrator = Orchestrator.build(
        cache_dir=args.cache_dir,
        max_generators=args.max_generators,
        max_degree=args.max_degree,
    )
    try:
        report = orchestrator.run(
            args.command,
            args.fixture,
            theory=getattr(args, "theory", ALL),
            export=getattr(args, "export", None),
            strict=getattr(args, "strict", False),
        )
    except TrackhomError as exc:
        err.write("\n".join(_describe_error(exc)) + "\n")
        return exc.exit_code
    except Exception:
        logger.exception("internal error while running %s", args.command)
        return EXIT_INTERNAL

    out.write(emit_report(report, args.format))
    if report.passed:
        return EXIT_OK
    if report.gate is not None and not report.gate.accepted:
        return GateError.exit_code
    return VerificationError.exit_code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
