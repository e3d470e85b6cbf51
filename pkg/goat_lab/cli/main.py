from __future__ import annotations

import argparse
import sys
import time
from typing import Optional, Sequence

from dotenv import load_dotenv

from . import evaluate, generate, reproduce, train, verify_theory
from .. import __version__
from ..core.config import get_settings
from ..core.exceptions import EXIT_INTERNAL, EXIT_OK, LabException
from ..core.logging_config import configure_logging, get_logger
from ..core.run_context import new_run_id, reset_run_id, set_run_id

logger = get_logger(__name__)

COMMANDS = (generate, train, evaluate, reproduce, verify_theory)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="goat-lab",
        description="Offline goal-conditioned RL lab: datasets, training, evaluation and theory checks.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", default=None, help="overrides GOAT_LAB_LOG_LEVEL")
    parser.add_argument("--log-format", choices=["json", "console"], default=None, help="overrides GOAT_LAB_LOG_FORMAT")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command in COMMANDS:
        command.register(subparsers)
    return parser


def run_command(args: argparse.Namespace) -> int:
    """Run a parsed subcommand under its own run id and translate failures into exit codes."""
    token = set_run_id(getattr(args, "run_id", None) or new_run_id(args.command))
    start_time = time.perf_counter()
    logger.info("Command started", extra={"command": args.command})

    exit_code = EXIT_OK
    try:
        args.handler(args)
    except LabException as exc:
        exit_code = exc.exit_code
        logger.error(
            "Command failed",
            extra={"command": args.command, "error": exc.message, "exit_code": exit_code, "payload": exc.payload},
        )
        print(f"goat-lab {args.command}: {exc.message}", file=sys.stderr)
    except Exception:
        exit_code = EXIT_INTERNAL
        logger.exception("Unhandled exception occurred", extra={"command": args.command})
    finally:
        duration_ms = (time.perf_counter() - start_time) * 1000
        logger.info(
            "Command finished",
            extra={"command": args.command, "exit_code": exit_code, "duration_ms": round(duration_ms, 2)},
        )
        reset_run_id(token)
    return exit_code


def main(argv: Optional[Sequence[str]] = None) -> int:
    load_dotenv(".env", override=False)
    settings = get_settings()
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level or settings.log_level, args.log_format or settings.log_format)
    return run_command(args)


if __name__ == "__main__":
    raise SystemExit(main())
