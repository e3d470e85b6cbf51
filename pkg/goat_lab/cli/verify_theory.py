from __future__ import annotations

import argparse
from pathlib import Path

from ..core.config import get_settings
from ..core.exceptions import TheoremCheckFailure, UsageError
from ..services.theory import closed_form_is_exact, verify_uniform_minimax
from ..utils.serialization import dumps_line, write_json

NAME = "verify-theory"


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser(NAME, help="Check that the uniform distribution minimizes worst-case shift")
    parser.add_argument("--n", type=int, default=4, help="ground set size")
    parser.add_argument("--C", type=float, default=0.5, help="density cap, must exceed 1/n")
    parser.add_argument("--trials", type=int, default=1000)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", type=Path, default=None, help="report JSON path")
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> None:
    if args.n < 2:
        raise UsageError("--n must be at least 2", payload={"n": args.n})
    if args.C * args.n <= 1.0:
        raise UsageError("--C must exceed 1/n", payload={"n": args.n, "C": args.C})
    if args.trials < 1:
        raise UsageError("--trials must be positive", payload={"trials": args.trials})

    report = verify_uniform_minimax(args.n, args.C, args.trials, args.seed, strict=False)
    out = args.out or get_settings().output_root / "theory" / f"verify_n{args.n}_C{args.C:g}_seed{args.seed}.json"
    write_json(out, report.model_dump())
    print(
        dumps_line(
            {
                "n": report.n,
                "C": report.C,
                "trials": report.trials,
                "passes": report.passes,
                "failures": len(report.failures),
                "min_margin": report.min_margin,
                "uniform_worst_case": report.uniform_worst_case,
                "closed_form": report.closed_form,
                "closed_form_exact": closed_form_is_exact(args.C),
                "report": out,
            }
        )
    )
    if report.failures:
        raise TheoremCheckFailure(
            "Uniform minimax property violated",
            payload={"count": len(report.failures), "first": report.failures[0], "report": str(out)},
        )
