# src/cli/commands/gradcheck_commands.py
"""``gradcheck`` command."""

import argparse

from src.cli.dependencies import add_config_options, get_run_config, print_json
from src.pipeline.application.services.gradcheck_application_service import (
    GradientCheckApplicationService,
)


def gradcheck(args: argparse.Namespace) -> None:
    """Print the max relative error of every group; fail when one reaches the tolerance."""
    config = get_run_config(args)
    service = GradientCheckApplicationService(args.out)
    report = service.run(config, corrupt_group=args.corrupt_group)
    print_json(
        {
            "tolerance": report.tolerance,
            "passed": report.passed,
            "groups": {g.group: g.max_relative_error for g in report.groups},
        }
    )
    service.ensure_passed(report)


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("gradcheck", help="Finite-difference gradient check")
    add_config_options(parser)
    parser.add_argument(
        "--corrupt-group",
        default=None,
        help=argparse.SUPPRESS,
    )
    parser.set_defaults(func=gradcheck)
