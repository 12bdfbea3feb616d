# src/main.py
"""Command-line entry point: ``oad-oam gen-data|train|eval|stream|gradcheck|ablate``."""

import argparse
import sys
from typing import Optional, Sequence

import structlog

from src.cli.commands import (
    dataset_commands,
    evaluation_commands,
    gradcheck_commands,
    streaming_commands,
    training_commands,
)
from src.cli.error_handling import run_command
from src.config import get_settings
from src.shared.infrastructure.logging.setup import setup_logging

logger = structlog.get_logger()


def create_parser() -> argparse.ArgumentParser:
    """Create the argument parser with every sub-command."""
    parser = argparse.ArgumentParser(
        prog="oad-oam",
        description="Object-aware online action detection",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    dataset_commands.register(subparsers)
    training_commands.register(subparsers)
    evaluation_commands.register(subparsers)
    streaming_commands.register(subparsers)
    gradcheck_commands.register(subparsers)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    settings = get_settings()
    setup_logging(settings.log_level, settings.log_format)

    args = create_parser().parse_args(argv)
    logger.info("Command started", command=args.command, project=settings.project_name)
    return run_command(args.func, args)


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
