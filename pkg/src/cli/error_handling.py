# src/cli/error_handling.py
"""Exit codes of the command-line surface."""

import argparse
import sys
from typing import Callable

import structlog

from src.shared.domain.exceptions.base import (
    CheckpointCorruptionException,
    DataException,
    DimensionException,
    DivergenceException,
    DomainException,
    EmptyContextException,
    ValidationException,
)

logger = structlog.get_logger()

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_DIVERGENCE = 4
EXIT_CHECKPOINT = 5

CommandHandler = Callable[[argparse.Namespace], None]


def exit_code_for(error: DomainException) -> int:
    """Exit code of a domain error; subclasses share their parent's code."""
    if isinstance(error, ValidationException):
        return EXIT_CONFIG
    if isinstance(error, (DataException, DimensionException, EmptyContextException)):
        return EXIT_DATA
    if isinstance(error, DivergenceException):
        return EXIT_DIVERGENCE
    if isinstance(error, CheckpointCorruptionException):
        return EXIT_CHECKPOINT
    return EXIT_FAILURE


def run_command(handler: CommandHandler, args: argparse.Namespace) -> int:
    """Run ``handler``; domain errors become their exit code and a line on stderr."""
    try:
        handler(args)
        return EXIT_OK
    except DomainException as e:
        code = exit_code_for(e)
        logger.error("Command failed", command=args.command, error_code=e.error_code, exit_code=code)
        sys.stderr.write(f"error: {e.message}\n")
        sys.stderr.flush()
        return code
