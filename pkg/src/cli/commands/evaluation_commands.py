# src/cli/commands/evaluation_commands.py
"""``eval`` command."""

import argparse
from pathlib import Path

from src.cli.dependencies import (
    add_config_options,
    get_dataset_root,
    get_out_dir,
    get_run_config,
    print_json,
)
from src.pipeline.application.services.evaluation_application_service import (
    EvaluationApplicationService,
)


def evaluate(args: argparse.Namespace) -> None:
    """Mean top-5 recall of a checkpoint; the architecture comes from the checkpoint."""
    config = get_run_config(args)
    dataset_root = get_dataset_root(args, config)
    out_dir = get_out_dir(args, Path(args.checkpoint).parent)

    report = EvaluationApplicationService(out_dir).evaluate(
        args.checkpoint, dataset_root, config.eval, split=config.data.eval_split
    )
    print_json(report.model_dump(mode="json", exclude_none=True))


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("eval", help="Evaluate a checkpoint")
    add_config_options(parser)
    parser.add_argument("--checkpoint", type=Path, required=True, help="Checkpoint file")
    parser.add_argument("--data", type=Path, default=None, help="Dataset directory")
    parser.set_defaults(func=evaluate)
