# src/cli/commands/training_commands.py
"""``train`` and ``ablate`` commands."""

import argparse
from pathlib import Path

from src.cli.dependencies import (
    add_config_options,
    get_dataset_root,
    get_out_dir,
    get_run_config,
    print_json,
)
from src.pipeline.application.services.ablation_application_service import (
    DEFAULT_MODES,
    AblationApplicationService,
)
from src.pipeline.application.services.training_application_service import (
    TrainingApplicationService,
)


def train(args: argparse.Namespace) -> None:
    """Train one detector and write its checkpoint."""
    config = get_run_config(args)
    dataset_root = get_dataset_root(args, config)
    out_dir = get_out_dir(args, Path("runs") / config.model.integration)

    result = TrainingApplicationService(out_dir).train(config, dataset_root)
    print_json(
        {"checkpoint": result.checkpoint, "steps": result.steps, "final_loss": result.final_loss}
    )


def ablate(args: argparse.Namespace) -> None:
    """Train and evaluate each integration mode on the same dataset."""
    config = get_run_config(args)
    dataset_root = get_dataset_root(args, config)
    out_dir = get_out_dir(args, Path("runs") / "ablation")

    table = AblationApplicationService(out_dir).run(config, dataset_root, args.modes)
    print_json(
        {
            "noun_chance": table.noun_chance,
            "rows": {
                row.integration: {
                    "verb": row.report.verb,
                    "noun": row.report.noun,
                    "action": row.report.action,
                }
                for row in table.rows
            },
            "noun_margins": table.noun_margins,
        }
    )


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("train", help="Train a detector")
    add_config_options(parser)
    parser.add_argument("--data", type=Path, default=None, help="Dataset directory")
    parser.set_defaults(func=train)

    parser = subparsers.add_parser("ablate", help="Compare object integration modes")
    add_config_options(parser)
    parser.add_argument("--data", type=Path, default=None, help="Dataset directory")
    parser.add_argument(
        "--modes",
        nargs="+",
        choices=DEFAULT_MODES,
        default=list(DEFAULT_MODES),
        help="Integration modes to compare",
    )
    parser.set_defaults(func=ablate)
