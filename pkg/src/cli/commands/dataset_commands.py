# src/cli/commands/dataset_commands.py
"""``gen-data`` command."""

import argparse
from pathlib import Path

from src.cli.dependencies import add_config_options, get_out_dir, get_run_config, print_json
from src.dataset.application.services.dataset_application_service import DatasetApplicationService


def gen_data(args: argparse.Namespace) -> None:
    """Generate the synthetic dataset and print per-split counts."""
    config = get_run_config(args)
    out_dir = get_out_dir(args, Path(config.data.root or "data"))

    service = DatasetApplicationService(out_dir)
    manifest = service.generate(
        config.data.synth.to_value_object(),
        val_fraction=config.data.synth.val_fraction,
        train_split=config.data.train_split,
        eval_split=config.data.eval_split,
    )
    service.write_resolved_config(config)
    print_json({"root": str(out_dir), "splits": manifest.splits})


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("gen-data", help="Generate the synthetic dataset")
    add_config_options(parser)
    parser.set_defaults(func=gen_data)
