# src/cli/dependencies.py
"""Options and resolution shared by every command."""

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Optional, TextIO

from src.pipeline.application.dto.run_config_dto import RunConfig, load_run_config
from src.shared.domain.exceptions.base import ConfigException


def add_config_options(parser: argparse.ArgumentParser) -> None:
    """``--config``, ``--set``, ``--seed`` and ``--out``."""
    parser.add_argument("--config", type=Path, default=None, help="JSON run configuration file")
    parser.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="Override a dotted config key; VALUE is parsed as JSON when possible",
    )
    parser.add_argument("--seed", type=int, default=None, help="Seed for training, data and checks")
    parser.add_argument("--out", type=Path, default=None, help="Output directory")


def get_run_config(args: argparse.Namespace) -> RunConfig:
    return load_run_config(args.config, args.overrides, args.seed)


def get_out_dir(args: argparse.Namespace, default: Path) -> Path:
    return Path(args.out) if args.out is not None else default


def get_dataset_root(args: argparse.Namespace, config: RunConfig) -> Path:
    """``--data`` first, then ``data.root``."""
    if getattr(args, "data", None) is not None:
        return Path(args.data)
    if config.data.root:
        return Path(config.data.root)
    raise ConfigException("data.root is not set; pass --data DIR or --set data.root=DIR")


def print_json(payload: Any, stream: Optional[TextIO] = None) -> None:
    out = stream or sys.stdout
    out.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    out.flush()
