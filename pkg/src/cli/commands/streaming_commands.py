# src/cli/commands/streaming_commands.py
"""``stream`` command."""

import argparse
import sys
from pathlib import Path
from typing import Optional

from src.cli.dependencies import add_config_options, get_run_config
from src.dataset.infrastructure.repositories.dataset_repository import DETECTIONS_FILE
from src.pipeline.application.dto.run_config_dto import RunConfig
from src.pipeline.application.services.streaming_application_service import (
    StreamingApplicationService,
)


def get_detections_path(args: argparse.Namespace, config: RunConfig) -> Optional[Path]:
    """``--detections`` first, then the eval split under ``data.root`` when it has a detection file."""
    if args.detections is not None:
        return Path(args.detections)
    if config.data.root:
        candidate = Path(config.data.root) / config.data.eval_split / DETECTIONS_FILE
        if candidate.is_file():
            return candidate
    return None


def stream(args: argparse.Namespace) -> None:
    """JSON line per snippet on standard output; the architecture comes from the checkpoint."""
    config = get_run_config(args)
    service = StreamingApplicationService(sys.stdout, out_dir=args.out)
    service.stream(args.checkpoint, args.features, get_detections_path(args, config))


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("stream", help="Causal inference over one feature file")
    add_config_options(parser)
    parser.add_argument("--checkpoint", type=Path, required=True, help="Checkpoint file")
    parser.add_argument("--features", type=Path, required=True, help="OADF feature file")
    parser.add_argument("--detections", type=Path, default=None, help="Detections JSONL file")
    parser.set_defaults(func=stream)
