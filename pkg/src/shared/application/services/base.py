# src/shared/application/services/base.py
"""Base application service."""

import json
from abc import ABC
from pathlib import Path
from typing import Any, Optional

import structlog

from src.config import Settings, get_settings
from src.shared.infrastructure.monitoring.metrics import export_metrics

logger = structlog.get_logger()


class BaseApplicationService(ABC):
    """Base application service class.

    Owns the run's output directory and the files every command leaves there.
    Services without an output directory skip those files.
    """

    def __init__(self, out_dir: Optional[Path] = None, settings: Settings | None = None):
        self.out_dir = Path(out_dir) if out_dir is not None else None
        self.settings = settings or get_settings()

    def output_path(self, filename: str) -> Path:
        if self.out_dir is None:
            return Path(filename)
        return self.out_dir / filename

    def write_json(self, filename: str, payload: Any) -> Path:
        path = self.output_path(filename)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        return path

    def write_resolved_config(self, config: Any) -> Optional[Path]:
        """Persist the resolved run configuration next to the outputs."""
        if self.out_dir is None:
            return None
        payload = config.model_dump(mode="json") if hasattr(config, "model_dump") else config
        path = self.write_json(self.settings.resolved_config_filename, payload)
        logger.debug("Resolved config written", path=str(path))
        return path

    def finish(self) -> None:
        if self.settings.prometheus_enabled and self.out_dir is not None:
            export_metrics(self.out_dir / self.settings.metrics_filename)
