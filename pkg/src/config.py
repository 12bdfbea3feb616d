from functools import lru_cache

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Process settings, read from ``OAD_*`` environment variables."""

    model_config = SettingsConfigDict(
        env_prefix="OAD_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    project_name: str = Field(default="oad-oam", description="Project name")

    # Logging
    log_level: str = Field(default="INFO", description="Log level")
    log_format: str = Field(default="json", description="Log format (json or text)")

    # Monitoring
    prometheus_enabled: bool = Field(
        default=False, description="Export Prometheus metrics next to command outputs"
    )
    metrics_filename: str = Field(default="metrics.prom", description="Metrics text file name")

    # Outputs
    resolved_config_filename: str = Field(
        default="config.json", description="Name of the resolved config written per run"
    )


@lru_cache()
def get_settings() -> Settings:
    """Get cached process settings."""
    return Settings()
