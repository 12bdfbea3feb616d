# src/shared/application/dto/base.py
"""Base DTO classes."""

from abc import ABC

from pydantic import BaseModel, ConfigDict


class BaseDTO(BaseModel, ABC):
    """Base class for DTOs."""

    model_config = ConfigDict(
        from_attributes=True,
        validate_assignment=True,
    )


class ConfigDTO(BaseDTO):
    """Base class for run-configuration sections; unknown keys are rejected."""

    model_config = ConfigDict(
        from_attributes=True,
        validate_assignment=True,
        extra="forbid",
    )


class ReportDTO(BaseDTO):
    """Base class for command results written as JSON."""

    model_config = ConfigDict(
        from_attributes=True,
        extra="forbid",
    )
