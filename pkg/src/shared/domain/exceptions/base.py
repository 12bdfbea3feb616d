# src/shared/domain/exceptions/base.py
"""Base domain exceptions."""


class DomainException(Exception):
    """Base exception for domain layer."""

    def __init__(self, message: str, error_code: str | None = None):
        super().__init__(message)
        self.message = message
        self.error_code = error_code or self.__class__.__name__


class ValidationException(DomainException):
    """Exception for domain validation errors."""
    pass


class ConfigException(ValidationException):
    """Exception for invalid run configuration."""
    pass


class DimensionException(DomainException):
    """Exception for tensor shape mismatches."""
    pass


class RankException(DimensionException):
    """Exception for operations that need a tensor of a given rank."""
    pass


class EmptyContextException(DomainException):
    """Exception raised when attention or encoding receives no context."""
    pass


class DataException(DomainException):
    """Exception for inconsistent input data."""
    pass


class ParseException(DataException):
    """Exception for malformed input lines."""

    def __init__(self, message: str, line_number: int | None = None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class FormatException(DataException):
    """Exception for malformed binary files."""
    pass


class DatasetNotFoundException(DataException):
    """Exception for missing datasets."""
    pass


class EvaluationException(DataException):
    """Exception for metric computation over unusable logs."""
    pass


class DivergenceException(DomainException):
    """Exception for non-finite losses or gradients."""
    pass


class CheckpointCorruptionException(DomainException):
    """Exception for checkpoints failing their integrity check."""
    pass


class GradientMismatchException(DivergenceException):
    """Exception for analytic gradients disagreeing with finite differences."""
    pass
