"""
Exception types shared by the library and the CLI.

Every error carries the process exit code the CLI reports for it and a
JSON-friendly `to_dict()` used for the stderr error object.
"""
from typing import Any, Dict, List, Optional


class ArmaEntropyError(Exception):
    """Base class; exit code 3 covers numeric and domain failures."""

    exit_code = 3

    def __init__(self, message: str, **details: Any):
        super().__init__(message)
        self.message = message
        self.details = details

    def to_dict(self) -> Dict[str, Any]:
        out = {
            "error": type(self).__name__,
            "message": self.message,
            "exit_code": self.exit_code,
        }
        if self.details:
            out["details"] = self.details
        return out


class ModelValidationError(ArmaEntropyError):
    exit_code = 2

    def __init__(self, violations: List[Dict[str, str]]):
        summary = "; ".join(f"{v['path']}: {v['message']}" for v in violations)
        super().__init__(f"model validation failed: {summary}", violations=violations)
        self.violations = violations


class DomainError(ArmaEntropyError):
    """Input outside the domain of a formula (non-SPD, alpha range, ...)."""


class NoFiniteCovarianceError(DomainError):
    pass


class ClosedFormUnavailableError(DomainError):
    pass


class StabilityError(ArmaEntropyError):
    def __init__(self, spectral_radius: float, message: Optional[str] = None):
        super().__init__(message or f"unstable: spectral radius {spectral_radius:.12g}",
                         spectral_radius=spectral_radius)
        self.spectral_radius = spectral_radius


class NumericError(ArmaEntropyError):
    pass


class SingularMatrixError(NumericError):
    pass


class ModelSizeError(ArmaEntropyError):
    pass


class DegenerateModelError(ArmaEntropyError):
    pass


class ArityError(ArmaEntropyError):
    pass


class InputFileError(ArmaEntropyError):
    """Missing, unreadable or malformed input file."""

    exit_code = 4
