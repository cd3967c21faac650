"""Exceptions raised by cross-validation."""

from model.types import ProxipheneError


class EvaluationError(ProxipheneError):
    """Cross-validation cannot be set up or a fit failed."""
