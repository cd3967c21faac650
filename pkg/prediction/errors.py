"""Exceptions raised by prediction models."""

from model.types import ProxipheneError


class PredictionError(ProxipheneError):
    """A prediction model cannot be fitted or applied."""
