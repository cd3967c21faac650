"""Exceptions raised by feature extraction."""

from model.types import ProxipheneError


class FeatureError(ProxipheneError, ValueError):
    """A feature cannot be computed from the given input."""
