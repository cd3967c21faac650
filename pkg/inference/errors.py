"""Exceptions raised by statistical inference."""

from model.types import ProxipheneError


class InferenceError(ProxipheneError):
    """Base type for all inference exceptions."""


class RankDeficientError(InferenceError):
    """The fixed-effect design does not have full column rank."""


class NonNestedModelsError(InferenceError):
    """Two fits compared by a likelihood-ratio test are not nested."""
