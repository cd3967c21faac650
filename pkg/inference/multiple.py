"""Multiple-comparison correction."""

from collections.abc import Sequence

import numpy as np

from .errors import InferenceError


def bh_adjust(p_values: Sequence[float] | np.ndarray) -> np.ndarray:
    """Benjamini-Hochberg step-up adjustment.

    Args:
        p_values (ArrayLike): Raw p-values in [0, 1].

    Returns:
        ndarray: Adjusted p-values in the input order.

    Raises:
        InferenceError: Some p-value is outside [0, 1].
    """
    p = np.asarray(p_values, dtype=float)
    if p.size == 0:
        return p.copy()
    if not ((p >= 0) & (p <= 1)).all():
        raise InferenceError('p-values must lie in [0, 1]')
    m = p.size
    order = np.argsort(p, kind='stable')
    ranks = np.arange(1, m + 1)
    scaled = m * p[order] / ranks
    adjusted = np.minimum.accumulate(scaled[::-1])[::-1]
    result = np.empty(m)
    result[order] = np.minimum(adjusted, 1.0)
    return result
