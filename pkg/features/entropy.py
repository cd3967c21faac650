"""Multiscale entropy of an NBDC sequence.

The sequence is coarse-grained at scales 1 to 24 and the sample entropy
of every coarse-grained sequence is computed with one tolerance derived
from the original sequence.
"""

import dataclasses
import math

import numpy as np
from pydantic import BaseModel
from pydantic import ConfigDict
from pydantic import Field

from model.types import NbdcInterval

from .errors import FeatureError

ZERO_TOLERANCE_SUBSTITUTE = 1e-9
"""Tolerance used when the sequence has zero spread."""


class MseParams(BaseModel):
    """Parameters of multiscale entropy."""

    model_config = ConfigDict(frozen=True)

    m: int = Field(default=2, ge=1)
    r_factor: float = Field(default=0.15, gt=0)
    max_scale: int = Field(default=24, ge=1)

    @property
    def feature_names(self) -> tuple[str, ...]:
        """Returns feature names of every scale."""
        return tuple(f'MSE_{scale}' for scale in range(1, self.max_scale + 1))


@dataclasses.dataclass(frozen=True)
class MseProfile:
    """Sample entropy at every scale.

    Scales whose entropy is undefined hold the capped value and are
    listed in `undefined_scales`.
    """

    values: tuple[float, ...]
    tolerance: float
    undefined_scales: tuple[int, ...] = ()

    def as_features(self) -> dict[str, float]:
        """Returns values keyed `MSE_<scale>`."""
        return {
            f'MSE_{scale}': value
            for scale, value in enumerate(self.values, start=1)
        }


def coarse_grain(sequence: np.ndarray, scale: int) -> np.ndarray:
    """Replace non-overlapping blocks of a sequence by their means.

    Args:
        sequence (ndarray): Input sequence.
        scale (int): Block length.

    Returns:
        ndarray: Block means, a trailing incomplete block is dropped.

    Raises:
        FeatureError: The scale is not positive or exceeds the length.
    """
    sequence = np.asarray(sequence, dtype=float)
    if scale < 1 or scale > sequence.size:
        raise FeatureError(
            f'Cannot coarse-grain {sequence.size} values at scale {scale}',
        )
    if scale == 1:
        return sequence.copy()
    n_blocks = sequence.size // scale
    return sequence[:n_blocks * scale].reshape(n_blocks, scale).mean(axis=1)


def template_match_counts(
    sequence: np.ndarray,
    m: int,
    r: float,
) -> tuple[int, int]:
    """Count matching template pairs of lengths `m` and `m + 1`.

    Both lengths use the same `N - m` template start positions. A pair
    `i < j` matches if the Chebyshev distance of the templates is at
    most `r`.

    Args:
        sequence (ndarray): Input sequence of length `N`.
        m (int): Template length.
        r (float): Tolerance.

    Returns:
        tuple[int, int]: Match counts `(B, A)` for lengths `m` and `m + 1`.

    Raises:
        FeatureError: The sequence is too short or `r` is not positive.
    """
    sequence = np.asarray(sequence, dtype=float)
    n = sequence.size
    if m < 1 or n <= m + 1:
        raise FeatureError(
            f'Sample entropy needs more than {m + 1} values, got {n}',
        )
    if not r > 0:
        raise FeatureError(f'Tolerance must be positive, got {r}')
    close = np.abs(sequence[:, None] - sequence[None, :]) <= r
    n_templates = n - m
    matches = close[:n_templates, :n_templates].copy()
    for offset in range(1, m):
        matches &= close[offset:offset + n_templates, offset:offset + n_templates]
    count_b = int(np.triu(matches, k=1).sum())
    matches &= close[m:m + n_templates, m:m + n_templates]
    count_a = int(np.triu(matches, k=1).sum())
    return count_b, count_a


def entropy_cap(n: int, m: int) -> float:
    """Returns the entropy reported when no template pair matches.

    Args:
        n (int): Sequence length.
        m (int): Template length.
    """
    return math.log((n - m) * (n - m - 1) / 2)


def sample_entropy(sequence: np.ndarray, m: int, r: float) -> float:
    """Compute sample entropy `-ln(A / B)` of a sequence.

    If `A` or `B` is zero the entropy is undefined and `entropy_cap`
    is returned.

    Args:
        sequence (ndarray): Input sequence.
        m (int): Template length.
        r (float): Tolerance.

    Returns:
        float: Sample entropy.

    Raises:
        FeatureError: The sequence is too short or `r` is not positive.
    """
    count_b, count_a = template_match_counts(sequence, m, r)
    if count_a == 0 or count_b == 0:
        return entropy_cap(np.size(sequence), m)
    return math.log(count_b) - math.log(count_a)


def mse_tolerance(sequence: np.ndarray, r_factor: float) -> float:
    """Returns the tolerance derived from the scale-1 sequence.

    Args:
        sequence (ndarray): Original sequence.
        r_factor (float): Multiplier of the sample standard deviation.
    """
    r = r_factor * float(np.std(sequence, ddof=1))
    return r if r > 0 else ZERO_TOLERANCE_SUBSTITUTE


def mse_profile(
    interval: NbdcInterval | np.ndarray,
    params: MseParams | None = None,
) -> MseProfile:
    """Compute sample entropy of the sequence at every scale.

    Args:
        interval (NbdcInterval | ndarray): Interval or its sequence.
        params (Optional[MseParams]): Entropy parameters.

    Returns:
        MseProfile: Entropy by scale.

    Raises:
        FeatureError: The sequence is too short for the largest scale.
    """
    params = params or MseParams()
    sequence = (
        interval.sequence
        if isinstance(interval, NbdcInterval)
        else np.asarray(interval, dtype=float)
    )
    if sequence.size // params.max_scale <= params.m + 1:
        raise FeatureError(
            f'Sequence of {sequence.size} values is too short '
            f'for scale {params.max_scale}',
        )
    r = mse_tolerance(sequence, params.r_factor)
    values = []
    undefined = []
    for scale in range(1, params.max_scale + 1):
        grained = coarse_grain(sequence, scale)
        count_b, count_a = template_match_counts(grained, params.m, r)
        if count_a == 0 or count_b == 0:
            undefined.append(scale)
            values.append(entropy_cap(grained.size, params.m))
        else:
            values.append(math.log(count_b) - math.log(count_a))
    return MseProfile(
        values=tuple(values),
        tolerance=r,
        undefined_scales=tuple(undefined),
    )
