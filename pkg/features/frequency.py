"""Frequency-domain features of an NBDC sequence.

The spectrum axis is in cycles/day: hourly sampling gives 24 samples a
day, so bin `k` of an `n`-sample sequence lies at `24 * k / n` and the
Nyquist frequency is 12 cycles/day.
"""

import dataclasses
import enum

import numpy as np
from pydantic import BaseModel
from pydantic import ConfigDict
from pydantic import Field
from pydantic import model_validator
import scipy.stats

from model.types import HOURS_PER_DAY

from .errors import FeatureError


@enum.unique
class Band(enum.StrEnum):
    """Spectral bands in feature order."""
    LF = 'LF'
    MF = 'MF'
    HF = 'HF'


FREQUENCY_FEATURES = (
    *(f'{band}_sum' for band in Band),
    *(f'{band}_pct' for band in Band),
    *(f'{band}_se' for band in Band),
)
"""Names of the 9 frequency-domain features."""


@dataclasses.dataclass(frozen=True)
class SpectrumGrid:
    """One-sided power spectrum.

    Power is normalized so it sums to the mean square of the sequence.
    """

    frequencies: np.ndarray
    power: np.ndarray
    n: int

    @property
    def total_power(self) -> float:
        """Returns the power summed over all bins, DC included."""
        return float(self.power.sum())


class BandDefinition(BaseModel):
    """Band edges in cycles/day.

    LF is `[0, lf_upper)` and includes DC, MF is `[lf_upper, mf_upper]`,
    HF is `(mf_upper, Nyquist]`.
    """

    model_config = ConfigDict(frozen=True)

    lf_upper: float = Field(default=0.75, gt=0)
    mf_upper: float = Field(default=1.25, gt=0)

    @model_validator(mode='after')
    def _check_order(self) -> 'BandDefinition':
        if self.lf_upper >= self.mf_upper:
            raise ValueError('LF upper edge must be below MF upper edge')
        return self

    @classmethod
    def parse(cls, text: str) -> 'BandDefinition':
        """Create bands from a `lf_upper,mf_upper` string.

        Args:
            text (str): Two comma-separated edges, e.g. `0.75,1.25`.

        Returns:
            BandDefinition: Parsed bands.

        Raises:
            ValueError: Malformed edges.
        """
        parts = [p.strip() for p in text.split(',')]
        if len(parts) != 2:
            raise ValueError(f'Expected two band edges, got {text!r}')
        return cls(lf_upper=float(parts[0]), mf_upper=float(parts[1]))

    def mask(self, band: Band, frequencies: np.ndarray) -> np.ndarray:
        """Returns a boolean mask of bins belonging to a band.

        Args:
            band (Band): Band to select.
            frequencies (ndarray): Bin frequencies in cycles/day.
        """
        match band:
            case Band.LF:
                return frequencies < self.lf_upper
            case Band.MF:
                return (frequencies >= self.lf_upper) & (
                    frequencies <= self.mf_upper
                )
            case Band.HF:
                return frequencies > self.mf_upper


@dataclasses.dataclass(frozen=True)
class SpectralFeatures:
    """Named spectral features with flags for degenerate cases."""

    values: dict[str, float]
    flags: tuple[str, ...] = ()


def power_spectrum(
    sequence: np.ndarray,
    samples_per_day: int = HOURS_PER_DAY,
) -> SpectrumGrid:
    """Compute the one-sided power spectrum of a sequence.

    `power[k] = |X_k|^2 / n^2`, doubled for bins having a negative
    frequency mirror, so the powers sum to the mean square.

    Args:
        sequence (ndarray): Fully populated sequence.
        samples_per_day (int): Sampling rate in samples per day.

    Returns:
        SpectrumGrid: Spectrum on the cycles/day axis.

    Raises:
        FeatureError: The sequence is shorter than one day or has gaps.
    """
    sequence = np.asarray(sequence, dtype=float)
    n = sequence.size
    if n < samples_per_day or not np.isfinite(sequence).all():
        raise FeatureError(
            f'Spectrum needs at least {samples_per_day} finite values',
        )
    coefficients = np.fft.rfft(sequence)
    power = np.abs(coefficients) ** 2 / n**2
    # Nyquist bin of an even-length sequence has no mirror
    mirrored_end = power.size if n % 2 else power.size - 1
    power[1:mirrored_end] *= 2
    frequencies = np.arange(power.size) * samples_per_day / n
    return SpectrumGrid(frequencies=frequencies, power=power, n=n)


def band_features(
    spectrum: SpectrumGrid,
    bands: BandDefinition | None = None,
) -> SpectralFeatures:
    """Compute power sums and power shares of every band.

    Args:
        spectrum (SpectrumGrid): Power spectrum.
        bands (Optional[BandDefinition]): Band edges.

    Returns:
        SpectralFeatures: `<band>_sum` and `<band>_pct` values; shares
            are 0 and flagged if the spectrum has no power.
    """
    bands = bands or BandDefinition()
    total = spectrum.total_power
    sums = {
        band: float(spectrum.power[bands.mask(band, spectrum.frequencies)].sum())
        for band in Band
    }
    values = {f'{band}_sum': sums[band] for band in Band}
    flags = []
    if total > 0:
        values.update({f'{band}_pct': sums[band] / total for band in Band})
    else:
        values.update({f'{band}_pct': 0.0 for band in Band})
        flags.append('zero_power')
    return SpectralFeatures(values=values, flags=tuple(flags))


def band_spectral_entropy(
    spectrum: SpectrumGrid,
    bands: BandDefinition | None = None,
) -> SpectralFeatures:
    """Compute normalized spectral entropy of every band.

    Power within a band is normalized to a distribution whose Shannon
    entropy is divided by the log of the band's bin count, so values lie
    in [0, 1].

    Args:
        spectrum (SpectrumGrid): Power spectrum.
        bands (Optional[BandDefinition]): Band edges.

    Returns:
        SpectralFeatures: `<band>_se` values; bands without power or
            with a single bin get 0 and a flag.

    Raises:
        FeatureError: A band has no bins.
    """
    bands = bands or BandDefinition()
    values = {}
    flags = []
    for band in Band:
        power = spectrum.power[bands.mask(band, spectrum.frequencies)]
        if power.size == 0:
            raise FeatureError(f'Band {band} has no spectrum bins')
        if power.size == 1:
            values[f'{band}_se'] = 0.0
            flags.append(f'{band}_se:single_bin')
        elif not power.sum() > 0:
            values[f'{band}_se'] = 0.0
            flags.append(f'{band}_se:zero_power')
        else:
            entropy = scipy.stats.entropy(power) / np.log(power.size)
            values[f'{band}_se'] = float(np.clip(entropy, 0.0, 1.0))
    return SpectralFeatures(values=values, flags=tuple(flags))
