import math

import numpy as np
import pytest

from features import Band
from features import BandDefinition
from features import FREQUENCY_FEATURES
from features import FeatureError
from features import SpectrumGrid
from features import band_features
from features import band_spectral_entropy
from features import power_spectrum
import oracles


def sinusoid(cycles, n=336, amplitude=3.0):
    t = np.arange(n)
    return amplitude * np.sin(2 * np.pi * cycles * t / n)


def all_features(sequence, bands=None):
    spectrum = power_spectrum(sequence)
    return {
        **band_features(spectrum, bands).values,
        **band_spectral_entropy(spectrum, bands).values,
    }


class TestPowerSpectrum:

    def test_frequency_axis(self):
        spectrum = power_spectrum(np.ones(240))
        assert spectrum.frequencies.size == 121
        assert spectrum.frequencies[10] == pytest.approx(1.0)
        assert spectrum.frequencies[-1] == pytest.approx(12.0)

    def test_constant_sequence_is_all_dc(self):
        spectrum = power_spectrum(np.full(240, 2.0))
        assert spectrum.power[0] == pytest.approx(4.0)
        assert np.abs(spectrum.power[1:]).max() < 1e-20

    def test_sinusoid_power(self):
        spectrum = power_spectrum(sinusoid(14))
        assert spectrum.frequencies[14] == pytest.approx(1.0)
        assert spectrum.power[14] == pytest.approx(3.0**2 / 2)
        others = np.delete(spectrum.power, 14)
        assert others.max() <= 1e-12

    @pytest.mark.parametrize('n', [240, 251, 336])
    def test_power_sums_to_mean_square(self, rng, n):
        sequence = rng.poisson(15, size=n).astype(float)
        spectrum = power_spectrum(sequence)
        assert spectrum.total_power == pytest.approx(np.mean(sequence**2))

    @pytest.mark.parametrize('n', [240, 251, 336])
    def test_matches_direct_dft(self, rng, n):
        sequence = rng.normal(10, 4, size=n)
        spectrum = power_spectrum(sequence)
        frequencies, power = oracles.power_spectrum(sequence)
        np.testing.assert_allclose(spectrum.frequencies, frequencies)
        np.testing.assert_allclose(spectrum.power, power, rtol=1e-8, atol=1e-12)

    def test_circular_shift_invariance(self, rng):
        sequence = rng.poisson(15, size=336).astype(float)
        base = power_spectrum(sequence).power
        shifted = power_spectrum(np.roll(sequence, 5)).power
        np.testing.assert_allclose(shifted, base, rtol=1e-9, atol=1e-12)

    def test_shorter_than_a_day(self):
        with pytest.raises(FeatureError):
            power_spectrum(np.ones(23))

    def test_gaps_rejected(self):
        sequence = np.ones(48)
        sequence[3] = np.nan
        with pytest.raises(FeatureError):
            power_spectrum(sequence)


class TestBandDefinition:

    def test_parse(self):
        bands = BandDefinition.parse(' 0.5, 1.5 ')
        assert (bands.lf_upper, bands.mf_upper) == (0.5, 1.5)

    @pytest.mark.parametrize('text', ['1', '0.5,1,2', '1.5,0.5', 'a,b'])
    def test_parse_errors(self, text):
        with pytest.raises(ValueError):
            BandDefinition.parse(text)

    def test_default_band_bins(self):
        bands = BandDefinition()
        frequencies = power_spectrum(np.ones(240)).frequencies
        assert np.flatnonzero(bands.mask(Band.LF, frequencies)).tolist() == list(range(8))
        assert np.flatnonzero(bands.mask(Band.MF, frequencies)).tolist() == list(
            range(8, 13),
        )
        frequencies = power_spectrum(np.ones(336)).frequencies
        assert np.flatnonzero(bands.mask(Band.MF, frequencies)).tolist() == list(
            range(11, 18),
        )

    def test_bands_partition_the_axis(self):
        bands = BandDefinition()
        frequencies = power_spectrum(np.ones(336)).frequencies
        counts = sum(bands.mask(band, frequencies).astype(int) for band in Band)
        assert (counts == 1).all()


class TestBandFeatures:

    def test_feature_names(self):
        assert FREQUENCY_FEATURES == (
            'LF_sum', 'MF_sum', 'HF_sum',
            'LF_pct', 'MF_pct', 'HF_pct',
            'LF_se', 'MF_se', 'HF_se',
        )
        assert tuple(all_features(np.ones(240) + np.arange(240) % 3)) == (
            FREQUENCY_FEATURES
        )

    def test_constant_sequence_is_all_lf(self):
        features = band_features(power_spectrum(np.full(240, 3.0))).values
        assert features['LF_sum'] == pytest.approx(9.0)
        assert features['LF_pct'] == pytest.approx(1.0)
        assert features['MF_sum'] == pytest.approx(0.0, abs=1e-20)

    def test_daily_rhythm_is_mf(self):
        features = band_features(power_spectrum(sinusoid(14))).values
        assert features['MF_pct'] == pytest.approx(1.0)
        assert features['MF_sum'] == pytest.approx(4.5)

    def test_twice_daily_rhythm_is_hf(self):
        features = band_features(power_spectrum(sinusoid(28))).values
        assert features['HF_pct'] == pytest.approx(1.0)

    def test_shares_sum_to_one(self, random_interval):
        features = band_features(power_spectrum(random_interval.sequence)).values
        assert sum(features[f'{band}_pct'] for band in Band) == pytest.approx(1.0)

    def test_scaling(self, random_interval):
        base = all_features(random_interval.sequence)
        scaled = all_features(random_interval.sequence * 3.0)
        for name, value in base.items():
            if name.endswith('_sum'):
                assert scaled[name] == pytest.approx(9.0 * value)
            else:
                assert scaled[name] == pytest.approx(value)

    def test_zero_power(self):
        features = band_features(power_spectrum(np.zeros(48)))
        assert features.flags == ('zero_power',)
        assert all(features.values[f'{band}_pct'] == 0.0 for band in Band)

    def test_matches_oracle(self, rng):
        for n_days in (10, 12, 14):
            sequence = rng.poisson(12, size=24 * n_days).astype(float)
            features = all_features(sequence)
            expected = oracles.frequency_features(sequence)
            for name, value in expected.items():
                assert features[name] == pytest.approx(value, rel=1e-8, abs=1e-10)


class TestSpectralEntropy:

    @staticmethod
    def spectrum(power):
        # LF holds 2 bins, MF 1 bin and HF 7 bins
        frequencies = np.array([0.0, 0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0])
        return SpectrumGrid(
            frequencies=frequencies,
            power=np.asarray(power, dtype=float),
            n=18,
        )

    def test_known_values(self):
        spectrum = self.spectrum([1, 1, 5, 1, 1, 0, 0, 0, 0, 0])
        result = band_spectral_entropy(spectrum)
        assert result.values['LF_se'] == pytest.approx(1.0)
        assert result.values['MF_se'] == 0.0
        assert result.values['HF_se'] == pytest.approx(math.log(2) / math.log(7))
        assert result.values['HF_se'] == pytest.approx(0.3562, abs=1e-4)
        assert result.flags == ('MF_se:single_bin',)

    def test_concentrated_power(self):
        spectrum = self.spectrum([4, 0, 1, 0, 0, 0, 3, 0, 0, 0])
        result = band_spectral_entropy(spectrum)
        assert result.values['LF_se'] == 0.0
        assert result.values['HF_se'] == 0.0

    def test_zero_power_band(self):
        spectrum = self.spectrum([1, 2, 1, 0, 0, 0, 0, 0, 0, 0])
        result = band_spectral_entropy(spectrum)
        assert result.values['HF_se'] == 0.0
        assert 'HF_se:zero_power' in result.flags

    def test_values_in_unit_interval(self, rng):
        for _ in range(20):
            sequence = rng.poisson(rng.uniform(1, 30), size=336).astype(float)
            values = band_spectral_entropy(power_spectrum(sequence)).values
            assert all(0.0 <= v <= 1.0 for v in values.values())

    def test_empty_band(self):
        bands = BandDefinition(lf_upper=0.75, mf_upper=0.78)
        with pytest.raises(FeatureError):
            band_spectral_entropy(power_spectrum(np.arange(240.0)), bands)
