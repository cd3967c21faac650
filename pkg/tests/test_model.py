import datetime
import json

import numpy as np
import pandas as pd
import pytest

from model import ArtifactError
from model import ArtifactMissingError
from model import ArtifactStore
from model import DatasetError
from model import DayGrid
from model import Demographics
from model import Gender
from model import NbdcInterval
from model import Phq8Record
from model import RunMetadata
from model import ScanRecord
from model import SeverityBand
from model import validate_dataset
from model import validate_demographics
from model.store import METADATA_PREFIX
from model.store import to_jsonable
from model.tables import covariates_frame
from model.tables import demographics_records
from model.tables import phq8_records
from model.types import InvalidRecordError

UTC = datetime.timezone.utc


def scans_table(rows):
    return pd.DataFrame(rows, columns=['participant_id', 'timestamp', 'device_count'])


def phq8_table(rows):
    return pd.DataFrame(rows, columns=['participant_id', 'date', 'score'])


def demographics_table(rows):
    return pd.DataFrame(
        rows,
        columns=['participant_id', 'age', 'gender', 'education_years'],
    )


def metadata(**statistics):
    return RunMetadata(
        tool_version='0.1.0',
        command='extract',
        config={'seed': 42},
        input_hashes={'intervals.jsonl': 'abc'},
        seed=42,
        statistics=statistics,
    )


class TestSeverityBand:

    @pytest.mark.parametrize(
        ('score', 'band'),
        [
            (0, SeverityBand.ASYMPTOMATIC),
            (4, SeverityBand.ASYMPTOMATIC),
            (5, SeverityBand.MILD),
            (9, SeverityBand.MILD),
            (10, SeverityBand.MODERATE),
            (14, SeverityBand.MODERATE),
            (15, SeverityBand.MODERATELY_SEVERE),
            (19, SeverityBand.MODERATELY_SEVERE),
            (20, SeverityBand.SEVERE),
            (24, SeverityBand.SEVERE),
        ],
    )
    def test_boundaries_belong_to_higher_band(self, score, band):
        assert SeverityBand.from_score(score) == band

    def test_every_score_has_one_band(self):
        bands = [SeverityBand.from_score(score) for score in range(25)]
        assert bands == sorted(bands, key=list(SeverityBand).index)

    @pytest.mark.parametrize('score', [-1, 25, 3.5, True])
    def test_rejects_bad_scores(self, score):
        with pytest.raises(InvalidRecordError):
            SeverityBand.from_score(score)


class TestRecords:

    def test_scan_needs_offset(self):
        with pytest.raises(InvalidRecordError):
            ScanRecord('P1', datetime.datetime(2019, 1, 1, 10), 3)

    def test_scan_rejects_negative_count(self):
        with pytest.raises(InvalidRecordError):
            ScanRecord('P1', datetime.datetime(2019, 1, 1, tzinfo=UTC), -1)

    def test_phq8_severity(self):
        record = Phq8Record('P1', datetime.date(2019, 1, 1), 12)
        assert record.severity == SeverityBand.MODERATE

    @pytest.mark.parametrize(
        ('text', 'gender'),
        [
            ('Female', Gender.FEMALE),
            (' f ', Gender.FEMALE),
            ('M', Gender.MALE),
            ('non-binary', Gender.OTHER),
            ('', Gender.OTHER),
        ],
    )
    def test_gender_parse(self, text, gender):
        assert Gender.parse(text) == gender

    def test_female_indicator(self):
        female = Demographics('P1', 30, Gender.FEMALE, 12)
        other = Demographics('P2', 30, Gender.OTHER, 12)
        assert (female.female, other.female) == (1.0, 0.0)

    def test_demographics_rejects_negative_age(self):
        with pytest.raises(InvalidRecordError):
            Demographics('P1', -1, Gender.MALE, 12)


class TestDayGrid:

    def test_validity_threshold(self):
        hours = [1.0] * 12 + [None] * 12
        assert DayGrid('P1', datetime.date(2019, 1, 1), tuple(hours)).valid
        hours = [1.0] * 11 + [None] * 13
        assert not DayGrid('P1', datetime.date(2019, 1, 1), tuple(hours)).valid

    def test_imputed_slots_are_not_observed(self):
        day = DayGrid(
            'P1',
            datetime.date(2019, 1, 1),
            tuple([1.0] * 24),
            imputed=tuple(range(13)),
        )
        assert day.n_observed == 11
        assert not day.valid
        assert day.populated

    def test_needs_24_slots(self):
        with pytest.raises(InvalidRecordError):
            DayGrid('P1', datetime.date(2019, 1, 1), (1.0,) * 23)

    def test_rejects_negative_slot(self):
        with pytest.raises(InvalidRecordError):
            DayGrid('P1', datetime.date(2019, 1, 1), (-1.0,) + (1.0,) * 23)


class TestNbdcInterval:

    def test_sequence_and_matrix(self, interval_factory):
        values = np.arange(10 * 24, dtype=float)
        interval = interval_factory(values)
        assert interval.n_valid_days == 10
        np.testing.assert_array_equal(interval.sequence, values)
        assert interval.daily_matrix().shape == (10, 24)
        assert interval.key == 'P1@2019-03-15'

    @pytest.mark.parametrize('n_days', [9, 15])
    def test_day_count_bounds(self, interval_factory, n_days):
        with pytest.raises(InvalidRecordError):
            interval_factory(np.ones(n_days * 24))

    def test_days_inside_window(self):
        completion = datetime.date(2019, 3, 15)
        days = tuple(
            DayGrid('P1', completion - datetime.timedelta(days=d), (1.0,) * 24)
            for d in range(10, 0, -1)
        )
        days = (*days[1:], DayGrid('P1', completion, (1.0,) * 24))
        with pytest.raises(InvalidRecordError):
            NbdcInterval('P1', Phq8Record('P1', completion, 3), days)

    def test_days_populated(self):
        completion = datetime.date(2019, 3, 15)
        days = [
            DayGrid('P1', completion - datetime.timedelta(days=d), (1.0,) * 24)
            for d in range(10, 0, -1)
        ]
        days[3] = DayGrid(days[3].participant_id, days[3].date, (None,) + (1.0,) * 23)
        with pytest.raises(InvalidRecordError):
            NbdcInterval('P1', Phq8Record('P1', completion, 3), tuple(days))


class TestValidation:

    def test_valid_dataset_accepted(self):
        report = validate_dataset(
            scans_table([('P1', '2019-01-01T10:15:00+00:00', '3')]),
            phq8_table([('P1', '2019-01-15', '7')]),
            demographics_table([('P1', '34', 'female', '16')]),
        )
        assert report.accepted
        assert report.issues == ()

    def test_empty_tables_accepted(self):
        report = validate_dataset(scans_table([]), phq8_table([]), demographics_table([]))
        assert report.accepted

    def test_missing_columns_fatal(self):
        scans = pd.DataFrame({'participant_id': ['P1'], 'device_count': ['1']})
        report = validate_dataset(scans, phq8_table([]))
        assert not report.accepted
        assert 'timestamp' in str(report.fatal[0])

    def test_fatal_rules(self):
        report = validate_dataset(
            scans_table([
                ('P1', '2019-01-01T10:15:00+00:00', '-2'),
                ('P1', 'yesterday', '3'),
                ('', '2019-01-01T11:15:00+00:00', '1.5'),
            ]),
            phq8_table([('P1', '2019-01-15', '25'), ('P1', '15/01/2019', '3')]),
            demographics_table([
                ('P1', '34', 'female', '16'),
                ('P1', '35', 'female', '16'),
            ]),
        )
        rules = {(str(i.table), i.rule, i.rows) for i in report.fatal}
        assert ('scans', 'negative device_count', (1,)) in rules
        assert ('scans', 'unparseable timestamp', (2,)) in rules
        assert ('scans', 'empty participant_id', (3,)) in rules
        assert ('scans', 'device_count is not an integer', (3,)) in rules
        assert ('phq8', 'score outside 0..24', (1,)) in rules
        assert ('phq8', 'unparseable date', (2,)) in rules
        assert ('demographics', 'duplicate participant_id', (1, 2)) in rules

    def test_timestamp_needs_utc_offset(self):
        report = validate_dataset(
            scans_table([
                ('P1', '2019-03-01T23:30:00', '3'),
                ('P1', '2019-03-01T23:30:00+01:00', '3'),
                ('P1', '2019-03-01T23:30:00Z', '3'),
                ('P1', '2019-03-01T23:30:00-0500', '3'),
                ('P1', '2019-03-01', '3'),
            ]),
            phq8_table([]),
        )
        assert not report.accepted
        rules = {i.rule: i.rows for i in report.fatal}
        assert rules == {'timestamp has no UTC offset': (1, 5)}

    def test_orphans_are_warnings(self):
        report = validate_dataset(
            scans_table([('P2', '2019-01-01T10:15:00+00:00', '3')]),
            phq8_table([('P3', '2019-01-15', '7')]),
            demographics_table([('P1', '34', 'male', '16')]),
        )
        assert report.accepted
        details = sorted(issue.detail for issue in report.warnings)
        assert details == ['P2', 'P3']

    def test_demographics_alone(self):
        report = validate_demographics(
            demographics_table([('P1', 'old', 'male', '16')]),
        )
        assert not report.accepted
        error = DatasetError(report)
        assert 'age is not a non-negative number' in str(error)
        assert error.report is report


class TestTables:

    def test_conversions(self):
        phq8 = phq8_records(phq8_table([('P1', '2019-01-15', '7')]))
        assert phq8 == [Phq8Record('P1', datetime.date(2019, 1, 15), 7)]
        demographics = demographics_records(
            demographics_table([('P1', '34', 'F', '16'), ('P2', '40', 'male', '12')]),
        )
        covariates = covariates_frame(demographics)
        assert covariates.loc['P1'].tolist() == [34.0, 1.0, 16.0]
        assert covariates.loc['P2', 'female'] == 0.0


class TestArtifactStore:

    def test_table_round_trip_with_metadata(self, tmp_path):
        store = ArtifactStore()
        path = tmp_path / 'out' / 'features.csv'
        frame = pd.DataFrame({
            'participant_id': ['007', '008'],
            'date': ['2019-01-15', '2019-01-29'],
            'value': [1.5, np.nan],
        })
        store.write_table(path, frame, metadata(n_rows=2))
        assert path.read_text().startswith(METADATA_PREFIX)
        read = store.read_table(path, 'extract')
        assert read['participant_id'].tolist() == ['007', '008']
        assert read['value'].iloc[0] == 1.5
        assert np.isnan(read['value'].iloc[1])
        assert store.read_metadata(path, 'extract')['statistics'] == {'n_rows': 2}

    def test_json_round_trip(self, tmp_path):
        store = ArtifactStore()
        path = tmp_path / 'lrt.json'
        store.write_json(path, {'chi2': np.float64(2.5), 'r2': float('nan')}, metadata())
        assert store.read_json(path, 'lrt') == {'chi2': 2.5, 'r2': None}
        assert store.read_metadata(path, 'lrt')['command'] == 'extract'

    def test_intervals_round_trip(self, tmp_path, random_interval):
        store = ArtifactStore()
        path = tmp_path / 'intervals.jsonl'
        assert store.write_intervals(path, [random_interval], metadata()) == 1
        first = json.loads(path.read_text().splitlines()[0])
        assert 'metadata' in first
        [read] = store.read_intervals(path, 'ingest')
        assert read.key == random_interval.key
        assert [d.date for d in read.days] == [d.date for d in random_interval.days]
        np.testing.assert_array_equal(read.sequence, random_interval.sequence)

    @pytest.mark.parametrize('key', ['day_dates', 'sequence'])
    def test_intervals_need_every_field(self, tmp_path, random_interval, key):
        store = ArtifactStore()
        path = tmp_path / 'intervals.jsonl'
        store.write_intervals(path, [random_interval], metadata())
        header, line = path.read_text().splitlines()
        record = json.loads(line)
        del record[key]
        path.write_text(f'{header}\n{json.dumps(record)}\n')
        with pytest.raises(ArtifactError):
            store.read_intervals(path, 'ingest')

    def test_markdown_metadata_is_a_comment(self, tmp_path):
        store = ArtifactStore()
        path = tmp_path / 'report.md'
        store.write_markdown(path, '# Title\n', metadata())
        first, rest = path.read_text().split('\n', 1)
        assert first.startswith('<!-- proxiphene-metadata: {')
        assert first.endswith('-->')
        assert rest == '# Title\n'

    def test_input_table_skips_metadata(self, tmp_path):
        store = ArtifactStore()
        path = tmp_path / 'phq8.csv'
        store.write_table(path, phq8_table([('007', '2019-01-15', 7)]), metadata())
        raw = store.read_input_table(path)
        assert raw.to_dict('list') == {
            'participant_id': ['007'],
            'date': ['2019-01-15'],
            'score': ['7'],
        }

    def test_missing_artifact_names_step(self, tmp_path):
        with pytest.raises(ArtifactMissingError, match='proxiphene extract'):
            ArtifactStore().read_table(tmp_path / 'features.csv', 'extract')

    def test_missing_input_table(self, tmp_path):
        with pytest.raises(ArtifactError):
            ArtifactStore().read_input_table(tmp_path / 'scans.csv')

    def test_to_jsonable(self):
        value = to_jsonable({
            'a': np.array([1.0, np.inf]),
            'b': datetime.date(2019, 1, 1),
            'c': (np.int64(3), np.bool_(True)),
        })
        assert value == {'a': [1.0, None], 'b': '2019-01-01', 'c': [3, True]}
