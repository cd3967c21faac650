from pathlib import Path

import pytest

from application import ExitCode
from application import exit_code_of
from cli import CliError
from cli import CvAuditCommand
from cli import ExtractCommand
from cli import IngestCommand
from cli import PredictCommand
from cli import RunAllCommand
from cli import SimulateCommand
from cli import parse_command
from evaluation import EvaluationError
from features.errors import FeatureError
from inference import InferenceError
from ingestion import IngestionError
from main import main
from model import ArtifactError
from model import ArtifactMissingError
from model import DatasetError
from model.validation import ValidationReport
from prediction import PredictionError
from prediction import Scheme


def parse(*args):
    return parse_command(list(args), exit_on_error=False)


class TestParseCommand:

    def test_kebab_case_flags(self):
        command = parse('extract', '--mse-m', '3', '--fd-bands', '0.5,1.5')
        assert isinstance(command, ExtractCommand)
        assert command.mse_params.m == 3
        assert command.bands.lf_upper == 0.5
        assert command.bands.mf_upper == 1.5

    def test_kebab_case_subcommands(self):
        command = parse('cv-audit', '--scheme', 'loo')
        assert isinstance(command, CvAuditCommand)
        assert command.scheme == Scheme.LOO

    def test_implicit_flags(self):
        command = parse('predict', '--demo', 'demo.csv', '--clip')
        assert isinstance(command, PredictCommand)
        assert command.clip
        assert not command.include_noise
        assert command.schemes == list(Scheme)
        assert command.models == ['hblr', 'hblr-stat', 'baseline', 'lasso', 'last']

    def test_single_model(self):
        command = parse('predict', '--demo', 'demo.csv', '--model', 'lasso')
        assert command.models == ['lasso']

    def test_defaults(self):
        command = parse('run-all', '--scans', 's.csv', '--phq8', 'p.csv', '--demo', 'd.csv')
        assert isinstance(command, RunAllCommand)
        assert command.seed == 42
        assert command.tz == 'UTC'
        assert command.cutoff is None
        assert (command.chains, command.draws, command.burn) == (4, 2000, 1000)
        assert command.mse_params.r_factor == 0.15

    def test_paths_are_resolved(self, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        command = parse('simulate', '--out-dir', 'synth')
        assert isinstance(command, SimulateCommand)
        assert command.out_dir == tmp_path.resolve() / 'synth'
        assert command.spec is None

    def test_rejections_next_to_intervals(self, tmp_path):
        out = tmp_path / 'run' / 'intervals.jsonl'
        command = parse('ingest', '--scans', 's.csv', '--phq8', 'p.csv', '--out', str(out))
        assert isinstance(command, IngestCommand)
        assert command.rejections_path == out.resolve().with_name('rejections.csv')

    def test_metadata(self):
        command = parse('extract', '--seed', '7')
        metadata = command.to_metadata()
        assert metadata['command'] == 'extract'
        assert metadata['seed'] == 7
        assert metadata['fd_bands'] == '0.75,1.25'

    @pytest.mark.parametrize('args', [
        [],
        ['ingest'],
        ['ingest', '--scans', 's.csv', '--phq8', 'p.csv', '--tz', 'Mars/Olympus'],
        ['extract', '--fd-bands', '1.5,0.5'],
        ['extract', '--mse-m', '0'],
        ['extract', '--nope', '1'],
        ['predict', '--demo', 'd.csv', '--model', 'forest'],
        ['predict', '--demo', 'd.csv', '--draws', '10', '--burn', '8'],
        ['simulate', '--seed', '-1'],
    ])
    def test_invalid_arguments(self, args):
        with pytest.raises(CliError):
            parse(*args)


class TestMain:

    @pytest.fixture(autouse=True)
    def _isolated(self, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        monkeypatch.setenv('PROXIPHENE_THREADS', '1')

    def test_usage_error(self):
        assert main([]) == ExitCode.USAGE

    def test_argument_syntax_exits(self):
        with pytest.raises(SystemExit) as info:
            main(['extract', '--nope', '1'])
        assert info.value.code == 2

    def test_missing_upstream_artifact(self, tmp_path):
        code = main([
            'extract',
            '--intervals', str(tmp_path / 'intervals.jsonl'),
            '--out', str(tmp_path / 'features.csv'),
        ])
        assert code == ExitCode.MISSING_ARTIFACT
        assert not (tmp_path / 'features.csv').exists()

    def test_missing_input_table(self, tmp_path):
        code = main([
            'ingest',
            '--scans', str(tmp_path / 'scans.csv'),
            '--phq8', str(tmp_path / 'phq8.csv'),
        ])
        assert code == ExitCode.IO_FAILURE

    def test_invalid_data(self, tmp_path):
        (tmp_path / 'scans.csv').write_text(
            'participant_id,timestamp,device_count\nP1,yesterday,3\n',
            encoding='utf-8',
        )
        (tmp_path / 'phq8.csv').write_text(
            'participant_id,date,score\nP1,2019-01-15,30\n',
            encoding='utf-8',
        )
        code = main([
            'ingest',
            '--scans', str(tmp_path / 'scans.csv'),
            '--phq8', str(tmp_path / 'phq8.csv'),
        ])
        assert code == ExitCode.INVALID_DATA

    def test_simulate(self, tmp_path):
        out = tmp_path / 'synth'
        spec = tmp_path / 'spec.json'
        spec.write_text(
            '{"n_participants": 2, "min_intervals": 1, "max_intervals": 2}',
            encoding='utf-8',
        )
        code = main(['simulate', '--spec', str(spec), '--out-dir', str(out)])
        assert code == ExitCode.OK
        assert sorted(p.name for p in out.iterdir()) == [
            'demographics.csv', 'ground_truth.json', 'phq8.csv', 'scans.csv',
        ]

    def test_invalid_generator_spec(self, tmp_path):
        spec = tmp_path / 'spec.json'
        spec.write_text('{"participants": 2}', encoding='utf-8')
        code = main(['simulate', '--spec', str(spec), '--out-dir', str(tmp_path)])
        assert code == ExitCode.USAGE


@pytest.mark.parametrize(('error', 'code'), [
    (CliError('bad'), ExitCode.USAGE),
    (DatasetError(ValidationReport()), ExitCode.INVALID_DATA),
    (IngestionError('bad'), ExitCode.INVALID_DATA),
    (FeatureError('bad'), ExitCode.INVALID_DATA),
    (ArtifactMissingError(Path('features.csv'), 'extract'), ExitCode.MISSING_ARTIFACT),
    (ArtifactError('bad'), ExitCode.IO_FAILURE),
    (InferenceError('bad'), ExitCode.MODEL_FAILURE),
    (PredictionError('bad'), ExitCode.MODEL_FAILURE),
    (EvaluationError('bad'), ExitCode.MODEL_FAILURE),
    (RuntimeError('bad'), ExitCode.INTERNAL),
])
def test_exit_codes(error, code):
    assert exit_code_of(error) == code


def test_missing_artifact_names_step():
    error = ArtifactMissingError(Path('intervals.jsonl'), 'ingest')
    assert '`proxiphene ingest`' in str(error)
