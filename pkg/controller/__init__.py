"""This package implements the pipeline steps behind every subcommand."""

from collections.abc import Iterable
from collections.abc import Mapping
from collections.abc import Sequence
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd
from pydantic import ValidationError

from cli import AssociateCommand
from cli import CliError
from cli import CvAuditCommand
from cli import ExtractCommand
from cli import FeatureOptions
from cli import IngestCommand
from cli import InputOptions
from cli import LrtCommand
from cli import PredictCommand
from cli import ReportCommand
from cli import RunAllCommand
from cli import RunConfig
from cli import SamplerOptions
from cli import SimulateCommand
from cli import SummarizeCommand
from config import VERSION
from evaluation import CvSplit
from evaluation import EvaluationError
from evaluation import PREDICTION_COLUMNS
from evaluation import RegressorFactory
from evaluation import check_no_leakage
from evaluation import interval_table
from evaluation import make_splits
from evaluation import run_cv
from evaluation import select_prediction_cohort
from features.extractor import FLAGS_COLUMN
from features.extractor import FeatureExtractor
from features.extractor import ID_COLUMNS
from features.statistical import STATISTICAL_FEATURES
from inference import InferenceError
from inference import NestedComparison
from inference import associations_frame
from inference import nested_model_tests
from inference import pairwise_associations
from inference import spearman_matrix
from ingestion import AssemblyResult
from ingestion import assemble_intervals
from ingestion import bin_scans_to_days
import log
from messages import Messages
from model import ArtifactError
from model import ArtifactStore
from model import DatasetError
from model import Demographics
from model import RunMetadata
from model import validate_dataset
from model import validate_demographics
from model.store import file_digest
from model.tables import covariates_frame
from model.tables import demographics_records
from model.tables import phq8_records
from prediction import MODEL_SPECS
from prediction import HblrSettings
from prediction import ModelSpec
from prediction import Regressor
from prediction import Scheme
from prediction import create_regressor
from synthetic import GeneratorSpec
from synthetic import SyntheticCohort
from synthetic import generate_cohort

from . import report
from .summary import CohortSummary
from .summary import summarize_cohort


class Controller:
    """Runs pipeline steps and persists their artifacts.

    Public methods implement one subcommand each. Every output embeds a
    metadata block with the run configuration and input hashes.
    """

    def __init__(self, store: ArtifactStore, threads: int = 1) -> None:
        """Initialize controller object.

        Args:
            store (ArtifactStore): Artifact store.
            threads (int): Worker threads handed to parallel steps.
        """
        self._store = store
        self._threads = max(1, threads)
        self._logger = log.create_logger(self)

    def ingest(self, command: IngestCommand) -> AssemblyResult:
        """Validate raw tables and write assembled intervals.

        Args:
            command (IngestCommand): Run configuration.

        Returns:
            AssemblyResult: Intervals, rejections and retention.
        """
        return self._ingest(
            command,
            command,
            command.demo,
            command.out,
            command.rejections_path,
        )

    def extract(self, command: ExtractCommand) -> pd.DataFrame:
        """Write the features table of ingested intervals.

        Args:
            command (ExtractCommand): Run configuration.

        Returns:
            DataFrame: Features table.
        """
        return self._extract(command, command, command.intervals, command.out)

    def associate(self, command: AssociateCommand) -> pd.DataFrame:
        """Write feature associations with PHQ-8.

        Args:
            command (AssociateCommand): Run configuration.

        Returns:
            DataFrame: Associations table.
        """
        return self._associate(
            command,
            command.features,
            command.demo,
            command.out,
        )

    def lrt(self, command: LrtCommand) -> NestedComparison:
        """Write likelihood-ratio tests of the nested models.

        Args:
            command (LrtCommand): Run configuration.

        Returns:
            NestedComparison: Fits and tests.
        """
        return self._lrt(command, command.features, command.demo, command.out)

    def predict(self, command: PredictCommand) -> dict[str, Any]:
        """Cross-validate prediction models and write their accuracy.

        Args:
            command (PredictCommand): Run configuration.

        Returns:
            dict[str, Any]: Body of the prediction document.
        """
        return self._predict(
            command,
            command,
            command.features,
            command.demo,
            command.schemes,
            command.models,
            command.out,
            command.rows,
        )

    def cv_audit(self, command: CvAuditCommand) -> list[CvSplit]:
        """Write every split of a scheme.

        Args:
            command (CvAuditCommand): Run configuration.

        Returns:
            list[CvSplit]: Audited splits.
        """
        return self._cv_audit(
            command,
            command.features,
            command.demo,
            command.scheme,
            command.out,
        )

    def simulate(self, command: SimulateCommand) -> SyntheticCohort:
        """Write the input tables of a synthetic cohort.

        The generator seed is always the run seed.

        Args:
            command (SimulateCommand): Run configuration.

        Returns:
            SyntheticCohort: Generated tables.

        Raises:
            CliError: The generator spec is invalid.
        """
        spec = self._load_generator_spec(command.spec)
        spec = spec.model_copy(update={'seed': command.seed})
        cohort = generate_cohort(spec)
        metadata = self._metadata(command, [command.spec])
        out = command.out_dir
        self._store.write_table(out / 'scans.csv', cohort.scans, metadata)
        self._store.write_table(out / 'phq8.csv', cohort.phq8, metadata)
        self._store.write_table(
            out / 'demographics.csv',
            cohort.demographics,
            metadata,
        )
        self._store.write_json(
            out / 'ground_truth.json',
            cohort.ground_truth,
            metadata,
        )
        self._logger.info('Wrote synthetic cohort to %s', out)
        return cohort

    def report(self, command: ReportCommand) -> str:
        """Write the markdown report and plot data.

        Args:
            command (ReportCommand): Run configuration.

        Returns:
            str: Report text.
        """
        return self._report(
            command,
            command.associations,
            command.lrt,
            command.prediction,
            command.features,
            command.intervals,
            command.demo,
            command.out_dir,
        )

    def summarize(self, command: SummarizeCommand) -> CohortSummary:
        """Write the cohort summary.

        Args:
            command (SummarizeCommand): Run configuration.

        Returns:
            CohortSummary: Cohort characteristics.
        """
        return self._summarize(
            command,
            command.features,
            command.demo,
            command.out,
        )

    def run_all(self, command: RunAllCommand) -> None:
        """Run every step, writing all artifacts under one directory.

        Args:
            command (RunAllCommand): Run configuration.
        """
        out = command.out_dir
        intervals = out / 'intervals.jsonl'
        features = out / 'features.csv'
        associations = out / 'associations.csv'
        lrt = out / 'lrt.json'
        prediction = out / 'prediction.json'
        demo = command.demo

        self._ingest(command, command, demo, intervals, out / 'rejections.csv')
        self._extract(command, command, intervals, features)
        self._summarize(command, features, demo, out / 'summary.json')
        self._associate(command, features, demo, associations)
        self._lrt(command, features, demo, lrt)
        for scheme in Scheme:
            self._cv_audit(
                command,
                features,
                demo,
                scheme,
                out / f'splits_{scheme}.json',
            )
        self._predict(
            command,
            command,
            features,
            demo,
            list(Scheme),
            list(MODEL_SPECS),
            prediction,
            out / 'predictions.csv',
        )
        self._report(
            command,
            associations,
            lrt,
            prediction,
            features,
            intervals,
            demo,
            out / 'report',
        )
        self._logger.info('All artifacts written to %s', out)

    def _ingest(
        self,
        config: RunConfig,
        options: InputOptions,
        demo: Path | None,
        out: Path,
        rejections: Path,
    ) -> AssemblyResult:
        raw_scans = self._store.read_input_table(options.scans)
        raw_phq8 = self._store.read_input_table(options.phq8)
        raw_demo = None if demo is None else self._store.read_input_table(demo)
        validation = validate_dataset(raw_scans, raw_phq8, raw_demo)
        if not validation.accepted:
            raise DatasetError(validation)

        days = bin_scans_to_days(raw_scans, options.tz)
        result = assemble_intervals(
            days,
            phq8_records(raw_phq8),
            options.cutoff,
        )
        metadata = self._metadata(
            config,
            [options.scans, options.phq8, demo],
            statistics=result.stats.to_dict(),
        )
        self._store.write_intervals(out, result.intervals, metadata)
        self._store.write_table(rejections, result.rejections_frame(), metadata)
        return result

    def _extract(
        self,
        config: RunConfig,
        options: FeatureOptions,
        intervals_path: Path,
        out: Path,
    ) -> pd.DataFrame:
        intervals = self._store.read_intervals(intervals_path, 'ingest')
        extractor = FeatureExtractor(
            options.mse_params,
            options.bands,
            self._threads,
        )
        frame = extractor.to_frame(extractor.extract_all(intervals))
        self._store.write_table(
            out,
            frame,
            self._metadata(config, [intervals_path]),
        )
        return frame

    def _associate(
        self,
        config: RunConfig,
        features_path: Path,
        demo: Path,
        out: Path,
    ) -> pd.DataFrame:
        table, names = self._analysis_table(features_path, demo)
        results = pairwise_associations(table, names, threads=self._threads)
        frame = associations_frame(results)
        self._store.write_table(
            out,
            frame,
            self._metadata(config, [features_path, demo]),
        )
        return frame

    def _lrt(
        self,
        config: RunConfig,
        features_path: Path,
        demo: Path,
        out: Path,
    ) -> NestedComparison:
        table, names = self._analysis_table(features_path, demo)
        comparison = nested_model_tests(
            table,
            [name for name in STATISTICAL_FEATURES if name in names],
            names,
        )
        payload = {
            'models': {
                str(model): {
                    'description': model.description,
                    'fixed_effects': list(fit.names),
                    'n_params': fit.n_params,
                    'log_likelihood': fit.log_likelihood,
                    'tau2': fit.tau2,
                    'sigma2': fit.sigma2,
                    'dropped': comparison.dropped[model],
                }
                for model, fit in comparison.fits.items()
            },
            'tests': [test.to_dict() for test in comparison.tests],
        }
        self._store.write_json(
            out,
            payload,
            self._metadata(config, [features_path, demo]),
        )
        return comparison

    def _predict(
        self,
        config: RunConfig,
        options: SamplerOptions,
        features_path: Path,
        demo: Path,
        schemes: Sequence[Scheme],
        models: Sequence[str],
        out: Path,
        rows_path: Path | None,
    ) -> dict[str, Any]:
        table, names = self._analysis_table(features_path, demo)
        cohort = self._prediction_cohort(table)
        if cohort.empty:
            raise EvaluationError('No participant qualifies for prediction')
        schemes = [scheme for scheme in Scheme if scheme in schemes]
        splits = {scheme: self._splits(cohort, scheme) for scheme in schemes}
        settings = options.hblr_settings()

        rows = []
        predictions = []
        for name in models:
            spec = MODEL_SPECS[name]
            row: dict[str, Any] = {
                'model': name,
                'description': spec.description,
            }
            for scheme in schemes:
                outcome = run_cv(
                    self._regressor_factory(
                        spec,
                        settings,
                        config.seed,
                        options.clip,
                    ),
                    splits[scheme],
                    cohort,
                    names,
                    model=name,
                    threads=self._threads,
                )
                metrics = outcome.metrics.to_dict()
                row |= {
                    f'{scheme}_{key}': metrics[key]
                    for key in ('r2', 'rmse', 'n_test')
                }
                predictions.append(outcome.predictions.assign(model=name))
            rows.append(row)

        payload = {
            'cohort': {
                'participants': int(cohort['participant_id'].nunique()),
                'intervals': len(cohort),
            },
            'rows': rows,
        }
        metadata = self._metadata(config, [features_path, demo])
        self._store.write_json(out, payload, metadata)
        if rows_path is not None:
            frame = pd.concat(predictions, ignore_index=True)
            self._store.write_table(
                rows_path,
                frame.loc[:, ['model', *PREDICTION_COLUMNS]],
                metadata,
            )
        return payload

    def _cv_audit(
        self,
        config: RunConfig,
        features_path: Path,
        demo: Path | None,
        scheme: Scheme,
        out: Path,
    ) -> list[CvSplit]:
        if demo is None:
            table = self._read_features(features_path)
        else:
            table, _ = self._analysis_table(features_path, demo)
        cohort = self._prediction_cohort(table)
        splits = self._splits(cohort, scheme) if not cohort.empty else []
        payload = {
            'scheme': str(scheme),
            'cohort': sorted(set(cohort['participant_id'])),
            'splits': [split.to_dict() for split in splits],
        }
        self._store.write_json(
            out,
            payload,
            self._metadata(config, [features_path, demo]),
        )
        self._logger.info('Audited %d %s splits', len(splits), scheme)
        return splits

    def _summarize(
        self,
        config: RunConfig,
        features_path: Path,
        demo: Path,
        out: Path,
    ) -> CohortSummary:
        features = self._read_features(features_path)
        summary = summarize_cohort(features, self._read_demographics(demo))
        self._store.write_json(
            out,
            summary.to_dict(),
            self._metadata(config, [features_path, demo]),
        )
        self._logger.info(
            'Cohort of %d participants with %d intervals',
            summary.n_participants,
            summary.n_intervals,
        )
        return summary

    def _report(
        self,
        config: RunConfig,
        associations_path: Path,
        lrt_path: Path,
        prediction_path: Path,
        features_path: Path,
        intervals_path: Path,
        demo: Path | None,
        out_dir: Path,
    ) -> str:
        associations = self._store.read_table(associations_path, 'associate')
        lrt = self._store.read_json(lrt_path, 'lrt')
        prediction = self._store.read_json(prediction_path, 'predict')
        features = self._read_features(features_path)
        summary = None
        if demo is not None:
            summary = summarize_cohort(features, self._read_demographics(demo))

        inputs = [associations_path, lrt_path, prediction_path, features_path]
        if intervals_path.exists():
            inputs.append(intervals_path)
        metadata = self._metadata(config, [*inputs, demo])
        plot_files = self._write_plot_data(
            features,
            intervals_path if intervals_path.exists() else None,
            out_dir,
            metadata,
        )
        text = report.render_report(
            associations,
            lrt,
            prediction,
            summary,
            plot_files,
        )
        self._store.write_markdown(out_dir / 'report.md', text, metadata)
        self._logger.info('Wrote report to %s', out_dir / 'report.md')
        return text

    def _write_plot_data(
        self,
        features: pd.DataFrame,
        intervals_path: Path | None,
        out_dir: Path,
        metadata: RunMetadata,
    ) -> dict[str, str]:
        """Internal helper to write plot data files of the report.

        Returns:
            dict[str, str]: Descriptions of written files by name.
        """
        plot_files = {}
        names = self._feature_names(features)
        finite = np.isfinite(features.loc[:, names].to_numpy(dtype=float))
        try:
            spearman = spearman_matrix(
                features.loc[finite.all(axis=1), names],
            )
        except InferenceError as e:
            self._logger.warning('Spearman matrix skipped: %s', e)
            plot_files['spearman.csv'] = Messages.SPEARMAN_SKIPPED.format(e)
        else:
            if spearman.constant:
                self._logger.debug('Constant features: %s', spearman.constant)
            self._store.write_table(
                out_dir / 'spearman.csv',
                report.spearman_frame(spearman),
                metadata,
            )
            plot_files['spearman.csv'] = str(Messages.SPEARMAN_FILE)

        profiles = report.mse_profiles_frame(features)
        self._store.write_table(out_dir / 'mse_profiles.csv', profiles, metadata)
        plot_files['mse_profiles.csv'] = str(Messages.MSE_PROFILES_FILE)
        self._store.write_table(
            out_dir / 'mse_by_severity.csv',
            report.mse_by_severity(profiles),
            metadata,
        )
        plot_files['mse_by_severity.csv'] = str(Messages.MSE_BY_SEVERITY_FILE)

        if intervals_path is not None:
            for interval in self._store.read_intervals(intervals_path, 'ingest'):
                self._store.write_table(
                    out_dir / 'spectra' / f'{interval.key}.csv',
                    report.spectrum_frame(interval),
                    metadata,
                )
            plot_files['spectra/'] = str(Messages.SPECTRA_DIRECTORY)
        return plot_files

    def _metadata(
        self,
        config: RunConfig,
        inputs: Iterable[Path | None],
        statistics: Mapping[str, Any] | None = None,
    ) -> RunMetadata:
        """Internal helper to create the metadata block of an output.

        Args:
            config (RunConfig): Run configuration.
            inputs (Iterable[Optional[Path]]): Files read by the step,
                `None` entries are ignored.
            statistics (Optional[Mapping[str, Any]]): Step statistics.
        """
        return RunMetadata(
            tool_version=VERSION,
            command=str(config.command),
            config=config.to_metadata(),
            input_hashes={
                path.name: file_digest(path)
                for path in inputs
                if path is not None
            },
            seed=config.seed,
            statistics=dict(statistics or {}),
        )

    def _read_features(self, path: Path) -> pd.DataFrame:
        """Internal helper to read a features table.

        Raises:
            ArtifactMissingError: The table does not exist.
            ArtifactError: The table has no identity columns.
        """
        frame = self._store.read_table(path, 'extract')
        missing = [c for c in ID_COLUMNS if c not in frame.columns]
        if missing:
            raise ArtifactError(f'{path} lacks columns {", ".join(missing)}')
        frame['participant_id'] = frame['participant_id'].astype(str)
        frame['date'] = frame['date'].astype(str)
        return frame

    @staticmethod
    def _feature_names(features: pd.DataFrame) -> list[str]:
        """Internal helper to get feature columns in table order."""
        skip = {*ID_COLUMNS, FLAGS_COLUMN}
        return [str(c) for c in features.columns if c not in skip]

    def _read_demographics(self, path: Path) -> dict[str, Demographics]:
        """Internal helper to read and validate a demographics table.

        Raises:
            DatasetError: The table breaks fatal rules.
        """
        raw = self._store.read_input_table(path)
        validation = validate_demographics(raw)
        if not validation.accepted:
            raise DatasetError(validation)
        return demographics_records(raw)

    def _analysis_table(
        self,
        features_path: Path,
        demo: Path,
    ) -> tuple[pd.DataFrame, list[str]]:
        """Internal helper to join features with covariates.

        Participants without demographics and intervals with non-finite
        features are left out.

        Returns:
            tuple[DataFrame, list[str]]: Joined table and feature names.
        """
        features = self._read_features(features_path)
        names = self._feature_names(features)
        covariates = covariates_frame(self._read_demographics(demo))
        missing = sorted(set(features['participant_id']) - set(covariates.index))
        if missing:
            self._logger.warning(
                'Excluding %d participants without demographics: %s',
                len(missing),
                ', '.join(missing),
            )
        table = features.join(covariates, on='participant_id', how='inner')
        finite = np.isfinite(table.loc[:, names].to_numpy(dtype=float))
        finite = finite.all(axis=1)
        if not finite.all():
            self._logger.warning(
                'Excluding %d intervals with non-finite features',
                int((~finite).sum()),
            )
            table = table.loc[finite]
        return table.reset_index(drop=True), names

    def _prediction_cohort(self, table: pd.DataFrame) -> pd.DataFrame:
        """Internal helper to get the interval table of eligible participants."""
        participants = select_prediction_cohort(table)
        cohort = interval_table(table[table['participant_id'].isin(participants)])
        self._logger.info(
            'Prediction cohort: %d participants, %d intervals',
            len(participants),
            len(cohort),
        )
        return cohort

    @staticmethod
    def _splits(cohort: pd.DataFrame, scheme: Scheme) -> list[CvSplit]:
        """Internal helper to create splits and audit them for leakage."""
        splits = make_splits(cohort, scheme)
        for split in splits:
            check_no_leakage(split, cohort)
        return splits

    @staticmethod
    def _regressor_factory(
        spec: ModelSpec,
        settings: HblrSettings,
        seed: int,
        clip: bool,
    ) -> RegressorFactory:
        """Internal helper to create regressors with per-split seeds.

        Every model gets the same seed on the same split.
        """
        schemes = list(Scheme)

        def create(split: CvSplit) -> Regressor:
            sequence = np.random.SeedSequence(
                [seed, schemes.index(split.scheme), split.iteration],
            )
            split_seed = int(sequence.generate_state(1)[0])
            return create_regressor(spec, settings, split_seed, clip)

        return create

    @staticmethod
    def _load_generator_spec(path: Path | None) -> GeneratorSpec:
        """Internal helper to read a generator spec file.

        Raises:
            ArtifactError: The file cannot be read.
            CliError: The file is not a valid spec.
        """
        if path is None:
            return GeneratorSpec()
        try:
            return GeneratorSpec.load(path)
        except OSError as e:
            raise ArtifactError(f'Cannot read {path}: {e}') from e
        except ValidationError as e:
            raise CliError(f'Invalid generator spec {path}: {e}') from e
