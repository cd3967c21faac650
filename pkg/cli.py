"""Command-line surface of the pipeline.

Every subcommand is a Pydantic model parsed by `pydantic-settings`.
Parsed models are the per-run configuration: they are passed to the
controller as is and echoed into the metadata of every output.
"""

from collections.abc import Sequence
import datetime
import enum
from pathlib import Path
from typing import Any, ClassVar, TypeVar
import zoneinfo

from pydantic import BaseModel
from pydantic import ConfigDict
from pydantic import Field
from pydantic import ValidationError
from pydantic import field_validator
from pydantic import model_validator
from pydantic_settings import BaseSettings
from pydantic_settings import CliApp
from pydantic_settings import CliSubCommand
from pydantic_settings import SettingsConfigDict
from pydantic_settings import SettingsError
from pydantic_settings import get_subcommand

from features.entropy import MseParams
from features.frequency import BandDefinition
from ingestion.days import DEFAULT_TIMEZONE
from model.types import ProxipheneError
from prediction.hblr import HblrSettings
from prediction.metrics import Scheme
from prediction.models import MODEL_SPECS

T = TypeVar('T')

DEFAULT_SEED = 42


class CliError(ProxipheneError):
    """The command line cannot be parsed into a run configuration."""


@enum.unique
class CommandName(enum.StrEnum):
    """Subcommands of the tool."""
    INGEST = 'ingest'
    EXTRACT = 'extract'
    ASSOCIATE = 'associate'
    LRT = 'lrt'
    PREDICT = 'predict'
    CV_AUDIT = 'cv-audit'
    SIMULATE = 'simulate'
    REPORT = 'report'
    RUN_ALL = 'run-all'
    SUMMARIZE = 'summarize'


class RunConfig(BaseModel):
    """Flags shared by every subcommand."""

    model_config = ConfigDict(frozen=True, validate_default=True)

    command: ClassVar[CommandName]

    seed: int = Field(
        default=DEFAULT_SEED,
        ge=0,
        description='Master random seed',
    )
    verbose: bool = Field(default=False, description='Log at DEBUG level')

    @field_validator('*', mode='after')
    @classmethod
    def _resolve_paths(cls, value: T) -> T | Path:
        if isinstance(value, Path):
            return value.expanduser().resolve()
        return value

    def to_metadata(self) -> dict[str, Any]:
        """Returns the configuration as recorded in output metadata."""
        return {'command': str(self.command), **self.model_dump(mode='json')}


class InputOptions(BaseModel):
    """Raw input tables and the interval selection parameters."""

    scans: Path = Field(description='Hourly device counts CSV')
    phq8: Path = Field(description='PHQ-8 records CSV')
    cutoff: datetime.date | None = Field(
        default=None,
        description='Drop PHQ-8 records dated on or after this date',
    )
    tz: str = Field(
        default=DEFAULT_TIMEZONE,
        description='IANA time zone of calendar days',
    )

    @field_validator('tz')
    @classmethod
    def _check_timezone(cls, value: str) -> str:
        try:
            zoneinfo.ZoneInfo(value)
        except (zoneinfo.ZoneInfoNotFoundError, ValueError) as e:
            raise ValueError(f'Unknown time zone {value!r}') from e
        return value


class FeatureOptions(BaseModel):
    """Parameters of the entropy and spectral features."""

    mse_m: int = Field(default=2, ge=1, description='Template length')
    mse_r_factor: float = Field(
        default=0.15,
        gt=0,
        description='Tolerance as a fraction of the sequence SD',
    )
    fd_bands: str = Field(
        default='0.75,1.25',
        description='Band edges in cycles per day: LF_UPPER,MF_UPPER',
    )

    @field_validator('fd_bands')
    @classmethod
    def _check_bands(cls, value: str) -> str:
        BandDefinition.parse(value)
        return value

    @property
    def mse_params(self) -> MseParams:
        """Returns multiscale entropy parameters."""
        return MseParams(m=self.mse_m, r_factor=self.mse_r_factor)

    @property
    def bands(self) -> BandDefinition:
        """Returns spectral band edges."""
        return BandDefinition.parse(self.fd_bands)


class SamplerOptions(BaseModel):
    """Budget of the Gibbs sampler and prediction options."""

    chains: int = Field(default=4, ge=1, description='MCMC chains')
    draws: int = Field(default=2000, ge=4, description='Draws per chain')
    burn: int = Field(default=1000, ge=0, description='Burn-in draws')
    clip: bool = Field(default=False, description='Clip predictions to 0-24')
    include_noise: bool = Field(
        default=False,
        description='Add observation noise to prediction intervals',
    )

    @model_validator(mode='after')
    def _check_budget(self) -> 'SamplerOptions':
        self.hblr_settings()
        return self

    def hblr_settings(self, threads: int = 1) -> HblrSettings:
        """Returns sampler settings of the run.

        Args:
            threads (int): Worker threads used across chains.
        """
        return HblrSettings(
            chains=self.chains,
            draws=self.draws,
            burn=self.burn,
            include_noise=self.include_noise,
            threads=threads,
        )


class IngestCommand(RunConfig, InputOptions):
    """Bin scans into days and assemble PHQ-8 intervals."""

    command: ClassVar = CommandName.INGEST

    demo: Path | None = Field(
        default=None,
        description='Demographics CSV, validated if given',
    )
    out: Path = Field(default=Path('intervals.jsonl'))
    rejections: Path | None = Field(
        default=None,
        description='Rejected records CSV, next to --out by default',
    )

    @property
    def rejections_path(self) -> Path:
        """Returns where rejected PHQ-8 records are written."""
        return self.rejections or self.out.with_name('rejections.csv')


class ExtractCommand(RunConfig, FeatureOptions):
    """Compute the 49 features of every interval."""

    command: ClassVar = CommandName.EXTRACT

    intervals: Path = Field(default=Path('intervals.jsonl'))
    out: Path = Field(default=Path('features.csv'))


class AssociateCommand(RunConfig):
    """Test every feature against PHQ-8 with a random-intercept model."""

    command: ClassVar = CommandName.ASSOCIATE

    features: Path = Field(default=Path('features.csv'))
    demo: Path = Field(description='Demographics CSV')
    out: Path = Field(default=Path('associations.csv'))


class LrtCommand(RunConfig):
    """Compare nested mixed models by likelihood-ratio tests."""

    command: ClassVar = CommandName.LRT

    features: Path = Field(default=Path('features.csv'))
    demo: Path = Field(description='Demographics CSV')
    out: Path = Field(default=Path('lrt.json'))


class PredictCommand(RunConfig, SamplerOptions):
    """Cross-validate prediction models."""

    command: ClassVar = CommandName.PREDICT

    features: Path = Field(default=Path('features.csv'))
    demo: Path = Field(description='Demographics CSV')
    scheme: Scheme | None = Field(
        default=None,
        description='Cross-validation scheme, both if omitted',
    )
    model: str | None = Field(
        default=None,
        description=f'One of {", ".join(MODEL_SPECS)}, all if omitted',
    )
    out: Path = Field(default=Path('prediction.json'))
    rows: Path | None = Field(
        default=None,
        description='Per-row predictions CSV',
    )

    @field_validator('model')
    @classmethod
    def _check_model(cls, value: str | None) -> str | None:
        if value is not None and value not in MODEL_SPECS:
            raise ValueError(
                f'Unknown model {value!r}, expected one of '
                f'{", ".join(MODEL_SPECS)}',
            )
        return value

    @property
    def schemes(self) -> list[Scheme]:
        """Returns schemes to evaluate."""
        return [self.scheme] if self.scheme else list(Scheme)

    @property
    def models(self) -> list[str]:
        """Returns names of models to evaluate."""
        return [self.model] if self.model else list(MODEL_SPECS)


class CvAuditCommand(RunConfig):
    """Dump cross-validation splits for leakage auditing."""

    command: ClassVar = CommandName.CV_AUDIT

    features: Path = Field(default=Path('features.csv'))
    demo: Path | None = Field(
        default=None,
        description='Demographics CSV, restricts the cohort if given',
    )
    scheme: Scheme = Scheme.LAO
    out: Path = Field(default=Path('splits.json'))


class SimulateCommand(RunConfig):
    """Generate a synthetic cohort with known ground truth."""

    command: ClassVar = CommandName.SIMULATE

    spec: Path | None = Field(
        default=None,
        description='Generator spec JSON, defaults if omitted',
    )
    out_dir: Path = Field(default=Path('synth'))


class ReportCommand(RunConfig):
    """Render the markdown report and plot data."""

    command: ClassVar = CommandName.REPORT

    associations: Path = Field(default=Path('associations.csv'))
    lrt: Path = Field(default=Path('lrt.json'))
    prediction: Path = Field(default=Path('prediction.json'))
    features: Path = Field(default=Path('features.csv'))
    intervals: Path = Field(
        default=Path('intervals.jsonl'),
        description='Spectrum plot data is written if the file exists',
    )
    demo: Path | None = Field(
        default=None,
        description='Demographics CSV for the cohort section',
    )
    out_dir: Path = Field(default=Path('report'))


class SummarizeCommand(RunConfig):
    """Summarize the cohort as a demographics table."""

    command: ClassVar = CommandName.SUMMARIZE

    features: Path = Field(default=Path('features.csv'))
    demo: Path = Field(description='Demographics CSV')
    out: Path = Field(default=Path('summary.json'))


class RunAllCommand(RunConfig, InputOptions, FeatureOptions, SamplerOptions):
    """Run every step from raw tables to the report."""

    command: ClassVar = CommandName.RUN_ALL

    demo: Path = Field(description='Demographics CSV')
    out_dir: Path = Field(default=Path('results'))


class ProxipheneCli(BaseSettings):
    """Predict depressive symptom severity from Bluetooth device counts."""

    model_config = SettingsConfigDict(
        cli_prog_name='proxiphene',
        cli_kebab_case=True,
        cli_implicit_flags=True,
    )

    ingest: CliSubCommand[IngestCommand]
    extract: CliSubCommand[ExtractCommand]
    associate: CliSubCommand[AssociateCommand]
    lrt: CliSubCommand[LrtCommand]
    predict: CliSubCommand[PredictCommand]
    cv_audit: CliSubCommand[CvAuditCommand]
    simulate: CliSubCommand[SimulateCommand]
    report: CliSubCommand[ReportCommand]
    run_all: CliSubCommand[RunAllCommand]
    summarize: CliSubCommand[SummarizeCommand]


def parse_command(
    args: Sequence[str] | None = None,
    exit_on_error: bool = True,
) -> RunConfig:
    """Parse the command line into the configuration of one run.

    Args:
        args (Optional[Sequence[str]]): Arguments without the program
            name, `sys.argv` if omitted.
        exit_on_error (bool): Whether argument syntax errors exit the
            process with code 2 instead of raising.

    Returns:
        RunConfig: Parsed subcommand.

    Raises:
        CliError: Arguments are missing or invalid.
    """
    try:
        cli = CliApp.run(
            ProxipheneCli,
            cli_args=None if args is None else list(args),
            cli_exit_on_error=exit_on_error,
        )
        command = get_subcommand(
            cli,
            is_required=False,
            cli_exit_on_error=exit_on_error,
        )
    except (ValidationError, SettingsError) as e:
        raise CliError(str(e)) from e
    if command is None:
        raise CliError(
            f'Expected a subcommand: {", ".join(map(str, CommandName))}',
        )
    return command
