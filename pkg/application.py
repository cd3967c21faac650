"""Defines initialization logic for application.

This module defines the main class of the entire application and
all connections between program components.
"""

from collections.abc import Callable
import enum
from typing import Any, Final

from cli import CliError
from cli import CommandName
from cli import RunConfig
from config import Config
from config import ConfigError
from controller import Controller
from evaluation import EvaluationError
from features.errors import FeatureError
from inference import InferenceError
from ingestion import IngestionError
import log
from model import ArtifactError
from model import ArtifactMissingError
from model import ArtifactStore
from model import DatasetError
from prediction import PredictionError

Handler = Callable[[Controller, Any], object]

COMMAND_TO_HANDLER: Final[dict[CommandName, Handler]] = {
    CommandName.INGEST: Controller.ingest,
    CommandName.EXTRACT: Controller.extract,
    CommandName.ASSOCIATE: Controller.associate,
    CommandName.LRT: Controller.lrt,
    CommandName.PREDICT: Controller.predict,
    CommandName.CV_AUDIT: Controller.cv_audit,
    CommandName.SIMULATE: Controller.simulate,
    CommandName.REPORT: Controller.report,
    CommandName.RUN_ALL: Controller.run_all,
    CommandName.SUMMARIZE: Controller.summarize,
}


@enum.unique
class ExitCode(enum.IntEnum):
    """Process exit codes by failure class."""

    OK = 0
    INTERNAL = 1
    USAGE = 2
    INVALID_DATA = 3
    MISSING_ARTIFACT = 4
    MODEL_FAILURE = 5
    IO_FAILURE = 6


class ApplicationError(RuntimeError):
    """Raised when application is stopped on any error."""

    def __init__(self, message: object, exit_code: ExitCode) -> None:
        """Initialize an exception object.

        Args:
            message (Any): Error description.
            exit_code (ExitCode): Process exit code of the failure.
        """
        super().__init__(message)
        self.exit_code = exit_code


class Application:
    """Main class of the pipeline application."""

    def __init__(self, command: RunConfig) -> None:
        """Initialize application object.

        Args:
            command (RunConfig): Parsed subcommand.

        Raises:
            ApplicationError: Error while initializing application.
        """
        self._command = command
        self._config = self._read_config()
        level = log.LogLevel.DEBUG if command.verbose else self._config.log_level
        log.setup_logging(level)
        self._logger = log.create_logger(self)
        self._controller = Controller(
            ArtifactStore(),
            threads=self._config.threads,
        )

    def run(self) -> None:
        """Run the subcommand to completion.

        Raises:
            ApplicationError: Error while running application.
        """
        name = self._command.command
        handler = COMMAND_TO_HANDLER[name]
        self._logger.info('Running %s', name)
        try:
            handler(self._controller, self._command)
        except (
            CliError,
            DatasetError,
            IngestionError,
            FeatureError,
            InferenceError,
            PredictionError,
            EvaluationError,
            ArtifactError,
        ) as e:
            self._logger.fatal('%s failed: %s', name, e)
            raise ApplicationError(e, exit_code_of(e)) from e
        self._logger.info('Finished %s', name)

    def _read_config(self) -> Config:
        """Internal helper to read application config.

        Raises:
            ApplicationError: Error while reading config.

        Returns:
            Config: Application config.
        """
        try:
            return Config()
        except ConfigError as e:
            raise ApplicationError(e, ExitCode.USAGE) from e


def exit_code_of(error: Exception) -> ExitCode:
    """Returns the exit code of a failure.

    Args:
        error (Exception): Failure raised by a pipeline step.
    """
    match error:
        case CliError():
            return ExitCode.USAGE
        case DatasetError() | IngestionError() | FeatureError():
            return ExitCode.INVALID_DATA
        case ArtifactMissingError():
            return ExitCode.MISSING_ARTIFACT
        case ArtifactError():
            return ExitCode.IO_FAILURE
        case InferenceError() | PredictionError() | EvaluationError():
            return ExitCode.MODEL_FAILURE
        case _:
            return ExitCode.INTERNAL
