"""Defines file-based persistence of pipeline artifacts.

Every artifact written here embeds a metadata block: CSV files start
with one `# proxiphene-metadata: {...}` comment line, JSON documents
have a top-level `metadata` key and JSONL files start with one
`{"metadata": ...}` record. Readers skip the block.
"""

from collections.abc import Iterable
from collections.abc import Mapping
import csv
import dataclasses
import datetime
import hashlib
import io
import json
import math
from pathlib import Path
from typing import Any, Final

import numpy as np
import pandas as pd

import log

from .types import DayGrid
from .types import HOURS_PER_DAY
from .types import NbdcInterval
from .types import Phq8Record
from .types import ProxipheneError

METADATA_PREFIX: Final = '# proxiphene-metadata: '
METADATA_KEY: Final = 'metadata'

TEXT_COLUMNS: Final = ('participant_id', 'date', 'feature', 'reason')
"""Columns never parsed as numbers when reading artifacts."""


class ArtifactError(ProxipheneError):
    """Error while reading or writing an artifact."""


class ArtifactMissingError(ArtifactError):
    """An upstream artifact required by a step does not exist."""

    def __init__(self, path: Path, step: str) -> None:
        """Initialize an exception object.

        Args:
            path (Path): Missing file.
            step (str): Subcommand that produces the file.
        """
        super().__init__(
            f'Missing {path}; run `proxiphene {step}` first',
        )
        self.path = path
        self.step = step


@dataclasses.dataclass(frozen=True)
class RunMetadata:
    """Provenance block embedded into every output."""

    tool_version: str
    command: str
    config: Mapping[str, Any]
    input_hashes: Mapping[str, str]
    seed: int | None
    statistics: Mapping[str, Any] = dataclasses.field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        """Returns the block as a JSON-compatible dictionary."""
        return to_jsonable(dataclasses.asdict(self))


def to_jsonable(value: Any) -> Any:
    """Convert a value into plain JSON types.

    Non-finite floats become `None`, numpy scalars and arrays become
    Python numbers and lists, dates and paths become strings.

    Args:
        value (Any): Value to convert.

    Returns:
        Any: JSON-compatible value.
    """
    if isinstance(value, Mapping):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, (datetime.date, Path)):
        return str(value)
    return value


def file_digest(path: Path) -> str:
    """Returns SHA-256 of file content.

    Args:
        path (Path): File to hash.

    Raises:
        ArtifactError: The file cannot be read.
    """
    try:
        return hashlib.sha256(path.read_bytes()).hexdigest()
    except OSError as e:
        raise ArtifactError(f'Cannot read {path}: {e}') from e


class ArtifactStore:
    """Reads input tables and reads/writes pipeline artifacts."""

    def __init__(self) -> None:
        """Initialize artifact store object."""
        self._logger = log.create_logger(self)

    def read_input_table(self, path: Path) -> pd.DataFrame:
        """Read a raw input CSV with every cell as a string.

        Tables generated by `simulate` carry a metadata block which is
        skipped.

        Args:
            path (Path): CSV file.

        Returns:
            DataFrame: Raw table.

        Raises:
            ArtifactError: The file cannot be read or parsed.
        """
        self._logger.debug('Reading input table %s', path)
        if not path.exists():
            raise ArtifactError(f'Input table {path} does not exist')
        body = self._strip_metadata(self._read_text(path, 'simulate'))
        try:
            frame = pd.read_csv(
                io.StringIO(body),
                dtype=str,
                keep_default_na=False,
            )
        except pd.errors.EmptyDataError:
            frame = pd.DataFrame()
        except pd.errors.ParserError as e:
            raise self._create_artifact_error(path, e) from e
        self._logger.debug('Read %d rows from %s', len(frame), path)
        return frame

    def write_table(
        self,
        path: Path,
        frame: pd.DataFrame,
        metadata: RunMetadata | None = None,
    ) -> None:
        """Write a CSV artifact.

        Args:
            path (Path): Destination file.
            frame (DataFrame): Table to write, index ignored.
            metadata (Optional[RunMetadata]): Provenance block.

        Raises:
            ArtifactError: The file cannot be written.
        """
        buffer = io.StringIO()
        if metadata is not None:
            block = json.dumps(metadata.to_dict(), sort_keys=True)
            buffer.write(f'{METADATA_PREFIX}{block}\n')
        frame.to_csv(buffer, index=False, lineterminator='\n')
        self._write_text(path, buffer.getvalue())
        self._logger.debug('Wrote %d rows to %s', len(frame), path)

    def read_table(self, path: Path, step: str) -> pd.DataFrame:
        """Read a CSV artifact written by `write_table`.

        Args:
            path (Path): Source file.
            step (str): Subcommand that produces the file.

        Returns:
            DataFrame: Table without the metadata block.

        Raises:
            ArtifactMissingError: The file does not exist.
            ArtifactError: The file cannot be read or parsed.
        """
        body = self._strip_metadata(self._read_text(path, step))
        if not body.strip():
            return pd.DataFrame()
        header = next(csv.reader(io.StringIO(body)))
        text_columns = {c: str for c in TEXT_COLUMNS if c in header}
        try:
            frame = pd.read_csv(io.StringIO(body), dtype=text_columns)
        except pd.errors.ParserError as e:
            raise self._create_artifact_error(path, e) from e
        self._logger.debug('Read %d rows from %s', len(frame), path)
        return frame

    def write_json(
        self,
        path: Path,
        payload: Mapping[str, Any],
        metadata: RunMetadata | None = None,
    ) -> None:
        """Write a JSON artifact.

        Args:
            path (Path): Destination file.
            payload (Mapping[str, Any]): Document body.
            metadata (Optional[RunMetadata]): Provenance block.

        Raises:
            ArtifactError: The file cannot be written.
        """
        document: dict[str, Any] = {}
        if metadata is not None:
            document[METADATA_KEY] = metadata.to_dict()
        document.update(to_jsonable(payload))
        text = json.dumps(document, indent=2, allow_nan=False) + '\n'
        self._write_text(path, text)

    def read_json(self, path: Path, step: str) -> dict[str, Any]:
        """Read a JSON artifact written by `write_json`.

        Args:
            path (Path): Source file.
            step (str): Subcommand that produces the file.

        Returns:
            dict[str, Any]: Document body without metadata.

        Raises:
            ArtifactMissingError: The file does not exist.
            ArtifactError: The file cannot be read or parsed.
        """
        text = self._read_text(path, step)
        try:
            document = json.loads(text)
        except json.JSONDecodeError as e:
            raise self._create_artifact_error(path, e) from e
        document.pop(METADATA_KEY, None)
        return document

    def read_metadata(self, path: Path, step: str) -> dict[str, Any] | None:
        """Read the metadata block of any artifact.

        Args:
            path (Path): Source file.
            step (str): Subcommand that produces the file.

        Returns:
            Optional[dict[str, Any]]: Metadata if the file has a block.
        """
        text = self._read_text(path, step)
        first_line = text.split('\n', 1)[0]
        if first_line.startswith(METADATA_PREFIX):
            return json.loads(first_line.removeprefix(METADATA_PREFIX))
        try:
            document = json.loads(first_line)
        except json.JSONDecodeError:
            try:
                document = json.loads(text)
            except json.JSONDecodeError:
                return None
        if isinstance(document, dict):
            return document.get(METADATA_KEY)
        return None

    def write_intervals(
        self,
        path: Path,
        intervals: Iterable[NbdcInterval],
        metadata: RunMetadata | None = None,
    ) -> int:
        """Write intervals as JSON lines.

        Args:
            path (Path): Destination file.
            intervals (Iterable[NbdcInterval]): Intervals to write.
            metadata (Optional[RunMetadata]): Provenance block.

        Returns:
            int: Number of intervals written.

        Raises:
            ArtifactError: The file cannot be written.
        """
        lines = []
        if metadata is not None:
            lines.append(json.dumps({METADATA_KEY: metadata.to_dict()}))
        count = 0
        for interval in intervals:
            record = {
                'participant_id': interval.participant_id,
                'phq8_date': interval.phq8.completion_date.isoformat(),
                'score': interval.phq8.score,
                'n_valid_days': interval.n_valid_days,
                'day_dates': [d.date.isoformat() for d in interval.days],
                'sequence': to_jsonable(interval.sequence),
            }
            lines.append(json.dumps(record))
            count += 1
        self._write_text(path, ''.join(f'{line}\n' for line in lines))
        self._logger.debug('Wrote %d intervals to %s', count, path)
        return count

    def read_intervals(self, path: Path, step: str) -> list[NbdcInterval]:
        """Read intervals written by `write_intervals`.

        Args:
            path (Path): Source file.
            step (str): Subcommand that produces the file.

        Returns:
            list[NbdcInterval]: Intervals in file order.

        Raises:
            ArtifactMissingError: The file does not exist.
            ArtifactError: The file cannot be parsed.
        """
        text = self._read_text(path, step)
        intervals = []
        try:
            for line in text.splitlines():
                if not line.strip():
                    continue
                record = json.loads(line)
                if METADATA_KEY in record:
                    continue
                intervals.append(self._interval_from_record(record))
        except (json.JSONDecodeError, KeyError, ValueError) as e:
            raise self._create_artifact_error(path, e) from e
        self._logger.debug('Read %d intervals from %s', len(intervals), path)
        return intervals

    @staticmethod
    def _interval_from_record(record: Mapping[str, Any]) -> NbdcInterval:
        """Internal helper to rebuild an interval from its JSON record.

        Args:
            record (Mapping[str, Any]): One JSON line.
        """
        pid = str(record['participant_id'])
        phq8 = Phq8Record(
            participant_id=pid,
            completion_date=datetime.date.fromisoformat(record['phq8_date']),
            score=int(record['score']),
        )
        sequence = [float(v) for v in record['sequence']]
        n_days = int(record['n_valid_days'])
        if len(sequence) != n_days * HOURS_PER_DAY:
            raise ValueError(f'Bad sequence length for {pid}')
        dates = [datetime.date.fromisoformat(d) for d in record['day_dates']]
        if len(dates) != n_days:
            raise ValueError(f'Bad day dates for {pid}')
        days = tuple(
            DayGrid(
                participant_id=pid,
                date=date,
                hours=tuple(sequence[i * HOURS_PER_DAY:(i + 1) * HOURS_PER_DAY]),
            )
            for i, date in enumerate(dates)
        )
        return NbdcInterval(participant_id=pid, phq8=phq8, days=days)

    def write_markdown(
        self,
        path: Path,
        text: str,
        metadata: RunMetadata | None = None,
    ) -> None:
        """Write a markdown document.

        The metadata block is an HTML comment on the first line, so it
        does not show when the document is rendered.

        Args:
            path (Path): Destination file.
            text (str): Document body.
            metadata (Optional[RunMetadata]): Provenance block.

        Raises:
            ArtifactError: The file cannot be written.
        """
        if metadata is not None:
            block = json.dumps(metadata.to_dict(), sort_keys=True)
            text = f'<!-- {METADATA_PREFIX.removeprefix("# ")}{block} -->\n{text}'
        self._write_text(path, text)

    @staticmethod
    def _strip_metadata(text: str) -> str:
        """Internal helper to drop metadata lines of a CSV text."""
        return ''.join(
            line
            for line in text.splitlines(keepends=True)
            if not line.startswith(METADATA_PREFIX)
        )

    def _write_text(self, path: Path, text: str) -> None:
        """Internal helper to write a text file, creating directories.

        Args:
            path (Path): Destination file.
            text (str): Content.

        Raises:
            ArtifactError: The file cannot be written.
        """
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            with path.open('w', encoding='utf-8', newline='') as f:
                f.write(text)
        except OSError as e:
            raise self._create_artifact_error(path, e) from e

    def _read_text(self, path: Path, step: str) -> str:
        """Internal helper to read a text artifact.

        Args:
            path (Path): Source file.
            step (str): Subcommand that produces the file.

        Raises:
            ArtifactMissingError: The file does not exist.
            ArtifactError: The file cannot be read.
        """
        if not path.exists():
            raise ArtifactMissingError(path, step)
        try:
            return path.read_text(encoding='utf-8')
        except (OSError, UnicodeDecodeError) as e:
            raise self._create_artifact_error(path, e) from e

    def _create_artifact_error(self, path: Path, e: Exception) -> ArtifactError:
        """Internal helper to create a store exception from a library one.

        Args:
            path (Path): File being processed.
            e (Exception): Underlying exception.
        """
        self._logger.debug('Artifact error: path=%s, error=%s', path, e)
        return ArtifactError(f'{path}: {e}')
