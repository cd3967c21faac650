"""Rendering of the markdown report and its plot data."""

from collections.abc import Mapping
from collections.abc import Sequence
import math
from typing import Any

import pandas as pd

from features.frequency import power_spectrum
from inference.correlation import SpearmanMatrix
from inference.lrt import NestedModel
from messages import CohortRows
from messages import Columns
from messages import Headings
from messages import Messages
from model.types import NbdcInterval
from model.types import SeverityBand
from prediction.metrics import Scheme
from prediction.models import MODEL_SPECS

from .summary import CohortSummary
from .summary import Quartiles

MSE_PREFIX = 'MSE_'


def render_report(
    associations: pd.DataFrame,
    lrt: Mapping[str, Any],
    prediction: Mapping[str, Any],
    summary: CohortSummary | None = None,
    plot_files: Mapping[str, str] | None = None,
) -> str:
    """Render all result tables as one markdown document.

    Args:
        associations (DataFrame): Rows of `associations.csv`.
        lrt (Mapping[str, Any]): Body of `lrt.json`.
        prediction (Mapping[str, Any]): Body of `prediction.json`.
        summary (Optional[CohortSummary]): Cohort characteristics.
        plot_files (Optional[Mapping[str, str]]): Descriptions of plot
            data files by file name.

    Returns:
        str: Markdown text.
    """
    sections = [
        [str(Headings.TITLE)],
        cohort_section(summary),
        association_section(associations),
        nested_model_section(lrt),
        prediction_section(prediction),
    ]
    if plot_files:
        sections.append([
            str(Headings.PLOT_DATA),
            '',
            *(
                Messages.PLOT_FILE.format(name, description)
                for name, description in plot_files.items()
            ),
        ])
    return '\n\n'.join('\n'.join(lines) for lines in sections) + '\n'


def cohort_section(summary: CohortSummary | None) -> list[str]:
    """Returns the cohort table lines."""
    if summary is None:
        return [str(Headings.COHORT), '', str(Messages.NO_COHORT)]
    rows = [
        (CohortRows.PARTICIPANTS, str(summary.n_participants)),
        (CohortRows.AGE, _quartiles(summary.age)),
        (
            CohortRows.FEMALE,
            Messages.COUNT_PERCENT.format(
                summary.n_female,
                100 * _finite_or_zero(summary.female_share),
            ),
        ),
        (CohortRows.EDUCATION, _quartiles(summary.education_years)),
        (CohortRows.INTERVALS, str(summary.n_intervals)),
        (
            CohortRows.INTERVALS_PER_PARTICIPANT,
            _quartiles(summary.intervals_per_participant),
        ),
        (CohortRows.PHQ8, _quartiles(summary.phq8)),
        *(
            (
                CohortRows.SEVERITY.format(band.replace('_', ' ')),
                str(summary.severity_counts.get(band, 0)),
            )
            for band in map(str, SeverityBand)
        ),
    ]
    return [
        str(Headings.COHORT),
        '',
        *_table([Columns.CHARACTERISTIC, Columns.VALUE], rows),
    ]


def association_section(associations: pd.DataFrame) -> list[str]:
    """Returns the lines of significant feature associations."""
    lines = [str(Headings.ASSOCIATIONS), '']
    if associations.empty:
        return [*lines, str(Messages.NO_SIGNIFICANT_ASSOCIATIONS)]
    skipped = associations['skipped'].fillna('').astype(str)
    tested = associations[skipped == '']
    significant = tested[tested['p_adjusted'] < 0.05]
    lines.append(
        Messages.ASSOCIATIONS_NOTE.format(len(significant), len(tested)),
    )
    if (skipped != '').any():
        lines.append(
            Messages.SKIPPED_FEATURES.format(
                ', '.join(associations.loc[skipped != '', 'feature']),
            ),
        )
    lines.append('')
    if significant.empty:
        return [*lines, str(Messages.NO_SIGNIFICANT_ASSOCIATIONS)]
    rows = [
        (
            row.feature,
            f'{row.estimate:.3f}',
            f'{row.se:.3f}',
            f'{row.z:.2f}',
            _format_p(row.p),
            _format_p(row.p_adjusted),
        )
        for row in significant.itertuples()
    ]
    header = [
        Columns.FEATURE,
        Columns.ESTIMATE,
        Columns.SE,
        Columns.Z,
        Columns.P,
        Columns.P_ADJUSTED,
    ]
    return [*lines, *_table(header, rows)]


def nested_model_section(lrt: Mapping[str, Any]) -> list[str]:
    """Returns the likelihood-ratio test table lines."""
    models = lrt.get('models', {})
    dropped = sorted({c for m in models.values() for c in m.get('dropped', [])})
    lines = [
        str(Headings.NESTED_MODELS),
        '',
        Messages.NESTED_MODELS_NOTE.format(
            *(model.description for model in NestedModel),
            ', '.join(dropped) or Messages.NONE,
        ),
        '',
    ]
    rows = [
        (
            f'{test["small"]} vs {test["large"]}',
            str(test['df']),
            f'{test["chi2"]:.2f}',
            _format_p(test['p']),
            '' if test['critical_0.05'] is None
            else f'{test["critical_0.05"]:.3f}',
        )
        for test in lrt.get('tests', [])
    ]
    header = [
        Columns.MODELS,
        Columns.DF,
        Columns.CHI2,
        Columns.P,
        Columns.CRITICAL,
    ]
    return [*lines, *_table(header, rows)]


def prediction_section(prediction: Mapping[str, Any]) -> list[str]:
    """Returns the prediction performance table lines."""
    cohort = prediction.get('cohort', {})
    lines = [
        str(Headings.PREDICTION),
        '',
        Messages.PREDICTION_NOTE.format(
            cohort.get('participants', 0),
            cohort.get('intervals', 0),
        ),
        '',
    ]
    rows = []
    for row in prediction.get('rows', []):
        spec = MODEL_SPECS.get(row['model'])
        rows.append((
            row.get('description') or (spec.description if spec else row['model']),
            *(metrics_cell(row, scheme) for scheme in Scheme),
        ))
    rows.append((
        str(Messages.XGBOOST_MODEL),
        *(str(Messages.NOT_EVALUATED) for _ in Scheme),
    ))
    return [
        *lines,
        *_table([Columns.MODEL, Columns.LAO, Columns.LOO], rows),
    ]


def metrics_cell(row: Mapping[str, Any], scheme: Scheme) -> str:
    """Format the accuracy of a prediction row under one scheme.

    Args:
        row (Mapping[str, Any]): Row of `prediction.json`.
        scheme (Scheme): Scheme to show.

    Returns:
        str: Cell text, e.g. `R²=0.526, RMSE=3.891`.
    """
    rmse = row.get(f'{scheme}_rmse')
    if rmse is None:
        return str(Messages.NOT_EVALUATED)
    r2 = row.get(f'{scheme}_r2')
    if r2 is None:
        return Messages.METRICS_CELL_NO_R2.format(rmse)
    return Messages.METRICS_CELL.format(r2, rmse)


def mse_profiles_frame(features: pd.DataFrame) -> pd.DataFrame:
    """Reshape entropy features into one row per interval and scale.

    Args:
        features (DataFrame): Features table.

    Returns:
        DataFrame: Columns `participant_id`, `date`, `phq8`,
            `severity`, `scale` and `mse`.
    """
    columns = [c for c in features.columns if str(c).startswith(MSE_PREFIX)]
    ids = ['participant_id', 'date', 'phq8']
    long = features.loc[:, [*ids, *columns]].melt(
        id_vars=ids,
        value_vars=columns,
        var_name='feature',
        value_name='mse',
    )
    long['scale'] = long['feature'].str.removeprefix(MSE_PREFIX).astype(int)
    long['severity'] = [
        str(SeverityBand.from_score(int(score))) for score in long['phq8']
    ]
    long = long.sort_values(['participant_id', 'date', 'scale'], kind='stable')
    return long.loc[:, [*ids, 'severity', 'scale', 'mse']].reset_index(drop=True)


def mse_by_severity(profiles: pd.DataFrame) -> pd.DataFrame:
    """Average entropy profiles within severity bands.

    Args:
        profiles (DataFrame): Output of `mse_profiles_frame`.

    Returns:
        DataFrame: Columns `severity`, `scale`, `mean` and `n`, bands in
            severity order. Undefined entropies are left out.
    """
    bands = pd.Categorical(
        profiles['severity'],
        categories=[str(band) for band in SeverityBand],
        ordered=True,
    )
    grouped = profiles.assign(severity=bands).groupby(
        ['severity', 'scale'],
        observed=True,
    )['mse']
    frame = grouped.agg(mean='mean', n='count').reset_index()
    frame['severity'] = frame['severity'].astype(str)
    return frame


def spectrum_frame(interval: NbdcInterval) -> pd.DataFrame:
    """Returns the power spectrum of an interval as frequency/power rows.

    Args:
        interval (NbdcInterval): Interval to transform.
    """
    spectrum = power_spectrum(interval.sequence)
    return pd.DataFrame({
        'frequency': spectrum.frequencies,
        'power': spectrum.power,
    })


def spearman_frame(spearman: SpearmanMatrix) -> pd.DataFrame:
    """Returns a correlation matrix with a leading `feature` column.

    Args:
        spearman (SpearmanMatrix): Correlations.
    """
    return spearman.matrix.rename_axis('feature').reset_index()


def _table(
    header: Sequence[str],
    rows: Sequence[Sequence[str]],
) -> list[str]:
    """Internal helper to format a markdown table."""
    return [
        '| ' + ' | '.join(map(str, header)) + ' |',
        '|' + '---|' * len(header),
        *('| ' + ' | '.join(map(str, row)) + ' |' for row in rows),
    ]


def _quartiles(value: Quartiles) -> str:
    return Messages.QUARTILES.format(value.median, value.q1, value.q3)


def _format_p(p: float) -> str:
    if p is None or not math.isfinite(p):
        return ''
    return '<0.001' if p < 0.001 else f'{p:.3f}'


def _finite_or_zero(value: float) -> float:
    return value if math.isfinite(value) else 0.0
