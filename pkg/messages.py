"""This module contains all text of the generated report."""

import enum


@enum.unique
class Headings(enum.StrEnum):
    """Section headings of the report."""

    TITLE = '# Bluetooth features and depressive symptom severity'
    COHORT = '## Cohort'
    ASSOCIATIONS = '## Associations of features with PHQ-8'
    NESTED_MODELS = '## Nested model comparison'
    PREDICTION = '## Prediction performance'
    PLOT_DATA = '## Plot data'


class Messages(enum.StrEnum):
    """Paragraphs and table cells of the report."""

    NO_SIGNIFICANT_ASSOCIATIONS = 'No significant associations.'
    NO_COHORT = 'No demographics given, cohort summary skipped.'
    ASSOCIATIONS_NOTE = (
        'Random-intercept mixed models adjusted for age, gender and '
        'years in education; p-values adjusted by Benjamini-Hochberg. '
        'Showing {} of {} tested features with adjusted p < 0.05.'
    )
    SKIPPED_FEATURES = 'Skipped features: {}.'
    NESTED_MODELS_NOTE = (
        'Model A: {}. Model B: {}. Model C: {}. '
        'Aliased columns dropped before fitting: {}.'
    )
    PREDICTION_NOTE = (
        'Predictions pooled over {} participants and {} intervals.'
    )
    METRICS_CELL = 'R²={:.3f}, RMSE={:.3f}'
    METRICS_CELL_NO_R2 = 'R²=n/a, RMSE={:.3f}'
    NOT_EVALUATED = 'not evaluated'
    XGBOOST_MODEL = 'XGBoost (all Bluetooth features, out of scope)'
    NONE = 'none'
    PLOT_FILE = '- `{}`: {}'
    SPEARMAN_FILE = 'pairwise Spearman correlations of features'
    SPEARMAN_SKIPPED = 'Spearman matrix skipped: {}.'
    MSE_PROFILES_FILE = 'multiscale entropy of every interval'
    MSE_BY_SEVERITY_FILE = 'mean multiscale entropy per severity band'
    SPECTRA_DIRECTORY = 'power spectrum of every interval'
    QUARTILES = '{:.1f} ({:.1f}, {:.1f})'
    COUNT_PERCENT = '{} ({:.1f}%)'


@enum.unique
class Columns(enum.StrEnum):
    """Column headers of report tables."""

    CHARACTERISTIC = 'Characteristic'
    VALUE = 'Value'
    FEATURE = 'Feature'
    ESTIMATE = 'Estimate'
    SE = 'SE'
    Z = 'z'
    P = 'p'
    P_ADJUSTED = 'Adjusted p'
    MODELS = 'Models'
    DF = 'Diff. of parameters'
    CHI2 = 'χ²'
    CRITICAL = 'χ²₀.₀₅(df)'
    MODEL = 'Model'
    LAO = 'LAO'
    LOO = 'LOO'


@enum.unique
class CohortRows(enum.StrEnum):
    """Row labels of the cohort table."""

    PARTICIPANTS = 'Participants'
    AGE = 'Age, median (Q1, Q3)'
    FEMALE = 'Female, n (%)'
    EDUCATION = 'Years in education, median (Q1, Q3)'
    INTERVALS = 'PHQ-8 intervals'
    INTERVALS_PER_PARTICIPANT = 'Intervals per participant, median (Q1, Q3)'
    PHQ8 = 'PHQ-8 score, median (Q1, Q3)'
    SEVERITY = 'Intervals with {} symptoms'
