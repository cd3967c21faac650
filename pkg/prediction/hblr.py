"""Hierarchical Bayesian linear regression sampled by Gibbs sampling.

The model is `y_ij = alpha_j + z_ij' theta + e_ij` with participant
intercepts `alpha_j ~ N(mu, tau2)` and `e_ij ~ N(0, sigma2)`. Priors
are conjugate: `theta ~ N(0, theta_sd^2 I)`, `mu ~ N(mu_mean, mu_sd^2)`,
`tau2 ~ IG(a, b)`, `sigma2 ~ IG(a, b)`, so every full conditional is
sampled exactly.
"""

from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
import dataclasses

import numpy as np
import pandas as pd
from pydantic import BaseModel
from pydantic import ConfigDict
from pydantic import Field
from pydantic import model_validator
import scipy.linalg

import log

from .errors import PredictionError

RHAT_THRESHOLD = 1.05


class HblrPriors(BaseModel):
    """Prior hyperparameters.

    `mu_mean` of `None` centers the population mean prior on the mean
    training target.
    """

    model_config = ConfigDict(frozen=True)

    theta_sd: float = Field(default=5.0, gt=0)
    mu_mean: float | None = None
    mu_sd: float = Field(default=10.0, gt=0)
    tau2_shape: float = Field(default=1.0, gt=0)
    tau2_scale: float = Field(default=1.0, gt=0)
    sigma2_shape: float = Field(default=1.0, gt=0)
    sigma2_scale: float = Field(default=1.0, gt=0)

    def resolve(self, target_mean: float) -> 'HblrPriors':
        """Returns priors with the population mean center filled in.

        Args:
            target_mean (float): Mean training target.
        """
        if self.mu_mean is not None:
            return self
        return self.model_copy(update={'mu_mean': float(target_mean)})


class HblrSettings(BaseModel):
    """Sampler budget and prediction options."""

    model_config = ConfigDict(frozen=True)

    chains: int = Field(default=4, ge=1)
    draws: int = Field(default=2000, ge=4)
    burn: int = Field(default=1000, ge=0)
    interval_level: float = Field(default=0.9, gt=0, lt=1)
    include_noise: bool = False
    threads: int = Field(default=1, ge=1)
    priors: HblrPriors = HblrPriors()

    @model_validator(mode='after')
    def _check_budget(self) -> 'HblrSettings':
        if self.draws - self.burn < 4:
            raise ValueError('At least 4 draws must follow the burn-in')
        return self


@dataclasses.dataclass(frozen=True)
class HblrData:
    """Training rows in the form used by the sampler."""

    y: np.ndarray
    z: np.ndarray
    codes: np.ndarray
    groups: tuple[str, ...]

    @classmethod
    def from_arrays(
        cls,
        y: Sequence[float] | np.ndarray,
        z: np.ndarray,
        groups: Sequence[object] | np.ndarray,
    ) -> 'HblrData':
        """Create sampler data from raw arrays.

        Args:
            y (ArrayLike): Targets.
            z (ndarray): Standardized predictors.
            groups (ArrayLike): Participant of every row.

        Returns:
            HblrData: Sampler data.
        """
        codes, uniques = pd.factorize(np.asarray(groups, dtype=object))
        z = np.asarray(z, dtype=float)
        if z.ndim == 1:
            z = z[:, None]
        return cls(
            y=np.asarray(y, dtype=float),
            z=z,
            codes=codes,
            groups=tuple(str(g) for g in uniques),
        )

    @property
    def n_groups(self) -> int:
        return len(self.groups)

    @property
    def group_sizes(self) -> np.ndarray:
        return np.bincount(self.codes, minlength=self.n_groups).astype(float)


@dataclasses.dataclass(frozen=True)
class GibbsState:
    """Current values of all model parameters."""

    alpha: np.ndarray
    theta: np.ndarray
    mu: float
    tau2: float
    sigma2: float


def _sample_inverse_gamma(
    shape: float,
    scale: float,
    rng: np.random.Generator,
) -> float:
    """Internal helper to draw from `IG(shape, scale)`."""
    return float(scale / rng.gamma(shape))


def gibbs_sweep(
    state: GibbsState,
    data: HblrData,
    priors: HblrPriors,
    rng: np.random.Generator,
) -> GibbsState:
    """Update every parameter once from its full conditional.

    Args:
        state (GibbsState): Current parameters.
        data (HblrData): Training rows.
        priors (HblrPriors): Resolved priors (`mu_mean` set).
        rng (Generator): Random generator.

    Returns:
        GibbsState: Updated parameters.
    """
    sizes = data.group_sizes
    n_groups = data.n_groups

    # Participant intercepts
    residual = data.y - data.z @ state.theta
    residual_sums = np.bincount(data.codes, weights=residual, minlength=n_groups)
    precision = sizes / state.sigma2 + 1 / state.tau2
    mean = (residual_sums / state.sigma2 + state.mu / state.tau2) / precision
    alpha = mean + rng.standard_normal(n_groups) / np.sqrt(precision)

    # Global coefficients
    n_coef = data.z.shape[1]
    theta = state.theta
    if n_coef:
        precision_matrix = data.z.T @ data.z / state.sigma2 + np.eye(
            n_coef,
        ) / priors.theta_sd**2
        factor = scipy.linalg.cholesky(precision_matrix, lower=True)
        rhs = data.z.T @ (data.y - alpha[data.codes]) / state.sigma2
        theta_mean = scipy.linalg.cho_solve((factor, True), rhs)
        theta = theta_mean + scipy.linalg.solve_triangular(
            factor.T,
            rng.standard_normal(n_coef),
            lower=False,
        )

    # Population mean of intercepts
    mu_precision = n_groups / state.tau2 + 1 / priors.mu_sd**2
    mu_mean = (alpha.sum() / state.tau2 + priors.mu_mean / priors.mu_sd**2) / (
        mu_precision
    )
    mu = float(mu_mean + rng.standard_normal() / np.sqrt(mu_precision))

    # Variances
    tau2 = _sample_inverse_gamma(
        priors.tau2_shape + n_groups / 2,
        priors.tau2_scale + float(((alpha - mu) ** 2).sum()) / 2,
        rng,
    )
    fitted = alpha[data.codes] + data.z @ theta
    rss = float(((data.y - fitted) ** 2).sum())
    sigma2 = _sample_inverse_gamma(
        priors.sigma2_shape + data.y.size / 2,
        priors.sigma2_scale + rss / 2,
        rng,
    )
    return GibbsState(alpha=alpha, theta=theta, mu=mu, tau2=tau2, sigma2=sigma2)


def draw_from_prior(
    priors: HblrPriors,
    n_groups: int,
    n_coef: int,
    rng: np.random.Generator,
) -> GibbsState:
    """Draw parameters from the prior.

    Args:
        priors (HblrPriors): Resolved priors.
        n_groups (int): Number of participants.
        n_coef (int): Number of global coefficients.
        rng (Generator): Random generator.

    Returns:
        GibbsState: Prior draw.
    """
    tau2 = _sample_inverse_gamma(priors.tau2_shape, priors.tau2_scale, rng)
    sigma2 = _sample_inverse_gamma(priors.sigma2_shape, priors.sigma2_scale, rng)
    mu = float(priors.mu_mean + priors.mu_sd * rng.standard_normal())
    return GibbsState(
        alpha=mu + np.sqrt(tau2) * rng.standard_normal(n_groups),
        theta=priors.theta_sd * rng.standard_normal(n_coef),
        mu=mu,
        tau2=tau2,
        sigma2=sigma2,
    )


def simulate_targets(
    state: GibbsState,
    data: HblrData,
    rng: np.random.Generator,
) -> np.ndarray:
    """Draw targets from the likelihood given parameters.

    Args:
        state (GibbsState): Parameters.
        data (HblrData): Rows providing predictors and participants.
        rng (Generator): Random generator.

    Returns:
        ndarray: Simulated targets.
    """
    fitted = state.alpha[data.codes] + data.z @ state.theta
    return fitted + np.sqrt(state.sigma2) * rng.standard_normal(data.y.size)


@dataclasses.dataclass(frozen=True)
class PosteriorSamples:
    """Post burn-in draws of every chain.

    Arrays have shape `(chains, draws, ...)`.
    """

    alpha: np.ndarray
    theta: np.ndarray
    mu: np.ndarray
    tau2: np.ndarray
    sigma2: np.ndarray
    groups: tuple[str, ...]
    predictor_names: tuple[str, ...]
    rhat: dict[str, float] = dataclasses.field(default_factory=dict)

    @property
    def n_chains(self) -> int:
        return self.mu.shape[0]

    @property
    def n_draws(self) -> int:
        return self.mu.shape[1]

    @property
    def max_rhat(self) -> float:
        """Returns the largest split R-hat over all parameters."""
        return max(self.rhat.values(), default=1.0)

    @property
    def converged(self) -> bool:
        """Returns `True` if every split R-hat is below 1.05."""
        return self.max_rhat < RHAT_THRESHOLD

    def flat(self, name: str) -> np.ndarray:
        """Returns draws of a parameter with chains concatenated.

        Args:
            name (str): `alpha`, `theta`, `mu`, `tau2` or `sigma2`.
        """
        values = getattr(self, name)
        return values.reshape(self.n_chains * self.n_draws, *values.shape[2:])

    def theta_interval(self, level: float = 0.95) -> np.ndarray:
        """Returns central posterior intervals of the global coefficients.

        Args:
            level (float): Interval probability.

        Returns:
            ndarray: `(n_coef, 2)` lower and upper bounds.
        """
        tail = (1 - level) / 2
        return np.quantile(self.flat('theta'), [tail, 1 - tail], axis=0).T


def split_rhat(draws: np.ndarray) -> float:
    """Compute the split potential scale reduction factor.

    Each chain is split in halves, then between- and within-chain
    variances of the halves are compared.

    Args:
        draws (ndarray): `(chains, draws)` samples of one scalar.

    Returns:
        float: Split R-hat, 1 for constant draws.
    """
    n_chains, n_draws = draws.shape
    half = n_draws // 2
    if half < 2:
        raise PredictionError('Split R-hat needs at least 4 draws per chain')
    halves = np.concatenate([draws[:, :half], draws[:, n_draws - half:]])
    within = halves.var(axis=1, ddof=1).mean()
    between = half * halves.mean(axis=1).var(ddof=1)
    if within == 0:
        return 1.0 if between == 0 else float('inf')
    pooled = (half - 1) / half * within + between / half
    return float(np.sqrt(pooled / within))


def _all_rhat(samples: dict[str, np.ndarray], names: Sequence[str]) -> dict[str, float]:
    """Internal helper to compute R-hat of every scalar parameter."""
    rhat = {
        name: split_rhat(samples[name]) for name in ('mu', 'tau2', 'sigma2')
    }
    for index, name in enumerate(names):
        rhat[f'theta[{name}]'] = split_rhat(samples['theta'][:, :, index])
    for index in range(samples['alpha'].shape[2]):
        rhat[f'alpha[{index}]'] = split_rhat(samples['alpha'][:, :, index])
    return rhat


def _run_chain(
    data: HblrData,
    priors: HblrPriors,
    settings: HblrSettings,
    seed: np.random.SeedSequence,
) -> dict[str, np.ndarray]:
    """Internal helper to run one chain and keep post burn-in draws."""
    rng = np.random.default_rng(seed)
    spread = float(np.std(data.y)) or 1.0
    state = GibbsState(
        alpha=data.y.mean() + spread * rng.standard_normal(data.n_groups),
        theta=np.zeros(data.z.shape[1]),
        mu=float(data.y.mean() + spread * rng.standard_normal()),
        tau2=spread**2 * float(rng.uniform(0.5, 2.0)),
        sigma2=spread**2 * float(rng.uniform(0.5, 2.0)),
    )
    kept = settings.draws - settings.burn
    trace = {
        'alpha': np.empty((kept, data.n_groups)),
        'theta': np.empty((kept, data.z.shape[1])),
        'mu': np.empty(kept),
        'tau2': np.empty(kept),
        'sigma2': np.empty(kept),
    }
    for iteration in range(settings.draws):
        state = gibbs_sweep(state, data, priors, rng)
        index = iteration - settings.burn
        if index >= 0:
            for name, values in trace.items():
                values[index] = getattr(state, name)
    return trace


def fit_hblr(
    data: HblrData,
    settings: HblrSettings | None = None,
    seed: int = 0,
    predictor_names: Sequence[str] = (),
) -> PosteriorSamples:
    """Sample the posterior with independent seeded chains.

    Non-convergence does not raise: the result carries split R-hat
    values and a warning is logged.

    Args:
        data (HblrData): Training rows with standardized predictors.
        settings (Optional[HblrSettings]): Sampler budget and priors.
        seed (int): Seed of all chains.
        predictor_names (Sequence[str]): Names of predictor columns.

    Returns:
        PosteriorSamples: Post burn-in draws.

    Raises:
        PredictionError: No training rows.
    """
    logger = log.create_logger(fit_hblr)
    settings = settings or HblrSettings()
    if data.y.size == 0:
        raise PredictionError('Cannot fit a model without training rows')
    names = tuple(predictor_names) or tuple(
        f'z{i}' for i in range(data.z.shape[1])
    )
    priors = settings.priors.resolve(data.y.mean())
    seeds = np.random.SeedSequence(seed).spawn(settings.chains)
    logger.debug(
        'Sampling %d chains x %d iterations for %d rows of %d participants',
        settings.chains,
        settings.draws,
        data.y.size,
        data.n_groups,
    )
    with ThreadPoolExecutor(max_workers=settings.threads) as executor:
        traces = list(
            executor.map(
                lambda s: _run_chain(data, priors, settings, s),
                seeds,
            ),
        )
    samples = {
        name: np.stack([trace[name] for trace in traces])
        for name in traces[0]
    }
    posterior = PosteriorSamples(
        **samples,
        groups=data.groups,
        predictor_names=names,
        rhat=_all_rhat(samples, names),
    )
    if not posterior.converged:
        logger.warning(
            'Chains did not converge, max split R-hat %.3f',
            posterior.max_rhat,
        )
    return posterior


@dataclasses.dataclass(frozen=True)
class HblrPrediction:
    """Posterior predictions of rows."""

    mean: np.ndarray
    lower: np.ndarray
    upper: np.ndarray


def predict_hblr(
    posterior: PosteriorSamples,
    z: np.ndarray,
    groups: Sequence[object] | np.ndarray,
    level: float = 0.9,
    include_noise: bool = False,
    seed: int = 0,
) -> HblrPrediction:
    """Predict rows from posterior draws.

    Participants seen in training use their intercept draws, others get
    an intercept drawn from the population distribution in each draw.
    Intervals describe the expected score unless `include_noise` adds
    observation noise.

    Args:
        posterior (PosteriorSamples): Posterior draws.
        z (ndarray): Standardized predictors of the rows.
        groups (ArrayLike): Participant of every row.
        level (float): Central interval probability.
        include_noise (bool): Whether intervals cover new observations.
        seed (int): Seed of population intercept and noise draws.

    Returns:
        HblrPrediction: Posterior mean and interval bounds per row.
    """
    rng = np.random.default_rng(seed)
    z = np.asarray(z, dtype=float)
    if z.ndim == 1:
        z = z[:, None]
    alpha = posterior.flat('alpha')
    theta = posterior.flat('theta')
    mu = posterior.flat('mu')
    tau2 = posterior.flat('tau2')
    sigma2 = posterior.flat('sigma2')
    n_samples = mu.size

    index = {group: i for i, group in enumerate(posterior.groups)}
    intercepts = np.empty((n_samples, len(z)))
    for row, group in enumerate(np.asarray(groups, dtype=object)):
        position = index.get(str(group))
        if position is None:
            intercepts[:, row] = mu + np.sqrt(tau2) * rng.standard_normal(
                n_samples,
            )
        else:
            intercepts[:, row] = alpha[:, position]
    draws = intercepts + theta @ z.T
    if include_noise:
        draws = draws + np.sqrt(sigma2)[:, None] * rng.standard_normal(
            draws.shape,
        )
    tail = (1 - level) / 2
    lower, upper = np.quantile(draws, [tail, 1 - tail], axis=0)
    return HblrPrediction(mean=draws.mean(axis=0), lower=lower, upper=upper)
