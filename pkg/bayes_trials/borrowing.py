"""Informative priors built from historical binary-endpoint studies."""
from dataclasses import dataclass
from typing import Optional, Tuple, Union
import logging
import math
import warnings

from scipy.special import digamma, expit, polygamma
from scipy.stats import betabinom, norm
from typing_extensions import Final
import numpy as np

from .constants import (COMMENSURATE_LOGIT_HALF_WIDTH, DEFAULT_GRID_SIZE,
                        LOGGER_NAME, PRUNE_THRESHOLD)
from .distributions import (BetaMixture, BetaParams, BinomialSummary,
                            GridDensity, predictive_pmf)
from .exceptions import InvalidParameterError, MomentMatchingWarning
from .settings import DEFAULT_SETTINGS, Settings
from .util import is_strictly_increasing

__all__ = ('CommensurateSpec', 'HistoricalData', 'MapHyperGrid',
           'PowerPriorSpec', 'RobustMixSpec', 'VAGUE_PRIOR',
           'commensurate_prior', 'default_map_hyper_grid', 'map_prior',
           'power_prior', 'prior_data_conflict', 'robustify')

_log: Final[logging.Logger] = logging.getLogger(LOGGER_NAME)

VAGUE_PRIOR: Final[BetaParams] = BetaParams(1.0, 1.0)


@dataclass(frozen=True)
class HistoricalData:
    studies: Tuple[BinomialSummary, ...]
    labels: Optional[Tuple[str, ...]] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, 'studies', tuple(self.studies))
        if not self.studies:
            raise InvalidParameterError(
                'Historical data needs at least one study')
        if self.labels is not None:
            object.__setattr__(self, 'labels', tuple(self.labels))
            if len(self.labels) != len(self.studies):
                raise InvalidParameterError('Need one label per study')

    @property
    def pooled(self) -> BinomialSummary:
        total = BinomialSummary(0, 0)
        for study in self.studies:
            total = total + study
        return total


@dataclass(frozen=True)
class PowerPriorSpec:
    discount: float
    baseline: BetaParams = VAGUE_PRIOR

    def __post_init__(self) -> None:
        if not 0.0 <= self.discount <= 1.0:
            raise InvalidParameterError('Power prior discount must be in '
                                        '[0, 1]')


@dataclass(frozen=True, eq=False)
class MapHyperGrid:
    mean_grid: np.ndarray
    concentration_grid: np.ndarray
    hyper_weights: np.ndarray

    def __post_init__(self) -> None:
        mu = np.array(self.mean_grid, dtype=float)
        nu = np.array(self.concentration_grid, dtype=float)
        w = np.array(self.hyper_weights, dtype=float)
        if mu.ndim != 1 or nu.ndim != 1 or not len(mu) or not len(nu):
            raise InvalidParameterError('Hyper grids must be non-empty')
        if np.any(mu <= 0) or np.any(mu >= 1) or np.any(nu <= 0):
            raise InvalidParameterError(
                'Means must lie in (0, 1) and concentrations be positive')
        if w.shape != (len(mu), len(nu)):
            raise InvalidParameterError(
                'Need one hyper weight per (mean, concentration) pair')
        if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-10:
            raise InvalidParameterError('Hyper weights must sum to 1')
        for name, value in (('mean_grid', mu), ('concentration_grid', nu),
                            ('hyper_weights', w)):
            value.setflags(write=False)
            object.__setattr__(self, name, value)


@dataclass(frozen=True)
class RobustMixSpec:
    map_weight: float
    vague: BetaParams = VAGUE_PRIOR

    def __post_init__(self) -> None:
        if not 0.0 <= self.map_weight <= 1.0:
            raise InvalidParameterError('MAP weight must be in [0, 1]')


@dataclass(frozen=True)
class CommensurateSpec:
    tau_grid: Tuple[float, ...]
    tau_weights: Tuple[float, ...]
    theta_grid_size: int = DEFAULT_GRID_SIZE

    def __post_init__(self) -> None:
        object.__setattr__(self, 'tau_grid',
                           tuple(float(t) for t in self.tau_grid))
        object.__setattr__(self, 'tau_weights',
                           tuple(float(w) for w in self.tau_weights))
        if not self.tau_grid or len(self.tau_grid) != len(self.tau_weights):
            raise InvalidParameterError('Need one weight per tau')
        if any(t <= 0 for t in self.tau_grid) or not is_strictly_increasing(
                self.tau_grid):
            raise InvalidParameterError(
                'Tau grid must be positive and strictly increasing')
        if any(w < 0 for w in self.tau_weights) or abs(
                math.fsum(self.tau_weights) - 1.0) > 1e-10:
            raise InvalidParameterError('Tau weights must sum to 1')
        if self.theta_grid_size < 2:
            raise InvalidParameterError('theta_grid_size must be at least 2')


def power_prior(spec: PowerPriorSpec, hist: BinomialSummary) -> BetaParams:
    a0 = spec.discount
    return BetaParams(spec.baseline.alpha + a0 * hist.successes,
                      spec.baseline.beta + a0 * hist.failures)


def default_map_hyper_grid(settings: Settings = DEFAULT_SETTINGS
                           ) -> MapHyperGrid:
    mu = np.linspace(*settings.map_mean_bounds, settings.map_mean_points)
    lo, hi = settings.map_concentration_bounds
    nu = np.logspace(np.log10(lo), np.log10(hi),
                     settings.map_concentration_points)
    w = np.full((len(mu), len(nu)), 1.0 / (len(mu) * len(nu)))
    return MapHyperGrid(mu, nu, w)


def map_prior(hist: HistoricalData,
              hyper: Optional[MapHyperGrid] = None,
              prune_threshold: float = PRUNE_THRESHOLD) -> BetaMixture:
    """Predictive distribution of a new study's rate.

    The hierarchical model draws each study rate from Beta(mu*nu,
    (1-mu)*nu); the (mu, nu) posterior is computed exactly on the hyper grid
    and the predictive is the matching mixture of Beta components.
    """
    if hyper is None:
        hyper = default_map_hyper_grid()
    mu = hyper.mean_grid[:, np.newaxis]
    nu = hyper.concentration_grid[np.newaxis, :]
    a = mu * nu
    b = (1.0 - mu) * nu
    with np.errstate(divide='ignore'):
        log_w = np.log(hyper.hyper_weights)
    for study in hist.studies:
        log_w = log_w + betabinom.logpmf(study.successes, study.trials, a, b)
    top = np.max(log_w)
    if not np.isfinite(top):
        raise InvalidParameterError('Hyperprior has no support')
    w = np.exp(log_w - top)
    _log.debug('MAP prior over %d hyper nodes from %d studies', w.size,
               len(hist.studies))
    return BetaMixture.from_weights(
        w.ravel(),
        (BetaParams(float(x), float(y))
         for x, y in zip(a.ravel(), b.ravel())), prune_threshold)


def robustify(map_: BetaMixture, spec: RobustMixSpec) -> BetaMixture:
    w = spec.map_weight
    if w == 1.0:
        return map_
    if w == 0.0:
        return BetaMixture.single(spec.vague)
    return BetaMixture(
        tuple((w * wk, p) for wk, p in map_.components) +
        ((1.0 - w, spec.vague), ))


def commensurate_prior(hist_posterior: BetaParams,
                       spec: CommensurateSpec) -> GridDensity:
    """Current-rate prior linked to a historical posterior through tau.

    The historical posterior is matched by a normal on the logit scale
    (exact logit moments of the Beta); the current logit rate is that normal
    widened by 1/tau, averaged over the tau grid.
    """
    a, b = hist_posterior.alpha, hist_posterior.beta
    if a <= 1.0 or b <= 1.0:
        message = (f'Historical posterior Beta({a:g}, {b:g}) is too diffuse '
                   'for logit-normal moment matching')
        _log.warning(message)
        warnings.warn(message, MomentMatchingWarning)
    center = float(digamma(a) - digamma(b))
    spread = float(polygamma(1, a) + polygamma(1, b))
    x = np.linspace(center - COMMENSURATE_LOGIT_HALF_WIDTH,
                    center + COMMENSURATE_LOGIT_HALF_WIDTH,
                    spec.theta_grid_size)
    sd = np.sqrt(1.0 / np.asarray(spec.tau_grid) + spread)
    dens = norm.pdf(x[:, np.newaxis], center, sd[np.newaxis, :]) @ np.asarray(
        spec.tau_weights)
    return GridDensity(expit(x), dens / dens.sum(), (0.0, 1.0))


def prior_data_conflict(prior: Union[BetaParams, BetaMixture, GridDensity],
                        data: BinomialSummary) -> float:
    """Prior-predictive p-value of the observed count.

    Small values flag data that the prior considered implausible.
    """
    pmf = predictive_pmf(prior, data.trials)
    observed = pmf[data.successes]
    return float(min(1.0, pmf[pmf <= observed * (1.0 + 1e-12)].sum()))

