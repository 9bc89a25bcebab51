"""Exact probability kernel for binary endpoints.

Three representations carry a rate parameter: conjugate ``BetaParams``,
mixture-conjugate ``BetaMixture`` and discretised ``GridDensity``. Every
operation here is a pure function of immutable values.
"""
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Iterable, Optional, Tuple, Union
import logging
import math

from scipy.optimize import brentq, minimize_scalar
from scipy.special import betainc, betaincinv, xlog1py, xlogy
from scipy.stats import beta as beta_dist, betabinom, binom
from typing_extensions import Final
import numpy as np

from .constants import (DEFAULT_GRID_SIZE, GRID_MASS_TOL, LOGGER_NAME,
                        MIXTURE_WEIGHT_TOL, PRUNE_THRESHOLD, QUANTILE_TOL)
from .exceptions import DegenerateUpdateError, InvalidParameterError

__all__ = ('BetaMixture', 'BetaParams', 'BinomialSummary', 'Distribution',
           'GridDensity', 'Interval', 'LogLikelihood',
           'beta_binomial_marginal', 'binomial_log_likelihood',
           'credible_interval', 'density', 'hpd_interval', 'mean',
           'posterior', 'predictive_pmf', 'prior_ess', 'prob_exceeds',
           'quantile', 'tail_probs', 'uniform_grid', 'update_beta',
           'update_beta_mixture', 'update_grid', 'variance')

_log: Final[logging.Logger] = logging.getLogger(LOGGER_NAME)

LogLikelihood = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class BetaParams:
    alpha: float
    beta: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.alpha) and math.isfinite(self.beta)
                and self.alpha > 0 and self.beta > 0):
            raise InvalidParameterError(
                'Beta parameters must be positive and finite, got '
                f'({self.alpha}, {self.beta})')

    @property
    def mean(self) -> float:
        return self.alpha / (self.alpha + self.beta)

    @property
    def variance(self) -> float:
        s = self.alpha + self.beta
        return self.alpha * self.beta / (s * s * (s + 1.0))

    @property
    def domain(self) -> Tuple[float, float]:
        return (0.0, 1.0)

    def prob_exceeds(self, threshold: float) -> float:
        if threshold <= 0.0:
            return 1.0
        if threshold >= 1.0:
            return 0.0
        # I_{1-x}(b, a) is the upper tail without cancellation
        return float(betainc(self.beta, self.alpha, 1.0 - threshold))

    def quantile(self, p: float) -> float:
        return float(betaincinv(self.alpha, self.beta, p))

    def pdf(self, x: np.ndarray) -> np.ndarray:
        return beta_dist.pdf(x, self.alpha, self.beta)


@dataclass(frozen=True)
class BinomialSummary:
    successes: int
    trials: int

    def __post_init__(self) -> None:
        for name in ('successes', 'trials'):
            value = getattr(self, name)
            if isinstance(value, (float, np.floating)):
                if not float(value).is_integer():
                    raise InvalidParameterError(f'{name} must be an integer')
            object.__setattr__(self, name, int(value))
        if not 0 <= self.successes <= self.trials:
            raise InvalidParameterError(
                f'Need 0 <= successes <= trials, got {self.successes}/'
                f'{self.trials}')

    @property
    def failures(self) -> int:
        return self.trials - self.successes

    def __add__(self, other: 'BinomialSummary') -> 'BinomialSummary':
        return BinomialSummary(self.successes + other.successes,
                               self.trials + other.trials)


@dataclass(frozen=True)
class BetaMixture:
    components: Tuple[Tuple[float, BetaParams], ...]

    def __post_init__(self) -> None:
        components = tuple((float(w), p) for w, p in self.components)
        object.__setattr__(self, 'components', components)
        if not components:
            raise InvalidParameterError('A mixture needs a component')
        if any(not w > 0 or not math.isfinite(w) for w, _ in components):
            raise InvalidParameterError('Mixture weights must be positive')
        total = math.fsum(w for w, _ in components)
        if abs(total - 1.0) > MIXTURE_WEIGHT_TOL:
            raise InvalidParameterError(
                f'Mixture weights must sum to 1, got {total!r}')

    @classmethod
    def from_weights(cls,
                     weights: Iterable[float],
                     params: Iterable[BetaParams],
                     prune_threshold: float = PRUNE_THRESHOLD
                     ) -> 'BetaMixture':
        """Normalise, drop components below ``prune_threshold``, renormalise.
        """
        w = np.asarray(list(weights), dtype=float)
        ps = list(params)
        if len(w) != len(ps) or not len(w):
            raise InvalidParameterError(
                'Need one weight per mixture component')
        if np.any(w < 0) or not np.all(np.isfinite(w)) or w.sum() <= 0:
            raise InvalidParameterError('Invalid mixture weights')
        w = w / w.sum()
        keep = w >= prune_threshold
        if not keep.all():
            _log.debug('Pruning %d of %d mixture components',
                       int((~keep).sum()), len(w))
        w = w[keep]
        w = w / w.sum()
        kept = [p for p, k in zip(ps, keep) if k]
        return cls(tuple(zip(w.tolist(), kept)))

    @classmethod
    def single(cls, params: BetaParams) -> 'BetaMixture':
        return cls(((1.0, params), ))

    @cached_property
    def weights(self) -> np.ndarray:
        return np.array([w for w, _ in self.components])

    @cached_property
    def alphas(self) -> np.ndarray:
        return np.array([p.alpha for _, p in self.components])

    @cached_property
    def betas(self) -> np.ndarray:
        return np.array([p.beta for _, p in self.components])

    @property
    def domain(self) -> Tuple[float, float]:
        return (0.0, 1.0)

    @property
    def mean(self) -> float:
        return float(self.weights @ (self.alphas /
                                     (self.alphas + self.betas)))

    @property
    def variance(self) -> float:
        s = self.alphas + self.betas
        means = self.alphas / s
        second = means * (self.alphas + 1.0) / (s + 1.0)
        return float(self.weights @ second - self.mean**2)

    def prob_exceeds(self, threshold: float) -> float:
        if threshold <= 0.0:
            return 1.0
        if threshold >= 1.0:
            return 0.0
        tails = betainc(self.betas, self.alphas, 1.0 - threshold)
        return float(min(1.0, max(0.0, self.weights @ tails)))

    def quantile(self, p: float) -> float:
        return _bracketed_quantile(self, p)

    def pdf(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.tensordot(
            self.weights,
            beta_dist.pdf(x[np.newaxis, ...],
                          self.alphas.reshape((-1, ) + (1, ) * x.ndim),
                          self.betas.reshape((-1, ) + (1, ) * x.ndim)),
            axes=1)


@dataclass(frozen=True, eq=False)
class GridDensity:
    """Point masses on a strictly increasing grid.

    Tail probabilities spread each mass uniformly over its cell, whose edges
    are the midpoints between neighbouring points (outer cells extend half a
    spacing and are clipped to ``domain`` when one is given).
    """
    grid: np.ndarray
    masses: np.ndarray
    domain: Optional[Tuple[float, float]] = None

    def __post_init__(self) -> None:
        grid = np.array(self.grid, dtype=float)
        masses = np.array(self.masses, dtype=float)
        if grid.ndim != 1 or grid.shape != masses.shape or not len(grid):
            raise InvalidParameterError(
                'Grid and masses must be non-empty 1-D arrays of equal '
                'length')
        if not np.all(np.isfinite(grid)) or np.any(np.diff(grid) <= 0):
            raise InvalidParameterError('Grid must be strictly increasing')
        if not np.all(np.isfinite(masses)) or np.any(masses < 0):
            raise InvalidParameterError('Masses must be non-negative')
        if abs(masses.sum() - 1.0) > GRID_MASS_TOL:
            raise InvalidParameterError(
                f'Masses must sum to 1, got {masses.sum()!r}')
        if self.domain is not None:
            lo, hi = self.domain
            if not (lo < hi and lo <= grid[0] and grid[-1] <= hi):
                raise InvalidParameterError('Grid lies outside its domain')
            object.__setattr__(self, 'domain', (float(lo), float(hi)))
        grid.setflags(write=False)
        masses.setflags(write=False)
        object.__setattr__(self, 'grid', grid)
        object.__setattr__(self, 'masses', masses)

    @cached_property
    def edges(self) -> Tuple[np.ndarray, np.ndarray]:
        g = self.grid
        if len(g) == 1:
            return g.copy(), g.copy()
        mids = (g[1:] + g[:-1]) / 2.0
        left = np.concatenate(([g[0] - (g[1] - g[0]) / 2.0], mids))
        right = np.concatenate((mids, [g[-1] + (g[-1] - g[-2]) / 2.0]))
        if self.domain is not None:
            left = np.clip(left, *self.domain)
            right = np.clip(right, *self.domain)
        return left, right

    @property
    def mean(self) -> float:
        return float(self.masses @ self.grid)

    @property
    def variance(self) -> float:
        return float(self.masses @ (self.grid - self.mean)**2)

    @property
    def support(self) -> Tuple[float, float]:
        left, right = self.edges
        return float(left[0]), float(right[-1])

    def cell_fraction_above(self, threshold: float) -> np.ndarray:
        left, right = self.edges
        width = right - left
        with np.errstate(divide='ignore', invalid='ignore'):
            frac = np.clip((right - threshold) / width, 0.0, 1.0)
        point = np.where(self.grid > threshold, 1.0,
                         np.where(self.grid == threshold, 0.5, 0.0))
        return np.where(width > 0, frac, point)

    def prob_exceeds(self, threshold: float) -> float:
        p = float(self.masses @ self.cell_fraction_above(threshold))
        return min(1.0, max(0.0, p))

    def quantile(self, p: float) -> float:
        return _bracketed_quantile(self, p)

    def mode(self) -> float:
        return float(self.grid[int(np.argmax(self.masses))])


Distribution = Union[BetaParams, BetaMixture, GridDensity]


@dataclass(frozen=True)
class Interval:
    low: float
    high: float
    level: float

    def __post_init__(self) -> None:
        if not 0 < self.level < 1:
            raise InvalidParameterError('Interval level must be in (0, 1)')
        if self.low > self.high:
            raise InvalidParameterError('Interval bounds are reversed')

    def __contains__(self, x: float) -> bool:
        return self.low <= x <= self.high


def _domain(dist: Distribution) -> Tuple[float, float]:
    if isinstance(dist, GridDensity):
        return dist.support
    return dist.domain


def _bracketed_quantile(dist: Distribution,
                        p: float,
                        tol: float = QUANTILE_TOL) -> float:
    if not 0 < p < 1:
        raise InvalidParameterError('Quantile level must be in (0, 1)')
    lo, hi = _domain(dist)
    return float(
        brentq(lambda x: (1.0 - dist.prob_exceeds(x)) - p,
               lo,
               hi,
               xtol=tol * 1e-2,
               maxiter=500))


def uniform_grid(size: int = DEFAULT_GRID_SIZE,
                 low: float = 0.0,
                 high: float = 1.0) -> GridDensity:
    """Equal masses on the cell midpoints of ``size`` equal cells."""
    if size < 1 or not low < high:
        raise InvalidParameterError('Invalid grid specification')
    h = (high - low) / size
    grid = low + h * (np.arange(size) + 0.5)
    return GridDensity(grid, np.full(size, 1.0 / size), (low, high))


def update_beta(prior: BetaParams, data: BinomialSummary) -> BetaParams:
    return BetaParams(prior.alpha + data.successes,
                      prior.beta + data.failures)


def beta_binomial_marginal(prior: BetaParams, n: int, y: int) -> float:
    """Prior-predictive probability of ``y`` successes in ``n`` trials."""
    if not 0 <= y <= n:
        raise InvalidParameterError(f'Need 0 <= y <= n, got {y}/{n}')
    return float(np.exp(betabinom.logpmf(y, n, prior.alpha, prior.beta)))


def update_beta_mixture(prior: BetaMixture,
                        data: BinomialSummary,
                        prune_threshold: float = PRUNE_THRESHOLD
                        ) -> BetaMixture:
    log_w = np.log(prior.weights) + betabinom.logpmf(
        data.successes, data.trials, prior.alphas, prior.betas)
    top = np.max(log_w)
    if not np.isfinite(top):
        raise DegenerateUpdateError('degenerate mixture update')
    w = np.exp(log_w - top)
    return BetaMixture.from_weights(
        w, (update_beta(p, data) for _, p in prior.components),
        prune_threshold)


def binomial_log_likelihood(data: BinomialSummary) -> LogLikelihood:
    y, f = data.successes, data.failures

    def log_lik(theta: np.ndarray) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        return xlogy(y, theta) + xlog1py(f, -theta)

    return log_lik


def update_grid(prior: GridDensity,
                log_likelihood: LogLikelihood) -> GridDensity:
    ll = np.broadcast_to(
        np.asarray(log_likelihood(prior.grid), dtype=float),
        prior.grid.shape)
    if np.any(np.isnan(ll)) or np.any(ll == np.inf):
        raise InvalidParameterError(
            'Log-likelihood must be finite or -inf at every grid point')
    live = (prior.masses > 0) & np.isfinite(ll)
    if not live.any():
        raise DegenerateUpdateError('likelihood annihilates prior')
    top = np.max(ll[live])
    with np.errstate(under='ignore'):
        w = np.where(live, prior.masses * np.exp(np.where(live, ll - top,
                                                          0.0)), 0.0)
    total = w.sum()
    if not total > 0:
        raise DegenerateUpdateError('likelihood annihilates prior')
    return GridDensity(prior.grid, w / total, prior.domain)


def posterior(prior: Distribution, data: BinomialSummary) -> Distribution:
    if isinstance(prior, BetaParams):
        return update_beta(prior, data)
    if isinstance(prior, BetaMixture):
        return update_beta_mixture(prior, data)
    if data.trials == 0:
        return prior
    return update_grid(prior, binomial_log_likelihood(data))


def predictive_pmf(dist: Distribution, n: int) -> np.ndarray:
    """Probabilities of 0..n successes in ``n`` further trials."""
    if n < 0:
        raise InvalidParameterError('n must be non-negative')
    y = np.arange(n + 1)
    if isinstance(dist, BetaParams):
        pmf = betabinom.pmf(y, n, dist.alpha, dist.beta)
    elif isinstance(dist, BetaMixture):
        pmf = dist.weights @ betabinom.pmf(y[np.newaxis, :], n,
                                           dist.alphas[:, np.newaxis],
                                           dist.betas[:, np.newaxis])
    else:
        pmf = dist.masses @ binom.pmf(y[np.newaxis, :], n,
                                      dist.grid[:, np.newaxis])
    return np.asarray(pmf, dtype=float)


def prob_exceeds(dist: Distribution, threshold: float) -> float:
    return dist.prob_exceeds(threshold)


def tail_probs(dist: Distribution, thresholds: np.ndarray) -> np.ndarray:
    """Vectorised ``prob_exceeds`` over an array of thresholds."""
    t = np.asarray(thresholds, dtype=float)
    if isinstance(dist, GridDensity):
        return np.array([dist.prob_exceeds(x) for x in t.ravel()
                         ]).reshape(t.shape)
    inside = np.clip(1.0 - t, 0.0, 1.0)
    if isinstance(dist, BetaParams):
        tails = betainc(dist.beta, dist.alpha, inside)
    else:
        tails = np.tensordot(
            dist.weights,
            betainc(dist.betas.reshape((-1, ) + (1, ) * t.ndim),
                    dist.alphas.reshape((-1, ) + (1, ) * t.ndim),
                    inside[np.newaxis, ...]),
            axes=1)
    tails = np.where(t <= 0.0, 1.0, np.where(t >= 1.0, 0.0, tails))
    return np.clip(tails, 0.0, 1.0)


def quantile(dist: Distribution, p: float) -> float:
    if not 0 < p < 1:
        raise InvalidParameterError('Quantile level must be in (0, 1)')
    return dist.quantile(p)


def density(dist: Union[BetaParams, BetaMixture],
            x: np.ndarray) -> np.ndarray:
    return dist.pdf(x)


def mean(dist: Distribution) -> float:
    return dist.mean


def variance(dist: Distribution) -> float:
    return dist.variance


def credible_interval(dist: Distribution, level: float) -> Interval:
    """Equal-tailed interval holding ``level`` of the mass."""
    if not 0 < level < 1:
        raise InvalidParameterError('Interval level must be in (0, 1)')
    tail = (1.0 - level) / 2.0
    return Interval(quantile(dist, tail), quantile(dist, 1.0 - tail), level)


def hpd_interval(dist: Distribution, level: float) -> Interval:
    """Shortest interval holding ``level`` of the mass (unimodal shapes)."""
    if not 0 < level < 1:
        raise InvalidParameterError('Interval level must be in (0, 1)')
    slack = 1.0 - level
    eps = QUANTILE_TOL

    def width(u: float) -> float:
        return dist.quantile(u + level) - dist.quantile(u)

    res = minimize_scalar(width,
                          bounds=(eps, slack - eps),
                          method='bounded',
                          options=dict(xatol=QUANTILE_TOL))
    u = float(res.x)
    return Interval(dist.quantile(u), dist.quantile(u + level), level)


def prior_ess(prior: BetaParams) -> float:
    return prior.alpha + prior.beta

