"""Posterior decision rules and interim monitoring.

Arm 0 is the treatment arm and arm 1, when present, the concurrent control.
"""
from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable, Dict, NamedTuple, Optional, Sequence, Tuple
import logging
import math

from scipy.integrate import quad
from scipy.stats import binom
from typing_extensions import Final, Literal
import numpy as np

from .constants import LOGGER_NAME, PPOS_CELL_BUDGET, QUADRATURE_TOL
from .distributions import (BetaMixture, BinomialSummary, Distribution,
                            GridDensity, posterior, predictive_pmf,
                            tail_probs)
from .exceptions import BudgetExceededError, InvalidParameterError

__all__ = ('Comparison', 'Decision', 'DecisionKind', 'EvidenceCache',
           'FinalAnalysis', 'FutilityRule', 'InterimState', 'LossSpec',
           'MonitoringKind', 'MonitoringRule', 'NO_MONITORING',
           'POSTERIOR_MONITORING', 'SuccessCheck', 'SuccessRule',
           'conditional_power', 'conditional_power_region',
           'effect_prob_two_arm', 'evaluate_interim', 'expected_losses',
           'loss_threshold', 'posterior_success', 'ppos')

_log: Final[logging.Logger] = logging.getLogger(LOGGER_NAME)

Comparison = Literal['one-arm', 'two-arm']
MonitoringKind = Literal['none', 'posterior', 'ppos', 'conditional-power']
DataKey = Tuple[Tuple[int, int], ...]

COMPARISONS: Final[Tuple[str, ...]] = ('one-arm', 'two-arm')
MONITORING_KINDS: Final[Tuple[str, ...]] = ('none', 'posterior', 'ppos',
                                            'conditional-power')


def _clip(p: float) -> float:
    return min(1.0, max(0.0, p))


@dataclass(frozen=True)
class LossSpec:
    false_positive_loss: float
    false_negative_loss: float

    def __post_init__(self) -> None:
        if not (self.false_positive_loss > 0
                and self.false_negative_loss > 0):
            raise InvalidParameterError('Losses must be strictly positive')


def loss_threshold(spec: LossSpec) -> float:
    """Posterior cutoff minimising expected loss of the success/failure call.
    """
    return spec.false_positive_loss / (spec.false_positive_loss +
                                       spec.false_negative_loss)


def expected_losses(evidence: float, spec: LossSpec) -> Tuple[float, float]:
    """Posterior expected loss of declaring success and of declaring failure.
    """
    return ((1.0 - evidence) * spec.false_positive_loss,
            evidence * spec.false_negative_loss)


@dataclass(frozen=True)
class SuccessRule:
    effect_threshold: float
    posterior_cutoff: float
    comparison: Comparison = 'one-arm'

    def __post_init__(self) -> None:
        if self.comparison not in COMPARISONS:
            raise InvalidParameterError(
                f'Unknown comparison {self.comparison!r}')
        if not 0.0 < self.posterior_cutoff < 1.0:
            raise InvalidParameterError('posterior_cutoff must be in (0, 1)')
        low = 0.0 if self.comparison == 'one-arm' else -1.0
        if not low <= self.effect_threshold <= 1.0:
            raise InvalidParameterError(
                f'effect_threshold must be in [{low:g}, 1] for '
                f'{self.comparison} comparisons')

    @classmethod
    def from_loss(cls,
                  effect_threshold: float,
                  loss: LossSpec,
                  comparison: Comparison = 'one-arm') -> 'SuccessRule':
        return cls(effect_threshold, loss_threshold(loss), comparison)

    @property
    def arms(self) -> int:
        return 1 if self.comparison == 'one-arm' else 2

    def is_met(self, evidence: float) -> bool:
        return evidence >= self.posterior_cutoff

    def with_cutoff(self, cutoff: float) -> 'SuccessRule':
        return replace(self, posterior_cutoff=cutoff)


@dataclass(frozen=True)
class FutilityRule:
    ppos_cutoff: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.ppos_cutoff < 1.0:
            raise InvalidParameterError('ppos_cutoff must be in [0, 1)')


@dataclass(frozen=True)
class MonitoringRule:
    """Interim efficacy monitoring.

    ``posterior`` stops when the interim posterior evidence reaches
    ``cutoff`` (the success cutoff when unset), ``ppos`` when the predictive
    probability of final success does, and ``conditional-power`` when the
    chance of final success at ``assumed_rates`` does.
    """
    kind: MonitoringKind = 'posterior'
    cutoff: Optional[float] = None
    assumed_rates: Optional[Tuple[float, ...]] = None

    def __post_init__(self) -> None:
        if self.kind not in MONITORING_KINDS:
            raise InvalidParameterError(
                f'Unknown monitoring kind {self.kind!r}')
        if self.cutoff is not None and not 0.0 < self.cutoff <= 1.0:
            raise InvalidParameterError('Monitoring cutoff must be in (0, 1]')
        if self.kind in ('ppos', 'conditional-power') and self.cutoff is None:
            raise InvalidParameterError(
                f'{self.kind} monitoring needs a cutoff')
        if self.kind == 'conditional-power':
            if not self.assumed_rates:
                raise InvalidParameterError(
                    'conditional-power monitoring needs assumed rates')
            object.__setattr__(self, 'assumed_rates',
                               tuple(float(p) for p in self.assumed_rates))
            if any(not 0.0 <= p <= 1.0
                   for p in self.assumed_rates):  # type: ignore[union-attr]
                raise InvalidParameterError('Assumed rates must be in [0, 1]')

    def efficacy_cutoff(self, success: SuccessRule) -> float:
        return (success.posterior_cutoff
                if self.cutoff is None else self.cutoff)


NO_MONITORING: Final[MonitoringRule] = MonitoringRule('none')
POSTERIOR_MONITORING: Final[MonitoringRule] = MonitoringRule('posterior')


@dataclass(frozen=True)
class InterimState:
    data: Tuple[BinomialSummary, ...]
    look_index: int
    planned_looks: Tuple[Tuple[int, ...], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, 'data', tuple(self.data))
        object.__setattr__(self, 'planned_looks',
                           tuple(tuple(look) for look in self.planned_looks))
        if not self.planned_looks:
            raise InvalidParameterError('Schedule has no looks')
        if not 0 <= self.look_index < len(self.planned_looks):
            raise InvalidParameterError(
                f'Look {self.look_index} outside a schedule of '
                f'{len(self.planned_looks)} looks')
        planned = self.planned_looks[self.look_index]
        if len(planned) != len(self.data):
            raise InvalidParameterError('State and schedule disagree on arms')
        if any(d.trials != n for d, n in zip(self.data, planned)):
            raise InvalidParameterError(
                f'Accumulated trials {[d.trials for d in self.data]} differ '
                f'from the planned sizes {list(planned)} at look '
                f'{self.look_index}')

    @property
    def is_final(self) -> bool:
        return self.look_index == len(self.planned_looks) - 1

    @property
    def final_sizes(self) -> Tuple[int, ...]:
        return self.planned_looks[-1]

    @property
    def remaining(self) -> Tuple[int, ...]:
        return tuple(n - d.trials for n, d in zip(self.final_sizes, self.data))


class DecisionKind(Enum):
    STOP_EFFICACY = 'StopEfficacy'
    STOP_FUTILITY = 'StopFutility'
    CONTINUE = 'Continue'
    FINAL_SUCCESS = 'FinalSuccess'
    FINAL_FAILURE = 'FinalFailure'

    @property
    def terminal(self) -> bool:
        return self is not DecisionKind.CONTINUE

    @property
    def success(self) -> bool:
        return self in (DecisionKind.STOP_EFFICACY, DecisionKind.FINAL_SUCCESS)


@dataclass(frozen=True)
class Decision:
    kind: DecisionKind
    evidence: float


class SuccessCheck(NamedTuple):
    passed: bool
    evidence: float


def _breakpoints(dist: Distribution, lo: float, hi: float) -> Sequence[float]:
    centers = [(dist.mean, math.sqrt(dist.variance))]
    if isinstance(dist, BetaMixture):
        centers.extend(
            (p.mean, math.sqrt(p.variance))
            for w, p in sorted(dist.components, key=lambda c: -c[0])[:8]
            if w > 0.05)
    points = sorted({
        m + k * s
        for m, s in centers for k in (-6.0, -3.0, -1.0, 0.0, 1.0, 3.0, 6.0)
        if lo < m + k * s < hi
    })
    return points


def effect_prob_two_arm(post_t: Distribution,
                        post_c: Distribution,
                        a: float,
                        tol: float = QUADRATURE_TOL) -> float:
    """Pr(p_t - p_c > a) for independent treatment and control posteriors.

    Continuous control posteriors are integrated against the treatment tail
    with adaptive quadrature; grid posteriors contribute their point masses.
    """
    if not -1.0 <= a <= 1.0:
        raise InvalidParameterError('Effect threshold must be in [-1, 1]')
    if isinstance(post_c, GridDensity):
        return _clip(
            float(post_c.masses @ tail_probs(post_t, post_c.grid + a)))
    if isinstance(post_t, GridDensity):
        return _clip(
            float(post_t.masses @ (1.0 - tail_probs(post_c, post_t.grid - a))))
    # below -a the treatment tail is identically one
    lo, hi = max(0.0, -a), min(1.0, 1.0 - a)
    below = 1.0 - post_c.prob_exceeds(lo) if lo > 0.0 else 0.0
    if hi <= lo:
        return _clip(below)

    def integrand(x: float) -> float:
        return float(post_c.pdf(x)) * post_t.prob_exceeds(x + a)

    points = _breakpoints(post_c, lo, hi)
    value, _ = quad(integrand,
                    lo,
                    hi,
                    points=points or None,
                    epsabs=tol * 1e-2,
                    epsrel=1e-10,
                    limit=200)
    return _clip(below + value)


def _evidence(posts: Sequence[Distribution], a: float,
              tol: float = QUADRATURE_TOL) -> float:
    if len(posts) == 1:
        return posts[0].prob_exceeds(a)
    return effect_prob_two_arm(posts[0], posts[1], a, tol)


def posterior_success(posteriors: Sequence[Distribution],
                      rule: SuccessRule,
                      tol: float = QUADRATURE_TOL) -> SuccessCheck:
    if len(posteriors) != rule.arms:
        raise InvalidParameterError(
            f'{rule.comparison} rule needs {rule.arms} posterior(s)')
    evidence = _evidence(posteriors, rule.effect_threshold, tol)
    return SuccessCheck(rule.is_met(evidence), evidence)


def _key(data: Sequence[BinomialSummary]) -> DataKey:
    return tuple((d.successes, d.trials) for d in data)


class EvidenceCache:
    """Posteriors and Pr(effect > a) keyed by sufficient statistics.

    Nothing here depends on the posterior cutoff, so one cache serves every
    cutoff a calibration search visits.
    """
    def __init__(self,
                 priors: Sequence[Distribution],
                 effect_threshold: float,
                 comparison: Comparison = 'one-arm',
                 quadrature_tol: float = QUADRATURE_TOL):
        self.priors: Tuple[Distribution, ...] = tuple(priors)
        self.effect_threshold = effect_threshold
        self.comparison = comparison
        self.quadrature_tol = quadrature_tol
        if len(self.priors) != (1 if comparison == 'one-arm' else 2):
            raise InvalidParameterError(
                f'{comparison} comparisons need '
                f'{1 if comparison == "one-arm" else 2} prior(s)')
        self._posteriors: Dict[Tuple[int, int, int], Distribution] = {}
        self._evidence: Dict[DataKey, float] = {}
        self._regions: Dict[Tuple[Tuple[int, ...], float], np.ndarray] = {}

    @property
    def arms(self) -> int:
        return len(self.priors)

    def matches(self, rule: SuccessRule) -> bool:
        return (rule.effect_threshold == self.effect_threshold
                and rule.comparison == self.comparison)

    def posterior(self, arm: int, data: BinomialSummary) -> Distribution:
        key = (arm, data.successes, data.trials)
        post = self._posteriors.get(key)
        if post is None:
            post = posterior(self.priors[arm], data)
            self._posteriors[key] = post
        return post

    def evidence(self, data: Sequence[BinomialSummary]) -> float:
        key = _key(data)
        value = self._evidence.get(key)
        if value is None:
            posts = [self.posterior(k, d) for k, d in enumerate(data)]
            value = _evidence(posts, self.effect_threshold,
                              self.quadrature_tol)
            self._evidence[key] = value
        return value

    def _met(self, sizes: Sequence[int], counts: Sequence[int],
             cutoff: float) -> bool:
        return self.evidence([
            BinomialSummary(y, n) for y, n in zip(counts, sizes)
        ]) >= cutoff

    def _boundary(self, lo: int, n: int, met: Callable[[int], bool]) -> int:
        hi = n + 1
        while lo < hi:
            mid = (lo + hi) // 2
            if met(mid):
                hi = mid
            else:
                lo = mid + 1
        return lo

    def region(self,
               sizes: Sequence[int],
               cutoff: float,
               cell_budget: int = PPOS_CELL_BUDGET) -> np.ndarray:
        """Success indicator over every success-count outcome at ``sizes``.

        Evidence rises with treatment successes and falls with control
        successes, so only the boundary is searched.
        """
        sizes = tuple(int(n) for n in sizes)
        key = (sizes, cutoff)
        cached = self._regions.get(key)
        if cached is not None:
            return cached
        cells = int(np.prod([n + 1 for n in sizes]))
        if cells > cell_budget:
            raise BudgetExceededError('enumeration budget exceeded')
        if self.arms == 1:
            n = sizes[0]
            b = self._boundary(0, n,
                               lambda y: self._met(sizes, (y, ), cutoff))
            region = np.arange(n + 1) >= b
        else:
            nt, nc = sizes
            region = np.zeros((nt + 1, nc + 1), dtype=bool)
            b = 0
            for yc in range(nc + 1):
                b = self._boundary(
                    b, nt, lambda yt: self._met(sizes, (yt, yc), cutoff))
                region[b:, yc] = True
        _log.debug('Success region at %s for cutoff %.6g covers %d of %d '
                   'outcomes', sizes, cutoff, int(region.sum()), cells)
        region.setflags(write=False)
        self._regions[key] = region
        return region


@dataclass(frozen=True, eq=False)
class FinalAnalysis:
    """The final-look success rule bound to a schedule's final sizes."""
    cache: EvidenceCache
    rule: SuccessRule
    final_sizes: Tuple[int, ...]
    cell_budget: int = PPOS_CELL_BUDGET

    def __post_init__(self) -> None:
        object.__setattr__(self, 'final_sizes',
                           tuple(int(n) for n in self.final_sizes))
        if not self.cache.matches(self.rule):
            raise InvalidParameterError(
                'Evidence cache was built for a different threshold or '
                'comparison')
        if len(self.final_sizes) != self.cache.arms:
            raise InvalidParameterError('Need one final size per arm')

    @classmethod
    def build(cls,
              priors: Sequence[Distribution],
              rule: SuccessRule,
              final_sizes: Sequence[int],
              cell_budget: int = PPOS_CELL_BUDGET,
              quadrature_tol: float = QUADRATURE_TOL) -> 'FinalAnalysis':
        cache = EvidenceCache(priors, rule.effect_threshold, rule.comparison,
                              quadrature_tol)
        return cls(cache, rule, tuple(final_sizes), cell_budget)

    @property
    def region(self) -> np.ndarray:
        return self.cache.region(self.final_sizes, self.rule.posterior_cutoff,
                                 self.cell_budget)

    def critical_count(self) -> int:
        """Smallest final treatment success count declared a success.

        One-arm only; ``n + 1`` when no outcome succeeds.
        """
        if self.cache.arms != 1:
            raise InvalidParameterError(
                'A single critical count exists for one-arm designs only')
        hits = np.flatnonzero(self.region)
        return int(hits[0]) if len(hits) else self.final_sizes[0] + 1

    def check(self, data: Sequence[BinomialSummary]) -> SuccessCheck:
        evidence = self.cache.evidence(data)
        return SuccessCheck(self.rule.is_met(evidence), evidence)

    def _check_state(self, state: InterimState) -> None:
        if state.final_sizes != self.final_sizes:
            raise InvalidParameterError(
                'State schedule does not end at the analysed final sizes')

    def _weighted_region(self, state: InterimState,
                         pmfs: Sequence[np.ndarray]) -> float:
        if len(pmfs) == 1:
            y = state.data[0].successes
            window = self.region[y:y + len(pmfs[0])]
            return _clip(float(pmfs[0] @ window))
        cells = len(pmfs[0]) * len(pmfs[1])
        if cells > self.cell_budget:
            raise BudgetExceededError('enumeration budget exceeded')
        yt, yc = (d.successes for d in state.data)
        window = self.region[yt:yt + len(pmfs[0]), yc:yc + len(pmfs[1])]
        return _clip(float(pmfs[0] @ window.astype(float) @ pmfs[1]))

    def ppos(self, state: InterimState) -> float:
        self._check_state(state)
        pmfs = [
            predictive_pmf(self.cache.posterior(k, d), r)
            for k, (d, r) in enumerate(zip(state.data, state.remaining))
        ]
        return self._weighted_region(state, pmfs)

    def conditional_power(self, state: InterimState,
                          assumed_rates: Sequence[float]) -> float:
        self._check_state(state)
        if len(assumed_rates) != len(state.data):
            raise InvalidParameterError('Need one assumed rate per arm')
        if any(not 0.0 <= p <= 1.0 for p in assumed_rates):
            raise InvalidParameterError('Assumed rates must be in [0, 1]')
        pmfs = [
            binom.pmf(np.arange(r + 1), r, p)
            for r, p in zip(state.remaining, assumed_rates)
        ]
        return self._weighted_region(state, pmfs)


def ppos(state: InterimState,
         priors: Sequence[Distribution],
         rule: SuccessRule,
         cell_budget: int = PPOS_CELL_BUDGET) -> float:
    """Predictive probability that the final analysis declares success."""
    analysis = FinalAnalysis.build(priors, rule, state.final_sizes,
                                   cell_budget)
    return analysis.ppos(state)


def conditional_power(state: InterimState, assumed_rates: Sequence[float],
                      critical_count: int) -> float:
    """Chance the treatment arm reaches ``critical_count`` final successes.
    """
    p = float(assumed_rates[0])
    if not 0.0 <= p <= 1.0:
        raise InvalidParameterError('Assumed rates must be in [0, 1]')
    shortfall = critical_count - state.data[0].successes
    if shortfall <= 0:
        return 1.0
    return float(binom.sf(shortfall - 1, state.remaining[0], p))


def conditional_power_region(state: InterimState,
                             assumed_rates: Sequence[float],
                             analysis: FinalAnalysis) -> float:
    return analysis.conditional_power(state, assumed_rates)


def evaluate_interim(state: InterimState,
                     priors: Sequence[Distribution],
                     success: SuccessRule,
                     futility: Optional[FutilityRule] = None,
                     monitoring: MonitoringRule = POSTERIOR_MONITORING,
                     analysis: Optional[FinalAnalysis] = None) -> Decision:
    """Decide at one look; efficacy is checked before futility."""
    if analysis is None:
        analysis = FinalAnalysis.build(priors, success, state.final_sizes)
    elif analysis.rule != success:
        raise InvalidParameterError('Analysis was built for another rule')
    analysis._check_state(state)
    if state.is_final:
        passed, evidence = analysis.check(state.data)
        return Decision(
            DecisionKind.FINAL_SUCCESS if passed else
            DecisionKind.FINAL_FAILURE, evidence)
    statistic: Optional[float] = None
    if monitoring.kind != 'none':
        if monitoring.kind == 'posterior':
            statistic = analysis.cache.evidence(state.data)
        elif monitoring.kind == 'ppos':
            statistic = analysis.ppos(state)
        else:
            statistic = analysis.conditional_power(
                state,
                monitoring.assumed_rates)  # type: ignore[arg-type]
        if statistic >= monitoring.efficacy_cutoff(success):
            return Decision(DecisionKind.STOP_EFFICACY, statistic)
    if futility is not None:
        predictive = analysis.ppos(state)
        if predictive < futility.ppos_cutoff:
            return Decision(DecisionKind.STOP_FUTILITY, predictive)
        statistic = predictive
    if statistic is None:
        statistic = analysis.cache.evidence(state.data)
    return Decision(DecisionKind.CONTINUE, statistic)
