"""Sequential trial simulation and operating characteristics."""
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple
import logging
import math

from scipy.signal import convolve2d
from scipy.stats import beta as beta_dist, binom
from typing_extensions import Final, Literal
import numpy as np

from .constants import LOGGER_NAME
from .distributions import BetaParams, BinomialSummary, Distribution
from .exceptions import BudgetExceededError, InvalidParameterError
from .rules import (POSTERIOR_MONITORING, Decision, DecisionKind,
                    EvidenceCache, FinalAnalysis, FutilityRule, InterimState,
                    MonitoringRule, SuccessRule, evaluate_interim)
from .settings import DEFAULT_SETTINGS, Settings
from .util import chunk_ranges

__all__ = ('DesignPrior', 'OCMode', 'OCReport', 'OCStandardErrors',
           'ReplicateStream',
           'Scenario', 'TrialDesign', 'TrialResult', 'bayesian_oc',
           'exact_oc', 'monte_carlo_oc', 'simulate_trial')

_log: Final[logging.Logger] = logging.getLogger(LOGGER_NAME)

OCMode = Literal['exact', 'monte-carlo']
# true effects this close to the threshold count as no effect
EFFECT_TIE_TOL: Final[float] = 1e-12


@dataclass(frozen=True, eq=False)
class TrialDesign:
    """A pre-specified sequential design.

    ``looks`` holds cumulative per-arm sample sizes, one tuple per look.
    Decisions are memoised per (look, sufficient statistic); designs derived
    with ``with_cutoff`` or ``with_final_size`` share the evidence cache.
    """
    looks: Tuple[Tuple[int, ...], ...]
    priors: Tuple[Distribution, ...]
    success: SuccessRule
    futility: Optional[FutilityRule] = None
    monitoring: MonitoringRule = POSTERIOR_MONITORING
    settings: Settings = DEFAULT_SETTINGS
    evidence_cache: Optional[EvidenceCache] = field(default=None,
                                                    repr=False)

    def __post_init__(self) -> None:
        looks = tuple(tuple(int(n) for n in look) for look in self.looks)
        object.__setattr__(self, 'looks', looks)
        object.__setattr__(self, 'priors', tuple(self.priors))
        arms = self.success.arms
        if not looks:
            raise InvalidParameterError('A design needs a final look')
        if len(self.priors) != arms:
            raise InvalidParameterError(
                f'{self.success.comparison} designs need {arms} prior(s)')
        if any(len(look) != arms for look in looks):
            raise InvalidParameterError(
                f'Every look needs {arms} cumulative size(s)')
        for k in range(arms):
            sizes = [0] + [look[k] for look in looks]
            if any(a >= b for a, b in zip(sizes, sizes[1:])):
                raise InvalidParameterError(
                    'Cumulative sample sizes must be positive and strictly '
                    'increasing')
        ma = self.monitoring.assumed_rates
        if ma is not None and len(ma) != arms:
            raise InvalidParameterError('Need one assumed rate per arm')
        cache = self.evidence_cache
        if cache is None or not cache.matches(self.success):
            cache = EvidenceCache(self.priors, self.success.effect_threshold,
                                  self.success.comparison,
                                  self.settings.quadrature_tol)
            object.__setattr__(self, 'evidence_cache', cache)
        object.__setattr__(self, '_decisions', {})

    @property
    def arms(self) -> int:
        return self.success.arms

    @property
    def final_sizes(self) -> Tuple[int, ...]:
        return self.looks[-1]

    @cached_property
    def analysis(self) -> FinalAnalysis:
        assert self.evidence_cache is not None
        return FinalAnalysis(self.evidence_cache, self.success,
                             self.final_sizes, self.settings.ppos_cell_budget)

    def decide(self, look: int, data: Sequence[BinomialSummary]) -> Decision:
        key = (look, tuple((d.successes, d.trials) for d in data))
        decisions: Dict = self._decisions  # type: ignore[attr-defined]
        decision = decisions.get(key)
        if decision is None:
            state = InterimState(tuple(data), look, self.looks)
            decision = evaluate_interim(state, self.priors, self.success,
                                        self.futility, self.monitoring,
                                        self.analysis)
            decisions[key] = decision
        return decision

    def with_cutoff(self, cutoff: float) -> 'TrialDesign':
        return replace(self,
                       success=self.success.with_cutoff(cutoff),
                       evidence_cache=self.evidence_cache)

    def with_final_size(self, n: int) -> 'TrialDesign':
        """Rescale every look so the treatment arm ends at ``n``."""
        scale = n / self.final_sizes[0]
        looks = tuple(
            tuple(int(round(size * scale)) for size in look)
            for look in self.looks[:-1])
        final = tuple(
            int(round(size * scale)) if k else int(n)
            for k, size in enumerate(self.final_sizes))
        return replace(self,
                       looks=looks + (final, ),
                       evidence_cache=self.evidence_cache)


@dataclass(frozen=True)
class Scenario:
    """True response rates, with optional per-look drift on the control."""
    rates: Tuple[float, ...]
    drift: Optional[Tuple[float, ...]] = None
    label: str = ''

    def __post_init__(self) -> None:
        object.__setattr__(self, 'rates', tuple(float(p) for p in self.rates))
        if not self.rates or len(self.rates) > 2:
            raise InvalidParameterError('A scenario has one or two arms')
        if any(not 0.0 <= p <= 1.0 for p in self.rates):
            raise InvalidParameterError('True rates must be in [0, 1]')
        if self.drift is not None:
            object.__setattr__(self, 'drift',
                               tuple(float(d) for d in self.drift))
            if len(self.rates) != 2:
                raise InvalidParameterError(
                    'Drift applies to a concurrent control arm')

    @property
    def effect(self) -> float:
        if len(self.rates) == 1:
            return self.rates[0]
        return self.rates[0] - self.rates[1]

    def rates_at(self, look: int) -> Tuple[float, ...]:
        if self.drift is None:
            return self.rates
        if look >= len(self.drift):
            raise InvalidParameterError(
                f'Scenario {self.label!r} has no drift for look {look}')
        control = min(1.0, max(0.0, self.rates[1] + self.drift[look]))
        return (self.rates[0], control)

    def check(self, design: TrialDesign) -> None:
        if len(self.rates) != design.arms:
            raise InvalidParameterError(
                f'Scenario {self.label!r} has {len(self.rates)} arm(s), the '
                f'design {design.arms}')
        if self.drift is not None and len(self.drift) != len(design.looks):
            raise InvalidParameterError(
                f'Scenario {self.label!r} needs one drift per look')


@dataclass(frozen=True)
class ReplicateStream:
    """Counter-based random stream for one replicate.

    Each look draws from a Philox generator keyed by (master seed, scenario,
    replicate, look), so no replicate depends on scheduling.
    """
    master_seed: int
    scenario_index: int
    replicate: int

    def generator(self, look: int) -> np.random.Generator:
        seq = np.random.SeedSequence(self.master_seed,
                                     spawn_key=(self.scenario_index,
                                                self.replicate, look))
        return np.random.Generator(np.random.Philox(seq))


@dataclass(frozen=True)
class TrialResult:
    decision: Decision
    stop_look: int
    enrolled: Tuple[int, ...]
    evidence: float


def simulate_trial(design: TrialDesign, scenario: Scenario,
                   stream: ReplicateStream) -> TrialResult:
    scenario.check(design)
    data = [BinomialSummary(0, 0)] * design.arms
    previous = (0, ) * design.arms
    for look, sizes in enumerate(design.looks):
        rng = stream.generator(look)
        rates = scenario.rates_at(look)
        data = [
            d + BinomialSummary(int(rng.binomial(n - m, p)), n - m)
            for d, n, m, p in zip(data, sizes, previous, rates)
        ]
        decision = design.decide(look, data)
        if decision.kind.terminal:
            return TrialResult(decision, look, sizes,
                               design.analysis.cache.evidence(data))
        previous = sizes
    raise AssertionError('final look must be terminal')


@dataclass(frozen=True)
class OCStandardErrors:
    reject_prob: float
    efficacy_stop: Tuple[float, ...]
    futility_stop: Tuple[float, ...]
    expected_sample_size: Tuple[float, ...]
    degenerate: bool


@dataclass(frozen=True)
class OCReport:
    """Operating characteristics of one design under one scenario.

    The final look's ``efficacy_stop`` and ``futility_stop`` hold the final
    success and final failure probabilities, so all stopping probabilities
    sum to one.
    """
    reject_prob: float
    efficacy_stop: Tuple[float, ...]
    futility_stop: Tuple[float, ...]
    expected_sample_size: Tuple[float, ...]
    mode: OCMode
    label: str = ''
    assurance: Optional[float] = None
    pcd: Optional[float] = None
    replicates: Optional[int] = None
    standard_errors: Optional[OCStandardErrors] = None

    @property
    def stop_prob(self) -> Tuple[float, ...]:
        return tuple(e + f
                     for e, f in zip(self.efficacy_stop, self.futility_stop))


def _check_exact_budget(design: TrialDesign) -> None:
    s = design.settings
    final = design.final_sizes
    if design.arms == 1:
        over = final[0] > s.exact_one_arm_max_n
    else:
        cells = (final[0] + 1) * (final[1] + 1) * len(design.looks)
        over = max(final) > s.exact_two_arm_max_n or cells > s.dp_cell_budget
    if over:
        raise BudgetExceededError(
            f'Final sizes {list(final)} exceed the exact enumeration '
            'budget; use monte_carlo_oc')


def exact_oc(design: TrialDesign, scenario: Scenario) -> OCReport:
    """Exact OCs by propagating success-count probabilities across looks."""
    scenario.check(design)
    _check_exact_budget(design)
    looks = design.looks
    mass = np.ones((1, ) * design.arms)
    previous = (0, ) * design.arms
    efficacy: List[float] = []
    futility: List[float] = []
    for look, sizes in enumerate(looks):
        rates = scenario.rates_at(look)
        steps = [
            binom.pmf(np.arange(n - m + 1), n - m, p)
            for n, m, p in zip(sizes, previous, rates)
        ]
        if design.arms == 1:
            mass = np.convolve(mass, steps[0])
        else:
            mass = convolve2d(mass, np.outer(steps[0], steps[1]))
        if look == len(looks) - 1:
            region = design.analysis.region
            efficacy.append(float(mass[region].sum()))
            futility.append(float(mass[~region].sum()))
            break
        eff = np.zeros(mass.shape, dtype=bool)
        fut = np.zeros(mass.shape, dtype=bool)
        for idx in zip(*np.nonzero(mass)):
            data = [BinomialSummary(int(y), n) for y, n in zip(idx, sizes)]
            kind = design.decide(look, data).kind
            eff[idx] = kind is DecisionKind.STOP_EFFICACY
            fut[idx] = kind is DecisionKind.STOP_FUTILITY
        efficacy.append(float(mass[eff].sum()))
        futility.append(float(mass[fut].sum()))
        mass = np.where(eff | fut, 0.0, mass)
        previous = sizes
    stops = np.add(efficacy, futility)
    ess = tuple(
        float(stops @ np.array([look[k] for look in looks]))
        for k in range(design.arms))
    _log.debug('Exact OCs for %r: reject %.6g', scenario.label,
               math.fsum(efficacy))
    return OCReport(reject_prob=min(1.0, math.fsum(efficacy)),
                    efficacy_stop=tuple(efficacy),
                    futility_stop=tuple(futility),
                    expected_sample_size=ess,
                    mode='exact',
                    label=scenario.label)


@dataclass
class _Tally:
    """Integer counts; merging is element-wise addition."""
    efficacy: np.ndarray
    futility: np.ndarray
    enrolled: np.ndarray
    enrolled_sq: np.ndarray
    replicates: int = 0

    @classmethod
    def empty(cls, looks: int, arms: int) -> '_Tally':
        return cls(np.zeros(looks, dtype=np.int64),
                   np.zeros(looks, dtype=np.int64),
                   np.zeros(arms, dtype=np.int64),
                   np.zeros(arms, dtype=np.int64))

    def add(self, result: TrialResult) -> None:
        if result.decision.kind.success:
            self.efficacy[result.stop_look] += 1
        else:
            self.futility[result.stop_look] += 1
        enrolled = np.asarray(result.enrolled, dtype=np.int64)
        self.enrolled += enrolled
        self.enrolled_sq += enrolled * enrolled
        self.replicates += 1

    def merge(self, other: '_Tally') -> '_Tally':
        return _Tally(self.efficacy + other.efficacy,
                      self.futility + other.futility,
                      self.enrolled + other.enrolled,
                      self.enrolled_sq + other.enrolled_sq,
                      self.replicates + other.replicates)


def _run_chunk(design: TrialDesign, scenario: Scenario, master_seed: int,
               scenario_index: int, start: int, stop: int) -> _Tally:
    tally = _Tally.empty(len(design.looks), design.arms)
    for replicate in range(start, stop):
        tally.add(
            simulate_trial(design, scenario,
                           ReplicateStream(master_seed, scenario_index,
                                           replicate)))
    return tally


def _roots(variances: np.ndarray) -> Tuple[float, ...]:
    return tuple(float(x) for x in np.sqrt(variances))


def _proportion_se(counts: np.ndarray, r: int) -> Tuple[float, ...]:
    p = counts / r
    return tuple(float(x) for x in np.sqrt(p * (1.0 - p) / r))


def monte_carlo_oc(design: TrialDesign,
                   scenario: Scenario,
                   replicates: int,
                   master_seed: int,
                   scenario_index: int = 0,
                   workers: int = 1) -> OCReport:
    """OCs over replicate ids ``0..replicates-1``.

    Results are integer tallies merged by addition, so any worker count gives
    the same report.
    """
    if replicates < 1:
        raise InvalidParameterError('replicates must be at least 1')
    if workers < 1:
        raise InvalidParameterError('workers must be at least 1')
    scenario.check(design)
    chunks = chunk_ranges(replicates, workers)
    _log.debug('Simulating %d replicates of %r in %d chunk(s)', replicates,
               scenario.label, len(chunks))
    if len(chunks) == 1:
        tally = _run_chunk(design, scenario, master_seed, scenario_index, 0,
                           replicates)
    else:
        tally = _Tally.empty(len(design.looks), design.arms)
        with ProcessPoolExecutor(max_workers=len(chunks)) as executor:
            futures = [
                executor.submit(_run_chunk, design, scenario, master_seed,
                                scenario_index, a, b) for a, b in chunks
            ]
            for future in futures:
                tally = tally.merge(future.result())
    r = tally.replicates
    successes = int(tally.efficacy.sum())
    mean_n = tally.enrolled / r
    var_n = np.maximum(tally.enrolled_sq / r - mean_n**2, 0.0)
    reject_se = _proportion_se(np.array([successes]), r)[0]
    eff_se = _proportion_se(tally.efficacy, r)
    fut_se = _proportion_se(tally.futility, r)
    ess_se = tuple(float(x) for x in np.sqrt(var_n / r))
    degenerate = r < 2 or not any((reject_se, ) + eff_se + fut_se + ess_se)
    return OCReport(reject_prob=successes / r,
                    efficacy_stop=tuple(float(c) / r for c in tally.efficacy),
                    futility_stop=tuple(float(c) / r for c in tally.futility),
                    expected_sample_size=tuple(float(x) for x in mean_n),
                    mode='monte-carlo',
                    label=scenario.label,
                    replicates=r,
                    standard_errors=OCStandardErrors(reject_se, eff_se,
                                                     fut_se, ess_se,
                                                     degenerate))


@dataclass(frozen=True)
class DesignPrior:
    """Weighted scenarios over which Bayesian OCs are averaged."""
    atoms: Tuple[Tuple[float, Scenario], ...]

    def __post_init__(self) -> None:
        atoms = tuple((float(w), s) for w, s in self.atoms)
        object.__setattr__(self, 'atoms', atoms)
        if not atoms:
            raise InvalidParameterError('A design prior needs an atom')
        if any(w < 0 for w, _ in atoms) or abs(
                math.fsum(w for w, _ in atoms) - 1.0) > 1e-10:
            raise InvalidParameterError(
                'Design prior weights must be non-negative and sum to 1')

    @classmethod
    def point(cls, scenario: Scenario) -> 'DesignPrior':
        return cls(((1.0, scenario), ))

    @classmethod
    def from_beta(cls,
                  prior: BetaParams,
                  control_rate: Optional[float] = None,
                  grid_size: int = DEFAULT_SETTINGS.design_prior_grid_size
                  ) -> 'DesignPrior':
        """Atoms at cell midpoints weighted by exact Beta cell masses."""
        if grid_size < 1:
            raise InvalidParameterError('grid_size must be positive')
        edges = np.linspace(0.0, 1.0, grid_size + 1)
        weights = np.diff(beta_dist.cdf(edges, prior.alpha, prior.beta))
        weights = weights / weights.sum()
        mids = (edges[1:] + edges[:-1]) / 2.0
        atoms = []
        for w, p in zip(weights, mids):
            rates = (float(p), ) if control_rate is None else (float(p),
                                                               control_rate)
            atoms.append((float(w), Scenario(rates, label=f'p={p:.6g}')))
        return cls(tuple(atoms))


def bayesian_oc(design: TrialDesign,
                dprior: DesignPrior,
                mode: OCMode = 'exact',
                replicates: Optional[int] = None,
                master_seed: int = 0,
                workers: int = 1,
                label: str = 'design-prior') -> OCReport:
    """Assurance and probability of a correct decision under ``dprior``.

    A decision is correct when it declares success exactly for true effects
    above the success rule's threshold; a tie counts as no effect.
    """
    if mode == 'monte-carlo' and not replicates:
        raise InvalidParameterError('monte-carlo mode needs replicates')
    a = design.success.effect_threshold
    n_looks = len(design.looks)
    assurance = pcd = 0.0
    eff = np.zeros(n_looks)
    fut = np.zeros(n_looks)
    ess = np.zeros(design.arms)
    reject_var = 0.0
    eff_var = np.zeros(n_looks)
    fut_var = np.zeros(n_looks)
    ess_var = np.zeros(design.arms)
    for i, (w, scenario) in enumerate(dprior.atoms):
        if w == 0.0:
            continue
        if mode == 'exact':
            report = exact_oc(design, scenario)
        else:
            report = monte_carlo_oc(design, scenario,
                                    replicates,  # type: ignore[arg-type]
                                    master_seed, i, workers)
            assert report.standard_errors is not None
            se_i = report.standard_errors
            reject_var += (w * se_i.reject_prob)**2
            eff_var += (w * np.asarray(se_i.efficacy_stop))**2
            fut_var += (w * np.asarray(se_i.futility_stop))**2
            ess_var += (w * np.asarray(se_i.expected_sample_size))**2
        assurance += w * report.reject_prob
        effective = scenario.effect > a + EFFECT_TIE_TOL
        pcd += w * (report.reject_prob
                    if effective else 1.0 - report.reject_prob)
        eff += w * np.asarray(report.efficacy_stop)
        fut += w * np.asarray(report.futility_stop)
        ess += w * np.asarray(report.expected_sample_size)
    assurance = min(1.0, max(0.0, assurance))
    pcd = min(1.0, max(0.0, pcd))
    _log.info('Assurance %.6g, probability of correct decision %.6g',
              assurance, pcd)
    se = None
    if mode == 'monte-carlo':
        se = OCStandardErrors(math.sqrt(reject_var), _roots(eff_var),
                              _roots(fut_var), _roots(ess_var),
                              reject_var == 0.0)
    return OCReport(reject_prob=assurance,
                    efficacy_stop=tuple(float(x) for x in eff),
                    futility_stop=tuple(float(x) for x in fut),
                    expected_sample_size=tuple(float(x) for x in ess),
                    mode=mode,
                    label=label,
                    assurance=assurance,
                    pcd=pcd,
                    replicates=replicates if mode == 'monte-carlo' else None,
                    standard_errors=se)
