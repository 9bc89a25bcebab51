"""Phase I dose escalation: 3+3, i3+3, BOIN, mTPI/mTPI-2 and CRM."""
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import List, Optional, Sequence, Tuple
import logging
import math

from scipy.optimize import isotonic_regression
from scipy.special import xlog1py, xlogy
from scipy.stats import norm
from typing_extensions import Final, Literal
import numpy as np

from .constants import (BOIN_PHI1_FACTOR, BOIN_PHI2_FACTOR,
                        ELIMINATION_MIN_TREATED, LOGGER_NAME, MTPI_EPSILON)
from .distributions import BetaParams, GridDensity, update_grid
from .engine import ReplicateStream
from .exceptions import DoseFindingError, InvalidParameterError
from .settings import DEFAULT_SETTINGS, Settings
from .util import chunk_ranges, is_strictly_increasing

__all__ = ('BoinBoundaries', 'CrmRecommendation', 'CrmSpec', 'DecisionRow',
           'DoseMethod', 'DoseToxState', 'EscalationDecision',
           'EscalationDesign', 'EscalationKind', 'EscalationOC',
           'EscalationResult', 'MtpiSpec', 'boin_boundaries', 'boin_decide',
           'crm_posterior', 'crm_recommend', 'decision_table', 'mtpi_decide',
           'mtpi_upm', 'overdose_eliminate', 'rule_3p3', 'rule_i3p3',
           'select_mtd', 'simulate_escalation', 'simulate_escalation_oc')

_log: Final[logging.Logger] = logging.getLogger(LOGGER_NAME)

DoseMethod = Literal['3+3', 'i3+3', 'boin', 'mtpi', 'crm']
DOSE_METHODS: Final[Tuple[str, ...]] = ('3+3', 'i3+3', 'boin', 'mtpi', 'crm')
VAGUE_TOXICITY_PRIOR: Final[BetaParams] = BetaParams(1.0, 1.0)


@dataclass(frozen=True)
class DoseToxState:
    treated: Tuple[int, ...]
    dlts: Tuple[int, ...]
    current_dose: int = 0
    eliminated: Tuple[bool, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, 'treated', tuple(int(n)
                                                  for n in self.treated))
        object.__setattr__(self, 'dlts', tuple(int(y) for y in self.dlts))
        if not self.eliminated:
            object.__setattr__(self, 'eliminated',
                               (False, ) * len(self.treated))
        object.__setattr__(self, 'eliminated',
                           tuple(bool(e) for e in self.eliminated))
        n = len(self.treated)
        if not n or len(self.dlts) != n or len(self.eliminated) != n:
            raise InvalidParameterError(
                'Need treated, DLT and elimination entries for every dose')
        if any(not 0 <= y <= t for y, t in zip(self.dlts, self.treated)):
            raise InvalidParameterError('Need 0 <= DLTs <= treated per dose')
        if not 0 <= self.current_dose < n:
            raise InvalidParameterError(
                f'Current dose {self.current_dose} outside {n} doses')
        if self.eliminated[self.current_dose]:
            raise InvalidParameterError('Current dose is eliminated')

    @classmethod
    def empty(cls, n_doses: int, start_dose: int = 0) -> 'DoseToxState':
        return cls((0, ) * n_doses, (0, ) * n_doses, start_dose)

    @classmethod
    def single(cls, treated: int, dlts: int) -> 'DoseToxState':
        """Three doses with data only at the middle (current) one."""
        return cls((0, treated, 0), (0, dlts, 0), 1)

    @property
    def n_doses(self) -> int:
        return len(self.treated)

    @property
    def current(self) -> Tuple[int, int]:
        return self.treated[self.current_dose], self.dlts[self.current_dose]

    @property
    def total_treated(self) -> int:
        return sum(self.treated)

    def with_cohort(self, size: int, dlts: int) -> 'DoseToxState':
        d = self.current_dose
        treated = list(self.treated)
        tox = list(self.dlts)
        treated[d] += size
        tox[d] += dlts
        return replace(self, treated=tuple(treated), dlts=tuple(tox))


class EscalationKind(Enum):
    ESCALATE = 'Escalate'
    STAY = 'Stay'
    DE_ESCALATE = 'DeEscalate'
    ELIMINATE = 'Eliminate'
    STOP_TRIAL = 'StopTrial'


@dataclass(frozen=True)
class EscalationDecision:
    kind: EscalationKind


ESCALATE: Final = EscalationDecision(EscalationKind.ESCALATE)
STAY: Final = EscalationDecision(EscalationKind.STAY)
DE_ESCALATE: Final = EscalationDecision(EscalationKind.DE_ESCALATE)


def _current_rate(state: DoseToxState) -> Tuple[int, int, float]:
    n, y = state.current
    if n == 0:
        raise DoseFindingError(
            f'No patients treated at dose {state.current_dose}')
    return n, y, y / n


def _guard(state: DoseToxState,
           decision: EscalationDecision) -> EscalationDecision:
    """Escalation into a missing or eliminated dose becomes Stay."""
    if decision.kind is EscalationKind.ESCALATE:
        up = state.current_dose + 1
        if up >= state.n_doses or state.eliminated[up]:
            return STAY
    return decision


def rule_3p3(state: DoseToxState) -> EscalationDecision:
    n, y = state.current
    if n == 3:
        if y == 0:
            return ESCALATE
        return STAY if y == 1 else DE_ESCALATE
    if n == 6:
        return ESCALATE if y <= 1 else DE_ESCALATE
    raise DoseFindingError(f'3+3 undefined for {n} patients at a dose')


def rule_i3p3(state: DoseToxState, target: float, ei_low: float,
              ei_high: float) -> EscalationDecision:
    if not (0.0 < ei_low < ei_high < 1.0 and ei_low <= target <= ei_high):
        raise InvalidParameterError(
            'Need 0 < ei_low <= target <= ei_high < 1')
    n, y, r = _current_rate(state)
    if r < ei_low:
        return _guard(state, ESCALATE)
    if r <= ei_high:
        return STAY
    if (y - 1) / n < ei_low:
        return STAY
    return DE_ESCALATE


@dataclass(frozen=True)
class BoinBoundaries:
    target: float
    phi1: float
    phi2: float
    lambda_e: float
    lambda_d: float

    def __post_init__(self) -> None:
        if not self.phi1 < self.target < self.phi2:
            raise InvalidParameterError('Need phi1 < target < phi2')
        if not self.lambda_e < self.target < self.lambda_d:
            raise InvalidParameterError(
                'Need lambda_e < target < lambda_d')


def boin_boundaries(target: float,
                    phi1: Optional[float] = None,
                    phi2: Optional[float] = None) -> BoinBoundaries:
    """Escalation and de-escalation boundaries from the likelihood ratio.

    ``phi1`` and ``phi2`` default to 0.6 and 1.4 times the target.
    """
    phi1 = BOIN_PHI1_FACTOR * target if phi1 is None else phi1
    phi2 = BOIN_PHI2_FACTOR * target if phi2 is None else phi2
    if not 0.0 < phi1 < target < phi2 < 1.0:
        raise InvalidParameterError('Need 0 < phi1 < target < phi2 < 1')
    lambda_e = (math.log((1.0 - phi1) / (1.0 - target)) /
                math.log(target * (1.0 - phi1) / (phi1 * (1.0 - target))))
    lambda_d = (math.log((1.0 - target) / (1.0 - phi2)) /
                math.log(phi2 * (1.0 - target) / (target * (1.0 - phi2))))
    return BoinBoundaries(target, phi1, phi2, lambda_e, lambda_d)


def boin_decide(state: DoseToxState, b: BoinBoundaries) -> EscalationDecision:
    _, _, r = _current_rate(state)
    if r <= b.lambda_e:
        return _guard(state, ESCALATE)
    if r >= b.lambda_d:
        return DE_ESCALATE
    return STAY


@dataclass(frozen=True)
class MtpiSpec:
    target: float
    eps1: float = MTPI_EPSILON
    eps2: float = MTPI_EPSILON
    prior: BetaParams = VAGUE_TOXICITY_PRIOR
    variant: Literal['mtpi', 'mtpi2'] = 'mtpi'

    def __post_init__(self) -> None:
        if not 0.0 < self.target - self.eps1 < self.target + self.eps2 < 1.0:
            raise InvalidParameterError(
                'Need 0 < target - eps1 < target + eps2 < 1')
        if self.variant not in ('mtpi', 'mtpi2'):
            raise InvalidParameterError(f'Unknown variant {self.variant!r}')

    @property
    def interval(self) -> Tuple[float, float]:
        return self.target - self.eps1, self.target + self.eps2


def _mtpi2_cells(spec: MtpiSpec) -> List[Tuple[float, float, int]]:
    """(low, high, class) sub-intervals; class 0 under, 1 target, 2 over."""
    lo, hi = spec.interval
    width = spec.eps1 + spec.eps2
    cells = [(lo, hi, 1)]
    edge = lo
    while edge > 1e-12:
        cells.append((max(0.0, edge - width), edge, 0))
        edge -= width
    edge = hi
    while edge < 1.0 - 1e-12:
        cells.append((edge, min(1.0, edge + width), 2))
        edge += width
    return cells


def mtpi_upm(state: DoseToxState,
             spec: MtpiSpec) -> Tuple[float, float, float]:
    """Unit probability mass of the under, target and over intervals.

    For mTPI-2 each value is the largest UPM among that class's
    sub-intervals.
    """
    n, y, _ = _current_rate(state)
    post = BetaParams(spec.prior.alpha + y, spec.prior.beta + n - y)
    if spec.variant == 'mtpi':
        cells = [(0.0, spec.interval[0], 0), (*spec.interval, 1),
                 (spec.interval[1], 1.0, 2)]
    else:
        cells = _mtpi2_cells(spec)
    upm = [0.0, 0.0, 0.0]
    for low, high, kind in cells:
        mass = post.prob_exceeds(low) - post.prob_exceeds(high)
        upm[kind] = max(upm[kind], mass / (high - low))
    return upm[0], upm[1], upm[2]


def mtpi_decide(state: DoseToxState, spec: MtpiSpec) -> EscalationDecision:
    under, target, over = mtpi_upm(state, spec)
    # ties prefer Stay, then DeEscalate
    best = max(under, target, over)
    if target == best:
        return STAY
    if over == best:
        return DE_ESCALATE
    return _guard(state, ESCALATE)


@dataclass(frozen=True, eq=False)
class CrmSpec:
    """Power model p_j = q_j ** exp(a) with a normal prior on ``a``."""
    skeleton: Tuple[float, ...]
    target: float
    prior_sd: float = DEFAULT_SETTINGS.crm_prior_sd
    grid_bounds: Tuple[float, float] = DEFAULT_SETTINGS.crm_grid_bounds
    grid_size: int = DEFAULT_SETTINGS.crm_grid_size
    no_skip: bool = True
    grid: GridDensity = field(init=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, 'skeleton',
                           tuple(float(q) for q in self.skeleton))
        if not self.skeleton or not is_strictly_increasing(self.skeleton):
            raise InvalidParameterError(
                'Skeleton must be strictly increasing')
        if any(not 0.0 < q < 1.0 for q in self.skeleton):
            raise InvalidParameterError('Skeleton values must lie in (0, 1)')
        if not 0.0 < self.target < 1.0 or self.prior_sd <= 0:
            raise InvalidParameterError('Invalid CRM target or prior sd')
        lo, hi = self.grid_bounds
        if not lo < hi or self.grid_size < 2:
            raise InvalidParameterError('Invalid CRM parameter grid')
        a = np.linspace(lo, hi, self.grid_size)
        w = norm.pdf(a, 0.0, self.prior_sd)
        object.__setattr__(self, 'grid', GridDensity(a, w / w.sum(),
                                                     (lo, hi)))

    @classmethod
    def from_settings(cls,
                      skeleton: Sequence[float],
                      target: float,
                      settings: Settings = DEFAULT_SETTINGS,
                      no_skip: bool = True) -> 'CrmSpec':
        return cls(tuple(skeleton), target, settings.crm_prior_sd,
                   settings.crm_grid_bounds, settings.crm_grid_size, no_skip)


@dataclass(frozen=True)
class CrmRecommendation:
    dose: Optional[int]
    toxicity_means: Tuple[float, ...]


def crm_posterior(state: DoseToxState, spec: CrmSpec) -> GridDensity:
    if state.n_doses != len(spec.skeleton):
        raise InvalidParameterError('Need one skeleton value per dose')
    log_q = np.log(np.asarray(spec.skeleton))
    n = np.asarray(state.treated)
    y = np.asarray(state.dlts)

    def log_lik(a: np.ndarray) -> np.ndarray:
        p = np.exp(np.exp(a)[:, np.newaxis] * log_q[np.newaxis, :])
        return (xlogy(y, p) + xlog1py(n - y, -p)).sum(axis=1)

    if not n.any():
        return spec.grid
    return update_grid(spec.grid, log_lik)


def crm_recommend(state: DoseToxState, spec: CrmSpec) -> CrmRecommendation:
    """Dose whose posterior mean toxicity is closest to the target.

    Eliminated doses are skipped and, with ``no_skip``, escalation is limited
    to one level above the current dose; ties go to the lower dose.
    """
    post = crm_posterior(state, spec)
    exponent = np.exp(post.grid)
    means = np.array([post.masses @ q**exponent for q in spec.skeleton])
    top = state.n_doses - 1
    if spec.no_skip:
        top = min(top, state.current_dose + 1)
    allowed = [
        j for j in range(top + 1)
        if not any(state.eliminated[:j + 1])
    ]
    means_t = tuple(float(m) for m in means)
    if not allowed:
        return CrmRecommendation(None, means_t)
    dist = np.abs(means[allowed] - spec.target)
    best = allowed[int(np.flatnonzero(dist <= dist.min() + 1e-12)[0])]
    return CrmRecommendation(best, means_t)


def overdose_eliminate(
        state: DoseToxState,
        target: float,
        prob_cutoff: float = DEFAULT_SETTINGS.elimination_cutoff,
        min_treated: int = ELIMINATION_MIN_TREATED) -> Tuple[bool, ...]:
    """Flags with every overly toxic dose, and all doses above it, set."""
    if not 0.0 < prob_cutoff < 1.0:
        raise InvalidParameterError('prob_cutoff must be in (0, 1)')
    flags = list(state.eliminated)
    for j, (n, y) in enumerate(zip(state.treated, state.dlts)):
        if n < min_treated:
            continue
        post = BetaParams(VAGUE_TOXICITY_PRIOR.alpha + y,
                          VAGUE_TOXICITY_PRIOR.beta + n - y)
        if post.prob_exceeds(target) > prob_cutoff:
            for k in range(j, len(flags)):
                flags[k] = True
            break
    return tuple(flags)


@dataclass(frozen=True)
class EscalationDesign:
    method: DoseMethod
    n_doses: int
    target: float
    cohort_size: int = 3
    max_n: int = 30
    start_dose: int = 0
    eliminate: bool = True
    elimination_cutoff: float = DEFAULT_SETTINGS.elimination_cutoff
    equivalence_interval: Optional[Tuple[float, float]] = None
    boin: Optional[BoinBoundaries] = None
    mtpi: Optional[MtpiSpec] = None
    crm: Optional[CrmSpec] = None
    mtd_smoothing: float = DEFAULT_SETTINGS.mtd_smoothing

    def __post_init__(self) -> None:
        if self.method not in DOSE_METHODS:
            raise InvalidParameterError(
                f'Unknown dose-finding method {self.method!r}')
        if self.n_doses < 1 or not 0 <= self.start_dose < self.n_doses:
            raise InvalidParameterError('Invalid dose range')
        if not 0.0 < self.target < 1.0:
            raise InvalidParameterError('Target must be in (0, 1)')
        if self.max_n < 1:
            raise InvalidParameterError('max_n must be at least 1')
        if self.cohort_size < 1:
            raise InvalidParameterError('cohort_size must be at least 1')
        if self.method == '3+3' and self.cohort_size != 3:
            raise DoseFindingError('3+3 undefined for cohorts other than 3')
        if self.method == 'i3+3' and self.equivalence_interval is None:
            object.__setattr__(self, 'equivalence_interval',
                               (self.target - MTPI_EPSILON,
                                self.target + MTPI_EPSILON))
        if self.method == 'boin' and self.boin is None:
            object.__setattr__(self, 'boin', boin_boundaries(self.target))
        if self.method == 'mtpi' and self.mtpi is None:
            object.__setattr__(self, 'mtpi', MtpiSpec(self.target))
        if self.method == 'crm':
            if self.crm is None:
                raise InvalidParameterError('CRM designs need a skeleton')
            if len(self.crm.skeleton) != self.n_doses:
                raise InvalidParameterError(
                    'Need one skeleton value per dose')

    def decide(self, state: DoseToxState) -> EscalationDecision:
        if self.method == '3+3':
            return rule_3p3(state)
        if self.method == 'i3+3':
            low, high = self.equivalence_interval  # type: ignore[misc]
            return rule_i3p3(state, self.target, low, high)
        if self.method == 'boin':
            return boin_decide(state, self.boin)  # type: ignore[arg-type]
        if self.method == 'mtpi':
            return mtpi_decide(state, self.mtpi)  # type: ignore[arg-type]
        raise DoseFindingError('CRM recommends doses, not interval decisions')


def select_mtd(state: DoseToxState,
               target: float,
               method: DoseMethod,
               smoothing: float = DEFAULT_SETTINGS.mtd_smoothing
               ) -> Optional[int]:
    """Dose declared the MTD at the end of a trial, if any.

    3+3 takes the highest non-eliminated dose with at most one DLT in six.
    Other designs smooth per-dose rates with Beta(s + y, s + n - y), make
    them monotone by weighted pooled-adjacent-violators, and pick the tried,
    non-eliminated dose closest to the target.
    """
    if method == '3+3':
        cleared = [
            j for j in range(state.n_doses) if state.treated[j] >= 6
            and state.dlts[j] <= 1 and not state.eliminated[j]
        ]
        return cleared[-1] if cleared else None
    tried = [
        j for j in range(state.n_doses)
        if state.treated[j] > 0 and not state.eliminated[j]
    ]
    if not tried:
        return None
    n = np.array([state.treated[j] for j in tried], dtype=float)
    y = np.array([state.dlts[j] for j in tried], dtype=float)
    raw = (smoothing + y) / (2.0 * smoothing + n)
    fitted = isotonic_regression(raw, weights=n, increasing=True).x
    dist = np.abs(fitted - target)
    tied = np.flatnonzero(dist <= dist.min() + 1e-12)
    if fitted[tied[0]] < target:
        return tried[int(tied[-1])]
    return tried[int(tied[0])]


@dataclass(frozen=True)
class EscalationResult:
    """One simulated trial; ``cohorts`` holds (dose, DLTs) per cohort."""
    mtd: Optional[int]
    treated: Tuple[int, ...]
    dlts: Tuple[int, ...]
    eliminated: Tuple[bool, ...]
    final_dose: Optional[int]
    stopped_early: bool
    cohorts: Tuple[Tuple[int, int], ...] = ()


def _next_3p3(state: DoseToxState) -> Tuple[Optional[int], Tuple[bool, ...]]:
    """Next dose (None ends the trial) and flags of doses ruled too toxic."""
    d = state.current_dose
    kind = rule_3p3(state).kind
    flags = state.eliminated
    if kind is EscalationKind.STAY:
        return d, flags
    if kind is EscalationKind.ESCALATE:
        up = d + 1
        if up < state.n_doses and not flags[up] and state.treated[up] == 0:
            return up, flags
        return (d, flags) if state.treated[d] == 3 else (None, flags)
    flags = flags[:d] + (True, ) * (state.n_doses - d)
    if d == 0 or state.treated[d - 1] >= 6:
        return None, flags
    return d - 1, flags


def simulate_escalation(design: EscalationDesign, truth: Sequence[float],
                        stream: ReplicateStream) -> EscalationResult:
    """Run one escalation trial; cohort ``k`` draws from look ``k``."""
    truth = tuple(float(p) for p in truth)
    if len(truth) != design.n_doses:
        raise InvalidParameterError('Need one true DLT rate per dose')
    if any(not 0.0 <= p <= 1.0 for p in truth):
        raise InvalidParameterError('True DLT rates must be in [0, 1]')
    state = DoseToxState.empty(design.n_doses, design.start_dose)
    dose: Optional[int] = state.current_dose
    flags = state.eliminated
    last = state.current_dose
    cohorts: List[Tuple[int, int]] = []
    stopped = False
    while dose is not None and state.total_treated < design.max_n:
        size = min(design.cohort_size, design.max_n - state.total_treated)
        if design.method == '3+3' and size < 3:
            break
        last = dose
        rng = stream.generator(len(cohorts))
        y = int(rng.binomial(size, truth[dose]))
        cohorts.append((dose, y))
        data = state.with_cohort(size, y)
        nxt: Optional[int]
        if design.method == '3+3':
            nxt, flags = _next_3p3(data)
        else:
            if design.eliminate:
                flags = overdose_eliminate(data, design.target,
                                           design.elimination_cutoff)
            if flags[0]:
                nxt = None
            elif flags[dose]:
                nxt = flags.index(True) - 1
            elif design.method == 'crm':
                assert design.crm is not None
                nxt = crm_recommend(replace(data, eliminated=flags),
                                    design.crm).dose
            else:
                kind = design.decide(replace(data, eliminated=flags)).kind
                nxt = dose
                if kind is EscalationKind.ESCALATE:
                    nxt = dose + 1
                elif kind is EscalationKind.DE_ESCALATE:
                    nxt = max(0, dose - 1)
        dose = nxt
        if flags[0]:
            stopped = True
            state = data
            break
        state = replace(data,
                        eliminated=flags,
                        current_dose=last if dose is None else dose)
    mtd = None if stopped else select_mtd(state, design.target,
                                          design.method,
                                          design.mtd_smoothing)
    if dose is None and not stopped:
        dose = last
    return EscalationResult(mtd=mtd,
                            treated=state.treated,
                            dlts=state.dlts,
                            eliminated=flags,
                            final_dose=dose,
                            stopped_early=stopped,
                            cohorts=tuple(cohorts))


@dataclass(frozen=True)
class EscalationOC:
    """Selection and allocation summary over simulated escalation trials.

    Percentages are of all replicates; ``no_mtd_pct`` covers trials that
    stopped early or ended without a dose meeting the MTD convention.
    """
    selection_pct: Tuple[float, ...]
    no_mtd_pct: float
    mean_treated: Tuple[float, ...]
    mean_dlts: Tuple[float, ...]
    stop_prob: float
    replicates: int
    label: str = ''


def _escalation_chunk(design: EscalationDesign, truth: Tuple[float, ...],
                      master_seed: int, scenario_index: int, start: int,
                      stop: int) -> np.ndarray:
    """Counts: selections per dose, no MTD, treated, DLTs, early stops."""
    k = design.n_doses
    counts = np.zeros(3 * k + 2, dtype=np.int64)
    for replicate in range(start, stop):
        result = simulate_escalation(
            design, truth, ReplicateStream(master_seed, scenario_index,
                                           replicate))
        if result.mtd is None:
            counts[k] += 1
        else:
            counts[result.mtd] += 1
        counts[k + 1:2 * k + 1] += result.treated
        counts[2 * k + 1:3 * k + 1] += result.dlts
        counts[3 * k + 1] += int(result.stopped_early)
    return counts


def simulate_escalation_oc(design: EscalationDesign,
                           truth: Sequence[float],
                           replicates: int,
                           master_seed: int,
                           scenario_index: int = 0,
                           workers: int = 1,
                           label: str = '') -> EscalationOC:
    if replicates < 1:
        raise InvalidParameterError('replicates must be at least 1')
    truth = tuple(float(p) for p in truth)
    chunks = chunk_ranges(replicates, workers)
    if len(chunks) == 1:
        counts = _escalation_chunk(design, truth, master_seed,
                                   scenario_index, 0, replicates)
    else:
        with ProcessPoolExecutor(max_workers=len(chunks)) as executor:
            futures = [
                executor.submit(_escalation_chunk, design, truth,
                                master_seed, scenario_index, a, b)
                for a, b in chunks
            ]
            counts = sum((f.result() for f in futures),
                         np.zeros(3 * design.n_doses + 2, dtype=np.int64))
    k = design.n_doses
    r = float(replicates)
    _log.debug('Escalation OCs for %r over %d replicates', label,
               replicates)
    return EscalationOC(
        selection_pct=tuple(100.0 * c / r for c in counts[:k]),
        no_mtd_pct=100.0 * counts[k] / r,
        mean_treated=tuple(c / r for c in counts[k + 1:2 * k + 1]),
        mean_dlts=tuple(c / r for c in counts[2 * k + 1:3 * k + 1]),
        stop_prob=counts[3 * k + 1] / r,
        replicates=replicates,
        label=label)


@dataclass(frozen=True)
class DecisionRow:
    n: int
    y: int
    decision: str
    eliminate: bool


def decision_table(design: EscalationDesign,
                   max_n: int) -> Tuple[DecisionRow, ...]:
    """Decision for every (treated, DLT) count at a dose, for protocols.

    Rows assume a dose exists above and below the current one.
    """
    if design.method == 'crm':
        raise DoseFindingError(
            'Decision tables need a rule-based or interval design')
    if max_n < 1:
        raise InvalidParameterError('max_n must be at least 1')
    sizes = [3, 6] if design.method == '3+3' else range(1, max_n + 1)
    rows = []
    for n in sizes:
        if n > max_n:
            break
        for y in range(n + 1):
            state = DoseToxState.single(n, y)
            eliminate = design.eliminate and design.method != '3+3' and any(
                overdose_eliminate(state, design.target,
                                   design.elimination_cutoff))
            rows.append(
                DecisionRow(n, y, design.decide(state).kind.value, eliminate))
    return tuple(rows)
