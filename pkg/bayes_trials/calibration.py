"""Search posterior cutoffs and sample sizes against OC targets."""
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple
import logging
import math

from scipy.stats import binom
from typing_extensions import Final, Literal
import numpy as np

from .constants import CALIBRATION_STEP, LOGGER_NAME
from .distributions import BinomialSummary
from .engine import (DesignPrior, OCMode, OCReport, Scenario, TrialDesign,
                     bayesian_oc, exact_oc)
from .exceptions import (AlphaUnattainableError, AssuranceUnattainableError,
                         InfeasibleSpendingError, InvalidParameterError)

__all__ = ('AssuranceCalibration', 'AssuranceProblem', 'CalibrationProblem',
           'CutoffCalibration', 'GroupSequentialBoundaries',
           'calibrate_assurance', 'calibrate_cutoff', 'exact_gs_boundaries',
           'exact_gs_oc')

_log: Final[logging.Logger] = logging.getLogger(LOGGER_NAME)

SearchParameter = Literal['sample_size', 'cutoff']


def _grid_value(j: int, step: float) -> float:
    return round(j * step, 12)


@dataclass(frozen=True)
class CalibrationProblem:
    design: TrialDesign
    null_scenario: Scenario
    alpha: float
    cutoff_grid_step: float = CALIBRATION_STEP

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha < 1.0:
            raise InvalidParameterError('alpha must be in (0, 1)')
        if not 0.0 < self.cutoff_grid_step < 1.0:
            raise InvalidParameterError('cutoff_grid_step must be in (0, 1)')


@dataclass(frozen=True)
class CutoffCalibration:
    """Calibrated cutoff with its exact Type I error certificate.

    ``previous_type_i_error`` is the error one grid step below the cutoff and
    exceeds alpha; it is None when the cutoff is the smallest grid value.
    """
    cutoff: float
    type_i_error: float
    previous_cutoff: Optional[float]
    previous_type_i_error: Optional[float]
    alpha: float
    design: TrialDesign
    oc: OCReport


def _max_evidence(design: TrialDesign) -> float:
    final = design.final_sizes
    if design.arms == 1:
        best = [BinomialSummary(final[0], final[0])]
    else:
        best = [
            BinomialSummary(final[0], final[0]),
            BinomialSummary(0, final[1])
        ]
    return design.analysis.cache.evidence(best)


def calibrate_cutoff(problem: CalibrationProblem) -> CutoffCalibration:
    """Smallest grid cutoff whose exact Type I error is at most alpha.

    Raising the cutoff shrinks every rejection region, so the error is
    non-increasing on the grid and bisection applies. Only cutoffs that leave
    the final analysis some way to succeed are searched.
    """
    step = problem.cutoff_grid_step
    base = problem.design
    top = min(math.ceil(1.0 / step) - 1,
              int(math.floor(_max_evidence(base) / step)))
    while top > 0 and _grid_value(top, step) > _max_evidence(base):
        top -= 1
    if top < 1:
        raise AlphaUnattainableError('alpha unattainable: no grid cutoff '
                                     'leaves a reachable success region')
    errors: Dict[int, float] = {}
    reports: Dict[int, OCReport] = {}

    def type_i(j: int) -> float:
        if j not in errors:
            report = exact_oc(base.with_cutoff(_grid_value(j, step)),
                              problem.null_scenario)
            errors[j] = report.reject_prob
            reports[j] = report
            _log.debug('Type I error %.6g at cutoff %.6g', errors[j],
                       _grid_value(j, step))
        return errors[j]

    if type_i(top) > problem.alpha:
        raise AlphaUnattainableError(
            f'alpha unattainable: the strictest reachable cutoff '
            f'{_grid_value(top, step):g} gives Type I error '
            f'{type_i(top):.6g} > {problem.alpha:g}')
    lo, hi = 1, top
    while lo < hi:
        mid = (lo + hi) // 2
        if type_i(mid) <= problem.alpha:
            hi = mid
        else:
            lo = mid + 1
    j = lo
    previous = j - 1 if j > 1 else None
    cutoff = _grid_value(j, step)
    _log.info('Calibrated cutoff %.6g with Type I error %.6g', cutoff,
              type_i(j))
    return CutoffCalibration(
        cutoff=cutoff,
        type_i_error=type_i(j),
        previous_cutoff=None if previous is None else _grid_value(
            previous, step),
        previous_type_i_error=None if previous is None else type_i(previous),
        alpha=problem.alpha,
        design=base.with_cutoff(cutoff),
        oc=reports[j])


@dataclass(frozen=True)
class AssuranceProblem:
    """A design family searched over final sample size or cutoff."""
    design: TrialDesign
    dprior: DesignPrior
    target: float
    parameter: SearchParameter = 'sample_size'
    bounds: Tuple[float, float] = (20, 200)
    step: float = 1
    mode: OCMode = 'exact'
    replicates: Optional[int] = None
    master_seed: int = 0

    def __post_init__(self) -> None:
        if not 0.0 < self.target <= 1.0:
            raise InvalidParameterError('target must be in (0, 1]')
        if self.parameter not in ('sample_size', 'cutoff'):
            raise InvalidParameterError(
                f'Unknown search parameter {self.parameter!r}')
        lo, hi = self.bounds
        if not (0 < lo <= hi) or self.step <= 0:
            raise InvalidParameterError('Invalid search range')
        if self.parameter == 'sample_size' and not (
                float(lo).is_integer() and float(hi).is_integer()
                and float(self.step).is_integer()):
            raise InvalidParameterError(
                'Sample size searches need integer bounds and step')
        if self.parameter == 'cutoff' and not hi < 1.0:
            raise InvalidParameterError('Cutoff bounds must lie in (0, 1)')


@dataclass(frozen=True)
class AssuranceCalibration:
    """Searched value with the neighbouring grid point as a bracket.

    For sample sizes the neighbour is one step smaller and falls short of
    the target; for cutoffs it is one step larger.
    """
    parameter: SearchParameter
    value: float
    assurance: float
    neighbour: Optional[float]
    neighbour_assurance: Optional[float]
    target: float
    report: OCReport


def calibrate_assurance(problem: AssuranceProblem) -> AssuranceCalibration:
    lo, hi = problem.bounds
    if problem.parameter == 'sample_size':
        points = list(range(int(lo), int(hi) + 1, int(problem.step)))
    else:
        first = int(math.ceil(lo / problem.step - 1e-9))
        last = int(math.floor(hi / problem.step + 1e-9))
        points = [_grid_value(j, problem.step) for j in range(first, last + 1)]
    if not points:
        raise InvalidParameterError('Search range holds no grid point')
    if problem.parameter == 'cutoff':
        # assurance falls with the cutoff; search from strict to lenient
        points = points[::-1]
    reports: Dict[int, OCReport] = {}

    def assurance(i: int) -> float:
        if i not in reports:
            value = points[i]
            design = (problem.design.with_final_size(int(value))
                      if problem.parameter == 'sample_size' else
                      problem.design.with_cutoff(value))
            reports[i] = bayesian_oc(design, problem.dprior, problem.mode,
                                     problem.replicates, problem.master_seed)
            _log.debug('Assurance %.6g at %s=%g', reports[i].reject_prob,
                       problem.parameter, value)
            _check_monotone(reports, points)
        return reports[i].reject_prob

    last = len(points) - 1
    if assurance(last) < problem.target:
        i_best = max(reports, key=lambda i: reports[i].reject_prob)
        raise AssuranceUnattainableError(
            f'Assurance target {problem.target:g} unattainable over '
            f'{problem.parameter} in [{lo:g}, {hi:g}]',
            reports[i_best].reject_prob, points[i_best])
    a, b = 0, last
    while a < b:
        mid = (a + b) // 2
        if assurance(mid) >= problem.target:
            b = mid
        else:
            a = mid + 1
    i = a
    neighbour = i - 1 if i > 0 else None
    _log.info('Assurance %.6g reached at %s=%g', assurance(i),
              problem.parameter, points[i])
    return AssuranceCalibration(
        parameter=problem.parameter,
        value=points[i],
        assurance=assurance(i),
        neighbour=None if neighbour is None else points[neighbour],
        neighbour_assurance=None
        if neighbour is None else assurance(neighbour),
        target=problem.target,
        report=reports[i])


def _check_monotone(reports: Dict[int, OCReport],
                    points: Sequence[float]) -> None:
    seen = sorted(reports)
    values = [reports[i].reject_prob for i in seen]
    for (i, x), (j, y) in zip(zip(seen, values), zip(seen[1:], values[1:])):
        if y < x - 1e-12:
            _log.warning(
                'Assurance is not monotone over the search: %.6g at %g but '
                '%.6g at %g', x, points[i], y, points[j])
            return


@dataclass(frozen=True)
class GroupSequentialBoundaries:
    """Critical success counts per look; None means no efficacy stop."""
    schedule: Tuple[int, ...]
    critical: Tuple[Optional[int], ...]
    cumulative_alpha: Tuple[float, ...]
    spent: Tuple[float, ...]


def _step_mass(mass: np.ndarray, increment: int, p: float) -> np.ndarray:
    return np.convolve(mass, binom.pmf(np.arange(increment + 1), increment,
                                       p))


def _validate_schedule(schedule: Sequence[int]) -> Tuple[int, ...]:
    sizes = tuple(int(n) for n in schedule)
    if not sizes or any(a >= b for a, b in zip((0, ) + sizes, sizes)):
        raise InvalidParameterError(
            'Schedule must be positive and strictly increasing')
    return sizes


def exact_gs_boundaries(schedule: Sequence[int], alpha: float,
                        spending_fractions: Sequence[float],
                        null_scenario: Scenario) -> GroupSequentialBoundaries:
    """Exact one-arm group-sequential boundaries from cumulative spending.

    At each look the smallest critical count is chosen whose cumulative
    exact rejection probability under the null stays within the alpha spent
    so far.
    """
    sizes = _validate_schedule(schedule)
    fractions = tuple(float(f) for f in spending_fractions)
    if not 0.0 < alpha < 1.0:
        raise InvalidParameterError('alpha must be in (0, 1)')
    if len(null_scenario.rates) != 1:
        raise InvalidParameterError(
            'Group-sequential boundaries are built for one-arm schedules')
    if len(fractions) != len(sizes):
        raise InvalidParameterError('Need one spending fraction per look')
    if any(not 0.0 <= f <= 1.0 for f in fractions) or any(
            a > b for a, b in zip(fractions, fractions[1:])):
        raise InfeasibleSpendingError(
            'Spending fractions must be non-decreasing within [0, 1]')
    if abs(fractions[-1] - 1.0) > 1e-12:
        raise InfeasibleSpendingError('Spending fractions must end at 1')
    mass = np.ones(1)
    previous = 0
    cumulative = 0.0
    critical: List[Optional[int]] = []
    cumulative_alpha: List[float] = []
    for look, n in enumerate(sizes):
        mass = _step_mass(mass, n - previous,
                          null_scenario.rates_at(look)[0])
        budget = alpha * fractions[look]
        # tails[b] is the rejection probability of critical count b
        tails = np.cumsum(mass[::-1])[::-1]
        ok = np.flatnonzero(cumulative + tails <= budget * (1.0 + 1e-12))
        if not len(ok):
            if look == len(sizes) - 1:
                raise InfeasibleSpendingError(
                    f'Spending is infeasible at look {look}: rejecting only '
                    f'y={n} already spends {cumulative + tails[-1]:.6g} > '
                    f'{budget:.6g}')
            critical.append(None)
        else:
            b = int(ok[0])
            cumulative += float(tails[b])
            mass = mass.copy()
            mass[b:] = 0.0
            critical.append(b)
        cumulative_alpha.append(cumulative)
        previous = n
    _log.info('Group-sequential boundaries %s spend %.6g of %.6g', critical,
              cumulative, alpha)
    return GroupSequentialBoundaries(
        sizes, tuple(critical), tuple(cumulative_alpha),
        tuple(alpha * f for f in fractions))


def exact_gs_oc(boundaries: GroupSequentialBoundaries,
                scenario: Scenario) -> OCReport:
    """Exact OCs of the frequentist comparator under ``scenario``."""
    if len(scenario.rates) != 1:
        raise InvalidParameterError('Comparator OCs are one-arm')
    sizes = boundaries.schedule
    mass = np.ones(1)
    previous = 0
    efficacy: List[float] = []
    futility: List[float] = []
    for look, (n, b) in enumerate(zip(sizes, boundaries.critical)):
        mass = _step_mass(mass, n - previous, scenario.rates_at(look)[0])
        stop = 0.0 if b is None else float(mass[b:].sum())
        efficacy.append(stop)
        if b is not None:
            mass = mass.copy()
            mass[b:] = 0.0
        futility.append(float(mass.sum()) if look == len(sizes) - 1 else 0.0)
        previous = n
    stops = np.add(efficacy, futility)
    return OCReport(reject_prob=min(1.0, math.fsum(efficacy)),
                    efficacy_stop=tuple(efficacy),
                    futility_stop=tuple(futility),
                    expected_sample_size=(float(stops @ np.array(sizes)), ),
                    mode='exact',
                    label=scenario.label)
