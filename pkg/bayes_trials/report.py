"""Subcommand pipelines, the reproducibility manifest and report files."""
from dataclasses import asdict, dataclass
from typing import Any, Dict, Iterator, List, Mapping, Optional, Tuple, cast
import csv
import logging
import os

from typing_extensions import Final

from .calibration import (AssuranceProblem, CalibrationProblem,
                          calibrate_assurance, calibrate_cutoff,
                          exact_gs_boundaries, exact_gs_oc)
from .config import DesignConfig
from .constants import LOGGER_NAME, SCHEMA_VERSION, TOOL_VERSION
from .dosefinding import (DecisionRow, EscalationOC, decision_table,
                          simulate_escalation_oc)
from .engine import (OCReport, TrialDesign, bayesian_oc, exact_oc,
                     monte_carlo_oc)
from .exceptions import (BayesTrialsError, BudgetExceededError, EmitError,
                         InvalidParameterError)
from .typing.report import ManifestDict, ReportDict
from .util import canonical, canonical_json

__all__ = ('FORMATS', 'RunManifest', 'RunReport', 'SUBCOMMANDS',
           'SensitivityResult', 'emit', 'report_dict', 'run')

_log: Final[logging.Logger] = logging.getLogger(LOGGER_NAME)

SUBCOMMANDS: Final[Tuple[str, ...]] = ('simulate', 'oc', 'calibrate',
                                       'dose-find', 'report')
FORMATS: Final[Tuple[str, ...]] = ('json', 'csv')


@dataclass(frozen=True)
class RunManifest:
    """Everything needed to reproduce a report byte for byte.

    The worker count is deliberately absent: it never changes a result.
    """
    tool_version: str
    schema_version: int
    config_digest: str
    master_seed: int
    settings: Mapping[str, Any]
    timestamp: Optional[str]
    modes: Mapping[str, str]
    subcommand: str


@dataclass(frozen=True)
class SensitivityResult:
    label: str
    priors: Tuple[str, ...]
    oc: Tuple[OCReport, ...]
    bayesian: Optional[OCReport] = None


@dataclass(frozen=True)
class RunReport:
    subcommand: str
    config: Mapping[str, Any]
    manifest: RunManifest
    oc: Tuple[OCReport, ...] = ()
    bayesian: Optional[OCReport] = None
    calibration: Optional[Mapping[str, Any]] = None
    decision_table: Optional[Tuple[DecisionRow, ...]] = None
    escalation: Tuple[EscalationOC, ...] = ()
    sensitivity: Tuple[SensitivityResult, ...] = ()


class _Pipeline:
    def __init__(self, config: DesignConfig, subcommand: str,
                 master_seed: int, workers: int):
        self.config = config
        self.subcommand = subcommand
        self.master_seed = master_seed
        self.workers = workers
        self.modes: Dict[str, str] = {}

    @property
    def _mode(self) -> str:
        if self.subcommand == 'simulate':
            return 'monte-carlo'
        return self.config.execution.mode

    def _record(self, key: str, report: OCReport) -> OCReport:
        self.modes[key] = report.mode
        return report

    def oc(self, design: TrialDesign, index: int, key: str) -> OCReport:
        scenario = self.config.scenarios[index]
        mode = self._mode
        if mode != 'monte-carlo':
            try:
                return self._record(key, exact_oc(design, scenario))
            except BudgetExceededError:
                if mode == 'exact':
                    raise
                _log.info('Scenario %r is beyond the exact budget, '
                          'simulating instead', scenario.label)
        return self._record(
            key,
            monte_carlo_oc(design, scenario, self.config.execution.replicates,
                           self.master_seed, index, self.workers))

    def ocs(self, design: TrialDesign,
            prefix: str = 'oc') -> Tuple[OCReport, ...]:
        return tuple(
            self.oc(design, i, f'{prefix}.{s.label}')
            for i, s in enumerate(self.config.scenarios))

    def bayesian(self, design: TrialDesign,
                 key: str = 'bayesian') -> Optional[OCReport]:
        dprior = self.config.design_prior
        if dprior is None:
            return None
        mode = self._mode
        kwargs: Dict[str, Any] = dict(
            replicates=self.config.execution.replicates,
            master_seed=self.master_seed,
            workers=self.workers)
        if mode != 'monte-carlo':
            try:
                return self._record(
                    key, bayesian_oc(design, dprior, 'exact', **kwargs))
            except BudgetExceededError:
                if mode == 'exact':
                    raise
                _log.info('Design prior is beyond the exact budget, '
                          'simulating instead')
        return self._record(
            key, bayesian_oc(design, dprior, 'monte-carlo', **kwargs))

    def sensitivity(self,
                    design: TrialDesign) -> Tuple[SensitivityResult, ...]:
        results = []
        for label, names in self.config.alternative_priors:
            alternative = TrialDesign(
                design.looks, tuple(self.config.priors[n] for n in names),
                design.success, design.futility, design.monitoring,
                design.settings)
            prefix = f'sensitivity.{label}'
            results.append(
                SensitivityResult(label, names,
                                  self.ocs(alternative, f'{prefix}.oc'),
                                  self.bayesian(alternative,
                                                f'{prefix}.bayesian')))
        return tuple(results)

    def calibrate(self, design: TrialDesign
                  ) -> Tuple[TrialDesign, Dict[str, Any]]:
        spec = self.config.calibration
        if spec is None:
            raise BayesTrialsError('Configuration has no calibration section')
        result = calibrate_cutoff(
            CalibrationProblem(design, spec.null_scenario, spec.alpha,
                               spec.cutoff_grid_step))
        self.modes['calibration.cutoff'] = result.oc.mode
        block: Dict[str, Any] = {
            'alpha': result.alpha,
            'null_scenario': spec.null_scenario.label,
            'cutoff': result.cutoff,
            'type_i_error': result.type_i_error,
            'previous_cutoff': result.previous_cutoff,
            'previous_type_i_error': result.previous_type_i_error,
            'null_oc': result.oc,
        }
        calibrated = result.design
        if spec.assurance is not None:
            block['assurance'] = self._assurance(calibrated)
        if spec.spending_fractions is not None:
            schedule = tuple(look[0] for look in design.looks)
            boundaries = exact_gs_boundaries(schedule, spec.alpha,
                                             spec.spending_fractions,
                                             spec.null_scenario)
            block['group_sequential'] = {
                'boundaries': boundaries,
                'oc': [
                    self._record(f'group_sequential.{s.label}',
                                 exact_gs_oc(boundaries, s))
                    for s in self.config.scenarios
                ],
            }
        return calibrated, block

    def _assurance(self, design: TrialDesign) -> Dict[str, Any]:
        spec = self.config.calibration
        dprior = self.config.design_prior
        assert spec is not None and spec.assurance is not None
        assert dprior is not None
        a = spec.assurance
        mode = 'monte-carlo' if self._mode == 'monte-carlo' else 'exact'
        result = calibrate_assurance(
            AssuranceProblem(design,
                             dprior,
                             a.target,
                             a.parameter,
                             a.bounds,
                             a.step,
                             mode=mode,
                             replicates=self.config.execution.replicates,
                             master_seed=self.master_seed))
        self.modes['calibration.assurance'] = result.report.mode
        return {
            'parameter': result.parameter,
            'target': result.target,
            'value': result.value,
            'assurance': result.assurance,
            'neighbour': result.neighbour,
            'neighbour_assurance': result.neighbour_assurance,
        }

    def escalation(self) -> Tuple[EscalationOC, ...]:
        design = self.config.escalation_design()
        execution = self.config.execution
        reports = []
        for i, s in enumerate(self.config.scenarios):
            reports.append(
                simulate_escalation_oc(design, s.rates, execution.replicates,
                                       self.master_seed, i, self.workers,
                                       s.label))
            self.modes[f'escalation.{s.label}'] = 'monte-carlo'
        return tuple(reports)


def run(config: DesignConfig,
        subcommand: str,
        seed: Optional[int] = None,
        workers: Optional[int] = None,
        timestamp: Optional[str] = None) -> RunReport:
    """Execute one subcommand's pipeline.

    ``seed``, ``workers`` and ``timestamp`` override the configuration's
    execution block. The result depends only on the configuration and the
    master seed.
    """
    if subcommand not in SUBCOMMANDS:
        raise InvalidParameterError(f'Unknown subcommand {subcommand!r}')
    execution = config.execution
    master_seed = execution.master_seed if seed is None else seed
    pipeline = _Pipeline(config, subcommand, master_seed, workers
                         or execution.workers)
    _log.info('Running %s on %s with seed %d', subcommand, config.digest,
              master_seed)
    fields: Dict[str, Any] = {}
    if config.escalation is not None:
        if subcommand in ('oc', 'calibrate'):
            raise BayesTrialsError(
                f'{subcommand} needs a sequential design')
        if config.escalation.method != 'crm':
            fields['decision_table'] = decision_table(
                config.escalation, execution.decision_table_max_n)
        if config.scenarios:
            fields['escalation'] = pipeline.escalation()
    else:
        if subcommand == 'dose-find':
            raise BayesTrialsError('dose-find needs a dose-finding design')
        design = config.sequential_design()
        if subcommand == 'calibrate' or (subcommand == 'report'
                                         and config.calibration is not None):
            design, fields['calibration'] = pipeline.calibrate(design)
        fields['oc'] = pipeline.ocs(design)
        fields['bayesian'] = pipeline.bayesian(design)
        fields['sensitivity'] = pipeline.sensitivity(design)
    manifest = RunManifest(tool_version=TOOL_VERSION,
                           schema_version=SCHEMA_VERSION,
                           config_digest=config.digest,
                           master_seed=master_seed,
                           settings=config.settings.as_manifest(),
                           timestamp=timestamp or execution.timestamp,
                           modes=dict(sorted(pipeline.modes.items())),
                           subcommand=subcommand)
    return RunReport(subcommand=subcommand,
                     config=config.raw,
                     manifest=manifest,
                     **fields)


def report_dict(report: RunReport) -> ReportDict:
    return cast(ReportDict, canonical(report))


def _cell(value: Any) -> str:
    value = canonical(value)
    if value is None:
        return ''
    if isinstance(value, bool):
        return str(value).lower()
    return str(value)


def _flatten(obj: Any, prefix: str = '') -> Iterator[Tuple[str, Any]]:
    if isinstance(obj, Mapping):
        for key in sorted(obj):
            yield from _flatten(obj[key], f'{prefix}{key}.')
    elif isinstance(obj, (list, tuple)):
        for i, item in enumerate(obj):
            yield from _flatten(item, f'{prefix}{i}.')
    else:
        yield prefix[:-1], obj


def _oc_sections(report: RunReport) -> Iterator[Tuple[str, OCReport]]:
    for oc in report.oc:
        yield 'oc', oc
    if report.bayesian is not None:
        yield 'bayesian', report.bayesian
    for result in report.sensitivity:
        for oc in result.oc:
            yield f'sensitivity.{result.label}', oc
        if result.bayesian is not None:
            yield f'sensitivity.{result.label}.bayesian', result.bayesian
    if report.calibration is not None:
        yield 'calibration.null', report.calibration['null_oc']
        for oc in report.calibration.get('group_sequential',
                                         {}).get('oc', []):
            yield 'group_sequential', oc


def _summary_rows(report: RunReport) -> List[List[str]]:
    sections = list(_oc_sections(report))
    arms = max((len(oc.expected_sample_size) for _, oc in sections),
               default=1)
    rows = [[
        'section', 'label', 'mode', 'reject_prob', 'assurance', 'pcd',
        'replicates'
    ] + [f'expected_sample_size_{k}' for k in range(arms)]]
    for section, oc in sections:
        ess = list(oc.expected_sample_size) + [None] * (
            arms - len(oc.expected_sample_size))
        rows.append([
            section, oc.label, oc.mode,
            _cell(oc.reject_prob),
            _cell(oc.assurance),
            _cell(oc.pcd),
            _cell(oc.replicates)
        ] + [_cell(x) for x in ess])
    return rows


def _look_rows(report: RunReport) -> List[List[str]]:
    rows = [['section', 'label', 'look', 'efficacy_stop', 'futility_stop']]
    for section, oc in _oc_sections(report):
        for look, (e, f) in enumerate(zip(oc.efficacy_stop,
                                          oc.futility_stop)):
            rows.append([section, oc.label, str(look), _cell(e), _cell(f)])
    return rows


def _decision_rows(table: Tuple[DecisionRow, ...]) -> List[List[str]]:
    return [['n', 'y', 'decision', 'eliminate']] + [[
        str(row.n), str(row.y), row.decision,
        _cell(row.eliminate)
    ] for row in table]


def _escalation_rows(reports: Tuple[EscalationOC, ...]) -> List[List[str]]:
    rows = [['label', 'dose', 'selection_pct', 'mean_treated', 'mean_dlts']]
    for oc in reports:
        for dose, values in enumerate(
                zip(oc.selection_pct, oc.mean_treated, oc.mean_dlts)):
            rows.append([oc.label, str(dose)] + [_cell(x) for x in values])
        rows.append([oc.label, 'none', _cell(oc.no_mtd_pct), '', ''])
    return rows


def _calibration_rows(block: Mapping[str, Any]) -> List[List[str]]:
    flat = {k: v for k, v in block.items() if k != 'null_oc'}
    if 'group_sequential' in flat:
        flat['group_sequential'] = asdict(
            flat['group_sequential']['boundaries'])
    return [['key', 'value']] + [[key, _cell(value)]
                                 for key, value in _flatten(canonical(flat))]


def _write_text(path: str, text: str) -> None:
    with open(path, 'w', encoding='utf-8', newline='\n') as f:
        f.write(text)


def _write_csv(path: str, rows: List[List[str]]) -> None:
    with open(path, 'w', encoding='utf-8', newline='') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerows(rows)


def emit(report: RunReport, fmt: str, out_dir: str) -> List[str]:
    """Write the report as ``report.json`` or as a CSV bundle.

    The bundle always carries ``manifest.json``. Returns the written paths.
    """
    if fmt not in FORMATS:
        raise InvalidParameterError(f'Unknown output format {fmt!r}')
    files: List[Tuple[str, Any]] = []
    if fmt == 'json':
        files.append(('report.json', canonical_json(report)))
    else:
        manifest = cast(ManifestDict, canonical(report.manifest))
        files.append(('manifest.json', canonical_json(manifest)))
        if report.oc or report.bayesian is not None:
            files.append(('summary.csv', _summary_rows(report)))
            files.append(('oc.csv', _look_rows(report)))
        if report.decision_table is not None:
            files.append(('decision_table.csv',
                          _decision_rows(report.decision_table)))
        if report.escalation:
            files.append(('escalation.csv',
                          _escalation_rows(report.escalation)))
        if report.calibration is not None:
            files.append(('calibration.csv',
                          _calibration_rows(report.calibration)))
    written = []
    for name, content in files:
        path = os.path.join(out_dir, name)
        try:
            os.makedirs(out_dir, exist_ok=True)
            if isinstance(content, str):
                _write_text(path, content)
            else:
                _write_csv(path, content)
        except OSError as e:
            raise EmitError(path, e) from e
        _log.info('Wrote %s', path)
        written.append(path)
    return written
