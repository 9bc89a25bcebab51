"""JSON run configuration: schema validation and domain-object builders.

Every problem found is reported, each with the dotted path of the offending
field, in a single ``ConfigError``.
"""
from dataclasses import dataclass, fields
from functools import partial
from typing import (Any, Callable, Dict, List, Mapping, Optional, Sequence,
                    Tuple, TypeVar, cast)
import json
import logging

from jsonschema import Draft7Validator
from typing_extensions import Final, Literal

from .borrowing import (CommensurateSpec, HistoricalData, PowerPriorSpec,
                        RobustMixSpec, commensurate_prior,
                        default_map_hyper_grid, map_prior, power_prior,
                        robustify)
from .constants import LOGGER_NAME, SCHEMA_VERSION
from .distributions import (BetaMixture, BetaParams, BinomialSummary,
                            Distribution, uniform_grid)
from .dosefinding import (CrmSpec, EscalationDesign, MtpiSpec,
                          boin_boundaries)
from .engine import DesignPrior, Scenario, TrialDesign
from .exceptions import BayesTrialsError, ConfigError
from .rules import FutilityRule, LossSpec, MonitoringRule, SuccessRule
from .settings import DEFAULT_SETTINGS, Settings
from .typing.config import (BetaDict, BinomialDict, ConfigDict, PriorDict,
                            ScenarioDict)
from .util import config_digest, format_path

__all__ = ('AssuranceSpec', 'CONFIG_SCHEMA', 'CalibrationSpec',
           'DesignConfig', 'ExecutionSpec', 'load_config', 'parse_config')

_log: Final[logging.Logger] = logging.getLogger(LOGGER_NAME)

T = TypeVar('T')
ExecutionMode = Literal['auto', 'exact', 'monte-carlo']

_PROBABILITY = {'type': 'number', 'minimum': 0, 'maximum': 1}
_OPEN_PROBABILITY = {
    'type': 'number',
    'exclusiveMinimum': 0,
    'exclusiveMaximum': 1
}
_POSITIVE = {'type': 'number', 'exclusiveMinimum': 0}
_COUNT = {'type': 'integer', 'minimum': 0}
_LABEL = {'type': 'string', 'minLength': 1}
_BETA = {
    'type': 'object',
    'additionalProperties': False,
    'required': ['alpha', 'beta'],
    'properties': {
        'alpha': _POSITIVE,
        'beta': _POSITIVE
    }
}
_BINOMIAL = {
    'type': 'object',
    'additionalProperties': False,
    'required': ['successes', 'trials'],
    'properties': {
        'successes': _COUNT,
        'trials': _COUNT
    }
}
_STUDIES = {'type': 'array', 'minItems': 1, 'items': _BINOMIAL}


def _object(required: Sequence[str], **properties: Any) -> Dict[str, Any]:
    return {
        'type': 'object',
        'additionalProperties': False,
        'required': list(required),
        'properties': properties
    }


PRIOR_SCHEMAS: Final[Dict[str, Dict[str, Any]]] = {
    'beta':
    _object(['type', 'alpha', 'beta'],
            type={'const': 'beta'},
            alpha=_POSITIVE,
            beta=_POSITIVE),
    'mixture':
    _object(['type', 'components'],
            type={'const': 'mixture'},
            components={
                'type': 'array',
                'minItems': 1,
                'items': _object(['weight', 'alpha', 'beta'],
                                 weight=_POSITIVE,
                                 alpha=_POSITIVE,
                                 beta=_POSITIVE)
            }),
    'power':
    _object(['type', 'discount', 'historical'],
            type={'const': 'power'},
            discount=_PROBABILITY,
            historical=_BINOMIAL,
            baseline=_BETA),
    'map':
    _object(['type', 'historical'], type={'const': 'map'},
            historical=_STUDIES),
    'robust-map':
    _object(['type', 'historical', 'map_weight'],
            type={'const': 'robust-map'},
            historical=_STUDIES,
            map_weight=_PROBABILITY,
            vague=_BETA),
    'commensurate':
    _object(['type', 'historical_posterior', 'tau_grid', 'tau_weights'],
            type={'const': 'commensurate'},
            historical_posterior=_BETA,
            tau_grid={
                'type': 'array',
                'minItems': 1,
                'items': _POSITIVE
            },
            tau_weights={
                'type': 'array',
                'minItems': 1,
                'items': _PROBABILITY
            }),
    'grid':
    _object(['type'],
            type={'const': 'grid'},
            size={
                'type': 'integer',
                'minimum': 2
            }),
}

SEQUENTIAL_SCHEMA: Final[Dict[str, Any]] = _object(
    ['kind', 'looks', 'priors', 'success'],
    kind={'const': 'sequential'},
    comparison={'enum': ['one-arm', 'two-arm']},
    looks={
        'type': 'array',
        'minItems': 1,
        'items': {
            'type': 'array',
            'minItems': 1,
            'maxItems': 2,
            'items': {
                'type': 'integer',
                'minimum': 1
            }
        }
    },
    priors={
        'type': 'array',
        'minItems': 1,
        'maxItems': 2,
        'items': _LABEL
    },
    success={
        'type': 'object',
        'additionalProperties': False,
        'required': ['effect_threshold'],
        'properties': {
            'effect_threshold': {
                'type': 'number',
                'minimum': -1,
                'maximum': 1
            },
            'posterior_cutoff': _OPEN_PROBABILITY,
            'loss': _object(['false_positive', 'false_negative'],
                            false_positive=_POSITIVE,
                            false_negative=_POSITIVE)
        }
    },
    futility=_object(['ppos_cutoff'],
                     ppos_cutoff={
                         'type': 'number',
                         'minimum': 0,
                         'exclusiveMaximum': 1
                     }),
    monitoring=_object(
        ['kind'],
        kind={'enum': ['none', 'posterior', 'ppos', 'conditional-power']},
        cutoff={
            'type': 'number',
            'exclusiveMinimum': 0,
            'maximum': 1
        },
        assumed_rates={
            'type': 'array',
            'minItems': 1,
            'maxItems': 2,
            'items': _PROBABILITY
        }))

DOSE_FINDING_SCHEMA: Final[Dict[str, Any]] = _object(
    ['kind', 'method', 'n_doses', 'target'],
    kind={'const': 'dose-finding'},
    method={'enum': ['3+3', 'i3+3', 'boin', 'mtpi', 'crm']},
    n_doses={
        'type': 'integer',
        'minimum': 1
    },
    target=_OPEN_PROBABILITY,
    cohort_size={
        'type': 'integer',
        'minimum': 1
    },
    max_n={
        'type': 'integer',
        'minimum': 1
    },
    start_dose=_COUNT,
    eliminate={'type': 'boolean'},
    elimination_cutoff=_OPEN_PROBABILITY,
    equivalence_interval={
        'type': 'array',
        'minItems': 2,
        'maxItems': 2,
        'items': _OPEN_PROBABILITY
    },
    phi1=_OPEN_PROBABILITY,
    phi2=_OPEN_PROBABILITY,
    eps1=_POSITIVE,
    eps2=_POSITIVE,
    variant={'enum': ['mtpi', 'mtpi2']},
    prior=_BETA,
    skeleton={
        'type': 'array',
        'minItems': 1,
        'items': _OPEN_PROBABILITY
    },
    no_skip={'type': 'boolean'})


def _setting_schema(value: Any) -> Dict[str, Any]:
    if isinstance(value, tuple):
        return {
            'type': 'array',
            'minItems': 2,
            'maxItems': 2,
            'items': {
                'type': 'number'
            }
        }
    return {'type': 'integer' if isinstance(value, int) else 'number'}


_SETTINGS_SCHEMA: Final[Dict[str, Any]] = {
    'type': 'object',
    'additionalProperties': False,
    'properties': {
        f.name: _setting_schema(getattr(DEFAULT_SETTINGS, f.name))
        for f in fields(Settings)
    }
}

CONFIG_SCHEMA: Final[Dict[str, Any]] = {
    '$schema': 'http://json-schema.org/draft-07/schema#',
    'type': 'object',
    'additionalProperties': False,
    'required': ['schema_version', 'design'],
    'properties': {
        'schema_version': {
            'const': SCHEMA_VERSION
        },
        'priors': {
            'type': 'object',
            'additionalProperties': {
                'type': 'object',
                'required': ['type'],
                'properties': {
                    'type': {
                        'enum': sorted(PRIOR_SCHEMAS)
                    }
                }
            }
        },
        'design': {
            'type': 'object',
            'required': ['kind'],
            'properties': {
                'kind': {
                    'enum': ['sequential', 'dose-finding']
                }
            }
        },
        'scenarios': {
            'type': 'array',
            'items': _object(['label', 'rates'],
                             label=_LABEL,
                             rates={
                                 'type': 'array',
                                 'minItems': 1,
                                 'items': _PROBABILITY
                             },
                             drift={
                                 'type': 'array',
                                 'items': {
                                     'type': 'number'
                                 }
                             })
        },
        'design_prior': {
            'oneOf': [
                _object(['type', 'scenario'],
                        type={'const': 'point'},
                        scenario=_LABEL),
                _object(['type', 'atoms'],
                        type={'const': 'atoms'},
                        atoms={
                            'type': 'array',
                            'minItems': 1,
                            'items': _object(['weight', 'scenario'],
                                             weight=_PROBABILITY,
                                             scenario=_LABEL)
                        }),
                _object(['type', 'alpha', 'beta'],
                        type={'const': 'beta'},
                        alpha=_POSITIVE,
                        beta=_POSITIVE,
                        control_rate=_PROBABILITY,
                        grid_size={
                            'type': 'integer',
                            'minimum': 1
                        }),
            ]
        },
        'sensitivity': _object(
            ['alternative_priors'],
            alternative_priors={
                'type': 'array',
                'items': _object(['label', 'priors'],
                                 label=_LABEL,
                                 priors={
                                     'type': 'array',
                                     'minItems': 1,
                                     'maxItems': 2,
                                     'items': _LABEL
                                 })
            }),
        'calibration': _object(
            ['alpha', 'null_scenario'],
            alpha=_OPEN_PROBABILITY,
            null_scenario=_LABEL,
            cutoff_grid_step=_OPEN_PROBABILITY,
            spending_fractions={
                'type': 'array',
                'minItems': 1,
                'items': _PROBABILITY
            },
            assurance=_object(['target'],
                              target={
                                  'type': 'number',
                                  'exclusiveMinimum': 0,
                                  'maximum': 1
                              },
                              parameter={'enum': ['sample_size', 'cutoff']},
                              bounds={
                                  'type': 'array',
                                  'minItems': 2,
                                  'maxItems': 2,
                                  'items': _POSITIVE
                              },
                              step=_POSITIVE)),
        'execution': _object([],
                             replicates={
                                 'type': 'integer',
                                 'minimum': 1
                             },
                             master_seed=_COUNT,
                             workers={
                                 'type': 'integer',
                                 'minimum': 1
                             },
                             mode={'enum': ['auto', 'exact', 'monte-carlo']},
                             timestamp={'type': 'string'},
                             decision_table_max_n={
                                 'type': 'integer',
                                 'minimum': 1
                             },
                             settings=_SETTINGS_SCHEMA),
    }
}


@dataclass(frozen=True)
class AssuranceSpec:
    target: float
    parameter: Literal['sample_size', 'cutoff'] = 'sample_size'
    bounds: Tuple[float, float] = (20, 200)
    step: float = 1


@dataclass(frozen=True)
class CalibrationSpec:
    alpha: float
    null_scenario: Scenario
    cutoff_grid_step: float
    spending_fractions: Optional[Tuple[float, ...]] = None
    assurance: Optional[AssuranceSpec] = None


@dataclass(frozen=True)
class ExecutionSpec:
    replicates: int = 10000
    master_seed: int = 0
    workers: int = 1
    mode: ExecutionMode = 'auto'
    timestamp: Optional[str] = None
    decision_table_max_n: int = 12


@dataclass(frozen=True, eq=False)
class DesignConfig:
    """A validated configuration and the domain objects it describes."""
    raw: Mapping[str, Any]
    settings: Settings
    priors: Mapping[str, Distribution]
    scenarios: Tuple[Scenario, ...]
    execution: ExecutionSpec
    design: Optional[TrialDesign] = None
    escalation: Optional[EscalationDesign] = None
    design_prior: Optional[DesignPrior] = None
    alternative_priors: Tuple[Tuple[str, Tuple[str, ...]], ...] = ()
    calibration: Optional[CalibrationSpec] = None

    @property
    def digest(self) -> str:
        return config_digest(self.raw)

    def scenario(self, label: str) -> Scenario:
        for s in self.scenarios:
            if s.label == label:
                return s
        raise KeyError(label)

    def sequential_design(self) -> TrialDesign:
        if self.design is None:
            raise BayesTrialsError('Configuration has no sequential design')
        return self.design

    def escalation_design(self) -> EscalationDesign:
        if self.escalation is None:
            raise BayesTrialsError('Configuration has no dose-finding design')
        return self.escalation


class _Errors:
    def __init__(self) -> None:
        self.items: List[Tuple[str, str]] = []

    def add(self, where: str, message: str) -> None:
        self.items.append((where, message))

    def validate(self, schema: Mapping[str, Any], instance: Any,
                 prefix: Optional[str]) -> bool:
        found = sorted(Draft7Validator(schema).iter_errors(instance),
                       key=lambda e: [str(p) for p in e.absolute_path])
        for error in found:
            self.add(format_path(error.absolute_path, prefix), error.message)
        return not found

    def build(self, where: str, factory: Callable[[], T]) -> Optional[T]:
        try:
            return factory()
        except (BayesTrialsError, ValueError) as e:
            self.add(where, str(e))
            return None


def _beta(d: BetaDict) -> BetaParams:
    return BetaParams(float(d['alpha']), float(d['beta']))


def _summary(d: BinomialDict) -> BinomialSummary:
    return BinomialSummary(d['successes'], d['trials'])


def _prior(spec: PriorDict, settings: Settings) -> Distribution:
    kind = spec['type']
    if kind == 'beta':
        return BetaParams(float(spec['alpha']), float(spec['beta']))
    if kind == 'mixture':
        return BetaMixture.from_weights(
            (c['weight'] for c in spec['components']),
            (_beta(c) for c in spec['components']), settings.prune_threshold)
    if kind == 'power':
        baseline = spec.get('baseline')
        power = (PowerPriorSpec(spec['discount']) if baseline is None else
                 PowerPriorSpec(spec['discount'], _beta(baseline)))
        return power_prior(power,
                           _summary(cast(BinomialDict, spec['historical'])))
    if kind in ('map', 'robust-map'):
        studies = cast(Sequence[BinomialDict], spec['historical'])
        hist = HistoricalData(tuple(_summary(s) for s in studies))
        mixture = map_prior(hist, default_map_hyper_grid(settings),
                            settings.prune_threshold)
        if kind == 'map':
            return mixture
        vague = spec.get('vague')
        robust = (RobustMixSpec(spec['map_weight']) if vague is None else
                  RobustMixSpec(spec['map_weight'], _beta(vague)))
        return robustify(mixture, robust)
    if kind == 'commensurate':
        return commensurate_prior(
            _beta(spec['historical_posterior']),
            CommensurateSpec(tuple(spec['tau_grid']),
                             tuple(spec['tau_weights']), settings.grid_size))
    return uniform_grid(spec.get('size', settings.grid_size))


def _scenario(d: ScenarioDict) -> Scenario:
    drift = d.get('drift')
    return Scenario(tuple(d['rates']),
                    None if drift is None else tuple(drift), d['label'])


def _sequential(d: Mapping[str, Any], priors: Mapping[str, Distribution],
                settings: Settings, errors: _Errors) -> Optional[TrialDesign]:
    names = d['priors']
    missing = [n for n in names if n not in priors]
    for i, name in enumerate(names):
        if name not in priors:
            errors.add(f'design.priors.{i}', f'Unknown prior {name!r}')
    success_d = d['success']
    comparison = d.get('comparison', 'one-arm')
    if ('posterior_cutoff' in success_d) == ('loss' in success_d):
        errors.add('design.success',
                   'Give exactly one of posterior_cutoff and loss')
        return None
    if 'loss' in success_d:
        loss = success_d['loss']
        success = errors.build(
            'design.success', lambda: SuccessRule.from_loss(
                success_d['effect_threshold'],
                LossSpec(loss['false_positive'], loss['false_negative']),
                comparison))
    else:
        success = errors.build(
            'design.success', lambda: SuccessRule(
                success_d['effect_threshold'], success_d['posterior_cutoff'],
                comparison))
    futility = None
    if 'futility' in d:
        futility = errors.build(
            'design.futility',
            lambda: FutilityRule(d['futility']['ppos_cutoff']))
    monitoring = MonitoringRule()
    if 'monitoring' in d:
        m = d['monitoring']
        rates = m.get('assumed_rates')
        built = errors.build(
            'design.monitoring', lambda: MonitoringRule(
                m['kind'], m.get('cutoff'),
                None if rates is None else tuple(rates)))
        if built is None:
            return None
        monitoring = built
    if success is None or missing:
        return None
    return errors.build(
        'design', lambda: TrialDesign(
            tuple(tuple(look) for look in d['looks']),
            tuple(priors[n] for n in names), success, futility, monitoring,
            settings))


def _escalation(d: Mapping[str, Any],
                settings: Settings) -> EscalationDesign:
    method = d['method']
    target = d['target']
    kwargs: Dict[str, Any] = {
        k: d[k]
        for k in ('cohort_size', 'max_n', 'start_dose', 'eliminate',
                  'elimination_cutoff') if k in d
    }
    kwargs.setdefault('elimination_cutoff', settings.elimination_cutoff)
    if 'equivalence_interval' in d:
        kwargs['equivalence_interval'] = tuple(d['equivalence_interval'])
    if method == 'boin':
        kwargs['boin'] = boin_boundaries(target, d.get('phi1'),
                                         d.get('phi2'))
    elif method == 'mtpi':
        mtpi: Dict[str, Any] = {
            k: d[k]
            for k in ('eps1', 'eps2', 'variant') if k in d
        }
        if 'prior' in d:
            mtpi['prior'] = _beta(d['prior'])
        kwargs['mtpi'] = MtpiSpec(target, **mtpi)
    elif method == 'crm':
        if 'skeleton' not in d:
            raise ValueError('CRM designs need a skeleton')
        kwargs['crm'] = CrmSpec.from_settings(d['skeleton'], target,
                                              settings,
                                              d.get('no_skip', True))
    return EscalationDesign(method,
                            d['n_doses'],
                            target,
                            mtd_smoothing=settings.mtd_smoothing,
                            **kwargs)


def _design_prior(d: Mapping[str, Any], scenarios: Mapping[str, Scenario],
                  settings: Settings, errors: _Errors
                  ) -> Optional[DesignPrior]:
    if d['type'] == 'beta':
        return errors.build(
            'design_prior', lambda: DesignPrior.from_beta(
                BetaParams(d['alpha'], d['beta']), d.get('control_rate'),
                d.get('grid_size', settings.design_prior_grid_size)))
    refs = ([(1.0, d['scenario'])] if d['type'] == 'point' else
            [(a['weight'], a['scenario']) for a in d['atoms']])
    atoms = []
    for i, (weight, label) in enumerate(refs):
        if label not in scenarios:
            where = ('design_prior.scenario' if d['type'] == 'point' else
                     f'design_prior.atoms.{i}.scenario')
            errors.add(where, f'Unknown scenario {label!r}')
        else:
            atoms.append((weight, scenarios[label]))
    if len(atoms) != len(refs):
        return None
    return errors.build('design_prior', lambda: DesignPrior(tuple(atoms)))


def _check_atoms(d: Mapping[str, Any], dprior: DesignPrior,
                 design: TrialDesign, errors: _Errors) -> None:
    for i, (_, scenario) in enumerate(dprior.atoms):
        where = (f'design_prior.atoms.{i}'
                 if d['type'] == 'atoms' else 'design_prior')
        before = len(errors.items)
        errors.build(where, partial(scenario.check, design))
        if len(errors.items) > before and d['type'] != 'atoms':
            break


def parse_config(text: str) -> DesignConfig:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError([('$', f'Invalid JSON: {e}')]) from e
    errors = _Errors()
    if not errors.validate(CONFIG_SCHEMA, raw, None):
        raise ConfigError(errors.items)
    config = cast(ConfigDict, raw)
    design_d = cast(Dict[str, Any], config['design'])
    sequential = design_d['kind'] == 'sequential'
    errors.validate(SEQUENTIAL_SCHEMA if sequential else DOSE_FINDING_SCHEMA,
                    design_d, 'design')
    for name, spec in config.get('priors', {}).items():
        errors.validate(PRIOR_SCHEMAS[spec['type']], spec, f'priors.{name}')
    if errors.items:
        raise ConfigError(errors.items)

    execution_d = config.get('execution', {})
    try:
        settings = DEFAULT_SETTINGS.override(execution_d.get('settings', {}))
    except BayesTrialsError as e:
        raise ConfigError([('execution.settings', str(e))]) from e
    execution = ExecutionSpec(**{
        k: v
        for k, v in execution_d.items() if k != 'settings'
    })

    priors: Dict[str, Distribution] = {}
    for name, spec in sorted(config.get('priors', {}).items()):
        built = errors.build(f'priors.{name}',
                             lambda: _prior(spec, settings))
        if built is not None:
            priors[name] = built

    scenarios: List[Scenario] = []
    for i, s in enumerate(config.get('scenarios', [])):
        scenario = errors.build(f'scenarios.{i}', lambda: _scenario(s))
        if scenario is not None:
            scenarios.append(scenario)
    labels = [s['label'] for s in config.get('scenarios', [])]
    for i, label in enumerate(labels):
        if labels.index(label) != i:
            errors.add(f'scenarios.{i}.label',
                       f'Duplicate scenario label {label!r}')
    by_label = {s.label: s for s in scenarios}

    design: Optional[TrialDesign] = None
    escalation: Optional[EscalationDesign] = None
    if sequential:
        design = _sequential(design_d, priors, settings, errors)
        if design is not None:
            for i, s in enumerate(scenarios):
                errors.build(f'scenarios.{i}', partial(s.check, design))
    else:
        escalation = errors.build('design',
                                  lambda: _escalation(design_d, settings))
        if escalation is not None:
            for i, s in enumerate(scenarios):
                if len(s.rates) != escalation.n_doses:
                    errors.add(f'scenarios.{i}.rates',
                               'Need one true DLT rate per dose')

    design_prior: Optional[DesignPrior] = None
    if 'design_prior' in config:
        design_prior = _design_prior(config['design_prior'], by_label,
                                     settings, errors)
        if design_prior is not None and design is not None:
            _check_atoms(config['design_prior'], design_prior, design,
                         errors)

    alternatives: List[Tuple[str, Tuple[str, ...]]] = []
    for i, alt in enumerate(
            config.get('sensitivity', {}).get('alternative_priors', [])):
        for j, name in enumerate(alt['priors']):
            if name not in priors:
                errors.add(f'sensitivity.alternative_priors.{i}.priors.{j}',
                           f'Unknown prior {name!r}')
        if design is not None and len(alt['priors']) != design.arms:
            errors.add(f'sensitivity.alternative_priors.{i}.priors',
                       f'Need {design.arms} prior(s)')
        alternatives.append((alt['label'], tuple(alt['priors'])))
    if alternatives and not sequential:
        errors.add('sensitivity',
                   'Sensitivity analyses need a sequential design')

    calibration: Optional[CalibrationSpec] = None
    if 'calibration' in config:
        c = config['calibration']
        if c['null_scenario'] not in by_label:
            errors.add('calibration.null_scenario',
                       f'Unknown scenario {c["null_scenario"]!r}')
        else:
            a = c.get('assurance')
            assurance = None
            if a is not None:
                if design_prior is None:
                    errors.add('calibration.assurance',
                               'Assurance calibration needs a design_prior')
                bounds = a.get('bounds', [20, 200])
                assurance = AssuranceSpec(a['target'],
                                          a.get('parameter', 'sample_size'),
                                          (bounds[0], bounds[1]),
                                          a.get('step', 1))
            fractions = c.get('spending_fractions')
            if not sequential:
                errors.add('calibration',
                           'Calibration needs a sequential design')
            elif (fractions is not None and design is not None
                  and design.arms != 1):
                errors.add('calibration.spending_fractions',
                           'Group-sequential boundaries are one-arm')
            calibration = CalibrationSpec(
                c['alpha'], by_label[c['null_scenario']],
                c.get('cutoff_grid_step', settings.calibration_step),
                None if fractions is None else tuple(fractions), assurance)

    if errors.items:
        raise ConfigError(errors.items)
    _log.debug('Parsed configuration %s', config_digest(raw))
    return DesignConfig(raw=raw,
                        settings=settings,
                        priors=priors,
                        scenarios=tuple(scenarios),
                        execution=execution,
                        design=design,
                        escalation=escalation,
                        design_prior=design_prior,
                        alternative_priors=tuple(alternatives),
                        calibration=calibration)


def load_config(path: str) -> DesignConfig:
    with open(path, encoding='utf-8') as f:
        return parse_config(f.read())
