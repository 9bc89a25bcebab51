import copy
import json

import pytest

from bayes_trials.config import load_config, parse_config
from bayes_trials.distributions import BetaMixture, BetaParams, GridDensity
from bayes_trials.exceptions import BayesTrialsError, ConfigError

MINIMAL = {
    'schema_version': 1,
    'priors': {
        'flat': {
            'type': 'beta',
            'alpha': 1,
            'beta': 1
        }
    },
    'design': {
        'kind': 'sequential',
        'looks': [[10], [20]],
        'priors': ['flat'],
        'success': {
            'effect_threshold': 0.3,
            'posterior_cutoff': 0.95
        }
    },
    'scenarios': [{
        'label': 'null',
        'rates': [0.3]
    }, {
        'label': 'alt',
        'rates': [0.5]
    }]
}

GRADUATION = {
    'schema_version': 1,
    'priors': {
        'vague': {
            'type': 'beta',
            'alpha': 1,
            'beta': 1
        }
    },
    'design': {
        'kind': 'sequential',
        'comparison': 'two-arm',
        'looks': [[10, 10], [20, 20]],
        'priors': ['vague', 'vague'],
        'success': {
            'effect_threshold': 0.0,
            'posterior_cutoff': 0.85
        },
        'futility': {
            'ppos_cutoff': 0.10
        },
        'monitoring': {
            'kind': 'ppos',
            'cutoff': 0.85
        }
    },
    'scenarios': [{
        'label': 'null',
        'rates': [0.3, 0.3]
    }]
}


def _config(base=MINIMAL, **changes):
    config = copy.deepcopy(base)
    config.update(changes)
    return config


def _parse(config):
    return parse_config(json.dumps(config))


def _paths(config):
    with pytest.raises(ConfigError) as info:
        _parse(config)
    return [path for path, _ in info.value.errors]


def test_minimal_config():
    config = _parse(MINIMAL)
    design = config.sequential_design()
    assert design.looks == ((10, ), (20, ))
    assert design.priors == (BetaParams(1, 1), )
    assert design.success.posterior_cutoff == 0.95
    assert [s.label for s in config.scenarios] == ['null', 'alt']
    assert config.scenario('alt').rates == (0.5, )
    assert config.execution.replicates == 10000
    assert config.escalation is None
    assert config.digest.startswith('sha256:')


def test_digest_ignores_key_order():
    reordered = json.dumps(MINIMAL, sort_keys=True, indent=4)
    assert parse_config(reordered).digest == _parse(MINIMAL).digest


def test_graduation_thresholds_are_kept_exactly():
    config = _parse(GRADUATION)
    design = config.sequential_design()
    assert design.success.posterior_cutoff == 0.85
    assert design.futility.ppos_cutoff == 0.10
    assert design.monitoring.kind == 'ppos'
    assert design.arms == 2
    assert config.raw['design']['futility']['ppos_cutoff'] == 0.10


def test_cutoff_out_of_range_names_its_path():
    config = _config()
    config['design']['success']['posterior_cutoff'] = 1.5
    assert _paths(config) == ['design.success.posterior_cutoff']


def test_all_errors_are_reported():
    config = _config()
    config['design']['success']['posterior_cutoff'] = 1.5
    config['priors']['flat']['alpha'] = -1
    paths = _paths(config)
    assert 'design.success.posterior_cutoff' in paths
    assert 'priors.flat.alpha' in paths


def test_invalid_json():
    with pytest.raises(ConfigError) as info:
        parse_config('{"schema_version": 1,')
    assert info.value.errors[0][0] == '$'


def test_schema_version_and_unknown_keys():
    assert 'schema_version' in _paths(_config(schema_version=2))
    assert _paths(_config(colour='blue')) == ['$']


def test_unknown_prior_reference():
    config = _config()
    config['design']['priors'] = ['missing']
    assert _paths(config) == ['design.priors.0']


def test_cutoff_and_loss_are_exclusive():
    config = _config()
    config['design']['success']['loss'] = {
        'false_positive': 19,
        'false_negative': 1
    }
    assert _paths(config) == ['design.success']
    del config['design']['success']['posterior_cutoff']
    design = _parse(config).sequential_design()
    assert design.success.posterior_cutoff == pytest.approx(0.95)


def test_scenario_arity_is_checked_against_design():
    config = _config(scenarios=[{'label': 'bad', 'rates': [0.3, 0.2]}])
    assert _paths(config) == ['scenarios.0']


def test_duplicate_scenario_labels():
    config = _config(scenarios=[{
        'label': 'a',
        'rates': [0.3]
    }, {
        'label': 'a',
        'rates': [0.4]
    }])
    assert _paths(config) == ['scenarios.1.label']


def test_borrowing_priors():
    config = _config(
        priors={
            'power': {
                'type': 'power',
                'discount': 0.5,
                'historical': {
                    'successes': 10,
                    'trials': 20
                }
            },
            'robust': {
                'type': 'robust-map',
                'historical': [{
                    'successes': 4,
                    'trials': 20
                }, {
                    'successes': 6,
                    'trials': 25
                }],
                'map_weight': 0.8
            },
            'grid': {
                'type': 'grid',
                'size': 101
            }
        })
    config['design']['priors'] = ['power']
    parsed = _parse(config)
    assert parsed.priors['power'] == BetaParams(6, 6)
    assert isinstance(parsed.priors['robust'], BetaMixture)
    assert isinstance(parsed.priors['grid'], GridDensity)
    assert len(parsed.priors['grid'].grid) == 101


def test_prior_specific_schema():
    config = _config()
    config['priors']['flat'] = {'type': 'power', 'discount': 2}
    paths = _paths(config)
    assert 'priors.flat' in paths
    assert 'priors.flat.discount' in paths


def test_design_prior_and_calibration():
    config = _config(design_prior={
        'type': 'atoms',
        'atoms': [{
            'weight': 0.5,
            'scenario': 'null'
        }, {
            'weight': 0.5,
            'scenario': 'alt'
        }]
    },
                     calibration={
                         'alpha': 0.05,
                         'null_scenario': 'null',
                         'cutoff_grid_step': 0.01
                     })
    parsed = _parse(config)
    assert len(parsed.design_prior.atoms) == 2
    assert parsed.calibration.null_scenario.label == 'null'
    assert parsed.calibration.cutoff_grid_step == 0.01


def test_references_to_missing_scenarios():
    config = _config(design_prior={
        'type': 'point',
        'scenario': 'nowhere'
    },
                     calibration={
                         'alpha': 0.05,
                         'null_scenario': 'nowhere'
                     })
    paths = _paths(config)
    assert 'design_prior.scenario' in paths
    assert 'calibration.null_scenario' in paths


def test_assurance_needs_design_prior():
    config = _config(calibration={
        'alpha': 0.05,
        'null_scenario': 'null',
        'assurance': {
            'target': 0.8
        }
    })
    assert _paths(config) == ['calibration.assurance']


def test_sensitivity_priors():
    config = _config(sensitivity={
        'alternative_priors': [{
            'label': 'sceptical',
            'priors': ['missing']
        }]
    })
    assert _paths(config) == [
        'sensitivity.alternative_priors.0.priors.0'
    ]


def test_settings_overrides():
    config = _config(execution={'settings': {'grid_size': 501}})
    assert _parse(config).settings.grid_size == 501
    bad = _config(execution={'settings': {'grid_size': 0}})
    assert _paths(bad) == ['execution.settings']
    unknown = _config(execution={'settings': {'colour': 1}})
    assert _paths(unknown) == ['execution.settings']


def test_dose_finding_config():
    config = {
        'schema_version': 1,
        'design': {
            'kind': 'dose-finding',
            'method': 'crm',
            'n_doses': 4,
            'target': 0.25,
            'skeleton': [0.05, 0.12, 0.25, 0.4]
        },
        'scenarios': [{
            'label': 'truth',
            'rates': [0.05, 0.1, 0.25, 0.45]
        }]
    }
    parsed = _parse(config)
    escalation = parsed.escalation_design()
    assert escalation.method == 'crm'
    assert escalation.crm.skeleton == (0.05, 0.12, 0.25, 0.4)
    with pytest.raises(BayesTrialsError):
        parsed.sequential_design()
    del config['design']['skeleton']
    assert _paths(config) == ['design']
    config['design']['method'] = 'boin'
    config['scenarios'][0]['rates'] = [0.1]
    assert _paths(config) == ['scenarios.0.rates']


def test_load_config(tmp_path):
    path = tmp_path / 'design.json'
    path.write_text(json.dumps(MINIMAL), encoding='utf-8')
    assert load_config(str(path)).sequential_design().looks == ((10, ),
                                                                (20, ))


def test_every_design_prior_atom_is_checked():
    config = _config(scenarios=MINIMAL['scenarios'] + [{
        'label': 'two-arm',
        'rates': [0.5, 0.3]
    }],
                     design_prior={
                         'type': 'atoms',
                         'atoms': [{
                             'weight': 0.5,
                             'scenario': 'alt'
                         }, {
                             'weight': 0.5,
                             'scenario': 'two-arm'
                         }]
                     })
    paths = _paths(config)
    assert 'design_prior.atoms.1' in paths
    assert 'design_prior.atoms.0' not in paths


def test_beta_design_prior_arity_is_reported_once():
    config = _config(design_prior={
        'type': 'beta',
        'alpha': 2,
        'beta': 2,
        'control_rate': 0.3
    })
    assert _paths(config) == ['design_prior']
