import copy
import csv
import json

import pytest

from bayes_trials.config import parse_config
from bayes_trials.constants import TOOL_VERSION
from bayes_trials.exceptions import (BayesTrialsError, BudgetExceededError,
                                     EmitError, InvalidParameterError)
from bayes_trials.report import emit, report_dict, run

BASE = {
    'schema_version': 1,
    'priors': {
        'flat': {
            'type': 'beta',
            'alpha': 1,
            'beta': 1
        },
        'sceptical': {
            'type': 'beta',
            'alpha': 3,
            'beta': 7
        }
    },
    'design': {
        'kind': 'sequential',
        'looks': [[10], [20]],
        'priors': ['flat'],
        'success': {
            'effect_threshold': 0.3,
            'posterior_cutoff': 0.95
        },
        'futility': {
            'ppos_cutoff': 0.05
        }
    },
    'scenarios': [{
        'label': 'null',
        'rates': [0.3]
    }, {
        'label': 'alt',
        'rates': [0.5]
    }],
    'execution': {
        'replicates': 200,
        'master_seed': 1,
        'timestamp': '2024-06-11T00:00:00Z'
    }
}

BOIN = {
    'schema_version': 1,
    'design': {
        'kind': 'dose-finding',
        'method': 'boin',
        'n_doses': 4,
        'target': 0.3,
        'max_n': 18
    },
    'execution': {
        'replicates': 50,
        'decision_table_max_n': 3
    }
}


def _config(base=BASE, **changes):
    raw = copy.deepcopy(base)
    raw.update(changes)
    return parse_config(json.dumps(raw))


def _read(path):
    with open(path, 'rb') as f:
        return f.read()


def test_exact_oc_report():
    report = run(_config(), 'oc')
    assert [oc.label for oc in report.oc] == ['null', 'alt']
    assert all(oc.mode == 'exact' for oc in report.oc)
    assert all(oc.standard_errors is None for oc in report.oc)
    assert report.manifest.modes == {'oc.alt': 'exact', 'oc.null': 'exact'}
    assert report.manifest.tool_version == TOOL_VERSION
    assert report.manifest.timestamp == '2024-06-11T00:00:00Z'
    assert report.bayesian is None
    assert report.calibration is None


def test_simulate_uses_monte_carlo():
    report = run(_config(), 'simulate')
    assert all(oc.mode == 'monte-carlo' for oc in report.oc)
    assert all(oc.replicates == 200 for oc in report.oc)
    assert set(report.manifest.modes.values()) == {'monte-carlo'}


def test_seed_only_changes_simulated_results():
    config = _config()
    exact_1 = report_dict(run(config, 'oc', seed=1))
    exact_2 = report_dict(run(config, 'oc', seed=2))
    assert exact_1['oc'] == exact_2['oc']
    assert exact_1['manifest']['master_seed'] == 1
    assert exact_2['manifest']['master_seed'] == 2
    mc_1 = report_dict(run(config, 'simulate', seed=1))
    mc_2 = report_dict(run(config, 'simulate', seed=2))
    assert mc_1['oc'] != mc_2['oc']


def test_workers_do_not_change_the_report(tmp_path):
    config = _config()
    emitted = [
        _read(
            emit(run(config, 'simulate', workers=workers), 'json',
                 str(tmp_path / str(workers)))[0]) for workers in (1, 2, 8)
    ]
    assert emitted[0] == emitted[1] == emitted[2]


def test_auto_mode_falls_back_to_simulation():
    execution = dict(BASE['execution'],
                     settings={'exact_one_arm_max_n': 15})
    report = run(_config(execution=execution), 'oc')
    assert all(oc.mode == 'monte-carlo' for oc in report.oc)
    strict = dict(execution, mode='exact')
    with pytest.raises(BudgetExceededError):
        run(_config(execution=strict), 'oc')


def test_calibrated_cutoff_reproduces_type_i_error():
    calibration = {
        'alpha': 0.05,
        'null_scenario': 'null',
        'cutoff_grid_step': 0.01
    }
    report = run(_config(calibration=calibration), 'calibrate')
    block = report.calibration
    assert block['type_i_error'] <= 0.05 < block['previous_type_i_error']
    assert report.oc[0].reject_prob == pytest.approx(block['type_i_error'],
                                                     abs=1e-12)
    raw = copy.deepcopy(BASE)
    raw['design']['success']['posterior_cutoff'] = block['cutoff']
    replay = run(parse_config(json.dumps(raw)), 'oc')
    assert replay.oc[0].reject_prob == pytest.approx(block['type_i_error'],
                                                     abs=1e-12)


def test_report_with_every_block(tmp_path):
    config = _config(calibration={
        'alpha': 0.05,
        'null_scenario': 'null',
        'cutoff_grid_step': 0.01,
        'spending_fractions': [0.5, 1.0]
    },
                     design_prior={
                         'type': 'atoms',
                         'atoms': [{
                             'weight': 0.5,
                             'scenario': 'null'
                         }, {
                             'weight': 0.5,
                             'scenario': 'alt'
                         }]
                     },
                     sensitivity={
                         'alternative_priors': [{
                             'label': 'sceptical',
                             'priors': ['sceptical']
                         }]
                     })
    report = run(config, 'report')
    assert report.bayesian.assurance is not None
    assert 'group_sequential' in report.calibration
    assert [s.label for s in report.sensitivity] == ['sceptical']
    assert len(report.sensitivity[0].oc) == 2
    assert report.sensitivity[0].bayesian is not None
    assert 'sensitivity.sceptical.oc.null' in report.manifest.modes
    paths = emit(report, 'csv', str(tmp_path))
    names = sorted(p.rsplit('/', 1)[-1] for p in paths)
    assert names == [
        'calibration.csv', 'manifest.json', 'oc.csv', 'summary.csv'
    ]
    with open(tmp_path / 'summary.csv', encoding='utf-8', newline='') as f:
        sections = {row['section'] for row in csv.DictReader(f)}
    assert {'oc', 'bayesian', 'sensitivity.sceptical', 'calibration.null',
            'group_sequential'} <= sections


def test_json_report_echoes_config(tmp_path):
    report = run(_config(), 'oc')
    (path, ) = emit(report, 'json', str(tmp_path))
    with open(path, encoding='utf-8') as f:
        data = json.load(f)
    assert data['config'] == BASE
    assert data['manifest']['config_digest'] == report.manifest.config_digest
    assert 'workers' not in data['manifest']


def test_emit_is_byte_identical(tmp_path):
    report = run(_config(), 'simulate')
    for fmt in ('json', 'csv'):
        first = emit(report, fmt, str(tmp_path / f'{fmt}-1'))
        second = emit(report, fmt, str(tmp_path / f'{fmt}-2'))
        assert [_read(p) for p in first] == [_read(p) for p in second]


def test_same_seed_gives_identical_reports(tmp_path):
    first = emit(run(_config(), 'simulate'), 'json', str(tmp_path / 'a'))
    second = emit(run(_config(), 'simulate'), 'json', str(tmp_path / 'b'))
    assert _read(first[0]) == _read(second[0])


def test_boin_decision_table_csv(tmp_path):
    report = run(_config(BOIN), 'dose-find')
    assert report.escalation == ()
    paths = emit(report, 'csv', str(tmp_path))
    assert sorted(p.rsplit('/', 1)[-1]
                  for p in paths) == ['decision_table.csv', 'manifest.json']
    with open(tmp_path / 'decision_table.csv', encoding='utf-8',
              newline='') as f:
        rows = list(csv.reader(f))
    assert rows[0] == ['n', 'y', 'decision', 'eliminate']
    assert len(rows) == 1 + 2 + 3 + 4
    assert ['3', '0', 'Escalate', 'false'] in rows
    assert ['3', '3', 'DeEscalate', 'true'] in rows


def test_dose_finding_simulation():
    report = run(
        _config(BOIN,
                scenarios=[{
                    'label': 'truth',
                    'rates': [0.1, 0.2, 0.3, 0.5]
                }]), 'dose-find')
    (oc, ) = report.escalation
    assert oc.label == 'truth'
    assert oc.replicates == 50
    assert report.manifest.modes == {'escalation.truth': 'monte-carlo'}


def test_subcommand_must_fit_the_design():
    with pytest.raises(BayesTrialsError):
        run(_config(), 'dose-find')
    with pytest.raises(BayesTrialsError):
        run(_config(BOIN), 'oc')
    with pytest.raises(BayesTrialsError):
        run(_config(), 'calibrate')
    with pytest.raises(InvalidParameterError):
        run(_config(), 'plot')


def test_emit_errors(tmp_path):
    report = run(_config(), 'oc')
    blocked = tmp_path / 'blocked'
    blocked.write_text('', encoding='utf-8')
    with pytest.raises(EmitError):
        emit(report, 'json', str(blocked))
    with pytest.raises(InvalidParameterError):
        emit(report, 'xml', str(tmp_path))
