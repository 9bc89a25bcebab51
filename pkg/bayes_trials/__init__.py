"""Bayesian clinical trial design: posteriors, borrowing, decision rules,
exact and simulated operating characteristics, calibration and dose finding.
"""
from .borrowing import (CommensurateSpec, HistoricalData, PowerPriorSpec,
                        RobustMixSpec, commensurate_prior, map_prior,
                        power_prior, prior_data_conflict, robustify)
from .calibration import (AssuranceProblem, CalibrationProblem,
                          calibrate_assurance, calibrate_cutoff,
                          exact_gs_boundaries, exact_gs_oc)
from .config import DesignConfig, load_config, parse_config
from .constants import TOOL_VERSION
from .distributions import (BetaMixture, BetaParams, BinomialSummary,
                            GridDensity, credible_interval, posterior,
                            prob_exceeds)
from .dosefinding import (DoseToxState, EscalationDesign, boin_boundaries,
                          decision_table, simulate_escalation_oc)
from .engine import (DesignPrior, OCReport, Scenario, TrialDesign,
                     bayesian_oc, exact_oc, monte_carlo_oc)
from .exceptions import BayesTrialsError
from .report import RunReport, emit, run
from .rules import (FutilityRule, InterimState, MonitoringRule, SuccessRule,
                    evaluate_interim, ppos)
from .settings import DEFAULT_SETTINGS, Settings

__all__ = ('AssuranceProblem', 'BayesTrialsError', 'BetaMixture',
           'BetaParams', 'BinomialSummary', 'CalibrationProblem',
           'CommensurateSpec', 'DEFAULT_SETTINGS', 'DesignConfig',
           'DesignPrior', 'DoseToxState', 'EscalationDesign', 'FutilityRule',
           'GridDensity', 'HistoricalData', 'InterimState', 'MonitoringRule',
           'OCReport', 'PowerPriorSpec', 'RobustMixSpec', 'RunReport',
           'Scenario', 'Settings', 'SuccessRule', 'TrialDesign',
           'bayesian_oc', 'boin_boundaries', 'calibrate_assurance',
           'calibrate_cutoff', 'commensurate_prior', 'credible_interval',
           'decision_table', 'emit', 'evaluate_interim', 'exact_gs_boundaries',
           'exact_gs_oc', 'exact_oc', 'load_config', 'map_prior',
           'monte_carlo_oc', 'parse_config', 'posterior', 'power_prior',
           'ppos', 'prior_data_conflict', 'prob_exceeds', 'robustify', 'run',
           'simulate_escalation_oc')

__version__ = TOOL_VERSION
