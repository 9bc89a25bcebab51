from typing import Dict, Sequence, Union

from typing_extensions import TypedDict

__all__ = ('AssuranceDict', 'BetaDict', 'BinomialDict', 'CalibrationDict',
           'ComponentDict', 'ConfigDict', 'DesignPriorDict', 'ExecutionDict',
           'LossDict', 'MonitoringDict', 'PriorDict', 'ScenarioDict',
           'SensitivityDict', 'SuccessDict')


class BetaDict(TypedDict):
    alpha: float
    beta: float


class BinomialDict(TypedDict):
    successes: int
    trials: int


class ComponentDict(BetaDict):
    weight: float


class PriorDict(TypedDict, total=False):
    type: str
    alpha: float
    beta: float
    components: Sequence[ComponentDict]
    discount: float
    baseline: BetaDict
    historical: Union[BinomialDict, Sequence[BinomialDict]]
    map_weight: float
    vague: BetaDict
    historical_posterior: BetaDict
    tau_grid: Sequence[float]
    tau_weights: Sequence[float]
    size: int


class LossDict(TypedDict):
    false_positive: float
    false_negative: float


class SuccessDict(TypedDict, total=False):
    effect_threshold: float
    posterior_cutoff: float
    loss: LossDict


class MonitoringDict(TypedDict, total=False):
    kind: str
    cutoff: float
    assumed_rates: Sequence[float]


class ScenarioDict(TypedDict, total=False):
    label: str
    rates: Sequence[float]
    drift: Sequence[float]


class DesignPriorDict(TypedDict, total=False):
    type: str
    scenario: str
    atoms: Sequence[Dict[str, Union[str, float]]]
    alpha: float
    beta: float
    control_rate: float
    grid_size: int


class AssuranceDict(TypedDict, total=False):
    target: float
    parameter: str
    bounds: Sequence[float]
    step: float


class CalibrationDict(TypedDict, total=False):
    alpha: float
    null_scenario: str
    cutoff_grid_step: float
    spending_fractions: Sequence[float]
    assurance: AssuranceDict


class SensitivityDict(TypedDict):
    label: str
    priors: Sequence[str]


class ExecutionDict(TypedDict, total=False):
    replicates: int
    master_seed: int
    workers: int
    mode: str
    timestamp: str
    decision_table_max_n: int
    settings: Dict[str, object]


class ConfigDict(TypedDict, total=False):
    schema_version: int
    priors: Dict[str, PriorDict]
    design: Dict[str, object]
    scenarios: Sequence[ScenarioDict]
    design_prior: DesignPriorDict
    sensitivity: Dict[str, Sequence[SensitivityDict]]
    calibration: CalibrationDict
    execution: ExecutionDict
