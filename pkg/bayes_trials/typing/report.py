from typing import Any, Dict, Optional, Sequence

from typing_extensions import TypedDict

__all__ = ('ManifestDict', 'OCDict', 'ReportDict')


class ManifestDict(TypedDict):
    tool_version: str
    schema_version: int
    config_digest: str
    master_seed: int
    settings: Dict[str, Any]
    timestamp: Optional[str]
    modes: Dict[str, str]
    subcommand: str


class OCDict(TypedDict, total=False):
    label: str
    mode: str
    reject_prob: float
    efficacy_stop: Sequence[float]
    futility_stop: Sequence[float]
    expected_sample_size: Sequence[float]
    assurance: Optional[float]
    pcd: Optional[float]
    replicates: Optional[int]
    standard_errors: Optional[Dict[str, Any]]


class ReportDict(TypedDict, total=False):
    subcommand: str
    config: Dict[str, Any]
    manifest: ManifestDict
    oc: Sequence[OCDict]
    bayesian: Optional[OCDict]
    calibration: Optional[Dict[str, Any]]
    decision_table: Optional[Sequence[Dict[str, Any]]]
    escalation: Sequence[Dict[str, Any]]
    sensitivity: Sequence[Dict[str, Any]]
