"""Registry of every algorithm setting that can change a result."""
from dataclasses import asdict, dataclass, fields, replace
from typing import Any, Dict, Mapping, Tuple

from .constants import (CALIBRATION_STEP, CRM_GRID_BOUNDS, CRM_GRID_SIZE,
                        CRM_PRIOR_SD, DEFAULT_GRID_SIZE,
                        DESIGN_PRIOR_GRID_SIZE, DP_CELL_BUDGET,
                        ELIMINATION_CUTOFF, EXACT_ONE_ARM_MAX_N,
                        EXACT_TWO_ARM_MAX_N,
                        MAP_CONCENTRATION_BOUNDS, MAP_CONCENTRATION_POINTS,
                        MAP_MEAN_BOUNDS, MAP_MEAN_POINTS, MTD_SMOOTHING,
                        PPOS_CELL_BUDGET, PRUNE_THRESHOLD, QUADRATURE_TOL,
                        QUANTILE_TOL)
from .exceptions import InvalidParameterError

__all__ = ('DEFAULT_SETTINGS', 'Settings')


@dataclass(frozen=True)
class Settings:
    grid_size: int = DEFAULT_GRID_SIZE
    quantile_tol: float = QUANTILE_TOL
    quadrature_tol: float = QUADRATURE_TOL
    prune_threshold: float = PRUNE_THRESHOLD
    map_mean_bounds: Tuple[float, float] = MAP_MEAN_BOUNDS
    map_mean_points: int = MAP_MEAN_POINTS
    map_concentration_bounds: Tuple[float, float] = MAP_CONCENTRATION_BOUNDS
    map_concentration_points: int = MAP_CONCENTRATION_POINTS
    ppos_cell_budget: int = PPOS_CELL_BUDGET
    exact_one_arm_max_n: int = EXACT_ONE_ARM_MAX_N
    exact_two_arm_max_n: int = EXACT_TWO_ARM_MAX_N
    dp_cell_budget: int = DP_CELL_BUDGET
    design_prior_grid_size: int = DESIGN_PRIOR_GRID_SIZE
    calibration_step: float = CALIBRATION_STEP
    elimination_cutoff: float = ELIMINATION_CUTOFF
    crm_grid_bounds: Tuple[float, float] = CRM_GRID_BOUNDS
    crm_grid_size: int = CRM_GRID_SIZE
    crm_prior_sd: float = CRM_PRIOR_SD
    mtd_smoothing: float = MTD_SMOOTHING

    def __post_init__(self) -> None:
        for f in fields(self):
            value = getattr(self, f.name)
            values = value if isinstance(value, tuple) else (value, )
            if f.name == 'crm_grid_bounds':
                if not value[0] < value[1]:
                    raise InvalidParameterError(
                        'crm_grid_bounds must be increasing')
                continue
            if any(v <= 0 for v in values):
                raise InvalidParameterError(f'{f.name} must be positive')

    def override(self, values: Mapping[str, Any]) -> 'Settings':
        known = {f.name for f in fields(self)}
        unknown = sorted(set(values) - known)
        if unknown:
            raise InvalidParameterError('Unknown settings: ' +
                                        ', '.join(unknown))
        return replace(
            self, **{
                k: tuple(v) if isinstance(v, list) else v
                for k, v in values.items()
            })

    def as_manifest(self) -> Dict[str, Any]:
        return {
            k: list(v) if isinstance(v, tuple) else v
            for k, v in sorted(asdict(self).items())
        }


DEFAULT_SETTINGS = Settings()
