from typing import Tuple

from typing_extensions import Final

__all__ = ('BOIN_PHI1_FACTOR', 'BOIN_PHI2_FACTOR', 'CALIBRATION_STEP',
           'COMMENSURATE_LOGIT_HALF_WIDTH', 'CRM_GRID_BOUNDS', 'CRM_GRID_SIZE',
           'CRM_PRIOR_SD', 'DEFAULT_GRID_SIZE', 'DESIGN_PRIOR_GRID_SIZE',
           'DP_CELL_BUDGET', 'ELIMINATION_CUTOFF', 'ELIMINATION_MIN_TREATED',
           'EXACT_ONE_ARM_MAX_N', 'EXACT_TWO_ARM_MAX_N', 'FLOAT_DIGITS',
           'GRID_MASS_TOL', 'LOGGER_NAME', 'MAP_CONCENTRATION_BOUNDS',
           'MAP_CONCENTRATION_POINTS', 'MAP_MEAN_BOUNDS', 'MAP_MEAN_POINTS',
           'MIXTURE_WEIGHT_TOL', 'MTD_SMOOTHING', 'MTPI_EPSILON',
           'PPOS_CELL_BUDGET', 'PRUNE_THRESHOLD', 'QUADRATURE_TOL',
           'QUANTILE_TOL', 'SCHEMA_VERSION', 'TOOL_VERSION')

TOOL_VERSION: Final[str] = '0.3.0'
LOGGER_NAME: Final[str] = 'bayes-trials'
SCHEMA_VERSION: Final[int] = 1

# distributions
DEFAULT_GRID_SIZE: Final[int] = 2001
GRID_MASS_TOL: Final[float] = 1e-10
MIXTURE_WEIGHT_TOL: Final[float] = 1e-12
PRUNE_THRESHOLD: Final[float] = 1e-8
QUANTILE_TOL: Final[float] = 1e-10
QUADRATURE_TOL: Final[float] = 1e-8

# borrowing
MAP_MEAN_BOUNDS: Final[Tuple[float, float]] = (0.005, 0.995)
MAP_MEAN_POINTS: Final[int] = 99
MAP_CONCENTRATION_BOUNDS: Final[Tuple[float, float]] = (1.0, 1000.0)
MAP_CONCENTRATION_POINTS: Final[int] = 21
COMMENSURATE_LOGIT_HALF_WIDTH: Final[float] = 6.0

# decision rules and engine
PPOS_CELL_BUDGET: Final[int] = 4_000_000
EXACT_ONE_ARM_MAX_N: Final[int] = 400
EXACT_TWO_ARM_MAX_N: Final[int] = 60
DP_CELL_BUDGET: Final[int] = 64_000_000
DESIGN_PRIOR_GRID_SIZE: Final[int] = 201

# calibration
CALIBRATION_STEP: Final[float] = 1e-4

# dose finding
BOIN_PHI1_FACTOR: Final[float] = 0.6
BOIN_PHI2_FACTOR: Final[float] = 1.4
MTPI_EPSILON: Final[float] = 0.05
ELIMINATION_CUTOFF: Final[float] = 0.95
ELIMINATION_MIN_TREATED: Final[int] = 3
CRM_GRID_BOUNDS: Final[Tuple[float, float]] = (-4.0, 4.0)
CRM_GRID_SIZE: Final[int] = 801
CRM_PRIOR_SD: Final[float] = 1.34
MTD_SMOOTHING: Final[float] = 0.05

# reports
FLOAT_DIGITS: Final[int] = 12
