from typing import Optional, Sequence, Tuple

__all__ = ('AlphaUnattainableError', 'AssuranceUnattainableError',
           'BayesTrialsError', 'BudgetExceededError', 'CalibrationError',
           'ConfigError', 'DegenerateUpdateError', 'DoseFindingError',
           'EmitError', 'InfeasibleSpendingError', 'InvalidParameterError',
           'MomentMatchingWarning')


class BayesTrialsError(Exception):
    pass


class InvalidParameterError(BayesTrialsError, ValueError):
    pass


class DegenerateUpdateError(BayesTrialsError):
    pass


class BudgetExceededError(BayesTrialsError):
    pass


class CalibrationError(BayesTrialsError):
    pass


class AlphaUnattainableError(CalibrationError):
    pass


class AssuranceUnattainableError(CalibrationError):
    def __init__(self, message: str, best: float, best_parameter: float):
        super().__init__(f'{message} (best achieved {best:.6g} at '
                         f'{best_parameter:g})')
        self.best = best
        self.best_parameter = best_parameter


class InfeasibleSpendingError(CalibrationError):
    pass


class DoseFindingError(BayesTrialsError):
    pass


class ConfigError(BayesTrialsError):
    """Carries every validation error found, not just the first."""
    def __init__(self, errors: Sequence[Tuple[str, str]]):
        self.errors: Tuple[Tuple[str, str], ...] = tuple(errors)
        super().__init__('; '.join(f'{path}: {message}'
                                   for path, message in self.errors))


class EmitError(BayesTrialsError, OSError):
    def __init__(self, path: str, cause: Optional[BaseException] = None):
        super().__init__(f'Failed to write {path}: {cause}')
        self.path = path


class MomentMatchingWarning(UserWarning):
    pass
