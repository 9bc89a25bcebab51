from dataclasses import asdict, is_dataclass
from enum import Enum
from typing import (Any, Iterable, List, Mapping, Optional, Sequence, Tuple,
                    Union)
import hashlib
import json
import math

import numpy as np

from .constants import FLOAT_DIGITS

__all__ = ('canonical', 'canonical_json', 'chunk_ranges', 'config_digest',
           'format_path', 'is_strictly_increasing', 'round_float')


def format_path(parts: Iterable[Union[str, int]],
                prefix: Optional[str] = None) -> str:
    joined = '.'.join(str(p) for p in parts)
    if prefix:
        return f'{prefix}.{joined}' if joined else prefix
    return joined or '$'


def round_float(x: float, digits: int = FLOAT_DIGITS) -> float:
    return float(f'{x:.{digits}g}')


def canonical(obj: Any) -> Any:
    """Convert a result tree to plain JSON types with rounded floats."""
    if is_dataclass(obj) and not isinstance(obj, type):
        return canonical(asdict(obj))
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return str(x)
        # collapse negative zero
        return round_float(x) + 0.0
    if isinstance(obj, np.ndarray):
        return [canonical(x) for x in obj.tolist()]
    if isinstance(obj, Mapping):
        return {str(k): canonical(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [canonical(x) for x in obj]
    return obj


def canonical_json(obj: Any) -> str:
    return json.dumps(canonical(obj),
                      sort_keys=True,
                      indent=2,
                      allow_nan=False,
                      ensure_ascii=True) + '\n'


def config_digest(config: Mapping[str, Any]) -> str:
    m = hashlib.sha256()
    m.update(
        json.dumps(canonical(config),
                   sort_keys=True,
                   separators=(',', ':'),
                   allow_nan=False).encode())
    return f'sha256:{m.hexdigest()}'


def is_strictly_increasing(values: Sequence[float]) -> bool:
    return all(a < b for a, b in zip(values, values[1:]))


def chunk_ranges(total: int, parts: int) -> List[Tuple[int, int]]:
    """Split ``range(total)`` into at most ``parts`` contiguous slices."""
    parts = max(1, min(parts, total))
    bounds = [total * i // parts for i in range(parts + 1)]
    return [(a, b) for a, b in zip(bounds, bounds[1:]) if b > a]
