"""
JSON persistence for grid functions: {dim, origin, spacing, shape, values(row-major)}.
Readers reject NaN always and infinities unless the caller allows them (exponent files).
"""
import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, Union

import numpy as np

from grid.core import GridFunction

logger = logging.getLogger(__name__)

_INF_TOKENS = {"inf": math.inf, "Infinity": math.inf}


def grid_to_dict(f: GridFunction) -> Dict[str, Any]:
    values = []
    for v in f.values.ravel():
        if math.isnan(v):
            raise ValueError("cannot serialize NaN")
        values.append("inf" if math.isinf(v) and v > 0 else float(v))
    if any(isinstance(v, float) and math.isinf(v) for v in values):
        raise ValueError("cannot serialize -inf")
    return {
        "dim": f.dim,
        "origin": list(f.origin),
        "spacing": f.spacing,
        "shape": list(f.shape),
        "values": values,
    }


def grid_from_dict(raw: Dict[str, Any], allow_infinite: bool = False) -> GridFunction:
    """Validate and build a GridFunction from its JSON payload."""
    try:
        dim = int(raw["dim"])
        shape = tuple(int(n) for n in raw["shape"])
        origin = tuple(float(c) for c in raw["origin"])
        spacing = float(raw["spacing"])
        values = [_parse_value(v, allow_infinite) for v in raw["values"]]
    except (KeyError, TypeError) as e:
        raise ValueError("malformed grid payload: %s" % e) from e
    if dim != len(shape):
        raise ValueError("dim %d disagrees with shape %s" % (dim, shape))
    return GridFunction(origin, spacing, shape, np.asarray(values, dtype=float))


def _parse_value(v: Any, allow_infinite: bool) -> float:
    if isinstance(v, str):
        if v in _INF_TOKENS and allow_infinite:
            return _INF_TOKENS[v]
        raise ValueError("non-finite or non-numeric value %r" % v)
    x = float(v)
    if math.isnan(x) or (math.isinf(x) and not allow_infinite):
        raise ValueError("non-finite value %r" % v)
    return x


def save_grid(f: GridFunction, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(grid_to_dict(f), allow_nan=False))
    logger.info("Saved %s to %s", f, path)
    return path


def load_grid(path: Union[str, Path], allow_infinite: bool = False) -> GridFunction:
    path = Path(path)
    raw = json.loads(path.read_text(), parse_constant=_reject_constant)
    f = grid_from_dict(raw, allow_infinite=allow_infinite)
    logger.info("Loaded %s from %s", f, path)
    return f


def _reject_constant(token: str) -> float:
    raise ValueError("non-finite literal %s in grid file" % token)
