"""
Mean oscillation over finite cube families: BMO lower bounds and the sharp maximal function.
"""
import logging
import math
from typing import Optional, Sequence, Tuple

import numpy as np

from grid.core import Cube, GridFunction, cube_slices, stable_mean

logger = logging.getLogger(__name__)


def mean_oscillation(f: GridFunction, cube: Cube) -> Optional[float]:
    """(1/|Q|) int_Q |f - <f>_Q| over the rasterized cube, None when it covers no cell."""
    window = cube_slices(f, cube)
    if window is None:
        return None
    values = f.values[window]
    average = stable_mean(values)
    deviations = np.abs(values - average)
    return math.fsum(deviations.ravel()) / values.size


def bmo_norm(b: GridFunction, cubes: Sequence[Cube]) -> float:
    """Max mean oscillation over the family; a lower bound of ||b||_BMO."""
    if not cubes:
        raise ValueError("cube family must be nonempty")
    best = 0.0
    skipped = 0
    for cube in cubes:
        osc = mean_oscillation(b, cube)
        if osc is None:
            skipped += 1
            continue
        best = max(best, osc)
    if skipped:
        logger.warning("BMO norm skipped %d cubes covering no cell", skipped)
    return best


def bmo_norm_with_cube(b: GridFunction, cubes: Sequence[Cube]) -> Tuple[float, Optional[Cube]]:
    """bmo_norm together with the first cube attaining it."""
    best, arg = 0.0, None
    for cube in cubes:
        osc = mean_oscillation(b, cube)
        if osc is not None and (arg is None or osc > best):
            best, arg = osc, cube
    return best, arg


def sharp_maximal(f: GridFunction, cubes: Sequence[Cube]) -> GridFunction:
    """f^#(x): max mean oscillation over family cubes containing x."""
    out = np.zeros(f.shape)
    for cube in cubes:
        window = cube_slices(f, cube)
        if window is None:
            continue
        values = f.values[window]
        osc = math.fsum(np.abs(values - stable_mean(values)).ravel()) / values.size
        out[window] = np.maximum(out[window], osc)
    return f.with_values(out)
