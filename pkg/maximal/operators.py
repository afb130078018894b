"""
Maximal operators over cube families: Hardy-Littlewood, M_r, iterates, the
multilinear maximal function, its L log L variant and the grand sharp truncation.
"""
import logging
import math
from typing import Optional, Sequence

import numpy as np

from grid.core import GridFunction
from maximal.families import CubeFamilySpec, CubeIndex, family_sup, family_sup_by_cube
from spaces.descriptors import YoungFunction
from spaces.norms import orlicz_average_norm

logger = logging.getLogger(__name__)

DEFAULT_FAMILY = CubeFamilySpec()


def hl_maximal(f: GridFunction, family: CubeFamilySpec = DEFAULT_FAMILY) -> GridFunction:
    """Mf(x) = max over family cubes Q containing x of <|f|>_Q."""
    return f.with_values(family_sup(f, family, [np.abs(f.values)]))


def mr_maximal(f: GridFunction, r: float, family: CubeFamilySpec = DEFAULT_FAMILY) -> GridFunction:
    """M_r f = M(|f|^r)^{1/r}."""
    if r < 1:
        raise ValueError("M_r needs r >= 1, got %r" % r)
    if r == 1:
        return hl_maximal(f, family)
    return hl_maximal(abs(f) ** r, family) ** (1.0 / r)


def iterated_maximal(f: GridFunction, k: int, family: CubeFamilySpec = DEFAULT_FAMILY) -> GridFunction:
    """M^k f with M^0 f = |f|."""
    if k < 0:
        raise ValueError("iteration count must be >= 0, got %d" % k)
    g = abs(f)
    for _ in range(k):
        g = hl_maximal(g, family)
    return g


def multilinear_maximal(fs: Sequence[GridFunction], family: CubeFamilySpec = DEFAULT_FAMILY) -> GridFunction:
    """max over cubes Q containing x of prod_i <|f_i|>_Q."""
    if not fs:
        raise ValueError("need at least one function")
    for f in fs[1:]:
        fs[0].check_same_grid(f)
    return fs[0].with_values(family_sup(fs[0], family, [np.abs(f.values) for f in fs]))


def orlicz_maximal(
    fs: Sequence[GridFunction],
    l: int,
    family: CubeFamilySpec = DEFAULT_FAMILY,
    young: Optional[YoungFunction] = None,
) -> GridFunction:
    """
    max over cubes of prod_{i<l} ||f_i||_{Phi,Q} prod_{i>=l} <|f_i|>_Q, Phi = L log L by default.
    l = len(fs) gives the full L log L multilinear maximal function.
    """
    if not fs:
        raise ValueError("need at least one function")
    if not 0 <= l <= len(fs):
        raise ValueError("l must lie in [0, %d], got %d" % (len(fs), l))
    if l == 0:
        return multilinear_maximal(fs, family)
    for f in fs[1:]:
        fs[0].check_same_grid(f)
    phi = young if young is not None else YoungFunction.l_log_l()
    magnitudes = [np.abs(f.values) for f in fs]
    dim = fs[0].dim

    def cube_value(cube: CubeIndex, window) -> float:
        count = cube.side ** dim
        value = 1.0
        for i, vals in enumerate(magnitudes):
            local = vals[window]
            if i < l:
                factor = orlicz_average_norm(local, count, phi)
            else:
                factor = math.fsum(local.ravel()) / count
            if factor == 0:
                return 0.0
            value *= factor
        return value

    return fs[0].with_values(family_sup_by_cube(fs[0], family, cube_value))


def _tripled(cube: CubeIndex) -> CubeIndex:
    return CubeIndex(tuple(a - cube.side for a in cube.start), 3 * cube.side)


def oscillation(values: np.ndarray, s: float) -> float:
    """osc_s on a cube: ((1/|Q|^2) sum over pairs |v' - v''|^s)^{1/s}; max - min for s = inf."""
    flat = np.asarray(values, dtype=float).ravel()
    if flat.size == 0:
        return 0.0
    if math.isinf(s):
        return float(flat.max() - flat.min())
    diffs = np.abs(flat[:, None] - flat[None, :]) ** s
    return (math.fsum(diffs.ravel()) / flat.size ** 2) ** (1.0 / s)


def grand_sharp_truncation(T, f: GridFunction, s: float, family: CubeFamilySpec = DEFAULT_FAMILY) -> GridFunction:
    """
    M^#_{T,s} f(x) = max over family cubes Q containing x of osc_s(T(f chi_{complement of 3Q}); Q).

    One application of T per cube whose cut-off argument is nonzero. 3Q and Q are
    truncated to the domain; T is only known on grid cells.
    """
    if s < 1:
        raise ValueError("oscillation exponent must be >= 1, got %r" % s)
    apply = getattr(T, "apply", T)
    values = f.values
    truncated = [0]
    applications = [0]

    def cube_value(cube: CubeIndex, window) -> float:
        tripled = _tripled(cube)
        if not tripled.inside(f.shape):
            truncated[0] += 1
        cut = np.array(values)
        cut[tripled.window(f.shape)] = 0.0
        if not np.any(cut):
            return 0.0
        applications[0] += 1
        image = apply(f.with_values(cut))
        return oscillation(image.values[window], s)

    out = family_sup_by_cube(f, family, cube_value)
    if truncated[0]:
        logger.info("grand sharp truncation: %d tripled cubes truncated to the domain", truncated[0])
    logger.debug("grand sharp truncation: %d operator applications", applications[0])
    return f.with_values(out)


def weak_type_ratio(
    f: GridFunction,
    family: CubeFamilySpec = DEFAULT_FAMILY,
    thresholds: Optional[Sequence[float]] = None,
) -> float:
    """
    max_t t |{Mf > t}| / ||f||_1. Without thresholds the sup over all t is taken,
    attained as t increases to each value v of Mf: v |{Mf >= v}|.
    """
    norm1 = math.fsum(np.abs(f.values).ravel()) * f.cell_volume
    if norm1 == 0:
        raise ValueError("weak-type ratio of the zero function")
    mf = hl_maximal(f, family).values.ravel()
    h = f.cell_volume
    if thresholds is not None:
        best = max(t * int(np.count_nonzero(mf > t)) * h for t in thresholds)
        return best / norm1
    levels = np.sort(mf)[::-1]
    # |{Mf >= levels[k]}| >= (k + 1) h, with equality at the last index of each tie group
    counts = np.arange(1, levels.size + 1)
    return float(np.max(levels * counts)) * h / norm1
