"""
Seeded test-function corpora on a grid.

Shapes are drawn in physical coordinates, so a corpus regenerated on a finer grid
samples the same functions. Functions are supported in the middle third of the
domain; weights are strictly positive everywhere.
"""
import logging
from typing import List, Sequence, Tuple

import numpy as np

from config.settings import WEIGHT_FLOOR
from grid.core import GridFunction

logger = logging.getLogger(__name__)

STEP = "step"
SMOOTH_BUMP = "smooth-bump"
RANDOM_SIGN = "random-sign"
POWER_WEIGHT = "power-weight"
BMO_LOG = "bmo-log"
KINDS = (STEP, SMOOTH_BUMP, RANDOM_SIGN, POWER_WEIGHT, BMO_LOG)

_PIECES = 8  # random-sign blocks per axis


def _middle_third(grid: GridFunction) -> List[Tuple[float, float]]:
    side = [n * grid.spacing for n in grid.shape]
    return [(o + s / 3.0, o + 2.0 * s / 3.0) for o, s in zip(grid.origin, side)]


def _amplitude(rng: np.random.Generator) -> float:
    return float(rng.choice([-1.0, 1.0]) * rng.uniform(0.5, 2.0))


def _distance(coords, center) -> np.ndarray:
    return np.sqrt(sum((x - c) ** 2 for x, c in zip(coords, center)))


def _step(grid: GridFunction, rng: np.random.Generator) -> GridFunction:
    middle = _middle_third(grid)
    boxes = []
    for _ in range(int(rng.integers(1, 4))):
        box = []
        for lo, hi in middle:
            width = rng.uniform((hi - lo) / 4.0, hi - lo)
            start = rng.uniform(lo, hi - width)
            box.append((start, start + width))
        boxes.append((box, _amplitude(rng)))

    def fn(*coords):
        out = np.zeros(coords[0].shape)
        for box, height in boxes:
            inside = np.ones(coords[0].shape, dtype=bool)
            for x, (a, b) in zip(coords, box):
                inside &= (x >= a) & (x < b)
            out += height * inside
        return out

    return grid.sample(fn)


def _smooth_bump(grid: GridFunction, rng: np.random.Generator) -> GridFunction:
    middle = _middle_third(grid)
    third = min(hi - lo for lo, hi in middle)
    radius = rng.uniform(third / 8.0, third / 4.0)
    center = [rng.uniform(lo + radius, hi - radius) for lo, hi in middle]
    height = _amplitude(rng)

    def fn(*coords):
        s = np.minimum(_distance(coords, center) ** 2 / radius ** 2, 1.0)
        with np.errstate(divide="ignore"):
            bump = np.where(s < 1.0, np.exp(1.0 - 1.0 / (1.0 - s)), 0.0)
        return height * bump

    return grid.sample(fn)


def _random_sign(grid: GridFunction, rng: np.random.Generator) -> GridFunction:
    middle = _middle_third(grid)
    heights = rng.choice([-1.0, 1.0], size=(_PIECES,) * grid.dim) * rng.uniform(0.5, 2.0, size=(_PIECES,) * grid.dim)

    def fn(*coords):
        inside = np.ones(coords[0].shape, dtype=bool)
        index = []
        for x, (lo, hi) in zip(coords, middle):
            inside &= (x >= lo) & (x < hi)
            index.append(np.clip(((x - lo) / (hi - lo) * _PIECES).astype(int), 0, _PIECES - 1))
        return np.where(inside, heights[tuple(index)], 0.0)

    return grid.sample(fn)


def _power_weight(grid: GridFunction, rng: np.random.Generator) -> GridFunction:
    middle = _middle_third(grid)
    center = [rng.uniform(lo, hi) for lo, hi in middle]
    exponent = rng.uniform(-0.8 * grid.dim, 0.8 * grid.dim)
    return grid.sample(lambda *coords: np.maximum(_distance(coords, center), WEIGHT_FLOOR) ** exponent)


def _bmo_log(grid: GridFunction, rng: np.random.Generator) -> GridFunction:
    middle = _middle_third(grid)
    center = [rng.uniform(lo, hi) for lo, hi in middle]
    scale = _amplitude(rng)
    offset = rng.uniform(-1.0, 1.0)
    return grid.sample(lambda *coords: scale * np.log(np.maximum(_distance(coords, center), WEIGHT_FLOOR)) + offset)


_GENERATORS = {
    STEP: _step,
    SMOOTH_BUMP: _smooth_bump,
    RANDOM_SIGN: _random_sign,
    POWER_WEIGHT: _power_weight,
    BMO_LOG: _bmo_log,
}


def _center_cell(grid: GridFunction) -> GridFunction:
    values = np.zeros(grid.shape)
    values[tuple(n // 2 for n in grid.shape)] = 1.0
    return grid.with_values(values)


def generate_corpus(kind: str, n: int, seed: int, grid: GridFunction) -> List[GridFunction]:
    """
    n functions of the given kind. Entry i is drawn from its own stream
    (seed, kind, i), so shorter corpora are prefixes of longer ones.
    """
    if kind not in _GENERATORS:
        raise ValueError("unknown corpus kind %r (expected one of %s)" % (kind, ", ".join(KINDS)))
    if n < 1:
        raise ValueError("corpus size must be >= 1, got %d" % n)
    make = _GENERATORS[kind]
    out = []
    for i in range(n):
        rng = np.random.default_rng([int(seed), KINDS.index(kind), i])
        f = make(grid.zeros(), rng)
        if f.is_zero():
            # Shape missed every cell center on a coarse grid
            logger.debug("corpus %s entry %d is empty on %s; using the center cell", kind, i, grid.shape)
            f = _center_cell(grid)
        out.append(f)
    logger.debug("generated %d %s functions (seed %d) on %s", n, kind, seed, grid.shape)
    return out


def mixed_corpus(kinds: Sequence[str], n: int, seed: int, grid: GridFunction) -> List[GridFunction]:
    """n functions of each kind, kinds in the given order."""
    out = []
    for kind in kinds:
        out.extend(generate_corpus(kind, n, seed, grid))
    return out
