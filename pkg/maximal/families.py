"""
Cube families realizing sup over cubes containing x.

Dense: every grid-aligned cube of side 1..S cells meeting the domain.
DyadicShifted: the tripled cubes 3Q of the dyadic lattice anchored at the grid
origin, side(Q) <= S; they are the cubes of the 3^n shifted lattices.

Functions are zero outside the domain and a cube keeps its full measure even
where it leaves the grid.
"""
import itertools
import logging
import math
from dataclasses import dataclass
from typing import Callable, Iterator, List, Optional, Sequence, Tuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy import signal

from grid.core import Cube, GridFunction

logger = logging.getLogger(__name__)

DYADIC_SHIFTED = "dyadic_shifted"
DENSE = "dense"
MODES = (DYADIC_SHIFTED, DENSE)


@dataclass(frozen=True)
class CubeFamilySpec:
    mode: str = DYADIC_SHIFTED
    max_side: Optional[float] = None  # physical side cap; None means the domain side

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError("unknown cube family mode %r (expected one of %s)" % (self.mode, ", ".join(MODES)))
        if self.max_side is not None and not self.max_side > 0:
            raise ValueError("max side must be positive, got %r" % self.max_side)

    @classmethod
    def dense(cls, max_side: Optional[float] = None) -> "CubeFamilySpec":
        return cls(DENSE, max_side)

    @classmethod
    def dyadic_shifted(cls, max_side: Optional[float] = None) -> "CubeFamilySpec":
        return cls(DYADIC_SHIFTED, max_side)

    def side_cells(self, grid: GridFunction) -> int:
        """Side cap in cells."""
        domain = min(grid.shape)
        if self.max_side is None:
            return domain
        cap = int(math.floor(self.max_side / grid.spacing + 1e-9))
        if cap < 1:
            raise ValueError("max side %g is below one cell (h=%g)" % (self.max_side, grid.spacing))
        if cap > domain:
            raise ValueError("max side %g exceeds the domain side %g" % (self.max_side, domain * grid.spacing))
        return cap

    def levels(self, grid: GridFunction) -> List[int]:
        """Dyadic generating sides 2^k (cells) of a DyadicShifted family."""
        cap = self.side_cells(grid)
        out = []
        s = 1
        while s <= cap:
            out.append(s)
            s *= 2
        return out

    def label(self) -> str:
        cap = "domain" if self.max_side is None else "%g" % self.max_side
        return "%s(S=%s)" % (self.mode, cap)


# ----- vectorized sweeps -----

def box_sums(values: np.ndarray, side: int) -> np.ndarray:
    """
    Sums over every side^dim box meeting the grid (zero outside).
    Along each axis, entry j is the box ending at cell j, so the output has N + side - 1 entries.
    """
    out = np.asarray(values, dtype=float)
    for axis in range(out.ndim):
        shape = [1] * out.ndim
        shape[axis] = side
        out = signal.convolve(out, np.ones(shape), mode="full", method="direct")
    return out


def _window_max(arr: np.ndarray, side: int) -> np.ndarray:
    # Cell i lies in the boxes ending at i..i+side-1
    out = arr
    for axis in range(arr.ndim):
        out = sliding_window_view(out, side, axis=axis).max(axis=-1)
    return out


def _shifted_pullback(arr: np.ndarray, s: int, shape: Tuple[int, ...]) -> np.ndarray:
    # The three tripled cubes of level s containing cell x end at cells (x//s + 1 + t) s - 1
    out = arr
    for axis, n in enumerate(shape):
        q = np.arange(n) // s
        candidates = [np.take(out, (q + 1 + t) * s - 1, axis=axis) for t in range(3)]
        out = np.maximum.reduce(candidates)
    return out


def _product(averages: Sequence[np.ndarray]) -> np.ndarray:
    out = averages[0]
    for a in averages[1:]:
        out = out * a
    return out


def family_sup(
    template: GridFunction,
    spec: CubeFamilySpec,
    fields: Sequence[np.ndarray],
    combine: Callable[[Sequence[np.ndarray]], np.ndarray] = _product,
) -> np.ndarray:
    """
    Pointwise max over family cubes Q containing x of combine(<field_1>_Q, ..., <field_m>_Q).
    combine must act entrywise, one entry per cube.
    """
    dim = template.dim
    best = np.zeros(template.shape)
    if spec.mode == DENSE:
        for side in range(1, spec.side_cells(template) + 1):
            averages = [box_sums(v, side) / side ** dim for v in fields]
            best = np.maximum(best, _window_max(combine(averages), side))
    else:
        for s in spec.levels(template):
            side = 3 * s
            averages = [box_sums(v, side) / side ** dim for v in fields]
            best = np.maximum(best, _shifted_pullback(combine(averages), s, template.shape))
    return best


# ----- explicit enumeration -----

@dataclass(frozen=True)
class CubeIndex:
    """Grid-aligned cube: first cell per axis (may be negative) and side in cells."""

    start: Tuple[int, ...]
    side: int

    def window(self, shape: Tuple[int, ...]) -> Tuple[slice, ...]:
        """Slices of the cells inside the domain."""
        return tuple(slice(max(a, 0), min(a + self.side, n)) for a, n in zip(self.start, shape))

    def inside(self, shape: Tuple[int, ...]) -> bool:
        return all(a >= 0 and a + self.side <= n for a, n in zip(self.start, shape))

    def to_cube(self, grid: GridFunction) -> Cube:
        h = grid.spacing
        return Cube(tuple(o + a * h for o, a in zip(grid.origin, self.start)), self.side * h)


def iter_family_cubes(template: GridFunction, spec: CubeFamilySpec) -> Iterator[CubeIndex]:
    """Cubes of the family meeting the domain, by side then row-major position."""
    shape = template.shape
    if spec.mode == DENSE:
        for side in range(1, spec.side_cells(template) + 1):
            ranges = [range(-side + 1, n) for n in shape]
            for start in itertools.product(*ranges):
                yield CubeIndex(start, side)
        return
    for s in spec.levels(template):
        # 3Q = [(q-1)s, (q+2)s) meets [0, n) for q in [-1, ceil(n/s)]
        ranges = [range(-1, -(-n // s) + 1) for n in shape]
        for qs in itertools.product(*ranges):
            yield CubeIndex(tuple((q - 1) * s for q in qs), 3 * s)


def family_cubes(template: GridFunction, spec: CubeFamilySpec) -> List[Cube]:
    """Family cubes lying inside the domain, as Cubes."""
    cubes = [c.to_cube(template) for c in iter_family_cubes(template, spec) if c.inside(template.shape)]
    logger.debug("%s: %d cubes inside the domain", spec.label(), len(cubes))
    return cubes


def family_sup_by_cube(
    template: GridFunction,
    spec: CubeFamilySpec,
    cube_value: Callable[[CubeIndex, Tuple[slice, ...]], float],
) -> np.ndarray:
    """Pointwise max of cube_value(cube, window) over the family, one call per cube."""
    best = np.zeros(template.shape)
    count = 0
    for cube in iter_family_cubes(template, spec):
        window = cube.window(template.shape)
        value = cube_value(cube, window)
        best[window] = np.maximum(best[window], value)
        count += 1
    logger.debug("%s: evaluated %d cubes one at a time", spec.label(), count)
    return best
