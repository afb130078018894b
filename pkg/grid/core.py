"""
Grid functions, cubes, balls and cell sets on uniform grids over R^1 and R^2.

Quadrature is midpoint: a cell contributes value * h^dim and belongs to a cube
or ball iff its center does. Functions are zero outside the grid domain.
"""
import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple, Union

import numpy as np

logger = logging.getLogger(__name__)


class GridMismatchError(ValueError):
    """Raised when two grid functions do not share (dim, origin, spacing, shape)."""


class DegenerateCubeError(ValueError):
    """Raised when a cube covers no cell of the grid."""


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Sampled function; values[i] is the sample at the center of cell i (row-major)."""

    origin: Tuple[float, ...]
    spacing: float
    shape: Tuple[int, ...]
    values: np.ndarray

    def __post_init__(self):
        shape = tuple(int(n) for n in self.shape)
        origin = tuple(float(c) for c in self.origin)
        if len(shape) not in (1, 2):
            raise ValueError("grid dimension must be 1 or 2, got %d" % len(shape))
        if len(origin) != len(shape):
            raise ValueError("origin has %d coordinates for a %d-d grid" % (len(origin), len(shape)))
        if not float(self.spacing) > 0:
            raise ValueError("spacing must be positive, got %r" % (self.spacing,))
        if any(n < 1 for n in shape):
            raise ValueError("shape extents must be >= 1, got %s" % (shape,))
        values = np.array(self.values, dtype=float)
        if values.size != int(np.prod(shape)):
            raise ValueError("values length %d does not match shape %s" % (values.size, shape))
        values = values.reshape(shape)
        values.setflags(write=False)
        object.__setattr__(self, "origin", origin)
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "spacing", float(self.spacing))
        object.__setattr__(self, "values", values)

    # ----- construction -----

    @classmethod
    def from_callable(
        cls,
        fn: Callable[..., np.ndarray],
        origin: Sequence[float],
        spacing: float,
        shape: Sequence[int],
    ) -> "GridFunction":
        """Sample fn at cell centers. fn receives one coordinate array per axis."""
        template = cls(tuple(origin), spacing, tuple(shape), np.zeros(int(np.prod(shape))))
        return template.sample(fn)

    def sample(self, fn: Callable[..., np.ndarray]) -> "GridFunction":
        """Sample fn on this grid."""
        coords = np.meshgrid(*self.axes(), indexing="ij")
        values = np.broadcast_to(np.asarray(fn(*coords), dtype=float), self.shape)
        return self.with_values(values)

    def with_values(self, values) -> "GridFunction":
        return GridFunction(self.origin, self.spacing, self.shape, values)

    def zeros(self) -> "GridFunction":
        return self.with_values(np.zeros(self.shape))

    # ----- geometry -----

    @property
    def dim(self) -> int:
        return len(self.shape)

    @property
    def size(self) -> int:
        return int(self.values.size)

    @property
    def cell_volume(self) -> float:
        return self.spacing ** self.dim

    @property
    def upper(self) -> Tuple[float, ...]:
        return tuple(o + n * self.spacing for o, n in zip(self.origin, self.shape))

    def axes(self) -> Tuple[np.ndarray, ...]:
        """Cell-center coordinates along each axis."""
        return tuple(o + (np.arange(n) + 0.5) * self.spacing for o, n in zip(self.origin, self.shape))

    def centers(self) -> np.ndarray:
        """Array of shape (*shape, dim) holding every cell center."""
        return np.stack(np.meshgrid(*self.axes(), indexing="ij"), axis=-1)

    def cell_of(self, point: Sequence[float]) -> Optional[Tuple[int, ...]]:
        """Index of the cell containing point, or None outside the domain."""
        idx = tuple(int(math.floor((x - o) / self.spacing)) for x, o in zip(point, self.origin))
        if all(0 <= i < n for i, n in zip(idx, self.shape)):
            return idx
        return None

    # ----- arithmetic -----

    def same_grid(self, other: "GridFunction") -> bool:
        return (
            self.shape == other.shape
            and self.origin == other.origin
            and self.spacing == other.spacing
        )

    def check_same_grid(self, other: "GridFunction") -> None:
        if not self.same_grid(other):
            raise GridMismatchError(
                "grid mismatch: %s/%s/%s vs %s/%s/%s"
                % (self.origin, self.spacing, self.shape, other.origin, other.spacing, other.shape)
            )

    def _operand(self, other):
        if isinstance(other, GridFunction):
            self.check_same_grid(other)
            return other.values
        return other

    def __add__(self, other):
        return self.with_values(self.values + self._operand(other))

    __radd__ = __add__

    def __sub__(self, other):
        return self.with_values(self.values - self._operand(other))

    def __rsub__(self, other):
        return self.with_values(self._operand(other) - self.values)

    def __mul__(self, other):
        return self.with_values(self.values * self._operand(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self.with_values(self.values / self._operand(other))

    def __pow__(self, exponent):
        return self.with_values(self.values ** self._operand(exponent))

    def __neg__(self):
        return self.with_values(-self.values)

    def __abs__(self):
        return self.with_values(np.abs(self.values))

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))

    def is_zero(self) -> bool:
        return not np.any(self.values)

    def __repr__(self) -> str:
        return "GridFunction(origin=%s, spacing=%g, shape=%s)" % (self.origin, self.spacing, self.shape)


@dataclass(frozen=True)
class Cube:
    """Axis-aligned half-open cube [lower, lower + side)^dim."""

    lower: Tuple[float, ...]
    side: float

    def __post_init__(self):
        object.__setattr__(self, "lower", tuple(float(c) for c in self.lower))
        if not self.side > 0:
            raise ValueError("cube side must be positive, got %r" % (self.side,))

    @property
    def dim(self) -> int:
        return len(self.lower)

    @property
    def upper(self) -> Tuple[float, ...]:
        return tuple(c + self.side for c in self.lower)

    @property
    def center(self) -> Tuple[float, ...]:
        return tuple(c + self.side / 2 for c in self.lower)

    @property
    def measure(self) -> float:
        return self.side ** self.dim

    def dilate(self, factor: float) -> "Cube":
        """Concentric cube with side multiplied by factor (3Q for factor 3)."""
        side = self.side * factor
        return Cube(tuple(c - side / 2 for c in self.center), side)


@dataclass(frozen=True)
class Ball:
    """Cells whose centers lie at Euclidean distance < radius from center."""

    center: Tuple[float, ...]
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        if not self.radius > 0:
            raise ValueError("ball radius must be positive, got %r" % (self.radius,))

    @property
    def dim(self) -> int:
        return len(self.center)


@dataclass(frozen=True)
class CellSet:
    """Explicit set of flat (row-major) cell indices, sorted and duplicate-free."""

    indices: Tuple[int, ...]

    def __post_init__(self):
        indices = tuple(int(i) for i in self.indices)
        if any(b <= a for a, b in zip(indices, indices[1:])):
            raise ValueError("cell indices must be sorted and duplicate-free")
        object.__setattr__(self, "indices", indices)

    @classmethod
    def of(cls, indices) -> "CellSet":
        return cls(tuple(int(i) for i in np.unique(np.asarray(indices, dtype=int))))

    @classmethod
    def from_mask(cls, mask: np.ndarray) -> "CellSet":
        return cls(tuple(int(i) for i in np.flatnonzero(mask)))

    def __len__(self) -> int:
        return len(self.indices)


Region = Union[Cube, Ball, CellSet]


def cube_slices(f: GridFunction, cube: Cube) -> Optional[Tuple[slice, ...]]:
    """Index slices of the cells whose centers lie in cube, or None if there are none."""
    if cube.dim != f.dim:
        raise GridMismatchError("cube of dimension %d on a %d-d grid" % (cube.dim, f.dim))
    slices = []
    for axis, lo, hi in zip(f.axes(), cube.lower, cube.upper):
        start = int(np.searchsorted(axis, lo, side="left"))
        stop = int(np.searchsorted(axis, hi, side="left"))
        if start >= stop:
            return _snap_small_cube(f, cube)
        slices.append(slice(start, stop))
    return tuple(slices)


def _snap_small_cube(f: GridFunction, cube: Cube) -> Optional[Tuple[slice, ...]]:
    if cube.side >= f.spacing:
        return None
    cell = f.cell_of(cube.center)
    if cell is None:
        return None
    return tuple(slice(i, i + 1) for i in cell)


def region_mask(f: GridFunction, region: Region) -> np.ndarray:
    """Boolean array over f's cells selecting the region."""
    mask = np.zeros(f.shape, dtype=bool)
    if isinstance(region, Cube):
        slices = cube_slices(f, region)
        if slices is not None:
            mask[slices] = True
    elif isinstance(region, Ball):
        if region.dim != f.dim:
            raise GridMismatchError("ball of dimension %d on a %d-d grid" % (region.dim, f.dim))
        dist2 = np.zeros(f.shape)
        for axis_index, (axis, c) in enumerate(zip(f.axes(), region.center)):
            shape = [1] * f.dim
            shape[axis_index] = -1
            dist2 = dist2 + ((axis - c) ** 2).reshape(shape)
        mask = dist2 < region.radius ** 2
    elif isinstance(region, CellSet):
        if region.indices and (region.indices[0] < 0 or region.indices[-1] >= f.size):
            raise ValueError("cell index out of range for grid of %d cells" % f.size)
        mask.flat[list(region.indices)] = True
    else:
        raise TypeError("unsupported region %r" % (region,))
    return mask


def region_measure(f: GridFunction, region: Region) -> float:
    """Rasterized measure: cell count times h^dim."""
    return int(np.count_nonzero(region_mask(f, region))) * f.cell_volume


def _checked_weight(f: GridFunction, w: Optional[GridFunction]) -> Optional[np.ndarray]:
    if w is None:
        return None
    f.check_same_grid(w)
    if np.any(w.values < 0):
        raise ValueError("weight has negative values")
    return w.values


def integrate(f: GridFunction, region: Region, w: Optional[GridFunction] = None) -> float:
    """Midpoint integral of f (times w) over the region."""
    weights = _checked_weight(f, w)
    mask = region_mask(f, region)
    values = f.values[mask]
    if weights is not None:
        values = values * weights[mask]
    return math.fsum(values) * f.cell_volume


def local_average(f: GridFunction, cube: Cube) -> float:
    """<f>_Q over the rasterized cube Q ∩ grid."""
    mask = region_mask(f, cube)
    values = f.values[mask]
    if values.size == 0:
        raise DegenerateCubeError("degenerate cube: %s covers no cell" % (cube,))
    return stable_mean(values)


def stable_mean(values: np.ndarray) -> float:
    """Average of a nonempty array, exact on constants and clamped to [min, max]."""
    lo = float(values.min())
    hi = float(values.max())
    if lo == hi:
        return lo
    return min(max(math.fsum(values.ravel()) / values.size, lo), hi)


def level_measure(f: GridFunction, s: float, w: Optional[GridFunction] = None) -> float:
    """(Weighted) measure of {|f| > s}."""
    if s < 0:
        raise ValueError("level must be >= 0, got %r" % (s,))
    weights = _checked_weight(f, w)
    above = np.abs(f.values) > s
    if weights is None:
        return int(np.count_nonzero(above)) * f.cell_volume
    return math.fsum(weights[above]) * f.cell_volume


def make_grid(dim: int, cells: int, extent: float) -> GridFunction:
    """Zero function on the square domain [-extent/2, extent/2)^dim split into cells^dim cells."""
    origin = tuple([-extent / 2.0] * dim)
    return GridFunction(origin, extent / cells, tuple([cells] * dim), np.zeros((cells,) * dim))


def indicator(template: GridFunction, region: Region) -> GridFunction:
    """chi_R on the template's grid."""
    return template.with_values(region_mask(template, region).astype(float))
