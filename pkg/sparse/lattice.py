"""
Dyadic lattices on a 2^K-cell grid and the three lattice cover.

Cubes are keyed by (level, index): a base-lattice cube at level k covers cells
[i 2^k, (i+1) 2^k) per axis. A shifted lattice holds the tripled cubes
3Q = [(i-1) 2^k, (i+2) 2^k) whose per-axis label matches its own; the label of
3Q is i mod 3 after K - k applications of the swap 0 <-> 2, which keeps every
shifted lattice nested.
"""
import itertools
import logging
import math
from dataclasses import dataclass, replace
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple

from grid.core import Cube, GridFunction, GridMismatchError
from maximal.families import CubeIndex

logger = logging.getLogger(__name__)

CubeKey = Tuple[int, Tuple[int, ...]]

_SWAP = (2, 1, 0)


def _relabel(residue: int, steps: int) -> int:
    return _SWAP[residue] if steps % 2 else residue


def lattice_order(key: CubeKey):
    """Sort key: coarse levels first, then index."""
    level, index = key
    return (-level, index)


@dataclass(frozen=True)
class DyadicLattice:
    origin: Tuple[float, ...]
    spacing: float
    depth: int                                 # K; the grid has 2^K cells per axis
    labels: Optional[Tuple[int, ...]] = None   # None for the base lattice

    def __post_init__(self):
        object.__setattr__(self, "origin", tuple(float(c) for c in self.origin))
        if len(self.origin) not in (1, 2):
            raise ValueError("lattice dimension must be 1 or 2")
        if self.depth < 0:
            raise ValueError("lattice depth must be >= 0")
        if self.labels is not None:
            labels = tuple(int(j) for j in self.labels)
            if len(labels) != len(self.origin) or any(j not in (0, 1, 2) for j in labels):
                raise ValueError("shifted lattice needs one label in {0, 1, 2} per axis, got %s" % (labels,))
            object.__setattr__(self, "labels", labels)

    @classmethod
    def standard(cls, grid: GridFunction) -> "DyadicLattice":
        """Base lattice anchored at the grid origin; the top cube is the whole domain."""
        n = grid.shape[0]
        if any(m != n for m in grid.shape):
            raise ValueError("dyadic lattices need a square grid, got %s" % (grid.shape,))
        depth = int(round(math.log2(n)))
        if 2 ** depth != n:
            raise ValueError("cells per axis must be a power of two, got %d" % n)
        return cls(grid.origin, grid.spacing, depth)

    # ----- geometry -----

    @property
    def dim(self) -> int:
        return len(self.origin)

    @property
    def cells(self) -> int:
        return 2 ** self.depth

    @property
    def shape(self) -> Tuple[int, ...]:
        return (self.cells,) * self.dim

    @property
    def shifted(self) -> bool:
        return self.labels is not None

    @property
    def shift_index(self) -> int:
        """0 for the base lattice, 1..3^n for the shifted ones."""
        if self.labels is None:
            return 0
        return 1 + sum(j * 3 ** a for a, j in enumerate(self.labels))

    def with_labels(self, labels: Sequence[int]) -> "DyadicLattice":
        return replace(self, labels=tuple(labels))

    def side_cells(self, level: int) -> int:
        return (3 if self.shifted else 1) * 2 ** level

    def cube_index(self, key: CubeKey) -> CubeIndex:
        level, index = key
        offset = 1 if self.shifted else 0
        return CubeIndex(tuple((i - offset) * 2 ** level for i in index), self.side_cells(level))

    def cube(self, key: CubeKey) -> Cube:
        c = self.cube_index(key)
        return Cube(tuple(o + a * self.spacing for o, a in zip(self.origin, c.start)), c.side * self.spacing)

    def window(self, key: CubeKey) -> Tuple[slice, ...]:
        return self.cube_index(key).window(self.shape)

    def measure_cells(self, key: CubeKey) -> int:
        return self.side_cells(key[0]) ** self.dim

    def check_grid(self, f: GridFunction) -> None:
        if f.shape != self.shape or f.origin != self.origin or f.spacing != self.spacing:
            raise GridMismatchError(
                "grid %s/%s/%s does not carry lattice %s/%s/%s"
                % (f.origin, f.spacing, f.shape, self.origin, self.spacing, self.shape)
            )

    # ----- tree structure -----

    def top(self) -> List[CubeKey]:
        if not self.shifted:
            return [(self.depth, (0,) * self.dim)]
        # The level-K cube with index in {-1, 0, 1} matching the label contains the domain
        return [(self.depth, tuple(j if j < 2 else -1 for j in self.labels))]

    def children(self, key: CubeKey) -> List[CubeKey]:
        level, index = key
        if level == 0:
            return []
        if self.shifted:
            per_axis = [(2 * i - 1, 2 * i + 2) for i in index]
        else:
            per_axis = [(2 * i, 2 * i + 1) for i in index]
        return [(level - 1, tuple(c)) for c in itertools.product(*per_axis)]

    def parent(self, key: CubeKey) -> Optional[CubeKey]:
        level, index = key
        if level >= self.depth:
            return None
        if self.shifted:
            up = tuple((c + 1) // 2 if (c + 1) % 2 == 0 else (c - 2) // 2 for c in index)
        else:
            up = tuple(c // 2 for c in index)
        return (level + 1, up)

    def contains_key(self, key: CubeKey) -> bool:
        level, index = key
        if not 0 <= level <= self.depth or len(index) != self.dim:
            return False
        node: Optional[CubeKey] = key
        while node is not None and node[0] < self.depth:
            node = self.parent(node)
        if node not in self.top():
            return False
        if self.shifted:
            return all(_relabel(i % 3, self.depth - level) == j for i, j in zip(index, self.labels))
        return True

    def keys(self) -> Iterator[CubeKey]:
        """Every cube below the top, in lattice order."""
        frontier = sorted(self.top(), key=lattice_order)
        while frontier:
            yield from frontier
            frontier = sorted((c for key in frontier for c in self.children(key)), key=lattice_order)

    # ----- serialization -----

    def to_dict(self) -> Dict[str, Any]:
        return {
            "origin": list(self.origin),
            "spacing": self.spacing,
            "depth": self.depth,
            "labels": list(self.labels) if self.labels is not None else None,
        }

    @classmethod
    def from_dict(cls, raw: Dict[str, Any]) -> "DyadicLattice":
        labels = raw.get("labels")
        return cls(tuple(raw["origin"]), float(raw["spacing"]), int(raw["depth"]), tuple(labels) if labels is not None else None)


def shifted_lattices(base: DyadicLattice) -> List[DyadicLattice]:
    """The 3^n shifted lattices, ordered by shift index."""
    if base.shifted:
        raise ValueError("shifted lattices are built from the base lattice")
    lattices = [base.with_labels(labels[::-1]) for labels in itertools.product((0, 1, 2), repeat=base.dim)]
    return sorted(lattices, key=lambda d: d.shift_index)


@dataclass(frozen=True)
class CoverEntry:
    lattice: int          # shift index of the lattice holding R_Q
    key: CubeKey          # R_Q in that lattice
    cube: Cube            # R_Q, side 3 l(Q)
    clipped: bool         # R_Q leaves the domain

    def region(self, base: DyadicLattice) -> Cube:
        """R_Q truncated to the domain (side kept when not clipped)."""
        if not self.clipped:
            return self.cube
        lo = tuple(max(a, o) for a, o in zip(self.cube.lower, base.origin))
        hi = tuple(min(b, o + base.cells * base.spacing) for b, o in zip(self.cube.upper, base.origin))
        return Cube(lo, min(b - a for a, b in zip(lo, hi)))


@dataclass(frozen=True)
class ThreeLatticeCover:
    lattices: Tuple[DyadicLattice, ...]
    entries: Dict[CubeKey, CoverEntry]

    def lattice_for(self, key: CubeKey) -> DyadicLattice:
        shift = self.entries[key].lattice
        return next(d for d in self.lattices if d.shift_index == shift)

    def used(self) -> List[int]:
        return sorted({e.lattice for e in self.entries.values()})


def three_lattice_cover(base: DyadicLattice) -> ThreeLatticeCover:
    """For every Q of the base lattice, the unique R_Q = 3Q in one of the 3^n shifted lattices."""
    lattices = shifted_lattices(base)
    entries: Dict[CubeKey, CoverEntry] = {}
    clipped = 0
    for key in base.keys():
        level, index = key
        labels = tuple(_relabel(i % 3, base.depth - level) for i in index)
        target = base.with_labels(labels)
        c = target.cube_index(key)
        outside = not c.inside(base.shape)
        clipped += outside
        entries[key] = CoverEntry(target.shift_index, key, target.cube(key), outside)
    if clipped:
        logger.warning("three lattice cover: %d of %d tripled cubes clipped at the domain boundary", clipped, len(entries))
    return ThreeLatticeCover(tuple(lattices), entries)
