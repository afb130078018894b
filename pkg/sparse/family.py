"""
Sparse families: stopping-time construction, exact certification at cell
resolution and the Carleson-type sum used by the sparse bounds.

Averages of f use the full cube measure, f being zero outside the domain.
Measures of unions and of the sets E_Q are integer cell counts of the lattice.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from grid.core import CellSet, GridFunction
from maximal.families import CubeFamilySpec
from maximal.operators import hl_maximal
from sparse.lattice import CubeKey, DyadicLattice, lattice_order, shifted_lattices

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SparseFamily:
    lattice: DyadicLattice
    cubes: Tuple[CubeKey, ...]
    eta: float

    def __post_init__(self):
        if not 0 < self.eta < 1:
            raise ValueError("eta must lie in (0, 1), got %r" % self.eta)
        keys = sorted({(int(level), tuple(int(i) for i in index)) for level, index in self.cubes}, key=lattice_order)
        for key in keys:
            if not self.lattice.contains_key(key):
                raise ValueError("cube %s is not in the lattice" % (key,))
        object.__setattr__(self, "cubes", tuple(keys))

    def __len__(self) -> int:
        return len(self.cubes)

    def __iter__(self):
        return iter(self.cubes)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "lattice": self.lattice.to_dict(),
            "eta": self.eta,
            "cubes": [[level, list(index)] for level, index in self.cubes],
        }

    @classmethod
    def from_dict(cls, raw: Dict[str, Any]) -> "SparseFamily":
        return cls(
            DyadicLattice.from_dict(raw["lattice"]),
            tuple((int(level), tuple(index)) for level, index in raw["cubes"]),
            float(raw["eta"]),
        )


def cube_average(values: np.ndarray, lattice: DyadicLattice, key: CubeKey) -> float:
    """<values>_Q over the full cube measure."""
    window = lattice.window(key)
    return math.fsum(values[window].ravel()) / lattice.measure_cells(key)


def build_sparse_from_stopping(f: GridFunction, lattice: DyadicLattice, eta: float) -> SparseFamily:
    """
    Stopping cubes of |f|: below each selected Q, the maximal descendants Q' with
    <|f|>_{Q'} > (2/eta) <|f|>_Q are selected, down to cell level. The result is
    certified with verify_sparseness.
    """
    if not 0 < eta < 1:
        raise ValueError("eta must lie in (0, 1), got %r" % eta)
    lattice.check_grid(f)
    magnitudes = np.abs(f.values)
    if not np.any(magnitudes):
        logger.warning("stopping construction on the zero function keeps only the top cube")
    selected: List[CubeKey] = list(lattice.top())
    queue = list(selected)
    while queue:
        parent = queue.pop(0)
        threshold = (2.0 / eta) * cube_average(magnitudes, lattice, parent)
        if threshold == 0:
            continue
        frontier = lattice.children(parent)
        while frontier:
            key = frontier.pop(0)
            if cube_average(magnitudes, lattice, key) > threshold:
                selected.append(key)
                queue.append(key)
            else:
                frontier.extend(lattice.children(key))
    family = SparseFamily(lattice, tuple(selected), eta)
    result = verify_sparseness(family)
    if not result.ok:
        raise ValueError("stopping family is not %g-sparse at cube %s" % (eta, result.violation))
    logger.debug("stopping family on lattice %d: %d cubes", lattice.shift_index, len(family))
    return family


def build_lattice_families(f: GridFunction, base: DyadicLattice, eta: float) -> List[SparseFamily]:
    """One stopping family per shifted lattice, ordered by shift index."""
    return [build_sparse_from_stopping(f, d, eta) for d in shifted_lattices(base)]


@dataclass(frozen=True)
class SparsenessReport:
    ok: bool
    violation: Optional[CubeKey]
    E: Dict[CubeKey, CellSet] = field(default_factory=dict)   # in-domain cells of E_Q
    free_cells: Dict[CubeKey, int] = field(default_factory=dict)  # |E_Q| in lattice cells


def _nearest_ancestor(lattice: DyadicLattice, key: CubeKey, members) -> Optional[CubeKey]:
    node = lattice.parent(key)
    while node is not None:
        if node in members:
            return node
        node = lattice.parent(node)
    return None


def verify_sparseness(family: SparseFamily, eta: Optional[float] = None) -> SparsenessReport:
    """
    E_Q = Q minus its strict descendants in the family. Checks |E_Q| >= eta |Q|
    (equivalently the descendants cover at most (1 - eta)|Q|) and pairwise
    disjointness, and returns the first violating cube in lattice order.
    """
    eta = family.eta if eta is None else eta
    lattice = family.lattice
    members = set(family.cubes)
    covered: Dict[CubeKey, int] = {key: 0 for key in family.cubes}
    nearest: Dict[CubeKey, Optional[CubeKey]] = {}
    for key in family.cubes:
        up = _nearest_ancestor(lattice, key, members)
        nearest[key] = up
        if up is not None:
            # Maximal strict descendants are disjoint, so their measures add up
            covered[up] += lattice.measure_cells(key)

    E: Dict[CubeKey, CellSet] = {}
    free: Dict[CubeKey, int] = {}
    owner = np.zeros(lattice.shape, dtype=int)
    for key in family.cubes:
        total = lattice.measure_cells(key)
        free[key] = total - covered[key]
        if covered[key] > (1.0 - eta) * total or free[key] < eta * total:
            logger.info("sparseness violated at %s: %d of %d cells covered", key, covered[key], total)
            return SparsenessReport(False, key, E, free)
        mask = np.zeros(lattice.shape, dtype=bool)
        mask[lattice.window(key)] = True
        for child in (k for k, up in nearest.items() if up == key):
            mask[lattice.window(child)] = False
        owner += mask
        E[key] = CellSet.from_mask(mask)
    if np.any(owner > 1):
        raise RuntimeError("E_Q sets overlap; the family is not nested")
    return SparsenessReport(True, None, E, free)


def carleson_sum(f: GridFunction, h: GridFunction, family: SparseFamily) -> float:
    """sum over Q of <|f|>_Q <|h|>_Q |Q|."""
    lattice = family.lattice
    lattice.check_grid(f)
    f.check_same_grid(h)
    fa, ha = np.abs(f.values), np.abs(h.values)
    terms = [
        cube_average(fa, lattice, key) * cube_average(ha, lattice, key) * lattice.measure_cells(key) * f.cell_volume
        for key in family.cubes
    ]
    return math.fsum(terms)


def carleson_bound(
    f: GridFunction,
    h: GridFunction,
    family: SparseFamily,
    maximal_family: Optional[CubeFamilySpec] = None,
) -> float:
    """(1/eta) int Mf Mh; dominates carleson_sum when M's family contains the sparse cubes."""
    spec = maximal_family if maximal_family is not None else CubeFamilySpec.dense()
    mf = hl_maximal(f, spec).values
    mh = hl_maximal(h, spec).values
    return math.fsum((mf * mh).ravel()) * f.cell_volume / family.eta
