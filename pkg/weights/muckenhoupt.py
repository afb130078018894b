"""
Muckenhoupt characteristics over finite cube families.

Every characteristic is a max over the given cubes, hence a lower bound of the
sup over all cubes. Cubes on which the weights are constant contribute exactly 1.
"""
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from config.settings import WEIGHT_FLOOR
from grid.core import Cube, GridFunction, cube_slices, stable_mean
from grid.io import load_grid
from maximal.families import CubeFamilySpec
from maximal.operators import hl_maximal

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Weight:
    """Strictly positive grid weight, clipped below at WEIGHT_FLOOR."""

    w: GridFunction

    def __post_init__(self):
        values = self.w.values
        if not np.all(np.isfinite(values)):
            raise ValueError("weight values must be finite")
        if np.any(values <= 0):
            raise ValueError("weight must be strictly positive; min value %g" % float(values.min()))
        if np.any(values < WEIGHT_FLOOR):
            object.__setattr__(self, "w", self.w.with_values(np.maximum(values, WEIGHT_FLOOR)))

    @property
    def values(self) -> np.ndarray:
        return self.w.values

    @classmethod
    def load(cls, path: Union[str, Path]) -> "Weight":
        return cls(load_grid(path))


WeightLike = Union[Weight, GridFunction]


def _grid(w: WeightLike) -> GridFunction:
    return w.w if isinstance(w, Weight) else Weight(w).w


@dataclass(frozen=True, eq=False)
class WeightVector:
    weights: Tuple[Weight, ...]
    exponents: Tuple[float, ...]

    def __post_init__(self):
        weights = tuple(w if isinstance(w, Weight) else Weight(w) for w in self.weights)
        exponents = tuple(float(p) for p in self.exponents)
        if not weights or len(weights) != len(exponents):
            raise ValueError("need one exponent per weight, got %d weights and %d exponents" % (len(weights), len(exponents)))
        for p in exponents:
            if not 1 <= p < math.inf:
                raise ValueError("weight exponents must lie in [1, inf), got %r" % p)
        for w in weights[1:]:
            weights[0].w.check_same_grid(w.w)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "exponents", exponents)

    @property
    def p(self) -> float:
        """1/p = sum 1/p_i."""
        return 1.0 / math.fsum(1.0 / p for p in self.exponents)

    def __len__(self) -> int:
        return len(self.weights)


def _windows(f: GridFunction, cubes: Sequence[Cube]) -> Iterable[Tuple[slice, ...]]:
    if not cubes:
        raise ValueError("cube family must be nonempty")
    skipped = 0
    for cube in cubes:
        window = cube_slices(f, cube)
        if window is None:
            skipped += 1
            continue
        yield window
    if skipped:
        logger.warning("%d cubes cover no cell and were skipped", skipped)


def _constant(values: np.ndarray) -> bool:
    return bool(values.min() == values.max())


def _dual_exponent(p: float) -> float:
    """1 - p' = -1/(p - 1)."""
    return -1.0 / (p - 1.0)


def dual_weight(w: WeightLike, p: float) -> Weight:
    """sigma = w^{1-p'}."""
    if not p > 1:
        raise ValueError("dual weight needs p > 1, got %r" % p)
    g = _grid(w)
    return Weight(g.with_values(g.values ** _dual_exponent(p)))


def nu_weight(ws: WeightVector) -> Weight:
    """nu = prod w_i^{p/p_i}."""
    p = ws.p
    values = np.ones(ws.weights[0].w.shape)
    for w, p_i in zip(ws.weights, ws.exponents):
        values = values * w.values ** (p / p_i)
    return Weight(ws.weights[0].w.with_values(values))


def ap_constant(w: WeightLike, p: float, cubes: Sequence[Cube]) -> float:
    """max over cubes of <w>_Q <w^{1-p'}>_Q^{p-1}."""
    if not p > 1:
        raise ValueError("A_p needs p > 1, got %r" % p)
    g = _grid(w)
    dual = g.values ** _dual_exponent(p)
    best = 0.0
    for window in _windows(g, cubes):
        local = g.values[window]
        if _constant(local):
            value = 1.0
        else:
            value = stable_mean(local) * stable_mean(dual[window]) ** (p - 1.0)
        best = max(best, value)
    return best


def a1_constant(w: WeightLike, cubes: Sequence[Cube]) -> float:
    """max over cubes of <w>_Q / min_Q w."""
    g = _grid(w)
    best = 0.0
    for window in _windows(g, cubes):
        local = g.values[window]
        value = 1.0 if _constant(local) else stable_mean(local) / float(local.min())
        best = max(best, value)
    return best


def ainfty_constant(w: WeightLike, cubes: Sequence[Cube], family: Optional[CubeFamilySpec] = None) -> float:
    """Fujii-Wilson: max over cubes of (1/w(Q)) int_Q M(w chi_Q)."""
    g = _grid(w)
    family = family if family is not None else CubeFamilySpec.dense()
    best = 0.0
    for window in _windows(g, cubes):
        local = np.zeros(g.shape)
        local[window] = g.values[window]
        mw = hl_maximal(g.with_values(local), family).values
        value = math.fsum(mw[window].ravel()) / math.fsum(g.values[window].ravel())
        best = max(best, value)
    return best


def _multi_factor(local: np.ndarray, p: float, p_i: float) -> float:
    if p_i == 1:
        return float(local.min()) ** (-p)
    # <w^{1-p_i'}>^{p/p_i'} with p/p_i' = p - p/p_i
    return stable_mean(local ** _dual_exponent(p_i)) ** (p - p / p_i)


def multi_ap_constant(ws: WeightVector, cubes: Sequence[Cube]) -> float:
    """max over cubes of <nu>_Q prod_i <w_i^{1-p_i'}>_Q^{p/p_i'}, with (inf_Q w_i)^{-p} when p_i = 1."""
    p = ws.p
    nu = nu_weight(ws).values
    template = ws.weights[0].w
    best = 0.0
    for window in _windows(template, cubes):
        locals_ = [w.values[window] for w in ws.weights]
        if all(_constant(v) for v in locals_):
            value = 1.0
        else:
            value = stable_mean(nu[window])
            for local, p_i in zip(locals_, ws.exponents):
                value *= _multi_factor(local, p, p_i)
        best = max(best, value)
    return best


@dataclass(frozen=True)
class MultiApComponents:
    sigma: Tuple[float, ...]  # [w_j^{1-p_j'}]_{A_{m p_j'}}, or [w_j^{1/m}]_{A_1} when p_j = 1
    nu: float                 # [nu]_{A_{mp}}

    def max(self) -> float:
        return max(self.sigma + (self.nu,))


def multi_ap_components(ws: WeightVector, cubes: Sequence[Cube]) -> MultiApComponents:
    """Characteristics of the linear description of A_p-vector weights."""
    m = len(ws)
    sigma: List[float] = []
    for w, p_j in zip(ws.weights, ws.exponents):
        if p_j == 1:
            sigma.append(a1_constant(w.w ** (1.0 / m), cubes))
        else:
            sigma.append(ap_constant(dual_weight(w, p_j), m * p_j / (p_j - 1.0), cubes))
    mp = m * ws.p
    nu = nu_weight(ws)
    nu_value = a1_constant(nu, cubes) if mp == 1 else ap_constant(nu, mp, cubes)
    return MultiApComponents(tuple(sigma), nu_value)


def _lp_norm(f: np.ndarray, w: np.ndarray, p: float, cell_volume: float) -> float:
    return (math.fsum((np.abs(f) ** p * w).ravel()) * cell_volume) ** (1.0 / p)


def weak_ratio(f: GridFunction, w: WeightLike, p: float, family: CubeFamilySpec) -> float:
    """sup_t t w({Mf > t})^{1/p} / ||f||_{L^p(w)}, the sup taken at the values of Mf."""
    g = _grid(w)
    f.check_same_grid(g)
    denominator = _lp_norm(f.values, g.values, p, f.cell_volume)
    if denominator == 0:
        raise ValueError("weak ratio of the zero function")
    mf = hl_maximal(f, family).values.ravel()
    order = np.argsort(-mf, kind="stable")
    levels = mf[order]
    measures = np.cumsum(g.values.ravel()[order]) * f.cell_volume
    # The last index of a tie group carries w({Mf >= level})
    last = np.append(levels[1:] != levels[:-1], True)
    return float(np.max(levels[last] * measures[last] ** (1.0 / p))) / denominator


def weak_norm_estimate(
    w: WeightLike,
    p: float,
    cubes: Sequence[Cube],
    family: Optional[CubeFamilySpec] = None,
    corpus: Sequence[GridFunction] = (),
) -> float:
    """
    Randomized lower bound of ||M||_{L^p(w) -> L^{p,inf}(w)}: test functions sigma chi_Q
    for the given cubes plus the corpus. With the cubes in M's family this is >= [w]_{A_p}^{1/p}.
    """
    g = _grid(w)
    family = family if family is not None else CubeFamilySpec.dense()
    sigma = dual_weight(g, p).values
    best = 0.0
    for window in _windows(g, cubes):
        test = np.zeros(g.shape)
        test[window] = sigma[window]
        best = max(best, weak_ratio(g.with_values(test), g, p, family))
    for f in corpus:
        if not f.is_zero():
            best = max(best, weak_ratio(f, g, p, family))
    return best
