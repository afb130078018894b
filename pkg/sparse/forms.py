"""
Sparse operators, sparse commutators, the Hypothesis-1 right-hand side and the
bilinear sparse form with its per-(k, Q) terms.

Sums are accumulated in lattice order. <.>_{r,Q} means <|.|^r>_Q^{1/r}.
f and g are zero outside the domain and averaged over the full cube; the symbol
b is averaged over the cells of Q inside the domain.
"""
import itertools
import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from grid.core import GridFunction, stable_mean
from sparse.family import SparseFamily
from sparse.lattice import CubeKey

logger = logging.getLogger(__name__)


def _r_average(values: np.ndarray, count: int, r: float) -> float:
    if r == 1:
        return math.fsum(np.abs(values).ravel()) / count
    return (math.fsum((np.abs(values) ** r).ravel()) / count) ** (1.0 / r)


def _symbol_mean(b: np.ndarray, window) -> float:
    local = b[window]
    return stable_mean(local) if local.size else 0.0


def sparse_operator(f: GridFunction, family: SparseFamily, r: float = 1.0) -> GridFunction:
    """T_{r,S} f = sum over Q of <f>_{r,Q} chi_Q."""
    if r < 1:
        raise ValueError("r must be >= 1, got %r" % r)
    lattice = family.lattice
    lattice.check_grid(f)
    out = np.zeros(f.shape)
    for key in family.cubes:
        window = lattice.window(key)
        out[window] += _r_average(f.values[window], lattice.measure_cells(key), r)
    return f.with_values(out)


def _commutator_term(fv: np.ndarray, bv: np.ndarray, window, count: int, gamma: int) -> np.ndarray:
    """T(b, f, Q, gamma) on the cells of Q: |b - <b>_Q| <|f|>_Q or <|(b - <b>_Q) f|>_Q."""
    deviation = np.abs(bv[window] - _symbol_mean(bv, window))
    if gamma == 1:
        return deviation * (math.fsum(np.abs(fv[window]).ravel()) / count)
    if gamma == 2:
        value = math.fsum((deviation * np.abs(fv[window])).ravel()) / count
        return np.full(deviation.shape, value)
    raise ValueError("gamma must be 1 or 2, got %r" % gamma)


def sparse_commutator(f: GridFunction, b: GridFunction, family: SparseFamily, adjoint: bool = False) -> GridFunction:
    """
    Plain: sum over Q of |b(x) - <b>_Q| <|f|>_Q chi_Q(x).
    Adjoint: sum over Q of <|b - <b>_Q| |f|>_Q chi_Q(x).
    """
    lattice = family.lattice
    lattice.check_grid(f)
    f.check_same_grid(b)
    out = np.zeros(f.shape)
    gamma = 2 if adjoint else 1
    for key in family.cubes:
        window = lattice.window(key)
        out[window] += _commutator_term(f.values, b.values, window, lattice.measure_cells(key), gamma)
    return f.with_values(out)


def hyp1_rhs(
    fs: Sequence[GridFunction],
    bs: Sequence[GridFunction],
    families: Sequence[SparseFamily],
    gammas: Optional[Sequence[int]] = None,
) -> GridFunction:
    """
    sum_j sum_{Q in S_j} prod_{s<=l} T(b_s, f_s, Q, gamma_s) prod_{s>l} <|f_s|>_Q chi_Q,
    with l = len(bs) symbols paired with the first l functions. gammas=None sums
    over every gamma in {1, 2}^l.
    """
    if not fs:
        raise ValueError("need at least one function")
    l = len(bs)
    if l > len(fs):
        raise ValueError("more symbols (%d) than functions (%d)" % (l, len(fs)))
    if not families:
        raise ValueError("need at least one sparse family")
    for g in list(fs[1:]) + list(bs):
        fs[0].check_same_grid(g)
    if gammas is not None and len(gammas) != l:
        raise ValueError("need one gamma per symbol, got %d for %d symbols" % (len(gammas), l))
    patterns = [tuple(gammas)] if gammas is not None else list(itertools.product((1, 2), repeat=l))

    out = np.zeros(fs[0].shape)
    for family in families:
        lattice = family.lattice
        lattice.check_grid(fs[0])
        for key in family.cubes:
            window = lattice.window(key)
            count = lattice.measure_cells(key)
            plain = 1.0
            for f in fs[l:]:
                plain *= math.fsum(np.abs(f.values[window]).ravel()) / count
            if plain == 0:
                continue
            for pattern in patterns:
                term = np.full(out[window].shape, plain)
                for f, b, gamma in zip(fs, bs, pattern):
                    term = term * _commutator_term(f.values, b.values, window, count, gamma)
                out[window] += term
    return fs[0].with_values(out)


@dataclass(frozen=True)
class BilinearForm:
    value: float
    terms: Dict[int, Dict[CubeKey, float]]  # k -> Q -> c_k(Q)

    def per_k(self) -> List[float]:
        """sum over Q of c_k(Q), for k = 0..m."""
        return [math.fsum(self.terms[k].values()) for k in sorted(self.terms)]


def bilinear_sparse_form(
    f: GridFunction,
    g: GridFunction,
    b: GridFunction,
    family: SparseFamily,
    r: float,
    t: float,
    m: int,
) -> BilinearForm:
    """
    sum_{k=0}^m sum_Q c_k(Q) |Q| with
    c_k(Q) = <|b - <b>_Q|^{m-k} f>_{r,Q} <|b - <b>_Q|^k g>_{t,Q}.
    """
    if r < 1 or t < 1:
        raise ValueError("r and t must be >= 1, got (%r, %r)" % (r, t))
    if m < 0:
        raise ValueError("m must be >= 0, got %d" % m)
    lattice = family.lattice
    lattice.check_grid(f)
    f.check_same_grid(g)
    f.check_same_grid(b)
    terms: Dict[int, Dict[CubeKey, float]] = {k: {} for k in range(m + 1)}
    weighted: List[float] = []
    for key in family.cubes:
        window = lattice.window(key)
        count = lattice.measure_cells(key)
        measure = count * f.cell_volume
        deviation = np.abs(b.values[window] - _symbol_mean(b.values, window))
        fw, gw = np.abs(f.values[window]), np.abs(g.values[window])
        for k in range(m + 1):
            c_k = _r_average(deviation ** (m - k) * fw, count, r) * _r_average(deviation ** k * gw, count, t)
            terms[k][key] = c_k
            weighted.append(c_k * measure)
    return BilinearForm(math.fsum(weighted), terms)
