"""
Empirical checks on operators and symbols: the W_r local weak-type profile and
John-Nirenberg level-set decay.
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from config.settings import EXACT_RTOL
from grid.core import Cube, GridFunction, cube_slices, stable_mean
from maximal.families import CubeFamilySpec, family_cubes
from spaces.bmo import bmo_norm

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class WrProfile:
    lambdas: Tuple[float, ...]
    phi: Tuple[float, ...]      # phi_hat(lambda), nonincreasing
    pairs: int                  # (cube, f) pairs measured
    skipped: int                # pairs with <|f|>_{r,Q} = 0

    def as_dict(self):
        return dict(zip(self.lambdas, self.phi))


def wr_property_check(
    T,
    r: float,
    cubes: Sequence[Cube],
    corpus: Sequence[GridFunction],
    lambdas: Sequence[float],
) -> WrProfile:
    """
    phi_hat(lambda): smallest c with |{x in Q : |T(f chi_Q)(x)| > c <|f|>_{r,Q}}| <= lambda |Q|
    over every (Q, f) pair, measured in cells of Q.
    """
    if r < 1:
        raise ValueError("r must be >= 1, got %r" % r)
    lambdas = tuple(float(x) for x in lambdas)
    if not lambdas or any(not 0 < x < 1 for x in lambdas):
        raise ValueError("lambda grid must be a nonempty subset of (0, 1)")
    if not corpus:
        raise ValueError("corpus must be nonempty")
    apply = getattr(T, "apply", T)
    phi = np.zeros(len(lambdas))
    pairs = skipped = 0
    for cube in cubes:
        window = cube_slices(corpus[0], cube)
        if window is None:
            continue
        for f in corpus:
            local = np.abs(f.values[window])
            scale = (math.fsum((local ** r).ravel()) / local.size) ** (1.0 / r)
            if scale == 0:
                skipped += 1
                continue
            cut = np.zeros(f.shape)
            cut[window] = f.values[window]
            image = np.sort(np.abs(apply(f.with_values(cut)).values[window]).ravel())[::-1]
            count = image.size
            for n, lam in enumerate(lambdas):
                allowed = int(math.floor(lam * count))
                if allowed < count:
                    phi[n] = max(phi[n], image[allowed] / scale)
            pairs += 1
    if skipped:
        logger.info("W_r check skipped %d pairs with zero local average", skipped)
    return WrProfile(lambdas, tuple(float(x) for x in phi), pairs, skipped)


@dataclass(frozen=True)
class JohnNirenbergResult:
    norm: float                 # family BMO norm
    wide_norm: float            # BMO norm over the family and the wide cube set
    violations: int             # against the family norm
    wide_violations: int        # against the wide norm
    checked: int
    skipped: bool = False


def john_nirenberg_check(
    b: GridFunction,
    cubes: Sequence[Cube],
    alphas: Sequence[float],
    wide_cubes: Optional[Sequence[Cube]] = None,
) -> JohnNirenbergResult:
    """
    Count (Q, alpha) with |{x in Q : |b - <b>_Q| > alpha}| > e|Q| exp(-alpha / (2^n e ||b||_BMO)).
    Both the family norm and a wider norm (default: the dyadic shifted family) are used.
    """
    norm = bmo_norm(b, cubes)
    if norm == 0:
        logger.info("John-Nirenberg check skipped: zero BMO norm")
        return JohnNirenbergResult(0.0, 0.0, 0, 0, 0, skipped=True)
    wide = list(cubes) + list(wide_cubes if wide_cubes is not None else family_cubes(b, CubeFamilySpec.dyadic_shifted()))
    wide_norm = max(norm, bmo_norm(b, wide))
    n = b.dim
    violations = wide_violations = checked = 0
    for cube in cubes:
        window = cube_slices(b, cube)
        if window is None:
            continue
        local = b.values[window]
        deviation = np.abs(local - stable_mean(local))
        measure = local.size * b.cell_volume
        for alpha in alphas:
            lhs = int(np.count_nonzero(deviation > alpha)) * b.cell_volume
            bound = math.e * measure * math.exp(-alpha / (2 ** n * math.e * norm))
            wide_bound = math.e * measure * math.exp(-alpha / (2 ** n * math.e * wide_norm))
            violations += lhs > bound * (1 + EXACT_RTOL)
            wide_violations += lhs > wide_bound * (1 + EXACT_RTOL)
            checked += 1
    if violations:
        logger.warning("John-Nirenberg: %d of %d (cube, alpha) pairs exceed the bound", violations, checked)
    return JohnNirenbergResult(norm, wide_norm, violations, wide_violations, checked)
