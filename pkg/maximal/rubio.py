"""
Rubio de Francia iteration and randomized operator-norm lower bounds.
"""
import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

from grid.core import GridFunction
from maximal.families import CubeFamilySpec
from maximal.operators import DEFAULT_FAMILY, hl_maximal
from spaces.descriptors import SpaceDescriptor
from spaces.norms import space_norm

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class RubioSum:
    value: GridFunction     # R_K h
    tail: float             # sup bound of R h - R_K h; inf when the series is not dominated
    terms: int
    norm_estimate: float

    @property
    def bounded(self) -> bool:
        return math.isfinite(self.tail)

    def a1_majorant(self) -> GridFunction:
        """
        2 normEst (R_K h + tail), a pointwise bound for M(R_K h).

        The tail sits inside the factor: M(R_K h) <= M(R h) <= 2 normEst R h and
        R h <= R_K h + tail. The form 2 normEst R_K h + tail does not bound
        M(R_K h) once normEst > 1.
        """
        return self.value.with_values(2.0 * self.norm_estimate * (self.value.values + self.tail))


def rubio_de_francia(
    h: GridFunction,
    K: int,
    norm_estimate: float,
    family: CubeFamilySpec = DEFAULT_FAMILY,
) -> RubioSum:
    """
    R_K h = sum_{k<=K} M^k h / (2 normEst)^k with M^0 h = |h|.

    M never raises the sup norm, so the terms beyond K are bounded by
    ||h||_inf rho^k with rho = 1/(2 normEst); the geometric tail is finite iff rho < 1.
    """
    if not norm_estimate > 0:
        raise ValueError("operator norm estimate must be positive, got %r" % norm_estimate)
    if K < 0:
        raise ValueError("truncation K must be >= 0, got %d" % K)
    rho = 1.0 / (2.0 * norm_estimate)
    term = abs(h)
    total = term
    for k in range(1, K + 1):
        term = hl_maximal(term, family)
        total = total + term * rho ** k
    if rho < 1:
        tail = h.max_abs() * rho ** (K + 1) / (1.0 - rho)
    else:
        tail = math.inf
        logger.warning("Rubio de Francia tail unbounded: normEst=%g gives ratio %g >= 1", norm_estimate, rho)
    return RubioSum(total, tail, K, norm_estimate)


@dataclass(frozen=True)
class NormEstimate:
    value: float
    index: int
    seed: Optional[int]


Norm = Union[SpaceDescriptor, Callable[[GridFunction], float]]


def _norm_of(norm: Norm) -> Callable[[GridFunction], float]:
    if isinstance(norm, SpaceDescriptor):
        return lambda f: space_norm(f, norm)
    return norm


def operator_norm_estimate(
    T,
    norm: Norm,
    corpus: Sequence[GridFunction],
    seeds: Optional[Sequence[int]] = None,
    target_norm: Optional[Norm] = None,
) -> NormEstimate:
    """
    max over the corpus of ||Tf|| / ||f||, a lower bound of the operator norm.
    T is a callable or anything with apply(f); norm is a SpaceDescriptor or a norm callable
    (a Morrey norm, for instance). target_norm measures Tf when it differs from norm.
    """
    if not corpus:
        raise ValueError("corpus must be nonempty")
    apply = getattr(T, "apply", T)
    source = _norm_of(norm)
    target = _norm_of(target_norm) if target_norm is not None else source
    best, arg = -1.0, 0
    for i, f in enumerate(corpus):
        denominator = source(f)
        if denominator == 0:
            raise ValueError("corpus entry %d has zero norm" % i)
        ratio = target(apply(f)) / denominator
        if ratio > best:
            best, arg = ratio, i
    seed = seeds[arg] if seeds is not None else None
    logger.debug("operator norm estimate %g at corpus entry %d (seed %s)", best, arg, seed)
    return NormEstimate(best, arg, seed)
