"""
Decreasing rearrangements and (weighted) Lorentz norms.
f* is an exact step profile, so every Lorentz integral is evaluated in closed form.
"""
import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from grid.core import GridFunction

logger = logging.getLogger(__name__)


class InadmissibleSpaceError(ValueError):
    """Raised for exponent pairs outside the admissible range of a space."""


@dataclass(frozen=True, eq=False)
class RearrangementProfile:
    """f*(t) = levels[k-1] on [breakpoints[k-1], breakpoints[k]), zero beyond the last breakpoint."""

    breakpoints: np.ndarray
    levels: np.ndarray

    @property
    def is_empty(self) -> bool:
        return self.levels.size == 0

    @property
    def total_measure(self) -> float:
        return float(self.breakpoints[-1])

    def measure_above(self, s: float) -> float:
        """Distribution function of the profile: |{f* > s}|."""
        k = int(np.count_nonzero(self.levels > s))
        return float(self.breakpoints[k])

    def value_at(self, t: float) -> float:
        if t < 0:
            raise ValueError("t must be >= 0")
        k = int(np.searchsorted(self.breakpoints, t, side="right"))
        return float(self.levels[k - 1]) if k <= self.levels.size else 0.0

    def plateaus(self) -> List[Tuple[float, float, float]]:
        """(start, end, level) triples."""
        return [
            (float(a), float(b), float(v))
            for a, b, v in zip(self.breakpoints[:-1], self.breakpoints[1:], self.levels)
        ]


def decreasing_rearrangement(f: GridFunction, w: Optional[GridFunction] = None) -> RearrangementProfile:
    """Sort cells by |f| descending; cumulative (weighted) cell measures become breakpoints."""
    magnitudes = np.abs(f.values).ravel()
    if w is None:
        measures = np.full(magnitudes.shape, f.cell_volume)
    else:
        f.check_same_grid(w)
        if np.any(w.values < 0):
            raise ValueError("negative weight in rearrangement")
        measures = w.values.ravel() * f.cell_volume
    keep = (magnitudes > 0) & (measures > 0)
    magnitudes = magnitudes[keep]
    measures = measures[keep]
    if magnitudes.size == 0:
        return RearrangementProfile(np.zeros(1), np.zeros(0))
    # Stable sort keeps ties in cell-index order
    order = np.argsort(-magnitudes, kind="stable")
    magnitudes = magnitudes[order]
    measures = measures[order]
    levels, starts = np.unique(-magnitudes, return_index=True)
    levels = -levels
    ends = np.append(starts[1:], magnitudes.size)
    group_measures = [math.fsum(measures[a:b]) for a, b in zip(starts, ends)]
    breakpoints = np.concatenate(([0.0], np.cumsum(group_measures)))
    return RearrangementProfile(breakpoints, levels)


def check_lorentz_pair(p: float, q: float) -> None:
    if not (p > 0 and q > 0):
        raise InadmissibleSpaceError("Lorentz exponents must be positive, got (%r, %r)" % (p, q))
    if math.isinf(p) and not math.isinf(q):
        raise InadmissibleSpaceError("inadmissible pair: p=inf requires q=inf, got q=%r" % q)


def lorentz_norm(f: GridFunction, p: float, q: float, w: Optional[GridFunction] = None) -> float:
    """||f||_{L^{p,q}(w)} from the exact step profile of f*."""
    check_lorentz_pair(p, q)
    profile = decreasing_rearrangement(f, w)
    return profile_lorentz_norm(profile, p, q)


def profile_lorentz_norm(profile: RearrangementProfile, p: float, q: float) -> float:
    check_lorentz_pair(p, q)
    if profile.is_empty:
        return 0.0
    if math.isinf(p):
        return float(profile.levels[0])
    t = profile.breakpoints
    if math.isinf(q):
        # Sup of t^{1/p} f*(t) on a plateau sits at its right edge; left edges checked too.
        right = profile.levels * t[1:] ** (1.0 / p)
        left = profile.levels * t[:-1] ** (1.0 / p)
        return float(max(right.max(), left.max()))
    powered = t ** (q / p)
    terms = profile.levels ** q * (p / q) * np.diff(powered)
    return math.fsum(terms) ** (1.0 / q)


def weak_strong_constant(p: float, q: float) -> float:
    """(q/p)^{1/q}: ||f||_{p,inf} <= this * ||f||_{p,q} for q <= p."""
    if math.isinf(q):
        return 1.0
    return (q / p) ** (1.0 / q)


def _reciprocal(x: float) -> float:
    return 0.0 if math.isinf(x) else 1.0 / x


def lorentz_holder_bound(norms: Sequence[Tuple[float, float, float]]) -> Tuple[float, float, float]:
    """
    Target exponents and right-hand side of the Lorentz Hoelder inequality.

    Args:
        norms: (value_i, p_i, q_i) with 1 < p_i < inf and 0 < q_i <= inf, or p_i = q_i = inf.

    Returns:
        (p, q, bound) with 1/p = sum 1/p_i, 1/q = sum 1/q_i and the case constant
        m^{1/p} (q < inf), p^{-1/p} prod p_i^{1/p_i} (p < inf = q) or 1 (p = q = inf).
    """
    if not norms:
        raise ValueError("need at least one factor")
    for value, p_i, q_i in norms:
        both_inf = math.isinf(p_i) and math.isinf(q_i)
        if not both_inf and not (1 < p_i < math.inf and q_i > 0):
            raise InadmissibleSpaceError("inadmissible factor exponents (%r, %r)" % (p_i, q_i))
        if value < 0:
            raise ValueError("norm values must be nonnegative")
    m = len(norms)
    inv_p = math.fsum(_reciprocal(p_i) for _, p_i, _ in norms)
    inv_q = math.fsum(_reciprocal(q_i) for _, _, q_i in norms)
    p = math.inf if inv_p == 0 else 1.0 / inv_p
    q = math.inf if inv_q == 0 else 1.0 / inv_q
    product = math.prod(value for value, _, _ in norms)
    if math.isinf(p) and math.isinf(q):
        constant = 1.0
    elif math.isinf(q):
        constant = p ** (-1.0 / p) * math.prod(1.0 if math.isinf(p_i) else p_i ** (1.0 / p_i) for _, p_i, _ in norms)
    else:
        constant = m ** (1.0 / p) if not math.isinf(p) else 1.0
    return p, q, constant * product
