"""
Morrey-Banach norms over finite ball families, block-space upper bounds and
the W_X^alpha and W_{X,delta} admissibility checks for Morrey weights u(x, r).

Every supremum over balls is a maximum over a BallFamily, so Morrey values are
lower bounds of the true norm; block values are upper bounds.
"""
import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from config.settings import WX_CONTRACTION_SLACK, WX_DEFAULT_TERMS, WX_SERIES_GROWTH
from grid.core import Ball, GridFunction, region_mask
from spaces.descriptors import SpaceDescriptor
from spaces.norms import chi_ball_norm, space_norm

logger = logging.getLogger(__name__)

Point = Tuple[float, ...]


@dataclass(frozen=True, eq=False)
class MorreyWeight:
    """u(x, r) in closed form: power_radius, chi_norm_power, constant, tabulated or product."""

    tag: str
    lam: float = 0.0
    q: float = 1.0
    space: Optional[SpaceDescriptor] = None
    theta: float = 1.0
    value: float = 1.0
    table: Tuple[Tuple[Point, float, float], ...] = ()
    factors: Tuple["MorreyWeight", ...] = ()
    _lookup: Dict[Tuple[Point, float], float] = field(default_factory=dict, init=False, repr=False)

    def __post_init__(self):
        if self.tag not in ("power_radius", "chi_norm_power", "constant", "tabulated", "product"):
            raise ValueError("unknown Morrey weight tag %r" % self.tag)
        if self.tag == "chi_norm_power" and self.space is None:
            raise ValueError("chi_norm_power weight needs a space")
        if self.tag == "constant" and not self.value > 0:
            raise ValueError("constant Morrey weight must be positive")
        for center, radius, value in self.table:
            self._lookup[(tuple(float(c) for c in center), float(radius))] = float(value)

    @classmethod
    def power_radius(cls, lam: float, q: float) -> "MorreyWeight":
        """u = r^{lam/q}."""
        return cls("power_radius", lam=float(lam), q=float(q))

    @classmethod
    def chi_norm_power(cls, space: SpaceDescriptor, theta: float) -> "MorreyWeight":
        """u = ||chi_{B(x,r)}||_X^theta."""
        return cls("chi_norm_power", space=space, theta=float(theta))

    @classmethod
    def constant(cls, value: float = 1.0) -> "MorreyWeight":
        return cls("constant", value=float(value))

    @classmethod
    def tabulated(cls, entries: Sequence[Tuple[Sequence[float], float, float]]) -> "MorreyWeight":
        return cls("tabulated", table=tuple((tuple(c), float(r), float(v)) for c, r, v in entries))

    @classmethod
    def product(cls, weights: Sequence["MorreyWeight"]) -> "MorreyWeight":
        """u = prod u_i."""
        return cls("product", factors=tuple(weights))

    def __call__(self, center: Sequence[float], radius: float) -> float:
        if self.tag == "power_radius":
            return radius ** (self.lam / self.q)
        if self.tag == "chi_norm_power":
            return chi_ball_norm(self.space, center, radius).value ** self.theta
        if self.tag == "constant":
            return self.value
        if self.tag == "product":
            return math.prod(u(center, radius) for u in self.factors)
        key = (tuple(float(c) for c in center), float(radius))
        if key not in self._lookup:
            raise ValueError("tabulated Morrey weight has no entry for x=%s r=%g" % key)
        return self._lookup[key]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "tag": self.tag,
            "lam": self.lam,
            "q": "inf" if math.isinf(self.q) else self.q,
            "space": self.space.to_dict() if self.space is not None else None,
            "theta": self.theta,
            "value": self.value,
            "table": [[list(c), r, v] for c, r, v in self.table],
            "factors": [u.to_dict() for u in self.factors],
        }

    @classmethod
    def from_dict(cls, raw: Dict[str, Any]) -> "MorreyWeight":
        q = raw.get("q", 1.0)
        return cls(
            tag=raw["tag"],
            lam=float(raw.get("lam", 0.0)),
            q=math.inf if q == "inf" else float(q),
            space=SpaceDescriptor.from_dict(raw["space"]) if raw.get("space") else None,
            theta=float(raw.get("theta", 1.0)),
            value=float(raw.get("value", 1.0)),
            table=tuple((tuple(c), float(r), float(v)) for c, r, v in raw.get("table", [])),
            factors=tuple(cls.from_dict(u) for u in raw.get("factors", [])),
        )


@dataclass(frozen=True)
class BallFamily:
    """Finite stand-in for all balls: every center paired with every radius."""

    centers: Tuple[Point, ...]
    radii: Tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "centers", tuple(tuple(float(c) for c in x) for x in self.centers))
        object.__setattr__(self, "radii", tuple(float(r) for r in self.radii))
        if not self.centers or not self.radii:
            raise ValueError("ball family must be nonempty")
        if any(not r > 0 for r in self.radii):
            raise ValueError("ball radii must be positive")

    @classmethod
    def dyadic(cls, grid: GridFunction, levels: Optional[int] = None, center_stride: int = 1) -> "BallFamily":
        """Centers on grid nodes (every center_stride-th), radii 2^k h up to the domain diameter."""
        h = grid.spacing
        diameter = h * math.sqrt(sum(n * n for n in grid.shape))
        radii = []
        k = 0
        while (2 ** k) * h <= diameter and (levels is None or k <= levels):
            radii.append((2 ** k) * h)
            k += 1
        nodes = [
            [o + i * h for i in range(0, n + 1, center_stride)]
            for o, n in zip(grid.origin, grid.shape)
        ]
        centers = tuple(itertools.product(*nodes))
        return cls(centers, tuple(radii))

    def balls(self) -> Iterator[Tuple[Point, float]]:
        for center in self.centers:
            for radius in self.radii:
                yield center, radius

    def __len__(self) -> int:
        return len(self.centers) * len(self.radii)


@dataclass(frozen=True)
class BallEstimate:
    value: float
    center: Optional[Point]
    radius: Optional[float]


def _restrict(f: GridFunction, mask: np.ndarray) -> GridFunction:
    return f.with_values(np.where(mask, f.values, 0.0))


def morrey_norm(f: GridFunction, X: SpaceDescriptor, u: MorreyWeight, family: BallFamily) -> BallEstimate:
    """max over the family of ||f chi_B||_X / u(x, r); first maximizer in family order."""
    best = BallEstimate(0.0, None, None)
    for center, radius in family.balls():
        weight = u(center, radius)
        if not weight > 0:
            raise ValueError("Morrey weight must be positive, u(%s, %g) = %r" % (center, radius, weight))
        mask = region_mask(f, Ball(center, radius))
        ratio = space_norm(_restrict(f, mask), X) / weight if mask.any() else 0.0
        if best.center is None or ratio > best.value:
            best = BallEstimate(ratio, center, radius)
    logger.debug("Morrey norm %s over %d balls: %g at x=%s r=%s", X.label(), len(family), best.value, best.center, best.radius)
    return best


def classical_morrey_norm(f: GridFunction, p: float, lam: float, family: BallFamily) -> BallEstimate:
    """L^{p,lam}: u = r^{lam/p} on L^p."""
    return morrey_norm(f, SpaceDescriptor.lebesgue(p), MorreyWeight.power_radius(lam, p), family)


def morrey_lorentz_norm(f: GridFunction, p: float, q: float, lam: float, family: BallFamily) -> BallEstimate:
    """Morrey-Lorentz norm: u = r^{lam/q} on L^{p,q}."""
    return morrey_norm(f, SpaceDescriptor.lorentz(p, q), MorreyWeight.power_radius(lam, q), family)


def morrey_lorentz_admissible(ps: Sequence[float], qs: Sequence[float], lam: float, n: int) -> bool:
    """lam/n < min{q_i/p_i, q/p} with 1/p = sum 1/p_i and 1/q = sum 1/q_i."""
    p = 1.0 / math.fsum(1.0 / p_i for p_i in ps)
    q = 1.0 / math.fsum(1.0 / q_i for q_i in qs)
    bound = min([q_i / p_i for p_i, q_i in zip(ps, qs)] + [q / p])
    return lam / n < bound


def block_norm_upper_bound(f: GridFunction, X: SpaceDescriptor, u: MorreyWeight, family: BallFamily) -> BallEstimate:
    """
    Single-block decomposition f = lam * b with b supported in the smallest family
    ball covering supp f; lam = ||f||_X u(x0, r) bounds the block norm from above.
    """
    support = f.values != 0
    if not support.any():
        return BallEstimate(0.0, None, None)
    chosen = None
    for center, radius in family.balls():
        if chosen is not None and radius >= chosen[1]:
            continue
        mask = region_mask(f, Ball(center, radius))
        if np.all(mask[support]):
            chosen = (center, radius)
    if chosen is None:
        raise ValueError("no ball in the family covers supp f")
    center, radius = chosen
    return BallEstimate(space_norm(f, X) * u(center, radius), center, radius)


@dataclass(frozen=True)
class WxVerdict:
    status: str                      # "pass", "fail" or "inconclusive"
    reason: str
    constant: Optional[float]        # witness C for the series condition when it passes
    condition1_constant: Optional[float]  # max ratio over sample pairs with u(a) <= u(b); None for W_{X,delta}
    worst_sample: Optional[Tuple[Point, float]] = None

    @property
    def passed(self) -> bool:
        return self.status == "pass"


def _series_terms(u: MorreyWeight, X: SpaceDescriptor, alpha: float, center: Point, radius: float, terms: int) -> List[float]:
    chi_r = chi_ball_norm(X, center, radius).value
    u_r = u(center, radius)
    out = []
    for j in range(terms + 1):
        big = radius * 2 ** (j + 1)
        out.append(2 ** ((j + 1) * alpha) * (chi_r / chi_ball_norm(X, center, big).value) * (u(center, big) / u_r))
    return out


def _delta_series_terms(u: MorreyWeight, Y: SpaceDescriptor, delta: float, center: Point, radius: float, terms: int) -> List[float]:
    chi_r = chi_ball_norm(Y, center, radius).value
    u_r = u(center, radius)
    out = []
    for j in range(terms + 1):
        big = radius * 2 ** (j + 1)
        out.append((chi_r / chi_ball_norm(Y, center, big).value) ** delta * (u(center, big) / u_r))
    return out


def _check_samples(samples, terms: int) -> List[Tuple[Point, float]]:
    if terms < 8:
        raise ValueError("series truncation must be >= 8, got %d" % terms)
    if not samples:
        raise ValueError("need at least one (x, r) sample")
    return [(tuple(float(c) for c in x), float(r)) for x, r in samples]


def _series_verdict(
    name: str,
    points: Sequence[Tuple[Point, float]],
    series_at: Callable[[Point, float], List[float]],
    terms: int,
    c1: Optional[float],
) -> WxVerdict:
    constant = 0.0
    worst = None
    inconclusive = None
    for x, r in points:
        series = series_at(x, r)
        partial = np.cumsum(series)
        last, before = series[-1], series[-2]
        rho = last / before if before > 0 else 0.0
        if rho < 1.0 - WX_CONTRACTION_SLACK:
            total = float(partial[-1]) + last * rho / (1.0 - rho)
            if total > constant:
                constant, worst = total, (x, r)
            continue
        growth = float(partial[-1] / partial[terms // 2])
        if growth >= WX_SERIES_GROWTH:
            logger.info("%s series diverges at x=%s r=%g (ratio %.6f, growth %.3f)", name, x, r, rho, growth)
            return WxVerdict("fail", "divergent", None, c1, (x, r))
        inconclusive = (x, r)

    if inconclusive is not None:
        logger.warning("%s check inconclusive at x=%s r=%g", name, *inconclusive)
        return WxVerdict("inconclusive", "non-contracting series with bounded partial sums", None, c1, inconclusive)
    return WxVerdict("pass", "geometric tail", constant, c1, worst)


def wx_alpha_check(
    u: MorreyWeight,
    X: SpaceDescriptor,
    alpha: float,
    samples: Sequence[Tuple[Sequence[float], float]],
    terms: int = WX_DEFAULT_TERMS,
) -> WxVerdict:
    """
    Check u in W_X^alpha on sampled (x, r) pairs.

    Condition (1) is measured on all sample pairs and reported as a witness constant.
    Condition (2) decides the verdict: partial sums up to j = terms, then a geometric
    tail when the last-term ratio contracts; non-contracting series fail when their
    partial sums keep growing between terms/2 and terms, else the check is inconclusive.
    """
    points = _check_samples(samples, terms)

    ratios = []
    for x, r in points:
        ux = u(x, r)
        if not ux > 0:
            raise ValueError("Morrey weight must be positive, u(%s, %g) = %r" % (x, r, ux))
        ratios.append((ux, chi_ball_norm(X, x, r).value / ux))
    c1 = 0.0
    for (ua, ra), (ub, rb) in itertools.product(ratios, repeat=2):
        if ua <= ub:
            c1 = max(c1, ra / rb)

    return _series_verdict(
        "W_X^alpha", points, lambda x, r: _series_terms(u, X, alpha, x, r, terms), terms, c1,
    )


def wx_delta_check(
    u: MorreyWeight,
    X: SpaceDescriptor,
    delta: float,
    samples: Sequence[Tuple[Sequence[float], float]],
    terms: int = WX_DEFAULT_TERMS,
) -> WxVerdict:
    """
    Check u in W_{X,delta}: sum_j (||chi_B||_Y / ||chi_{2^{j+1}B}||_Y)^delta u(x, 2^{j+1} r) <= C u(x, r)
    with Y = (X^delta)', the associate of the delta-power of X. Same verdict rules as wx_alpha_check.
    """
    if not 0 < delta <= 1:
        raise ValueError("delta must lie in (0, 1], got %r" % delta)
    points = _check_samples(samples, terms)
    Y = X.with_power(delta).flatten_power().associate()
    for x, r in points:
        ux = u(x, r)
        if not ux > 0:
            raise ValueError("Morrey weight must be positive, u(%s, %g) = %r" % (x, r, ux))
    logger.debug("W_{X,delta} check for %s with delta=%g through %s", X.label(), delta, Y.label())
    return _series_verdict(
        "W_{X,delta}", points, lambda x, r: _delta_series_terms(u, Y, delta, x, r, terms), terms, None,
    )
