"""
Descriptors of the Banach function spaces evaluated by spaces.norms:
Lebesgue L^p(w), Lorentz L^{p,q}(w), variable exponent L^{p(.)} and Orlicz L_Phi,
each optionally raised to a power X^s with ||f||_{X^s} = || |f|^s ||_X^{1/s}.
"""
import json
import logging
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np

from grid.core import GridFunction
from grid.io import grid_from_dict, grid_to_dict
from lorentz.rearrangement import InadmissibleSpaceError, check_lorentz_pair

logger = logging.getLogger(__name__)

LEBESGUE = "lebesgue"
LORENTZ = "lorentz"
VARIABLE = "variable"
ORLICZ = "orlicz"

KINDS = (LEBESGUE, LORENTZ, VARIABLE, ORLICZ)


def conjugate(p: float) -> float:
    """Hoelder conjugate p' with 1' = inf and inf' = 1."""
    if p == 1:
        return math.inf
    if math.isinf(p):
        return 1.0
    return p / (p - 1.0)


@dataclass(frozen=True)
class YoungFunction:
    """Phi(t) = c t^p log^a(e + t) (tag "power") or c (exp(t^a) - 1) (tag "exp_power"), c = scale."""

    tag: str
    p: float = 1.0
    a: float = 0.0
    scale: float = 1.0

    def __post_init__(self):
        if not self.scale > 0:
            raise InadmissibleSpaceError("Young function scale must be positive, got %r" % self.scale)
        if self.tag == "power":
            if self.p < 1 or self.a < 0:
                raise InadmissibleSpaceError("Power(p, a) needs p >= 1 and a >= 0, got (%r, %r)" % (self.p, self.a))
        elif self.tag == "exp_power":
            if self.a < 1:
                raise InadmissibleSpaceError("ExpPower(a) needs a >= 1, got %r" % self.a)
        else:
            raise InadmissibleSpaceError("unknown Young function tag %r" % self.tag)

    @classmethod
    def power(cls, p: float = 1.0, a: float = 0.0, scale: float = 1.0) -> "YoungFunction":
        return cls("power", p, a, scale)

    @classmethod
    def exp_power(cls, a: float = 1.0) -> "YoungFunction":
        return cls("exp_power", 1.0, a)

    @classmethod
    def l_log_l(cls) -> "YoungFunction":
        return cls("power", 1.0, 1.0)

    def complementary(self) -> "YoungFunction":
        """Psi(s) = sup_t (st - Phi(t)); computed for pure powers c t^p, 1 < p < inf."""
        if self.tag != "power" or self.a != 0 or not 1 < self.p < math.inf:
            raise InadmissibleSpaceError("complementary Young function is only computed for c t^p with 1 < p < inf")
        p, c = self.p, self.scale
        q = conjugate(p)
        return YoungFunction("power", q, 0.0, (p - 1.0) * c * (c * p) ** (-q))

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        with np.errstate(over="ignore"):
            if self.tag == "power":
                return self.scale * t ** self.p * np.log(np.e + t) ** self.a
            return self.scale * np.expm1(t ** self.a)

    def to_dict(self) -> Dict[str, Any]:
        return {"tag": self.tag, "p": self.p, "a": self.a, "scale": self.scale}

    @classmethod
    def from_dict(cls, raw: Dict[str, Any]) -> "YoungFunction":
        return cls(raw["tag"], float(raw.get("p", 1.0)), float(raw.get("a", 0.0)), float(raw.get("scale", 1.0)))


@dataclass(frozen=True, eq=False)
class SpaceDescriptor:
    kind: str
    p: float = 1.0
    q: float = math.inf
    exponent: Optional[GridFunction] = None
    young: Optional[YoungFunction] = None
    weight: Optional[GridFunction] = None
    power: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InadmissibleSpaceError("unknown space kind %r" % (self.kind,))
        if not self.power > 0:
            raise InadmissibleSpaceError("power must be positive, got %r" % self.power)
        if self.kind == LEBESGUE and not self.p >= 1:
            raise InadmissibleSpaceError("Lebesgue exponent must be in [1, inf], got %r" % self.p)
        if self.kind == LORENTZ:
            check_lorentz_pair(self.p, self.q)
        if self.kind == VARIABLE:
            if self.exponent is None:
                raise InadmissibleSpaceError("variable exponent space needs an exponent function")
            values = self.exponent.values
            if np.any(np.isnan(values)) or np.any(values < 1):
                raise InadmissibleSpaceError("variable exponent must take values in [1, inf]")
            if self.weight is not None:
                raise InadmissibleSpaceError("weighted variable exponent spaces are not supported")
        if self.kind == ORLICZ and self.young is None:
            raise InadmissibleSpaceError("Orlicz space needs a Young function")
        if self.weight is not None and np.any(self.weight.values < 0):
            raise InadmissibleSpaceError("space weight must be nonnegative")

    # ----- constructors -----

    @classmethod
    def lebesgue(cls, p: float, weight: Optional[GridFunction] = None) -> "SpaceDescriptor":
        return cls(LEBESGUE, p=float(p), weight=weight)

    @classmethod
    def lorentz(cls, p: float, q: float, weight: Optional[GridFunction] = None) -> "SpaceDescriptor":
        return cls(LORENTZ, p=float(p), q=float(q), weight=weight)

    @classmethod
    def variable(cls, exponent: GridFunction) -> "SpaceDescriptor":
        return cls(VARIABLE, exponent=exponent)

    @classmethod
    def orlicz(cls, young: YoungFunction, weight: Optional[GridFunction] = None) -> "SpaceDescriptor":
        return cls(ORLICZ, young=young, weight=weight)

    # ----- derived descriptors -----

    def with_power(self, s: float) -> "SpaceDescriptor":
        """X^s; powers compose multiplicatively."""
        return replace(self, power=self.power * s)

    def associate(self) -> "SpaceDescriptor":
        """X' for the kinds with a computable associate space."""
        if self.power != 1.0:
            raise InadmissibleSpaceError("associate of a power-transformed space is not computed")
        if self.kind == LEBESGUE:
            if self.weight is None:
                return SpaceDescriptor.lebesgue(conjugate(self.p))
            if math.isinf(self.p) or self.p == 1:
                raise InadmissibleSpaceError("weighted L^1 / L^inf associates are not computed")
            dual = self.weight.with_values(self.weight.values ** (1.0 - conjugate(self.p)))
            return SpaceDescriptor.lebesgue(conjugate(self.p), weight=dual)
        if self.kind == LORENTZ:
            if self.weight is not None:
                raise InadmissibleSpaceError("weighted Lorentz associates are not computed")
            if not 1 < self.p < math.inf or self.q < 1:
                raise InadmissibleSpaceError("Lorentz associate needs 1 < p < inf and q >= 1")
            return SpaceDescriptor.lorentz(conjugate(self.p), conjugate(self.q))
        if self.kind == VARIABLE:
            return SpaceDescriptor.variable(conjugate_exponent(self.exponent))
        if self.weight is not None:
            raise InadmissibleSpaceError("weighted Orlicz associates are not computed")
        return SpaceDescriptor.orlicz(self.young.complementary())

    def pairing_constant(self) -> float:
        """C in int |fg| <= C ||f||_X ||g||_{X'}; Luxemburg gauges on both sides cost a factor 2."""
        return 2.0 if self.kind in (VARIABLE, ORLICZ) else 1.0

    def flatten_power(self) -> "SpaceDescriptor":
        """
        Power-free descriptor of X^s: (L^p)^s = L^{sp}, (L^{p,q})^s = L^{sp,sq},
        (L^{p(.)})^s = L^{s p(.)}. Lebesgue and variable exponents below 1 raise, as do Orlicz powers.
        """
        s = self.power
        if s == 1.0:
            return self
        if self.kind == LEBESGUE:
            return SpaceDescriptor.lebesgue(self.p * s, weight=self.weight)
        if self.kind == LORENTZ:
            return SpaceDescriptor.lorentz(self.p * s, self.q * s, weight=self.weight)
        if self.kind == VARIABLE:
            return SpaceDescriptor.variable(self.exponent * s)
        raise InadmissibleSpaceError("powers of Orlicz spaces are not flattened")

    def label(self) -> str:
        if self.kind == LEBESGUE:
            base = "L^%s" % _fmt(self.p)
        elif self.kind == LORENTZ:
            base = "L^{%s,%s}" % (_fmt(self.p), _fmt(self.q))
        elif self.kind == VARIABLE:
            lo, hi = exponent_range(self.exponent)
            base = "L^{p(.)}[%s,%s]" % (_fmt(lo), _fmt(hi))
        else:
            base = "L_Phi[%s p=%s a=%s]" % (self.young.tag, _fmt(self.young.p), _fmt(self.young.a))
            if self.young.scale != 1.0:
                base = base[:-1] + " c=%s]" % _fmt(self.young.scale)
        if self.weight is not None:
            base += "(w)"
        if self.power != 1.0:
            base = "(%s)^%s" % (base, _fmt(self.power))
        return base

    # ----- serialization -----

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind,
            "p": _encode(self.p),
            "q": _encode(self.q),
            "power": self.power,
            "exponent": grid_to_dict(self.exponent) if self.exponent is not None else None,
            "young": self.young.to_dict() if self.young is not None else None,
            "weight": grid_to_dict(self.weight) if self.weight is not None else None,
        }

    @classmethod
    def from_dict(cls, raw: Dict[str, Any]) -> "SpaceDescriptor":
        exponent = raw.get("exponent")
        young = raw.get("young")
        weight = raw.get("weight")
        return cls(
            kind=raw["kind"],
            p=_decode(raw.get("p", 1.0)),
            q=_decode(raw.get("q", "inf")),
            exponent=grid_from_dict(exponent, allow_infinite=True) if exponent else None,
            young=YoungFunction.from_dict(young) if young else None,
            weight=grid_from_dict(weight) if weight else None,
            power=float(raw.get("power", 1.0)),
        )


def load_descriptor(path: Union[str, Path]) -> SpaceDescriptor:
    raw = json.loads(Path(path).read_text())
    return SpaceDescriptor.from_dict(raw)


def conjugate_exponent(p: GridFunction) -> GridFunction:
    """Pointwise p'(.) of an exponent function with values in [1, inf]."""
    values = p.values
    with np.errstate(divide="ignore", invalid="ignore"):
        conj = np.where(values == 1, np.inf, np.where(np.isinf(values), 1.0, values / (values - 1.0)))
    return p.with_values(conj)


def exponent_range(p: GridFunction):
    """(p_-, p_+) over the grid."""
    return float(np.min(p.values)), float(np.max(p.values))


def _fmt(x: float) -> str:
    return "inf" if math.isinf(x) else "%g" % x


def _encode(x: float):
    return "inf" if math.isinf(x) else float(x)


def _decode(x) -> float:
    if isinstance(x, str):
        if x == "inf":
            return math.inf
        raise ValueError("unexpected exponent token %r" % x)
    return float(x)
