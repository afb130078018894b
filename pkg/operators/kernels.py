"""
Model operators evaluated by direct quadrature on the grid: the Hilbert transform,
rough homogeneous operators T_Omega in 2D, a bilinear Calderon-Zygmund model and
their (iterated, multilinear) commutators.

Singular cells are omitted; integrals run over the grid domain only.
"""
import logging
import math
from dataclasses import dataclass, replace
from typing import Callable, Dict, Optional, Sequence, Tuple, Union

import numpy as np

from grid.core import GridFunction, GridMismatchError
from maximal.families import CubeFamilySpec
from maximal.operators import DEFAULT_FAMILY, multilinear_maximal
from sparse.family import SparseFamily
from sparse.forms import sparse_operator

logger = logging.getLogger(__name__)

HILBERT = "hilbert"
ROUGH = "rough"
BILINEAR = "bilinear"
MULTILINEAR_MAXIMAL = "multilinear_maximal"
SPARSE = "sparse"
IDENTITY = "identity"
TAGS = (HILBERT, ROUGH, BILINEAR, MULTILINEAR_MAXIMAL, SPARSE, IDENTITY)

OMEGA_ZERO_MEAN_TOL = 1e-10
OMEGA_SAMPLES = 4096
_ROW_BLOCK = 256

Omega = Callable[[np.ndarray, np.ndarray], np.ndarray]

OMEGAS: Dict[str, Omega] = {
    "sign1": lambda t1, t2: np.sign(t1),
    "sign2": lambda t1, t2: np.sign(t2),
    "step": lambda t1, t2: np.sign(t1 * t2),
    "cos2": lambda t1, t2: t1 ** 2 - t2 ** 2,
    "zero": lambda t1, t2: np.zeros_like(t1),
}


def _resolve_omega(omega: Union[str, Omega]) -> Omega:
    if callable(omega):
        return omega
    if omega not in OMEGAS:
        raise ValueError("unknown Omega %r (expected one of %s)" % (omega, ", ".join(sorted(OMEGAS))))
    return OMEGAS[omega]


def check_omega(omega: Union[str, Omega]) -> Omega:
    """Omega must be bounded with zero average over sampled circle directions."""
    fn = _resolve_omega(omega)
    angles = 2.0 * np.pi * (np.arange(OMEGA_SAMPLES) + 0.5) / OMEGA_SAMPLES
    samples = np.asarray(fn(np.cos(angles), np.sin(angles)), dtype=float)
    if not np.all(np.isfinite(samples)):
        raise ValueError("Omega must be bounded on the circle")
    mean = math.fsum(samples) / samples.size
    if abs(mean) > OMEGA_ZERO_MEAN_TOL:
        raise ValueError("Omega must have zero mean over the circle, got %.3e" % mean)
    return fn


# ----- quadrature -----

def _kernel_quadrature(
    f: GridFunction,
    kernel: Callable[[np.ndarray], np.ndarray],
    b: Optional[GridFunction] = None,
    m: int = 0,
) -> np.ndarray:
    """sum_{j != i} K(x_i - x_j) (b(x_i) - b(x_j))^m f(x_j) h^dim, row block by row block."""
    points = f.centers().reshape(-1, f.dim)
    values = f.values.ravel()
    symbol = None
    if b is not None:
        f.check_same_grid(b)
        symbol = b.values.ravel()
    out = np.empty(values.size)
    for start in range(0, values.size, _ROW_BLOCK):
        stop = min(start + _ROW_BLOCK, values.size)
        diff = points[start:stop, None, :] - points[None, :, :]
        with np.errstate(divide="ignore", invalid="ignore"):
            k = kernel(diff)
        rows = np.arange(stop - start)
        k[rows, rows + start] = 0.0
        if symbol is not None:
            k = k * (symbol[start:stop, None] - symbol[None, :]) ** m
        out[start:stop] = k @ values
    return out.reshape(f.shape) * f.cell_volume


def _hilbert_kernel(diff: np.ndarray) -> np.ndarray:
    return 1.0 / (np.pi * diff[..., 0])


def _rough_kernel(omega: Omega) -> Callable[[np.ndarray], np.ndarray]:
    def kernel(diff: np.ndarray) -> np.ndarray:
        r2 = diff[..., 0] ** 2 + diff[..., 1] ** 2
        r = np.sqrt(r2)
        return omega(diff[..., 0] / r, diff[..., 1] / r) / r2
    return kernel


def hilbert_transform(f: GridFunction) -> GridFunction:
    """Hf(x_i) = (h/pi) sum_{j != i} f(x_j) / (x_i - x_j)."""
    if f.dim != 1:
        raise GridMismatchError("the Hilbert transform needs a 1-d grid, got dimension %d" % f.dim)
    return f.with_values(_kernel_quadrature(f, _hilbert_kernel))


def rough_homogeneous(f: GridFunction, omega: Union[str, Omega] = "sign1") -> GridFunction:
    """T_Omega f(x) = p.v. int f(x - y) Omega(y/|y|) / |y|^2 dy in 2D."""
    if f.dim != 2:
        raise GridMismatchError("rough homogeneous operators need a 2-d grid, got dimension %d" % f.dim)
    return f.with_values(_kernel_quadrature(f, _rough_kernel(check_omega(omega))))


# ----- bilinear model -----

def _bilinear_matrix(x: float, points: np.ndarray) -> np.ndarray:
    """K(x, y1, y2) = sgn(x - y1) sgn(x - y2) / (|x - y1| + |x - y2|)^2."""
    d = x - points
    a = np.abs(d)
    with np.errstate(divide="ignore", invalid="ignore"):
        k = np.sign(d)[:, None] * np.sign(d)[None, :] / (a[:, None] + a[None, :]) ** 2
    k[~np.isfinite(k)] = 0.0
    return k


def multilinear_commutator(
    fs: Sequence[GridFunction],
    bs: Sequence[GridFunction] = (),
    positions: Sequence[int] = (),
) -> GridFunction:
    """
    T_{b,I}(f1, f2)(x) = sum over y1, y2 off the diagonal cell of
    prod_{s in I} (b_s(x) - b_s(y_s)) K(x, y1, y2) f1(y1) f2(y2) h^2.
    bs[t] is the symbol of argument positions[t].
    """
    if len(fs) != 2:
        raise ValueError("the bilinear model takes two functions, got %d" % len(fs))
    if len(bs) != len(positions):
        raise ValueError("need one symbol per commutator position")
    if any(p not in (0, 1) for p in positions) or len(set(positions)) != len(positions):
        raise ValueError("commutator positions must be distinct entries of {0, 1}, got %s" % (list(positions),))
    f1, f2 = fs
    if f1.dim != 1:
        raise GridMismatchError("the bilinear model needs a 1-d grid")
    f1.check_same_grid(f2)
    for b in bs:
        f1.check_same_grid(b)
    points = f1.axes()[0]
    symbols = {p: b.values for p, b in zip(positions, bs)}
    out = np.empty(f1.size)
    for i, x in enumerate(points):
        u = []
        for position, f in enumerate((f1, f2)):
            weight = f.values.copy()
            if position in symbols:
                weight = weight * (symbols[position][i] - symbols[position])
            weight[i] = 0.0
            u.append(weight)
        out[i] = u[0] @ _bilinear_matrix(x, points) @ u[1]
    return f1.with_values(out * f1.spacing ** 2)


def bilinear_operator(f1: GridFunction, f2: GridFunction) -> GridFunction:
    return multilinear_commutator((f1, f2))


# ----- descriptors -----

@dataclass(frozen=True)
class OperatorDescriptor:
    """Operator selection with a uniform apply(); scale multiplies the output."""

    tag: str
    omega: str = "sign1"
    scale: float = 1.0
    family: CubeFamilySpec = DEFAULT_FAMILY
    families: Tuple[SparseFamily, ...] = ()
    r: float = 1.0

    def __post_init__(self):
        if self.tag not in TAGS:
            raise ValueError("unknown operator %r (expected one of %s)" % (self.tag, ", ".join(TAGS)))
        if self.tag == ROUGH:
            check_omega(self.omega)
        if self.tag == SPARSE and not self.families:
            raise ValueError("sparse realization needs at least one family")

    @classmethod
    def hilbert(cls) -> "OperatorDescriptor":
        return cls(HILBERT)

    @classmethod
    def rough(cls, omega: str = "sign1") -> "OperatorDescriptor":
        return cls(ROUGH, omega=omega)

    @classmethod
    def bilinear(cls) -> "OperatorDescriptor":
        return cls(BILINEAR)

    @classmethod
    def multilinear_maximal(cls, family: CubeFamilySpec = DEFAULT_FAMILY) -> "OperatorDescriptor":
        return cls(MULTILINEAR_MAXIMAL, family=family)

    @classmethod
    def sparse(cls, families: Sequence[SparseFamily], r: float = 1.0) -> "OperatorDescriptor":
        return cls(SPARSE, families=tuple(families), r=r)

    @classmethod
    def identity(cls) -> "OperatorDescriptor":
        return cls(IDENTITY)

    def scaled(self, c: float) -> "OperatorDescriptor":
        return replace(self, scale=self.scale * c)

    @property
    def kernel_form(self) -> bool:
        return self.tag in (HILBERT, ROUGH)

    @property
    def label(self) -> str:
        base = "%s[%s]" % (self.tag, self.omega) if self.tag == ROUGH else self.tag
        return base if self.scale == 1.0 else "%g*%s" % (self.scale, base)

    def apply(self, f: Union[GridFunction, Sequence[GridFunction]]) -> GridFunction:
        """Tf on the same grid; BILINEAR and MULTILINEAR_MAXIMAL take a sequence of functions."""
        if self.tag == HILBERT:
            out = hilbert_transform(f)
        elif self.tag == ROUGH:
            out = rough_homogeneous(f, self.omega)
        elif self.tag == BILINEAR:
            out = multilinear_commutator(tuple(f))
        elif self.tag == MULTILINEAR_MAXIMAL:
            out = multilinear_maximal(tuple(f) if not isinstance(f, GridFunction) else (f,), self.family)
        elif self.tag == SPARSE:
            out = f.zeros()
            for family in self.families:
                out = out + sparse_operator(f, family, self.r)
        else:
            out = f
        return out if self.scale == 1.0 else out * self.scale

    def __call__(self, f):
        return self.apply(f)

    def commutator(self, b: GridFunction, m: int, f: GridFunction) -> GridFunction:
        return commutator_iterated(self, b, m, f)


def commutator_iterated(T: OperatorDescriptor, b: GridFunction, m: int, f: GridFunction) -> GridFunction:
    """T_b^m f(x) = T((b(x) - b(.))^m f)(x), kernel terms weighted by (b(x_i) - b(x_j))^m."""
    if m < 1:
        raise ValueError("commutator order must be >= 1, got %d" % m)
    if not T.kernel_form:
        raise ValueError("operator %s has no kernel form" % T.label)
    if T.tag == HILBERT:
        if f.dim != 1:
            raise GridMismatchError("the Hilbert transform needs a 1-d grid, got dimension %d" % f.dim)
        values = _kernel_quadrature(f, _hilbert_kernel, b, m)
    else:
        if f.dim != 2:
            raise GridMismatchError("rough homogeneous operators need a 2-d grid, got dimension %d" % f.dim)
        values = _kernel_quadrature(f, _rough_kernel(check_omega(T.omega)), b, m)
    return f.with_values(values * T.scale)
