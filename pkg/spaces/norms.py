"""
Norm evaluators behind SpaceDescriptor: Lebesgue, Lorentz, Luxemburg gauges for
variable exponents and Young functions, closed-form chi_B norms and the
exponent diagnostics (harmonic means p_B, log-Hoelder constants).
"""
import logging
import math
from dataclasses import replace
from typing import Callable, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy import optimize, special

from config.settings import LOG_HOLDER_MAX_CELLS, LUXEMBURG_MAX_ITER, LUXEMBURG_RTOL
from grid.core import Ball, Cube, DegenerateCubeError, GridFunction, region_mask, stable_mean
from lorentz.rearrangement import lorentz_norm
from spaces.descriptors import (
    LEBESGUE,
    LORENTZ,
    ORLICZ,
    VARIABLE,
    SpaceDescriptor,
    YoungFunction,
)

logger = logging.getLogger(__name__)


class ConvergenceError(RuntimeError):
    """Raised when a Luxemburg bisection fails to bracket or converge."""


class ChiBallNorm(NamedTuple):
    value: float
    equivalent: bool  # True when value is only equivalent to the norm (variable exponents)


def unit_ball_volume(n: int) -> float:
    """v_n = pi^{n/2} / Gamma(n/2 + 1)."""
    return math.pi ** (n / 2.0) / float(special.gamma(n / 2.0 + 1.0))


# ----- Luxemburg gauge -----

def luxemburg_gauge(rho: Callable[[float], float], seed: float) -> float:
    """
    inf{lam > 0 : rho(lam) <= 1} for a nonincreasing rho with rho -> inf at 0+.

    The upper seed is doubled until rho <= 1, the lower seed halved until rho > 1,
    then scipy's bisection narrows the bracket to relative width LUXEMBURG_RTOL.
    """
    hi = seed if seed > 0 else 1.0
    for _ in range(LUXEMBURG_MAX_ITER):
        if rho(hi) <= 1.0:
            break
        hi *= 2.0
    else:
        raise ConvergenceError("could not find upper Luxemburg bracket from seed %g" % seed)
    lo = hi
    for _ in range(LUXEMBURG_MAX_ITER):
        if rho(lo) > 1.0:
            break
        lo /= 2.0
    else:
        raise ConvergenceError("could not find lower Luxemburg bracket from seed %g" % seed)
    try:
        return float(
            optimize.bisect(
                lambda lam: rho(lam) - 1.0,
                lo,
                hi,
                xtol=lo * LUXEMBURG_RTOL * 1e-3,
                rtol=LUXEMBURG_RTOL,
                maxiter=LUXEMBURG_MAX_ITER,
            )
        )
    except RuntimeError as e:
        raise ConvergenceError("Luxemburg bisection did not converge: %s" % e) from e


def _exponent_parts(f: GridFunction, p: GridFunction):
    f.check_same_grid(p)
    exps = p.values.ravel()
    if np.any(np.isnan(exps)) or np.any(exps < 1):
        raise ValueError("exponent values must lie in [1, inf]")
    finite = np.isfinite(exps)
    magnitudes = np.abs(f.values.ravel())
    return magnitudes[finite], exps[finite], magnitudes[~finite]


def _modular_from_parts(finite_vals, finite_exps, inf_vals, cell_volume: float, scale: float = 1.0) -> float:
    with np.errstate(over="ignore"):
        integral = math.fsum((finite_vals / scale) ** finite_exps) * cell_volume
    sup = float(np.max(inf_vals)) / scale if inf_vals.size else 0.0
    return integral + sup


def modular(f: GridFunction, p: GridFunction) -> float:
    """rho_p(f) = int_{p<inf} |f|^{p(x)} dx + ess-sup over {p = inf}."""
    finite_vals, finite_exps, inf_vals = _exponent_parts(f, p)
    return _modular_from_parts(finite_vals, finite_exps, inf_vals, f.cell_volume)


def luxemburg_norm(f: GridFunction, p: GridFunction) -> float:
    """||f||_{L^{p(.)}} = inf{lam > 0 : rho_p(f / lam) <= 1}."""
    if f.is_zero():
        return 0.0
    finite_vals, finite_exps, inf_vals = _exponent_parts(f, p)
    cell_volume = f.cell_volume
    return luxemburg_gauge(
        lambda lam: _modular_from_parts(finite_vals, finite_exps, inf_vals, cell_volume, lam),
        f.max_abs(),
    )


def orlicz_average_norm(values: np.ndarray, count: int, phi: YoungFunction) -> float:
    """
    Localized Luxemburg norm inf{lam : (1/count) sum Phi(|v| / lam) <= 1}.

    Cells of the cube missing from values (count > len(values)) are zeros.
    """
    magnitudes = np.abs(np.asarray(values, dtype=float)).ravel()
    if count < 1:
        raise ValueError("average over an empty cube")
    if not np.any(magnitudes):
        return 0.0
    return luxemburg_gauge(
        lambda lam: math.fsum(phi(magnitudes / lam)) / count,
        float(magnitudes.max()),
    )


def orlicz_local_norm(f: GridFunction, cube: Cube, phi: YoungFunction) -> float:
    """||f||_{Phi,Q} over the rasterized cube."""
    mask = region_mask(f, cube)
    count = int(np.count_nonzero(mask))
    if count == 0:
        raise DegenerateCubeError("degenerate cube: %s covers no cell" % (cube,))
    return orlicz_average_norm(f.values[mask], count, phi)


# ----- space norms -----

def _lebesgue_norm(f: GridFunction, p: float, weight: Optional[GridFunction]) -> float:
    magnitudes = np.abs(f.values).ravel()
    w = None
    if weight is not None:
        f.check_same_grid(weight)
        w = weight.values.ravel()
    if math.isinf(p):
        if w is not None:
            magnitudes = magnitudes[w > 0]
        return float(magnitudes.max()) if magnitudes.size else 0.0
    top = float(magnitudes.max())
    if top == 0:
        return 0.0
    powered = (magnitudes / top) ** p
    if w is not None:
        powered = powered * w
    return top * (math.fsum(powered) * f.cell_volume) ** (1.0 / p)


def _orlicz_global_norm(f: GridFunction, phi: YoungFunction, weight: Optional[GridFunction]) -> float:
    magnitudes = np.abs(f.values).ravel()
    w = np.ones_like(magnitudes)
    if weight is not None:
        f.check_same_grid(weight)
        w = weight.values.ravel()
    cell_volume = f.cell_volume
    return luxemburg_gauge(
        lambda lam: math.fsum(phi(magnitudes / lam) * w) * cell_volume,
        float(magnitudes.max()),
    )


def space_norm(f: GridFunction, X: SpaceDescriptor) -> float:
    """||f||_X for any descriptor kind."""
    if X.power != 1.0:
        base = replace(X, power=1.0)
        return space_norm(abs(f) ** X.power, base) ** (1.0 / X.power)
    if f.is_zero():
        return 0.0
    if X.kind == LEBESGUE:
        return _lebesgue_norm(f, X.p, X.weight)
    if X.kind == LORENTZ:
        return lorentz_norm(f, X.p, X.q, X.weight)
    if X.kind == VARIABLE:
        return luxemburg_norm(f, X.exponent)
    if X.kind == ORLICZ:
        return _orlicz_global_norm(f, X.young, X.weight)
    raise ValueError("unknown space kind %r" % X.kind)


# ----- exponent diagnostics -----

def harmonic_mean_exponent(p: GridFunction, ball: Ball) -> float:
    """p_B with 1/p_B = average of 1/p(x) over the rasterized ball (containing cell if none)."""
    mask = region_mask(p, ball)
    if not np.any(mask):
        cell = p.cell_of(ball.center)
        if cell is None:
            raise ValueError("ball %s misses the exponent grid" % (ball,))
        mask[cell] = True
    inv = _inverse(p.values[mask])
    mean = stable_mean(inv)
    return math.inf if mean == 0 else 1.0 / mean


def harmonic_product_defect(ps: Sequence[GridFunction], ball: Ball) -> float:
    """|1/p_B - sum_i 1/p_{i,B}| where 1/p(.) = sum_i 1/p_i(.)."""
    inv_total = sum(_inverse(p_i.values) for p_i in ps)
    with np.errstate(divide="ignore"):
        combined = ps[0].with_values(np.where(inv_total == 0, np.inf, 1.0 / inv_total))
    lhs = _inverse_scalar(harmonic_mean_exponent(combined, ball))
    rhs = math.fsum(_inverse_scalar(harmonic_mean_exponent(p_i, ball)) for p_i in ps)
    return abs(lhs - rhs)


def _inverse(values: np.ndarray) -> np.ndarray:
    return np.where(np.isinf(values), 0.0, 1.0 / np.where(np.isinf(values), 1.0, values))


def _inverse_scalar(x: float) -> float:
    return 0.0 if math.isinf(x) else 1.0 / x


def chi_ball_norm(
    X: SpaceDescriptor,
    center: Sequence[float],
    radius: float,
    grid: Optional[GridFunction] = None,
) -> ChiBallNorm:
    """
    ||chi_{B(x,r)}||_X.

    Lorentz: (p/q)^{1/q} v_n^{1/p} r^{n/p}, with or without a grid. Variable
    exponent: |B|^{1/p_B}, flagged as equivalent.

    Lebesgue and Orlicz without a grid (and unweighted) return the closed form for
    |B| = v_n r^n, e.g. v_n^{1/p} r^{n/p} for L^p, not space_norm of a rasterized
    indicator. Pass a grid to get space_norm of the rasterized chi_B instead;
    weighted spaces always rasterize on the weight's grid.
    """
    if not radius > 0:
        raise ValueError("radius must be positive")
    n = len(center)
    measure = unit_ball_volume(n) * radius ** n
    s = X.power
    base = replace(X, power=1.0)
    if base.kind == VARIABLE:
        p_b = harmonic_mean_exponent(base.exponent, Ball(tuple(center), radius))
        value = 1.0 if math.isinf(p_b) else measure ** (1.0 / p_b)
        return ChiBallNorm(value ** (1.0 / s), True)
    if base.weight is not None or (grid is not None and base.kind != LORENTZ):
        template = grid if grid is not None else base.weight
        chi = template.with_values(region_mask(template, Ball(tuple(center), radius)).astype(float))
        return ChiBallNorm(space_norm(chi, base) ** (1.0 / s), False)
    if base.kind == LORENTZ:
        p, q = base.p, base.q
        if math.isinf(p):
            value = 1.0
        elif math.isinf(q):
            value = measure ** (1.0 / p)
        else:
            value = (p / q) ** (1.0 / q) * measure ** (1.0 / p)
        return ChiBallNorm(value ** (1.0 / s), False)
    if base.kind == LEBESGUE:
        value = 1.0 if math.isinf(base.p) else measure ** (1.0 / base.p)
        return ChiBallNorm(value ** (1.0 / s), False)
    phi = base.young
    value = luxemburg_gauge(lambda lam: float(phi(1.0 / lam)) * measure, 1.0)
    return ChiBallNorm(value ** (1.0 / s), False)


def log_holder_constant(p: GridFunction) -> Tuple[float, float, float]:
    """
    (C1, C2, p_inf) for alpha = 1/p:
    C1 = max |alpha(x) - alpha(y)| log(e + 1/|x - y|) over cell pairs,
    C2 = max |alpha(x) - alpha_inf| log(e + |x|), alpha_inf = average of alpha on boundary cells.
    Grids above LOG_HOLDER_MAX_CELLS cells are thinned by a uniform stride first.
    """
    alpha_grid = _inverse(p.values)
    centers = p.centers()
    stride = 1
    while np.prod([math.ceil(n / stride) for n in p.shape]) > LOG_HOLDER_MAX_CELLS:
        stride *= 2
    index = tuple(slice(None, None, stride) for _ in p.shape)
    alpha = alpha_grid[index].ravel()
    points = centers[index].reshape(-1, p.dim)
    if stride > 1:
        logger.debug("log-Hoelder scan thinned by stride %d to %d cells", stride, alpha.size)

    c1 = 0.0
    for start in range(0, alpha.size, 256):
        block = slice(start, start + 256)
        diff = np.abs(alpha[block, None] - alpha[None, :])
        dist = np.sqrt(((points[block, None, :] - points[None, :, :]) ** 2).sum(axis=-1))
        with np.errstate(divide="ignore"):
            weight = np.log(np.e + 1.0 / dist)
        weight[dist == 0] = 0.0
        c1 = max(c1, float(np.max(diff * weight)))

    boundary = np.zeros(p.shape, dtype=bool)
    for axis in range(p.dim):
        edge = [slice(None)] * p.dim
        edge[axis] = 0
        boundary[tuple(edge)] = True
        edge[axis] = -1
        boundary[tuple(edge)] = True
    alpha_inf = stable_mean(alpha_grid[boundary])
    p_inf = math.inf if alpha_inf == 0 else 1.0 / alpha_inf
    radius = np.sqrt((centers ** 2).sum(axis=-1))
    c2 = float(np.max(np.abs(alpha_grid - alpha_inf) * np.log(np.e + radius)))
    return c1, c2, p_inf
