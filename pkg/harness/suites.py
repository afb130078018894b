"""
Verification suites: one function per inequality family, each recording check
rows into a Report.

Exact inequalities are hard rows. Fitted-constant studies record soft per-sample
rows and fail only when the fitted constant drifts by more than STABILITY_LIMIT
between the grid and its refinement.
"""
import itertools
import json
import logging
import math
import zlib
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Any, Callable, Dict, List, NamedTuple, Optional, Sequence, Union

import numpy as np

from config.settings import (
    CHI_BALL_RTOL,
    DEFAULT_CELLS,
    DEFAULT_CORPUS_SIZE,
    DEFAULT_DIM,
    DEFAULT_EXTENT,
    DEFAULT_SAMPLES,
    EXACT_RTOL,
    MAXIMAL_RTOL,
    ORACLE_RTOL,
    REPORT_FORMAT,
    ROUGH_CELLS,
    STABILITY_LIMIT,
    VERIFY_SEED,
)
from grid.core import Ball, GridFunction, indicator, make_grid
from harness.corpus import BMO_LOG, POWER_WEIGHT, RANDOM_SIGN, SMOOTH_BUMP, STEP, generate_corpus, mixed_corpus
from harness.report import FORMATS, Report, digest, environment_stamp
from lorentz.rearrangement import lorentz_holder_bound, lorentz_norm, weak_strong_constant
from maximal.families import CubeFamilySpec, family_cubes
from maximal.operators import hl_maximal, weak_type_ratio
from maximal.rubio import operator_norm_estimate, rubio_de_francia
from operators.checks import john_nirenberg_check
from operators.kernels import OperatorDescriptor, commutator_iterated
from spaces.descriptors import LEBESGUE, LORENTZ, SpaceDescriptor, YoungFunction
from spaces.morrey import BallFamily, MorreyWeight, morrey_norm, wx_alpha_check, wx_delta_check
from spaces.norms import chi_ball_norm, harmonic_product_defect, luxemburg_norm, space_norm
from sparse.family import (
    SparseFamily,
    build_lattice_families,
    build_sparse_from_stopping,
    carleson_bound,
    carleson_sum,
    verify_sparseness,
)
from sparse.forms import bilinear_sparse_form, hyp1_rhs, sparse_operator
from sparse.lattice import DyadicLattice, shifted_lattices
from weights.muckenhoupt import Weight, ainfty_constant, ap_constant, weak_norm_estimate

logger = logging.getLogger(__name__)

ETA = 0.5
CHI_BALL_PAIRS = ((2.0, 1.0), (2.0, 2.0), (3.0, 2.0), (2.0, math.inf))
WX_PAIRS = ((2.0, 1.0), (3.0, 2.0), (4.0, 1.0), (4.0, 3.0))
WX_FACTORS = (0.25, 0.5, 0.9, 1.25, 2.0)   # lam/n as a multiple of q/p
WX_DELTA_CASES = ((LEBESGUE, 4.0, 4.0, 0.5), (LEBESGUE, 3.0, 3.0, 1.0), (LEBESGUE, 2.0, 2.0, 0.75), (LORENTZ, 4.0, 2.0, 0.5))
INCLUSION_CASES = ((2.0, 1.5, 0.5), (3.0, 2.0, 0.25), (4.0, 3.0, 0.5))
JN_ALPHAS = tuple(range(1, 9))
HARMONIC_ATOL = 1e-12
ORACLE_MAX_CELLS = 64
BUCKLEY_CUBES = 15


# ----- configuration -----

@dataclass(frozen=True)
class SuiteConfig:
    suite: str
    dim: int = DEFAULT_DIM
    cells: int = DEFAULT_CELLS
    extent: float = DEFAULT_EXTENT
    seed: int = VERIFY_SEED
    corpus_size: int = DEFAULT_CORPUS_SIZE
    samples: int = DEFAULT_SAMPLES
    tolerance: float = EXACT_RTOL
    space: Optional[Dict[str, Any]] = None   # SpaceDescriptor payload; L^2 when absent
    out: Optional[str] = None
    format: str = REPORT_FORMAT

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ValueError("dim must be 1 or 2, got %r" % self.dim)
        if self.cells < 4:
            raise ValueError("cells must be >= 4, got %r" % self.cells)
        if not self.extent > 0:
            raise ValueError("extent must be positive, got %r" % self.extent)
        if self.corpus_size < 1 or self.samples < 1:
            raise ValueError("corpus size and samples must be >= 1")
        if self.tolerance < 0:
            raise ValueError("tolerance must be >= 0, got %r" % self.tolerance)
        if self.format not in FORMATS:
            raise ValueError("unknown report format %r" % self.format)

    @classmethod
    def from_file(cls, path: Union[str, Path], **overrides) -> "SuiteConfig":
        """JSON config; absent fields fall back to settings, overrides win over the file."""
        try:
            raw = json.loads(Path(path).read_text())
        except json.JSONDecodeError as e:
            raise ValueError("config %s is not valid JSON: %s" % (path, e)) from e
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(raw) - known)
        if unknown:
            raise ValueError("unknown config fields: %s" % ", ".join(unknown))
        raw.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**raw)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    def digest(self) -> str:
        """Digest of everything that changes the checks (not the output location)."""
        payload = {k: v for k, v in self.to_dict().items() if k not in ("out", "format")}
        return digest(payload)

    def grid(self, dim: Optional[int] = None, cells: Optional[int] = None) -> GridFunction:
        return make_grid(dim or self.dim, cells or self.cells, self.extent)

    def descriptor(self) -> SpaceDescriptor:
        return SpaceDescriptor.from_dict(self.space) if self.space else SpaceDescriptor.lebesgue(2.0)

    def stream(self, tag: str, index: int) -> np.random.Generator:
        """Random stream for sample `index` of a suite."""
        return np.random.default_rng([int(self.seed), zlib.crc32(tag.encode()), int(index)])


class Suite(NamedTuple):
    name: str
    description: str
    run: Callable[[SuiteConfig, Report], None]


SUITES: Dict[str, Suite] = {}


def suite(name: str, description: str):
    def register(fn):
        SUITES[name] = Suite(name, description, fn)
        return fn
    return register


def run_suite(config: SuiteConfig) -> Report:
    if config.suite not in SUITES:
        raise ValueError("unknown suite %r (expected one of %s)" % (config.suite, ", ".join(sorted(SUITES))))
    report = Report(config.suite, int(config.seed), config.digest(), environment_stamp())
    logger.info("Running suite %s (seed %d, %s cells, dim %d)...", config.suite, config.seed, config.cells, config.dim)
    SUITES[config.suite].run(config, report)
    logger.info(
        "Suite %s finished: %d checks, %d violations, %d hard failures",
        config.suite, len(report.checks), len(report.violations), len(report.hard_failures),
    )
    return report


# ----- helpers -----

def _within(lhs: float, rhs: float, rtol: float) -> bool:
    if math.isinf(rhs):
        return True
    return lhs <= rhs + rtol * abs(rhs)


def _max_ratio(num, den) -> float:
    """max num/den where den > 0; inf if num is nonzero where den vanishes."""
    num = np.abs(np.asarray(num, dtype=float))
    den = np.asarray(den, dtype=float)
    positive = den > 0
    if np.any(num[~positive] > 0):
        return math.inf
    if not positive.any():
        return 0.0
    return float(np.max(num[positive] / den[positive]))


def _fmt(x: float) -> str:
    return "inf" if math.isinf(x) else "%g" % x


def _check_id(name: str, index: int, detail: str = "") -> str:
    return "%s/%05d%s" % (name, index, "/" + detail if detail else "")


def _refinement(config: SuiteConfig, dim: Optional[int] = None, cells: Optional[int] = None) -> List[GridFunction]:
    """The grid and its halving refinement."""
    base = cells or config.cells
    return [config.grid(dim, base), config.grid(dim, 2 * base)]


def _record_drift(report: Report, name: str, constants: Sequence[float], stability: float) -> None:
    """Hard row on refinement drift, soft row on corpus spread."""
    finite = [c for c in constants if math.isfinite(c) and c > 0]
    drift = max(finite) / min(finite) if len(finite) == len(constants) else math.inf
    report.record(name + "/refinement", digest(list(constants)), drift, STABILITY_LIMIT, drift <= STABILITY_LIMIT, constant=max(constants))
    report.record(name + "/stability", digest(stability), stability, STABILITY_LIMIT, stability <= STABILITY_LIMIT, hard=False)


def _embedding_constant(p: float, a: float, b: float) -> float:
    """(a/p)^{1/a - 1/b}: ||f||_{p,b} <= this * ||f||_{p,a} for a < b."""
    if math.isinf(b):
        return weak_strong_constant(p, a)
    return weak_strong_constant(p, a) ** (1.0 - a / b)


def _sum_sparse(f: GridFunction, families: Sequence[SparseFamily]) -> GridFunction:
    out = f.zeros()
    for family in families:
        out = out + sparse_operator(f, family)
    return out


def _bound_exponent(p: float, l: int) -> Dict[str, float]:
    return {"p": p, "l": l, "exponent": p * l + max(2.0, p)}


# ----- Lorentz spaces -----

@suite("chi-ball-closed-form", "rasterized chi_B Lorentz norms against (p/q)^{1/q} v_n^{1/p} r^{n/p}")
def chi_ball_closed_form(config: SuiteConfig, report: Report) -> None:
    grid = config.grid()
    center = (0.0,) * grid.dim
    radii = (config.extent / 8.0, config.extent / 4.0, 3.0 * config.extent / 8.0)
    errors = []
    index = 0
    for p, q in CHI_BALL_PAIRS:
        X = SpaceDescriptor.lorentz(p, q)
        for r in radii:
            chi = indicator(grid, Ball(center, r))
            lhs = lorentz_norm(chi, p, q)
            rhs = chi_ball_norm(X, center, r).value
            error = abs(lhs - rhs) / rhs
            errors.append(error)
            report.record(
                _check_id("chi-ball", index, "p=%s,q=%s,r=%g" % (_fmt(p), _fmt(q), r)),
                digest(p, _fmt(q), r, list(grid.shape)), lhs, rhs, error <= CHI_BALL_RTOL, constant=error,
            )
            index += 1
    report.metadata["max_relative_error"] = max(errors)
    report.metadata["spacing"] = grid.spacing


@suite("lorentz-holder", "Hoelder inequality in Lorentz spaces, all three constant regimes")
def lorentz_holder(config: SuiteConfig, report: Report) -> None:
    grid = config.grid(dim=1)
    kinds = (STEP, RANDOM_SIGN, SMOOTH_BUMP)
    regimes = ("finite-q", "infinite-q", "infinite-p")
    for i in range(config.samples):
        rng = config.stream("lorentz-holder", i)
        m = 2 + i % 2
        regime = regimes[(i // 2) % 3]
        fs = [generate_corpus(kinds[(i + j) % 3], 1, int(rng.integers(2 ** 32)), grid)[0] for j in range(m)]
        norms = []
        for f in fs:
            if regime == "infinite-p":
                p_i = q_i = math.inf
            else:
                p_i = float(rng.uniform(1.1, 6.0))
                q_i = float(rng.uniform(0.5, 8.0)) if regime == "finite-q" else math.inf
            norms.append((lorentz_norm(f, p_i, q_i), p_i, q_i))
        p, q, rhs = lorentz_holder_bound(norms)
        product = fs[0]
        for f in fs[1:]:
            product = product * f
        lhs = lorentz_norm(product, p, q)
        report.record(
            _check_id("lorentz-holder", i, "%s/m=%d" % (regime, m)),
            digest(*fs, [[_fmt(a), _fmt(b)] for _, a, b in norms]),
            lhs, rhs, _within(lhs, rhs, config.tolerance),
        )


@suite("lorentz-weak-strong", "||f||_{p,inf} <= (q/p)^{1/q} ||f||_{p,q} for q <= p")
def lorentz_weak_strong(config: SuiteConfig, report: Report) -> None:
    grid = config.grid()
    kinds = (STEP, RANDOM_SIGN, SMOOTH_BUMP)
    for i in range(config.samples):
        rng = config.stream("lorentz-weak-strong", i)
        f = generate_corpus(kinds[i % 3], 1, int(rng.integers(2 ** 32)), grid)[0]
        p = float(rng.uniform(1.1, 6.0))
        q = float(rng.uniform(0.5, p))
        lhs = lorentz_norm(f, p, math.inf)
        constant = weak_strong_constant(p, q)
        rhs = constant * lorentz_norm(f, p, q)
        report.record(_check_id("weak-strong", i), digest(f, p, q), lhs, rhs, _within(lhs, rhs, config.tolerance), constant=constant)


@suite("lorentz-inclusion", "ball-wise Lorentz embeddings lifted to Morrey-Lorentz norms")
def lorentz_inclusion(config: SuiteConfig, report: Report) -> None:
    grid = config.grid()
    balls = BallFamily.dyadic(grid, center_stride=max(1, config.cells // 16))
    corpus = mixed_corpus((STEP, SMOOTH_BUMP), config.corpus_size, config.seed, grid)
    index = 0
    for f in corpus:
        for p, q, lam in INCLUSION_CASES:
            u = MorreyWeight.power_radius(lam, q)
            n1 = morrey_norm(f, SpaceDescriptor.lorentz(p, 1.0), u, balls).value
            nq = morrey_norm(f, SpaceDescriptor.lorentz(p, q), u, balls).value
            ninf = morrey_norm(f, SpaceDescriptor.lorentz(p, math.inf), u, balls).value
            for label, lhs, c, norm in (
                ("1-to-q", nq, _embedding_constant(p, 1.0, q), n1),
                ("q-to-inf", ninf, _embedding_constant(p, q, math.inf), nq),
            ):
                rhs = c * norm
                report.record(
                    _check_id("inclusion", index, "p=%g,q=%g,lam=%g/%s" % (p, q, lam, label)),
                    digest(f, p, q, lam), lhs, rhs, _within(lhs, rhs, config.tolerance), constant=c,
                )
            index += 1


# ----- spaces -----

@suite("variable-exponent", "constant-exponent Luxemburg norms and the two-branch cubic oracle")
def variable_exponent(config: SuiteConfig, report: Report) -> None:
    grid = config.grid()
    corpus = mixed_corpus((STEP, SMOOTH_BUMP, RANDOM_SIGN), config.corpus_size, config.seed, grid)
    index = 0
    for p in (1.5, 2.0, 3.0):
        exponent = grid.with_values(np.full(grid.shape, p))
        for f in corpus:
            lhs = luxemburg_norm(f, exponent)
            rhs = space_norm(f, SpaceDescriptor.lebesgue(p))
            report.record(_check_id("constant-exponent", index, "p=%g" % p), digest(f, p), lhs, rhs, abs(lhs - rhs) <= 1e-10 * rhs)
            index += 1

    # chi_[-1,1] with p = 2 on x < 0 and 3 on x >= 0: lam^-2 + lam^-3 = 1, i.e. lam^3 = lam + 1
    line = make_grid(1, config.cells, 4.0)
    f = line.sample(lambda x: (np.abs(x) < 1.0).astype(float))
    exponent = line.sample(lambda x: np.where(x < 0, 2.0, 3.0))
    roots = np.roots([1.0, 0.0, -1.0, -1.0])
    oracle = float(max(r.real for r in roots if abs(r.imag) < 1e-12))
    value = luxemburg_norm(f, exponent)
    report.record("two-branch/00000", digest(f, exponent), value, oracle, abs(value - oracle) <= 1e-9, constant=abs(value - oracle))
    report.metadata["cubic_oracle"] = oracle

    # ||f1 f2||_{p(.)} <= C ||f1||_{p1(.)} ||f2||_{p2(.)} with 1/p = 1/p1 + 1/p2 and C <= 2
    constants = []
    stability = 1.0
    for grid in _refinement(config):
        n = config.corpus_size
        profiles = generate_corpus(SMOOTH_BUMP, 2 * n, config.seed, grid)
        exponents = [g.with_values(2.0 + 4.0 * np.abs(g.values) / g.max_abs()) for g in profiles]
        f1s = [1.0 + abs(g) for g in generate_corpus(STEP, n, config.seed, grid)]
        f2s = [1.0 + abs(g) for g in generate_corpus(RANDOM_SIGN, n, config.seed, grid)]
        ratios = []
        for i, (f1, f2) in enumerate(zip(f1s, f2s)):
            p1, p2 = exponents[i], exponents[n + i]
            p = p1.with_values(1.0 / (1.0 / p1.values + 1.0 / p2.values))
            lhs = luxemburg_norm(f1 * f2, p)
            rhs = luxemburg_norm(f1, p1) * luxemburg_norm(f2, p2)
            ratio = lhs / rhs
            ratios.append(ratio)
            report.record(
                _check_id("product-rule", i, "cells=%d" % grid.shape[0]), digest(f1, f2, p1, p2),
                lhs, 2.0 * rhs, _within(lhs, 2.0 * rhs, config.tolerance), constant=ratio,
            )
        fitted = report.fit("product-rule/cells=%d" % grid.shape[0], ratios)
        constants.append(fitted.constant)
        stability = max(stability, fitted.stability)
    _record_drift(report, "product-rule", constants, stability)


@suite("harmonic-mean-product", "1/p_B equals the sum of 1/p_{i,B} when 1/p = sum 1/p_i")
def harmonic_mean_product(config: SuiteConfig, report: Report) -> None:
    grid = config.grid()
    balls = BallFamily.dyadic(grid, center_stride=max(1, config.cells // 8))
    profiles = mixed_corpus((SMOOTH_BUMP, RANDOM_SIGN), config.corpus_size, config.seed, grid)
    exponents = [g.with_values(1.5 + 3.0 * np.abs(g.values) / g.max_abs()) for g in profiles]
    half = len(exponents) // 2
    for i, (p1, p2) in enumerate(zip(exponents[:half], exponents[half:])):
        worst = max(harmonic_product_defect([p1, p2], Ball(c, r)) for c, r in balls.balls())
        report.record(_check_id("harmonic-product", i), digest(p1, p2), worst, HARMONIC_ATOL, worst <= HARMONIC_ATOL)


@suite("wx-membership", "u = r^{lam/q} in W^0 for L^{p,q} exactly when lam/n < q/p")
def wx_membership(config: SuiteConfig, report: Report) -> None:
    n = config.dim
    samples = [((0.0,) * n, r) for r in (0.25, 1.0, 4.0)] + [((0.5,) * n, 0.5)]
    index = 0
    for p, q in WX_PAIRS:
        for factor in WX_FACTORS:
            lam = factor * n * q / p
            verdict = wx_alpha_check(MorreyWeight.power_radius(lam, q), SpaceDescriptor.lorentz(p, q), 0.0, samples)
            expected = factor < 1.0
            if expected:
                ok = verdict.passed
            else:
                ok = verdict.status == "fail" and verdict.reason == "divergent"
            report.record(
                _check_id("wx", index, "p=%g,q=%g,lam=%g/%s" % (p, q, lam, verdict.status)),
                digest(p, q, lam), lam / n, q / p, ok,
                constant=verdict.constant if verdict.constant is not None else math.inf,
            )
            index += 1


@suite("wx-delta-membership", "u = r^{lam/p} in W_{X,delta} for X = L^p or L^{p,q} exactly when lam < n (p delta - 1)")
def wx_delta_membership(config: SuiteConfig, report: Report) -> None:
    n = config.dim
    samples = [((0.0,) * n, r) for r in (0.25, 1.0, 4.0)] + [((0.5,) * n, 0.5)]
    index = 0
    for kind, p, q, delta in WX_DELTA_CASES:
        X = SpaceDescriptor.lebesgue(p) if kind == LEBESGUE else SpaceDescriptor.lorentz(p, q)
        # ||chi_B||_{(X^delta)'}^delta ~ r^{n (delta - 1/p)}
        threshold = n * (p * delta - 1.0)
        for factor in WX_FACTORS:
            lam = factor * threshold
            verdict = wx_delta_check(MorreyWeight.power_radius(lam, p), X, delta, samples)
            if factor < 1.0:
                ok = verdict.passed
            else:
                ok = verdict.status == "fail" and verdict.reason == "divergent"
            report.record(
                _check_id("wx-delta", index, "%s,delta=%g,lam=%g/%s" % (X.label(), delta, lam, verdict.status)),
                digest(kind, p, q, delta, lam), lam, threshold, ok,
                constant=verdict.constant if verdict.constant is not None else math.inf,
            )
            index += 1


@suite("holder-pairing", "int |fg| <= C ||f||_X ||g||_{X'} over Lebesgue, Lorentz, variable and Orlicz spaces")
def holder_pairing(config: SuiteConfig, report: Report) -> None:
    grid = config.grid()
    weight = generate_corpus(POWER_WEIGHT, 1, config.seed, grid)[0]
    bump = generate_corpus(SMOOTH_BUMP, 1, config.seed + 1, grid)[0]
    spaces = (
        SpaceDescriptor.lebesgue(2.0),
        SpaceDescriptor.lebesgue(3.0, weight=weight),
        SpaceDescriptor.lorentz(3.0, 2.0),
        SpaceDescriptor.lorentz(2.0, 1.0),
        SpaceDescriptor.variable(bump.with_values(1.5 + 2.5 * np.abs(bump.values) / bump.max_abs())),
        SpaceDescriptor.orlicz(YoungFunction.power(3.0)),
    )
    fs = mixed_corpus((STEP, SMOOTH_BUMP, RANDOM_SIGN), config.corpus_size, config.seed, grid)
    gs = mixed_corpus((RANDOM_SIGN, STEP, SMOOTH_BUMP), config.corpus_size, config.seed + 1, grid)
    index = 0
    for X in spaces:
        dual = X.associate()
        C = X.pairing_constant()
        for f, g in zip(fs, gs):
            lhs = math.fsum(np.abs(f.values * g.values).ravel()) * grid.cell_volume
            rhs = C * space_norm(f, X) * space_norm(g, dual)
            report.record(
                _check_id("holder-pairing", index, X.label()), digest(f, g, X.label()),
                lhs, rhs, _within(lhs, rhs, config.tolerance), constant=C,
            )
            index += 1


@suite("john-nirenberg", "level sets of bmo-log symbols on dyadic cubes decay as e|Q| exp(-a/(2^n e ||b||))")
def john_nirenberg(config: SuiteConfig, report: Report) -> None:
    grid = config.grid()
    base = DyadicLattice.standard(grid)
    cubes = [base.cube(key) for key in base.keys()]
    symbols = generate_corpus(BMO_LOG, config.corpus_size, config.seed, grid)
    for i, b in enumerate(symbols):
        result = john_nirenberg_check(b, cubes, JN_ALPHAS)
        report.record(_check_id("john-nirenberg", i, "family"), digest(b), result.violations, 0, result.violations == 0, constant=result.norm)
        report.record(
            _check_id("john-nirenberg", i, "wide"), digest(b), result.wide_violations, 0,
            result.wide_violations == 0, constant=result.wide_norm, hard=False,
        )


# ----- weights -----

def _brute_force_a2(w: np.ndarray) -> float:
    """sup over all intervals of <w><1/w> on a 1-d array, from prefix sums."""
    s = np.concatenate([[0.0], np.cumsum(w)])
    t = np.concatenate([[0.0], np.cumsum(1.0 / w)])
    n = w.size
    lengths = np.subtract.outer(np.arange(n + 1), np.arange(n + 1)).astype(float)
    upper = lengths > 0
    prod = np.subtract.outer(s, s)[upper] * np.subtract.outer(t, t)[upper] / lengths[upper] ** 2
    return float(np.max(prod))


@suite("weights", "A_p constants: constants, brute-force A_2 oracle and the Buckley lower bound")
def weights(config: SuiteConfig, report: Report) -> None:
    grid = config.grid(dim=1, cells=min(config.cells, ORACLE_MAX_CELLS))
    dense = CubeFamilySpec.dense()
    cubes = family_cubes(grid, dense)
    index = 0
    for c in (0.5, 1.0, 3.0):
        for p in (1.5, 2.0, 3.0):
            value = ap_constant(Weight(grid.with_values(np.full(grid.shape, c))), p, cubes)
            report.record(_check_id("ap-constant", index, "c=%g,p=%g" % (c, p)), digest(c, p), value, 1.0, value == 1.0)
            index += 1

    base = DyadicLattice.standard(grid)
    dyadic = [base.cube(key) for key in itertools.islice(base.keys(), BUCKLEY_CUBES)]
    relation = []
    for i, raw in enumerate(generate_corpus(POWER_WEIGHT, config.corpus_size, config.seed, grid)):
        w = Weight(raw)
        a2 = ap_constant(w, 2.0, cubes)
        oracle = _brute_force_a2(w.values.ravel())
        error = abs(a2 - oracle) / oracle
        report.record(_check_id("a2-oracle", i), digest(raw), a2, oracle, error <= ORACLE_RTOL, constant=error)
        for p in (2.0, 3.0):
            lower = ap_constant(w, p, dyadic) ** (1.0 / p)
            estimate = weak_norm_estimate(w, p, dyadic, dense)
            report.record(
                _check_id("buckley", i, "p=%g" % p), digest(raw, p), lower, estimate,
                _within(lower, estimate, MAXIMAL_RTOL),
            )
        relation.append(ainfty_constant(w, dyadic) / ap_constant(w, 2.0, dyadic))
    fitted = report.fit("ainfty-over-a2", relation)
    report.metadata["ainfty_over_a2"] = {"constant": fitted.constant, "stability": fitted.stability}


# ----- maximal operators -----

@suite("weak-11", "weak (1,1) ratios of the dense maximal function")
def weak_11(config: SuiteConfig, report: Report) -> None:
    dense = CubeFamilySpec.dense()
    constants = []
    stability = 1.0
    for grid in _refinement(config):
        corpus = mixed_corpus((STEP, SMOOTH_BUMP, RANDOM_SIGN), config.corpus_size, config.seed, grid)
        ratios = []
        for i, f in enumerate(corpus):
            ratio = weak_type_ratio(f, dense)
            ratios.append(ratio)
            # The uncentered maximal function on the line has weak (1,1) constant 2
            report.record(
                _check_id("weak-11", i, "cells=%d" % grid.shape[0]), digest(f), ratio, 2.0,
                _within(ratio, 2.0, MAXIMAL_RTOL), constant=ratio, hard=grid.dim == 1,
            )
        fitted = report.fit("weak-11/cells=%d" % grid.shape[0], ratios)
        constants.append(fitted.constant)
        stability = max(stability, fitted.stability)
    _record_drift(report, "weak-11", constants, stability)


@suite("rubio", "|h| <= R_K h and M(R_K h) <= 2 normEst (R_K h + tail)")
def rubio(config: SuiteConfig, report: Report) -> None:
    grid = config.grid()
    dense = CubeFamilySpec.dense()
    corpus = mixed_corpus((RANDOM_SIGN, STEP), config.corpus_size, config.seed, grid)
    estimate = operator_norm_estimate(lambda f: hl_maximal(f, dense), SpaceDescriptor.lebesgue(2.0), corpus)
    norm_estimate = max(estimate.value, 1.0)
    report.metadata["norm_estimate"] = norm_estimate
    for i, h in enumerate(corpus):
        for K in (0, 2, 4, 8):
            rubio_sum = rubio_de_francia(h, K, norm_estimate, dense)
            ratio = _max_ratio(abs(h).values, rubio_sum.value.values)
            report.record(_check_id("rubio", i, "K=%d/majorant" % K), digest(h, K), ratio, 1.0, _within(ratio, 1.0, config.tolerance))
            a1 = _max_ratio(hl_maximal(rubio_sum.value, dense).values, rubio_sum.a1_majorant().values)
            report.record(
                _check_id("rubio", i, "K=%d/a1" % K), digest(h, K), a1, 1.0,
                _within(a1, 1.0, MAXIMAL_RTOL), constant=rubio_sum.tail,
            )


# ----- sparse domination -----

@suite("sparseness", "stopping families pass the E_Q certificate at eta = 1/2")
def sparseness(config: SuiteConfig, report: Report) -> None:
    grid = config.grid()
    base = DyadicLattice.standard(grid)
    lattices = [base] + shifted_lattices(base)
    corpus = mixed_corpus((STEP, SMOOTH_BUMP, RANDOM_SIGN), config.corpus_size, config.seed, grid)
    for i, f in enumerate(corpus):
        for lattice in lattices:
            check_id = _check_id("sparseness", i, "lattice=%d" % lattice.shift_index)
            try:
                family = build_sparse_from_stopping(f, lattice, ETA)
            except ValueError as e:
                logger.warning("%s: %s", check_id, e)
                report.record(check_id, digest(f), 0.0, ETA, False)
                continue
            result = verify_sparseness(family)
            worst = min(result.free_cells.get(key, 0) / lattice.measure_cells(key) for key in family.cubes)
            report.record(check_id, digest(f), worst, ETA, result.ok and worst >= ETA, constant=len(family))


@suite("dyadic-domination", "M_DS f <= (2/eta) max_j T_{S_j} f over the 3^n shifted lattices")
def dyadic_domination(config: SuiteConfig, report: Report) -> None:
    grid = config.grid()
    base = DyadicLattice.standard(grid)
    bound = 2.0 / ETA
    corpus = mixed_corpus((STEP, SMOOTH_BUMP, RANDOM_SIGN), config.corpus_size, config.seed, grid)
    for i, f in enumerate(corpus):
        families = build_lattice_families(f, base, ETA)
        mf = hl_maximal(f, CubeFamilySpec.dyadic_shifted()).values
        dominant = np.max([sparse_operator(f, family).values for family in families], axis=0)
        ratio = _max_ratio(mf, dominant)
        report.record(_check_id("dyadic-domination", i), digest(f), ratio, bound, _within(ratio, bound, MAXIMAL_RTOL), constant=ratio)


@suite("carleson", "sum <f>_Q <h>_Q |Q| <= (1/eta) int Mf Mh for stopping families")
def carleson(config: SuiteConfig, report: Report) -> None:
    grid = config.grid()
    base = DyadicLattice.standard(grid)
    fs = generate_corpus(STEP, config.corpus_size, config.seed, grid)
    hs = generate_corpus(RANDOM_SIGN, config.corpus_size, config.seed, grid)
    for i, (f, h) in enumerate(zip(fs, hs)):
        family = build_sparse_from_stopping(f, base, ETA)
        lhs = carleson_sum(f, h, family)
        rhs = carleson_bound(f, h, family)
        report.record(_check_id("carleson", i), digest(f, h), lhs, rhs, _within(lhs, rhs, MAXIMAL_RTOL), constant=lhs / rhs if rhs else 0.0)


@suite("claim1", "Morrey norm of T_S f against the Morrey norm of Mf")
def claim1(config: SuiteConfig, report: Report) -> None:
    X = config.descriptor()
    u = MorreyWeight.chi_norm_power(X, 0.5)
    constants = []
    stability = 1.0
    for grid in _refinement(config):
        base = DyadicLattice.standard(grid)
        balls = BallFamily.dyadic(grid, center_stride=max(1, grid.shape[0] // 16))
        corpus = mixed_corpus((STEP, RANDOM_SIGN), config.corpus_size, config.seed, grid)
        ratios = []
        for i, f in enumerate(corpus):
            sparse = _sum_sparse(f, build_lattice_families(f, base, ETA))
            lhs = morrey_norm(sparse, X, u, balls).value
            rhs = morrey_norm(hl_maximal(f), X, u, balls).value
            ratio = lhs / rhs if rhs > 0 else math.inf
            ratios.append(ratio)
            report.record(_check_id("claim1", i, "cells=%d" % grid.shape[0]), digest(f), lhs, rhs, math.isfinite(ratio), constant=ratio, hard=False)
        fitted = report.fit("claim1/cells=%d" % grid.shape[0], ratios)
        constants.append(fitted.constant)
        stability = max(stability, fitted.stability)
    _record_drift(report, "claim1", constants, stability)
    report.metadata["space"] = X.label()
    report.metadata["bound_exponent"] = [_bound_exponent(2.0, l) for l in (0, 1)]


@suite("hyp1-domination", "|H f| and |[b, H] f| against the Hypothesis-1 sparse right-hand side")
def hyp1_domination(config: SuiteConfig, report: Report) -> None:
    hilbert = OperatorDescriptor.hilbert()
    for l in (0, 1):
        constants = []
        stability = 1.0
        for grid in _refinement(config, dim=1):
            base = DyadicLattice.standard(grid)
            fs = mixed_corpus((STEP, RANDOM_SIGN), config.corpus_size, config.seed, grid)
            bs = generate_corpus(BMO_LOG, len(fs), config.seed, grid)
            ratios = []
            for i, (f, b) in enumerate(zip(fs, bs)):
                families = build_lattice_families(f, base, ETA)
                if l == 0:
                    lhs = abs(hilbert(f))
                    rhs = hyp1_rhs([f], [], families)
                else:
                    lhs = abs(commutator_iterated(hilbert, b, 1, f))
                    rhs = hyp1_rhs([f], [b], families)
                ratio = _max_ratio(lhs.values, rhs.values)
                ratios.append(ratio)
                report.record(
                    _check_id("hyp1", i, "l=%d/cells=%d" % (l, grid.shape[0])), digest(f, b, l),
                    lhs.max_abs(), rhs.max_abs(), math.isfinite(ratio), constant=ratio, hard=False,
                )
            fitted = report.fit("hyp1/l=%d/cells=%d" % (l, grid.shape[0]), ratios)
            constants.append(fitted.constant)
            stability = max(stability, fitted.stability)
        _record_drift(report, "hyp1/l=%d" % l, constants, stability)
    report.metadata["bound_exponent"] = [_bound_exponent(2.0, l) for l in (0, 1)]


@suite("bilinear-form", "int |T_b^m f g| against the bilinear sparse form, Hilbert and rough T_Omega")
def bilinear_form(config: SuiteConfig, report: Report) -> None:
    cases = (
        ("hilbert", OperatorDescriptor.hilbert(), 1, config.cells, 1.0),
        ("rough", OperatorDescriptor.rough("sign1"), 2, ROUGH_CELLS, 2.0),
    )
    for name, T, dim, cells, r in cases:
        for m in (1, 2):
            constants = []
            stability = 1.0
            for grid in _refinement(config, dim=dim, cells=cells):
                base = DyadicLattice.standard(grid)
                fs = generate_corpus(RANDOM_SIGN, config.corpus_size, config.seed, grid)
                gs = generate_corpus(STEP, config.corpus_size, config.seed, grid)
                bs = generate_corpus(BMO_LOG, config.corpus_size, config.seed, grid)
                ratios = []
                for i, (f, g, b) in enumerate(zip(fs, gs, bs)):
                    families = build_lattice_families(abs(f) + abs(g), base, ETA)
                    lhs = math.fsum(np.abs(T.commutator(b, m, f).values * g.values).ravel()) * grid.cell_volume
                    rhs = math.fsum(bilinear_sparse_form(f, g, b, family, r, r, m).value for family in families)
                    ratio = lhs / rhs if rhs > 0 else math.inf
                    ratios.append(ratio)
                    report.record(
                        _check_id("bilinear", i, "%s/m=%d/cells=%d" % (name, m, grid.shape[0])), digest(f, g, b, m),
                        lhs, rhs, math.isfinite(ratio), constant=ratio, hard=False,
                    )
                fitted = report.fit("bilinear/%s/m=%d/cells=%d" % (name, m, grid.shape[0]), ratios)
                constants.append(fitted.constant)
                stability = max(stability, fitted.stability)
            _record_drift(report, "bilinear/%s/m=%d" % (name, m), constants, stability)


@suite("ck-convexity", "c_k <= c_0 + c_m for the terms of the bilinear sparse form")
def ck_convexity(config: SuiteConfig, report: Report) -> None:
    grid = config.grid(dim=1)
    lattice = DyadicLattice.standard(grid)
    pool = list(itertools.islice(lattice.keys(), 31))
    for i in range(config.samples):
        rng = config.stream("ck-convexity", i)
        seed = int(rng.integers(2 ** 32))
        f = generate_corpus(RANDOM_SIGN, 1, seed, grid)[0]
        g = generate_corpus(STEP, 1, seed, grid)[0]
        b = generate_corpus(BMO_LOG, 1, seed, grid)[0]
        m = 1 + i % 4
        r, t = (float(x) for x in rng.uniform(1.0, 4.0, size=2))
        picks = rng.choice(len(pool), size=int(rng.integers(1, 9)), replace=False)
        family = SparseFamily(lattice, tuple(pool[k] for k in picks), ETA)
        form = bilinear_sparse_form(f, g, b, family, r, t, m)
        worst = (0.0, 0.0, -math.inf)
        for key in family.cubes:
            rhs = form.terms[0][key] + form.terms[m][key]
            lhs = max(form.terms[k][key] for k in range(m + 1))
            ratio = lhs / rhs if rhs > 0 else (math.inf if lhs > 0 else 0.0)
            if ratio > worst[2]:
                worst = (lhs, rhs, ratio)
        lhs, rhs, _ = worst
        report.record(
            _check_id("ck-convexity", i, "m=%d" % m), digest(f, g, b, m, r, t, [list(k[1]) + [k[0]] for k in family.cubes]),
            lhs, rhs, _within(lhs, rhs, config.tolerance),
        )
