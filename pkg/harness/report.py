"""
Suite reports: per-check records, fitted constants and metadata.

Reports carry no wall-clock time, so a fixed (config, seed) gives identical bytes.
JSON reports round-trip through load_report; CSV reports hold the check rows only.
"""
import hashlib
import json
import logging
import math
import platform
from dataclasses import asdict, dataclass, field
from pathlib import Path
from statistics import median
from typing import Any, Dict, List, Sequence, Tuple, Union

import numpy as np
import pandas as pd
import scipy

from config.settings import STABILITY_LIMIT
from grid.core import GridFunction

logger = logging.getLogger(__name__)

JSON = "json"
CSV = "csv"
FORMATS = (JSON, CSV)

COLUMNS = ["check_id", "inputs_digest", "lhs", "rhs", "constant", "passed", "hard"]


@dataclass(frozen=True)
class CheckRecord:
    check_id: str
    inputs_digest: str
    lhs: float
    rhs: float
    constant: float
    passed: bool
    hard: bool = True   # hard invariants fail the run; soft rows are studies


@dataclass(frozen=True)
class FittedConstant:
    constant: float     # max ratio
    stability: float    # max / median
    samples: int

    @property
    def stable(self) -> bool:
        return self.stability <= STABILITY_LIMIT


@dataclass
class Report:
    suite: str
    seed: int
    config_digest: str
    environment: Dict[str, str] = field(default_factory=dict)
    checks: List[CheckRecord] = field(default_factory=list)
    fitted: Dict[str, FittedConstant] = field(default_factory=dict)
    metadata: Dict[str, Any] = field(default_factory=dict)

    def record(
        self,
        check_id: str,
        inputs_digest: str,
        lhs: float,
        rhs: float,
        passed: bool,
        constant: float = 1.0,
        hard: bool = True,
    ) -> CheckRecord:
        """Append one check row."""
        row = CheckRecord(check_id, inputs_digest, float(lhs), float(rhs), float(constant), bool(passed), bool(hard))
        self.checks.append(row)
        if hard and not passed:
            logger.debug("%s: %s failed (lhs=%g, rhs=%g)", self.suite, check_id, lhs, rhs)
        return row

    def fit(self, name: str, ratios: Sequence[float]) -> FittedConstant:
        c, stability = fit_constant(ratios)
        fitted = FittedConstant(c, stability, len(ratios))
        self.fitted[name] = fitted
        return fitted

    @property
    def violations(self) -> List[CheckRecord]:
        return [c for c in self.checks if not c.passed]

    @property
    def hard_failures(self) -> List[CheckRecord]:
        return [c for c in self.checks if c.hard and not c.passed]

    @property
    def passed(self) -> bool:
        return not self.hard_failures

    def sorted_checks(self) -> List[CheckRecord]:
        return sorted(self.checks, key=lambda c: c.check_id)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "suite": self.suite,
            "seed": self.seed,
            "config_digest": self.config_digest,
            "environment": dict(self.environment),
            "checks": [asdict(c) for c in self.sorted_checks()],
            "fitted": {k: asdict(v) for k, v in self.fitted.items()},
            "metadata": self.metadata,
        }

    @classmethod
    def from_dict(cls, raw: Dict[str, Any]) -> "Report":
        try:
            return cls(
                suite=raw["suite"],
                seed=int(raw["seed"]),
                config_digest=raw["config_digest"],
                environment=dict(raw.get("environment", {})),
                checks=[CheckRecord(**c) for c in raw.get("checks", [])],
                fitted={k: FittedConstant(**v) for k, v in raw.get("fitted", {}).items()},
                metadata=dict(raw.get("metadata", {})),
            )
        except (KeyError, TypeError) as e:
            raise ValueError("malformed report payload: %s" % e) from e


def fit_constant(ratios: Sequence[float]) -> Tuple[float, float]:
    """(C_fit, stability) = (max, max / median) of positive ratios."""
    values = [float(r) for r in ratios]
    if not values:
        raise ValueError("cannot fit a constant to an empty ratio set")
    top = max(values)
    mid = median(values)
    if mid <= 0:
        return top, math.inf if top > 0 else 1.0
    return top, top / mid


def environment_stamp() -> Dict[str, str]:
    """Interpreter and library versions; no host or time information."""
    return {
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "pandas": pd.__version__,
    }


def digest(*parts: Any) -> str:
    """Short sha256 over grid values and JSON-encodable parameters."""
    h = hashlib.sha256()
    for part in parts:
        if isinstance(part, GridFunction):
            h.update(json.dumps([list(part.origin), part.spacing, list(part.shape)]).encode())
            h.update(np.ascontiguousarray(part.values, dtype=float).tobytes())
        elif isinstance(part, np.ndarray):
            h.update(np.ascontiguousarray(part, dtype=float).tobytes())
        else:
            h.update(json.dumps(part, sort_keys=True, default=str).encode())
        h.update(b"|")
    return h.hexdigest()[:16]


def emit_report(report: Report, path: Union[str, Path], fmt: str = JSON) -> Path:
    """
    Write the report. json: the full report, keys sorted. csv: one row per check
    with columns COLUMNS, sorted by check_id (header only for an empty report).
    """
    if fmt not in FORMATS:
        raise ValueError("unknown report format %r (expected one of %s)" % (fmt, ", ".join(FORMATS)))
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if fmt == JSON:
        path.write_text(json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n")
    else:
        rows = [asdict(c) for c in report.sorted_checks()]
        frame = pd.DataFrame(rows, columns=COLUMNS)
        frame.to_csv(path, index=False, float_format="%.17g", lineterminator="\n")
    logger.info("Report %s written to %s (%d checks, %d hard failures)", report.suite, path, len(report.checks), len(report.hard_failures))
    return path


def load_report(path: Union[str, Path]) -> Report:
    """Parse a JSON report."""
    try:
        raw = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise ValueError("report %s is not valid JSON: %s" % (path, e)) from e
    return Report.from_dict(raw)


def report_summary(report: Report) -> str:
    """Plain text summary for the log."""
    lines = [
        "Verification report: %s" % report.suite,
        "Seed: %d   Config: %s" % (report.seed, report.config_digest),
        "",
        "--- Checks ---",
        "Total: %d   Violations: %d   Hard failures: %d" % (len(report.checks), len(report.violations), len(report.hard_failures)),
    ]
    for c in report.hard_failures[:10]:
        lines.append("  FAIL {}  lhs={:.6g}  rhs={:.6g}".format(c.check_id, c.lhs, c.rhs))
    lines.append("")
    lines.append("--- Fitted Constants ---")
    for name in sorted(report.fitted):
        fc = report.fitted[name]
        lines.append("  {}  C={:.6g}  stability={:.3g}  n={}".format(name, fc.constant, fc.stability, fc.samples))
    if report.metadata:
        lines.append("")
        lines.append("--- Metadata ---")
        for key in sorted(report.metadata):
            lines.append("  {}: {}".format(key, report.metadata[key]))
    return "\n".join(lines)
