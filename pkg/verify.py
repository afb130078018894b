"""
Command-line runner: verification suites, norms, maximal functions and sparse families
on grid files.

  python verify.py verify <suite> [--config FILE] [--seed N] [--out PATH] [--format json|csv]
  python verify.py norm <grid> --space <file>
  python verify.py maximal <grid> --mode dense|dyadic_shifted [--max-side S] --out PATH
  python verify.py sparse <grid> --eta ETA --out PATH [--apply R]
  python verify.py list

Exit status is 1 when a command fails or, with VERIFY_STRICT_EXIT, when a suite has hard failures.
"""
import argparse
import json
import logging
import logging.handlers
import sys
from pathlib import Path
from typing import List, Optional

from config.settings import (
    LOG_BACKUP_COUNT,
    LOG_DIR,
    LOG_FILE,
    LOG_LEVEL,
    LOG_WHEN,
    REPORT_FORMAT,
    STRICT_EXIT,
    VERIFY_SEED,
)
from grid.io import grid_to_dict, load_grid, save_grid
from harness.report import FORMATS, emit_report, report_summary
from harness.suites import SUITES, SuiteConfig, run_suite
from maximal.families import MODES, CubeFamilySpec
from maximal.operators import hl_maximal
from spaces.descriptors import load_descriptor
from spaces.norms import space_norm
from sparse.family import build_lattice_families, build_sparse_from_stopping
from sparse.forms import sparse_operator
from sparse.lattice import DyadicLattice

logger = logging.getLogger("verify")


def _setup_logging() -> None:
    """Rotating file log plus stdout, configured once per process."""
    root = logging.getLogger()
    if any(isinstance(h, logging.handlers.TimedRotatingFileHandler) for h in root.handlers):
        return
    LOG_DIR.mkdir(parents=True, exist_ok=True)
    file_handler = logging.handlers.TimedRotatingFileHandler(
        LOG_FILE, when=LOG_WHEN, backupCount=LOG_BACKUP_COUNT, encoding="utf-8"
    )
    file_handler.setFormatter(logging.Formatter("%(asctime)s [%(levelname)s] %(name)s: %(message)s"))
    console = logging.StreamHandler(sys.stdout)
    console.setFormatter(logging.Formatter("%(asctime)s [%(levelname)s] %(message)s"))
    root.setLevel(getattr(logging, LOG_LEVEL.upper(), logging.INFO))
    root.addHandler(file_handler)
    root.addHandler(console)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="verify", description="Harmonic analysis verification harness")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("suite")
    p.add_argument("--config", help="JSON suite config")
    p.add_argument("--seed", type=int, help="default: VERIFY_SEED (%d)" % VERIFY_SEED)
    p.add_argument("--out", help="report path")
    p.add_argument("--format", choices=FORMATS, help="default: %s" % REPORT_FORMAT)
    p.add_argument("--cells", type=int)
    p.add_argument("--dim", type=int, choices=(1, 2))
    p.add_argument("--corpus-size", type=int, dest="corpus_size")
    p.add_argument("--samples", type=int)

    p = sub.add_parser("norm", help="norm of a grid function in a space")
    p.add_argument("grid")
    p.add_argument("--space", required=True, help="space descriptor JSON")

    p = sub.add_parser("maximal", help="maximal function of a grid function")
    p.add_argument("grid")
    p.add_argument("--mode", choices=MODES, default=MODES[0])
    p.add_argument("--max-side", type=float, dest="max_side")
    p.add_argument("--out", required=True)

    p = sub.add_parser("sparse", help="stopping-time sparse families of a grid function")
    p.add_argument("grid")
    p.add_argument("--eta", type=float, default=0.5)
    p.add_argument("--out", required=True)
    p.add_argument("--apply", type=float, metavar="R", help="also write sum_j T_{R,S_j} f")

    sub.add_parser("list", help="list suites")
    return parser


def run_verify(args: argparse.Namespace) -> bool:
    """Run one suite and write its report; False on hard failures."""
    overrides = {
        "seed": args.seed,
        "out": args.out,
        "format": args.format,
        "cells": args.cells,
        "dim": args.dim,
        "corpus_size": args.corpus_size,
        "samples": args.samples,
    }
    if args.config:
        config = SuiteConfig.from_file(args.config, suite=args.suite, **overrides)
    else:
        config = SuiteConfig(args.suite, **{k: v for k, v in overrides.items() if v is not None})
    report = run_suite(config)
    out = config.out or "reports/%s-%d.%s" % (config.suite, config.seed, config.format)
    emit_report(report, out, config.format)
    logger.info("\n%s", report_summary(report))
    if report.hard_failures:
        logger.warning("Suite %s: %d hard failures", config.suite, len(report.hard_failures))
        return not STRICT_EXIT
    return True


def run_norm(args: argparse.Namespace) -> bool:
    f = load_grid(args.grid)
    X = load_descriptor(args.space)
    value = space_norm(f, X)
    print(json.dumps({"space": X.label(), "norm": value}))
    logger.info("||%s||_%s = %.12g", args.grid, X.label(), value)
    return True


def run_maximal(args: argparse.Namespace) -> bool:
    f = load_grid(args.grid)
    spec = CubeFamilySpec(args.mode, args.max_side)
    save_grid(hl_maximal(f, spec), args.out)
    logger.info("Maximal function over %s written to %s", spec.label(), args.out)
    return True


def run_sparse(args: argparse.Namespace) -> bool:
    f = load_grid(args.grid)
    base = DyadicLattice.standard(f)
    families = [build_sparse_from_stopping(f, base, args.eta)] + build_lattice_families(f, base, args.eta)
    payload = {"eta": args.eta, "families": [family.to_dict() for family in families]}
    if args.apply is not None:
        applied = f.zeros()
        for family in families[1:]:
            applied = applied + sparse_operator(f, family, args.apply)
        payload["applied"] = {"r": args.apply, "grid": grid_to_dict(applied)}
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    logger.info("%d sparse families (%s cubes) written to %s", len(families), ", ".join(str(len(s)) for s in families), out)
    return True


def run_list(args: argparse.Namespace) -> bool:
    for name in sorted(SUITES):
        print("%-22s %s" % (name, SUITES[name].description))
    return True


COMMANDS = {
    "verify": run_verify,
    "norm": run_norm,
    "maximal": run_maximal,
    "sparse": run_sparse,
    "list": run_list,
}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    _setup_logging()
    try:
        ok = COMMANDS[args.command](args)
    except Exception as e:
        logger.exception("%s failed: %s", args.command, e)
        return 1
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
