"""
Grid defaults, numerical tolerances, harness seeds and logging.
Values marked (env) can be overridden from .env or the process environment.
"""
import os
from pathlib import Path

from dotenv import load_dotenv

# Load .env from config/ or project root
_env_path = Path(__file__).resolve().parent / ".env"
if not _env_path.exists():
    _env_path = Path(__file__).resolve().parent.parent / ".env"
load_dotenv(_env_path)

# ----- Harness -----
VERIFY_SEED = int(os.getenv("VERIFY_SEED", "20240601"))  # (env) default --seed
DEFAULT_CORPUS_SIZE = int(os.getenv("VERIFY_CORPUS_SIZE", "32"))  # (env)
DEFAULT_SAMPLES = int(os.getenv("VERIFY_SAMPLES", "1000"))  # (env) random tuples per exact-inequality suite
REPORT_FORMAT = os.getenv("VERIFY_REPORT_FORMAT", "json")  # (env) "json" or "csv"
STRICT_EXIT = os.getenv("VERIFY_STRICT_EXIT", "true").lower() in ("true", "1", "yes")  # (env) exit 1 on hard failures

# ----- Grid -----
DEFAULT_DIM = 1
DEFAULT_CELLS = 256     # cells per axis, power of two for dyadic work
DEFAULT_EXTENT = 4.0    # domain side; origin at -extent/2
ROUGH_CELLS = 32        # cells per axis for 2-d quadrature suites

# ----- Tolerances -----
EXACT_RTOL = 1e-12           # rounding slack for exact inequalities
MAXIMAL_RTOL = 1e-9          # slack for convolution-based maximal values
LUXEMBURG_RTOL = 1e-12       # relative bracket width of gauge bisection
LUXEMBURG_MAX_ITER = 200
WEIGHT_FLOOR = 1e-12         # positive weights are clipped below at this value
CHI_BALL_RTOL = 0.02         # closed form vs rasterized chi_B norms
STABILITY_LIMIT = 2.0        # max/median drift allowed for fitted constants
ORACLE_RTOL = 0.05           # brute-force oracle comparisons

# ----- W_X^alpha series -----
WX_DEFAULT_TERMS = 12        # J, must be >= 8
WX_SERIES_GROWTH = 1.5       # partial sums growing by this factor over J/2..J => divergent
WX_CONTRACTION_SLACK = 1e-9  # last-term ratio within this of 1 counts as non-contracting

# ----- Pair scans -----
LOG_HOLDER_MAX_CELLS = 2048  # cells kept (by stride) when scanning exponent pairs

# ----- Logging -----
LOG_DIR = Path(__file__).resolve().parent.parent / "logs"
LOG_FILE = LOG_DIR / "verify.log"
LOG_WHEN = "midnight"   # TimedRotatingFileHandler
LOG_BACKUP_COUNT = 14   # keep 14 days
LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")  # (env)
