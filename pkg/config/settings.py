"""
Central configuration settings for the drift burst toolkit

This module provides centralized configuration management for the estimators,
the simulator, the pipeline and the CLI, eliminating hardcoded values and
improving maintainability. A handful of values can be overridden through the
environment (or a local .env file).
"""

import math
import os
from pathlib import Path

from dotenv import load_dotenv

load_dotenv()

# ============================================================
# Project Structure
# ============================================================

PROJECT_ROOT = Path(__file__).parent.parent
DATA_DIR = PROJECT_ROOT / "data"

# Data subdirectories
SCENARIO_DIR = DATA_DIR / "scenarios"
RUN_CONFIG_DIR = DATA_DIR / "configs"
TABLE_DIR = DATA_DIR / "tables"

# Output locations (overridable)
OUTPUT_DIR = Path(os.getenv("DRIFTBURST_OUTPUT_DIR", str(PROJECT_ROOT / "output")))
DEFAULT_TABLE_PATH = Path(
    os.getenv("DRIFTBURST_TABLE_PATH", str(TABLE_DIR / "critical_values.json"))
)

# Worker processes/threads for grid evaluation and Monte Carlo
N_JOBS = int(os.getenv("DRIFTBURST_N_JOBS", "1"))

# ============================================================
# Kernel Configuration
# ============================================================

KERNEL_FAMILY = "left_exponential"
KERNEL_TRUNCATION_RADIUS = 10.0  # bandwidths
KERNEL_QUAD_EPSREL = 1e-10

# ============================================================
# Pre-averaging / Estimator Configuration
# ============================================================

PREAVG_WINDOW = 3  # k_n

DRIFT_BANDWIDTH = 300.0  # seconds (five minutes)
VARIANCE_BANDWIDTH_RATIO = 5.0  # h' = 5h (25 minutes)

# HAC lag policy
LAG_MODE = "auto"  # "auto" or "fixed"
FIXED_LAG = 10
# Q* = ceil(c · |s1/s0|^{2/3} · n^{1/3}), pilot truncation floor(coef · (n/100)^exponent).
# One-lag pilot, c calibrated to Q* ≈ 12 on the gamma = 0.5 noise design.
# Newey-West Bartlett values: coef 4.0, exponent 2/9, c 1.1447.
AUTO_LAG_PILOT_COEF = 1.0
AUTO_LAG_PILOT_EXPONENT = 0.0
AUTO_LAG_GAMMA_COEF = 0.675
AUTO_LAG_MIN_OBS = 50
MAX_LAG_SHARE = 0.25  # L_n <= n_effective / 4

# t-statistics with a smaller long-run variance are reported missing
LRV_FLOOR = 1e-24

# ============================================================
# Detector Configuration
# ============================================================

STATISTIC_MODE = "noise_robust"  # or "noise_free"
GRID_SPACING = 5.0  # seconds
MIN_EVENT_SEPARATION = 300.0  # seconds
DEFAULT_THRESHOLD = 4.5
DEDUP_POLICIES = ["window", "daily"]
DEFAULT_DEDUP = "window"

# ============================================================
# Critical Value Configuration
# ============================================================

CRIT_M_AXIS = [100, 341, 1_000, 3_000, 10_000, 30_000]
CRIT_RHO_AXIS = [0.0, 0.5, 0.8, 0.9, 0.95, 0.98, 0.99]
CRIT_LEVELS = [0.90, 0.95, 0.99, 0.995]
CRIT_N_SIMS = 200_000
CRIT_MIN_SIMS = 1_000
CRIT_BURN_IN = 0  # the AR(1) starts in its stationary law
CRIT_SEED = 20_190_101
CRIT_TABLE_VERSION = "1"
CRIT_BLOCK_ROWS = 2_000
CRIT_BLOCK_ELEMENTS = 4_000_000  # cap on rows x steps per simulated block

AR1_MIN_PAIRS = 30
AR1_RHO_CLAMP = 0.999

# ============================================================
# Simulation Configuration
# ============================================================

# Heston (annualized)
HESTON_KAPPA = 5.0
HESTON_THETA = 0.0225
HESTON_XI = 0.4
HESTON_RHO = -math.sqrt(0.5)

DAY_FRACTION_OF_YEAR = 1.0 / 252.0
N_OBSERVATIONS = 23_400
SESSION_SECONDS = 23_400.0
BASE_PRICE = 100.0

# Burst injection
BURST_WINDOW = (0.475, 0.525)
BURST_TAU = 0.5

# Tempered stable jumps
JUMP_LAMBDA = 3.0
JUMP_UPSILON = 0.5

# Microstructure noise
NOISE_GAMMA = 0.5

# Size/power experiment
EXPERIMENT_DRIFT_BANDWIDTHS = [120.0, 300.0, 600.0]
EXPERIMENT_EVALUATION_STEP = 60  # evaluate every 60th observation
EXPERIMENT_BURN_IN = 3_000.0  # seconds; one volatility bandwidth at h = 600
EXPERIMENT_LEVELS = [0.90, 0.95, 0.99]
EXPERIMENT_MIN_REPLICATIONS = 100
EXPERIMENT_DRIFT_SCALE = 3.0  # a of the drift burst cells
EXPERIMENT_VOL_SCALE = 0.15  # b of the volatility burst cells
EXPERIMENT_RHO_AXIS = [0.0, 0.5, 0.8, 0.9, 0.95, 0.98, 0.99, 0.999]
EXPERIMENT_CRIT_SIMS = 50_000

# ============================================================
# Parametric Model Configuration
# ============================================================

MLE_ALPHA_BOUNDS = (0.0, 0.99)
MLE_BETA_BOUNDS = (0.0, 0.49)
MLE_START_ALPHAS = [0.0, 0.3, 0.6]
MLE_START_BETAS = [0.0, 0.2, 0.4]
MLE_MIN_OBS = 50
LR_TOLERANCE = 1e-6
FIT_WINDOW_SECONDS = 3_600.0  # one-hour run-up window
FIT_SAMPLING_SECONDS = 1.0

# ============================================================
# Analysis Configuration
# ============================================================

EVENT_HORIZON = 300.0  # seconds
ENDOGENOUS_T_LEVEL = 1.0
MIN_REVERSION_OBS = 10
MIN_CGW_OBS = 20
MIN_DOUBLE_SORT_OBS = 30
MIN_PROFILE_DAYS = 20
MAX_CONDITION_NUMBER = 1e10

# ============================================================
# Ingest Configuration
# ============================================================

TICK_COLUMNS = ["ts_ms", "bid", "ask", "trade_px", "trade_sz"]
MAX_MALFORMED_SHARE = 0.001
CSV_FLOAT_FORMAT = "%.17g"
DEFAULT_TIMEZONE = "UTC"
SECONDS_PER_DAY = 86_400.0

# ============================================================
# CLI Configuration
# ============================================================

EXIT_SUCCESS = 0
EXIT_INPUT_ERROR = 1
EXIT_NUMERICAL_ERROR = 2

REPORT_FILE_NAME = "report.json"
TSTAT_FILE_NAME = "tstats.csv"
EVENTS_FILE_NAME = "events.csv"
EXPERIMENT_FILE_NAME = "size_power.csv"
ANALYSIS_FILE_NAME = "event_analysis.json"
RETURNS_FILE_NAME = "event_returns.csv"

# ============================================================
# Helper Functions
# ============================================================


def get_output_path(file_name: str, output_dir: Path = None) -> Path:
    """
    Get the path of an output artifact

    Args:
        file_name: Artifact file name (e.g., 'report.json')
        output_dir: Directory overriding OUTPUT_DIR

    Returns:
        Path object pointing to the artifact
    """
    base = Path(output_dir) if output_dir is not None else OUTPUT_DIR
    return base / file_name


def get_table_path(table_path: str = None) -> Path:
    """
    Get the critical value table path, falling back to DEFAULT_TABLE_PATH

    Args:
        table_path: Explicit path (CLI flag or run config)

    Returns:
        Path object pointing to the table JSON
    """
    if table_path:
        return Path(table_path)
    return DEFAULT_TABLE_PATH


def get_scenario_path(name: str) -> Path:
    """
    Get the file path for a bundled scenario

    Args:
        name: Scenario name without extension (e.g., 'null_day') or a path

    Returns:
        Path object pointing to the scenario YAML

    Raises:
        ValueError: If the scenario does not exist
    """
    candidate = Path(name)
    if candidate.suffix in (".yaml", ".yml") and candidate.exists():
        return candidate

    path = SCENARIO_DIR / f"{name}.yaml"
    if not path.exists():
        raise ValueError(f"Unknown scenario: {name}")
    return path
