"""
Configuration module for the drift burst toolkit

This module provides centralized configuration management for all packages.
"""

from .settings import (
    # Paths
    PROJECT_ROOT,
    DATA_DIR,
    SCENARIO_DIR,
    RUN_CONFIG_DIR,
    TABLE_DIR,
    OUTPUT_DIR,
    DEFAULT_TABLE_PATH,
    N_JOBS,
    # Kernel
    KERNEL_FAMILY,
    KERNEL_TRUNCATION_RADIUS,
    KERNEL_QUAD_EPSREL,
    # Estimator
    PREAVG_WINDOW,
    DRIFT_BANDWIDTH,
    VARIANCE_BANDWIDTH_RATIO,
    LAG_MODE,
    FIXED_LAG,
    AUTO_LAG_PILOT_COEF,
    AUTO_LAG_PILOT_EXPONENT,
    AUTO_LAG_GAMMA_COEF,
    AUTO_LAG_MIN_OBS,
    MAX_LAG_SHARE,
    LRV_FLOOR,
    # Detector
    STATISTIC_MODE,
    GRID_SPACING,
    MIN_EVENT_SEPARATION,
    DEFAULT_THRESHOLD,
    DEDUP_POLICIES,
    DEFAULT_DEDUP,
    # Critical values
    CRIT_M_AXIS,
    CRIT_RHO_AXIS,
    CRIT_LEVELS,
    CRIT_N_SIMS,
    CRIT_MIN_SIMS,
    CRIT_BURN_IN,
    CRIT_SEED,
    CRIT_TABLE_VERSION,
    CRIT_BLOCK_ROWS,
    CRIT_BLOCK_ELEMENTS,
    AR1_MIN_PAIRS,
    AR1_RHO_CLAMP,
    # Simulation
    HESTON_KAPPA,
    HESTON_THETA,
    HESTON_XI,
    HESTON_RHO,
    DAY_FRACTION_OF_YEAR,
    N_OBSERVATIONS,
    SESSION_SECONDS,
    BASE_PRICE,
    BURST_WINDOW,
    BURST_TAU,
    JUMP_LAMBDA,
    JUMP_UPSILON,
    NOISE_GAMMA,
    EXPERIMENT_DRIFT_BANDWIDTHS,
    EXPERIMENT_EVALUATION_STEP,
    EXPERIMENT_BURN_IN,
    EXPERIMENT_LEVELS,
    EXPERIMENT_MIN_REPLICATIONS,
    EXPERIMENT_DRIFT_SCALE,
    EXPERIMENT_VOL_SCALE,
    EXPERIMENT_RHO_AXIS,
    EXPERIMENT_CRIT_SIMS,
    # Parametric
    MLE_ALPHA_BOUNDS,
    MLE_BETA_BOUNDS,
    MLE_START_ALPHAS,
    MLE_START_BETAS,
    MLE_MIN_OBS,
    LR_TOLERANCE,
    FIT_WINDOW_SECONDS,
    FIT_SAMPLING_SECONDS,
    # Analysis
    EVENT_HORIZON,
    ENDOGENOUS_T_LEVEL,
    MIN_REVERSION_OBS,
    MIN_CGW_OBS,
    MIN_DOUBLE_SORT_OBS,
    MIN_PROFILE_DAYS,
    MAX_CONDITION_NUMBER,
    # Ingest
    TICK_COLUMNS,
    MAX_MALFORMED_SHARE,
    CSV_FLOAT_FORMAT,
    DEFAULT_TIMEZONE,
    SECONDS_PER_DAY,
    # CLI
    EXIT_SUCCESS,
    EXIT_INPUT_ERROR,
    EXIT_NUMERICAL_ERROR,
    REPORT_FILE_NAME,
    TSTAT_FILE_NAME,
    EVENTS_FILE_NAME,
    EXPERIMENT_FILE_NAME,
    ANALYSIS_FILE_NAME,
    RETURNS_FILE_NAME,
    # Helper functions
    get_output_path,
    get_table_path,
    get_scenario_path,
)

__all__ = [
    # Paths
    "PROJECT_ROOT",
    "DATA_DIR",
    "SCENARIO_DIR",
    "RUN_CONFIG_DIR",
    "TABLE_DIR",
    "OUTPUT_DIR",
    "DEFAULT_TABLE_PATH",
    "N_JOBS",
    # Kernel
    "KERNEL_FAMILY",
    "KERNEL_TRUNCATION_RADIUS",
    "KERNEL_QUAD_EPSREL",
    # Estimator
    "PREAVG_WINDOW",
    "DRIFT_BANDWIDTH",
    "VARIANCE_BANDWIDTH_RATIO",
    "LAG_MODE",
    "FIXED_LAG",
    "AUTO_LAG_PILOT_COEF",
    "AUTO_LAG_PILOT_EXPONENT",
    "AUTO_LAG_GAMMA_COEF",
    "AUTO_LAG_MIN_OBS",
    "MAX_LAG_SHARE",
    "LRV_FLOOR",
    # Detector
    "STATISTIC_MODE",
    "GRID_SPACING",
    "MIN_EVENT_SEPARATION",
    "DEFAULT_THRESHOLD",
    "DEDUP_POLICIES",
    "DEFAULT_DEDUP",
    # Critical values
    "CRIT_M_AXIS",
    "CRIT_RHO_AXIS",
    "CRIT_LEVELS",
    "CRIT_N_SIMS",
    "CRIT_MIN_SIMS",
    "CRIT_BURN_IN",
    "CRIT_SEED",
    "CRIT_TABLE_VERSION",
    "CRIT_BLOCK_ROWS",
    "CRIT_BLOCK_ELEMENTS",
    "AR1_MIN_PAIRS",
    "AR1_RHO_CLAMP",
    # Simulation
    "HESTON_KAPPA",
    "HESTON_THETA",
    "HESTON_XI",
    "HESTON_RHO",
    "DAY_FRACTION_OF_YEAR",
    "N_OBSERVATIONS",
    "SESSION_SECONDS",
    "BASE_PRICE",
    "BURST_WINDOW",
    "BURST_TAU",
    "JUMP_LAMBDA",
    "JUMP_UPSILON",
    "NOISE_GAMMA",
    "EXPERIMENT_DRIFT_BANDWIDTHS",
    "EXPERIMENT_EVALUATION_STEP",
    "EXPERIMENT_BURN_IN",
    "EXPERIMENT_LEVELS",
    "EXPERIMENT_MIN_REPLICATIONS",
    "EXPERIMENT_DRIFT_SCALE",
    "EXPERIMENT_VOL_SCALE",
    "EXPERIMENT_RHO_AXIS",
    "EXPERIMENT_CRIT_SIMS",
    # Parametric
    "MLE_ALPHA_BOUNDS",
    "MLE_BETA_BOUNDS",
    "MLE_START_ALPHAS",
    "MLE_START_BETAS",
    "MLE_MIN_OBS",
    "LR_TOLERANCE",
    "FIT_WINDOW_SECONDS",
    "FIT_SAMPLING_SECONDS",
    # Analysis
    "EVENT_HORIZON",
    "ENDOGENOUS_T_LEVEL",
    "MIN_REVERSION_OBS",
    "MIN_CGW_OBS",
    "MIN_DOUBLE_SORT_OBS",
    "MIN_PROFILE_DAYS",
    "MAX_CONDITION_NUMBER",
    # Ingest
    "TICK_COLUMNS",
    "MAX_MALFORMED_SHARE",
    "CSV_FLOAT_FORMAT",
    "DEFAULT_TIMEZONE",
    "SECONDS_PER_DAY",
    # CLI
    "EXIT_SUCCESS",
    "EXIT_INPUT_ERROR",
    "EXIT_NUMERICAL_ERROR",
    "REPORT_FILE_NAME",
    "TSTAT_FILE_NAME",
    "EVENTS_FILE_NAME",
    "EXPERIMENT_FILE_NAME",
    "ANALYSIS_FILE_NAME",
    "RETURNS_FILE_NAME",
    # Helper functions
    "get_output_path",
    "get_table_path",
    "get_scenario_path",
]
