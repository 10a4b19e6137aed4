import copy
import os
from pathlib import Path

import yaml

BUDGET_ENV_VAR = "CANTORVAL_BUDGET"
SCHEMA_VERSION = "1.0"

DEFAULT_CONFIG = {
    "database": {"path": None},
    "logging": {"level": "INFO"},
    "engine": {"budget": 2_000_000, "precision_digits": 50, "report_digits": 16},
    "dimension": {"fit_min_level": 3, "solver_tol": "1e-30"},
}


def load_config(config_path: str = "config.yaml"):
    """Load configuration from YAML file, fallback to defaults."""
    merged = copy.deepcopy(DEFAULT_CONFIG)
    config_file = Path(config_path)
    if config_file.exists():
        with open(config_file, "r") as f:
            config = yaml.safe_load(f) or {}
        for k, v in config.items():
            if k in merged and isinstance(merged[k], dict) and isinstance(v, dict):
                merged[k].update(v)
            else:
                merged[k] = v
    return merged


def resolve_budget(budget: int | None = None, config: dict | None = None) -> int:
    """
    Pick the enumeration budget: an explicit argument wins, then the
    CANTORVAL_BUDGET environment variable, then the config, then the default.

    Raises:
            ValueError: if the environment variable is not a positive integer.
    """
    if budget is not None:
        return budget
    raw = os.environ.get(BUDGET_ENV_VAR)
    if raw is None or raw.strip() == "":
        return (config or DEFAULT_CONFIG)["engine"]["budget"]
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"{BUDGET_ENV_VAR} must be an integer, got {raw!r}") from None
    if value <= 0:
        raise ValueError(f"{BUDGET_ENV_VAR} must be positive, got {value}")
    return value
