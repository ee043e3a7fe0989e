"""
Configuration
Environment-backed settings and key-value config files for the CLI.

Precedence for CLI options: defaults < environment < config file < flags.
"""

import logging
import os
from pathlib import Path
from typing import Any, Dict, Optional

from dotenv import dotenv_values, load_dotenv

load_dotenv()

logger = logging.getLogger(__name__)


class Settings:
    """Process-wide settings read from the environment (and `.env`)."""

    def __init__(self):
        self.max_qubits = int(os.getenv("GROVERIAN_MAX_QUBITS", "24"))
        self.log_level = os.getenv("GROVERIAN_LOG_LEVEL", "INFO")
        self.workers = int(os.getenv("GROVERIAN_WORKERS", "1"))
        self.seed = int(os.getenv("GROVERIAN_SEED", "0"))


settings = Settings()

_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off", ""}


def load_config_file(path: Optional[str]) -> Dict[str, str]:
    """
    Parse a key-value config file (dotenv syntax).

    Keys are long flag names; dashes and underscores are interchangeable
    (`no-pair-step=true` and `no_pair_step=true` are the same key).

    Args:
        path: File path, or None for no file

    Returns:
        Mapping of normalized key -> raw string value
    """
    if not path:
        return {}
    if not Path(path).is_file():
        raise FileNotFoundError(f"Config file not found: {path}")

    values = dotenv_values(path)
    normalized = {k.strip().lower().replace("-", "_"): (v or "") for k, v in values.items()}
    logger.debug(f"Loaded {len(normalized)} config keys from {path}")
    return normalized


def coerce(raw: str, default: Any) -> Any:
    """Convert a config-file string to the type of the flag's default."""
    if isinstance(default, bool):
        lowered = raw.strip().lower()
        if lowered in _TRUE:
            return True
        if lowered in _FALSE:
            return False
        raise ValueError(f"Not a boolean: {raw!r}")
    if isinstance(default, int):
        return int(raw)
    if isinstance(default, float):
        return float(raw)
    return raw
