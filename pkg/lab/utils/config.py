# config.py
import os
from pathlib import Path

from dotenv import dotenv_values, load_dotenv

load_dotenv()  # load .env

OUTPUT_DIR = os.getenv("LAB_OUTPUT_DIR", "runs")
LOG_LEVEL = os.getenv("LAB_LOG_LEVEL", "INFO")
SWEEP_CAP = int(os.getenv("LAB_SWEEP_CAP", "256"))
WORKERS = int(os.getenv("LAB_WORKERS", "-1"))

TOOL_NAME = "bnls-lab"
VERSION = "1.0.0"

# polynomial degree of the radial spectral elements; grid sizes are multiples of it
ELEMENT_DEGREE = 8


def output_dir(override: str | None = None) -> Path:
    """Resolve the output directory: explicit value, then LAB_OUTPUT_DIR, then ./runs"""
    return Path(override or os.getenv("LAB_OUTPUT_DIR", OUTPUT_DIR))


def read_config_file(path: str | Path) -> dict[str, str]:
    """
    Parse a flat KEY=value run configuration file.
    Keys are lower-cased so that `N`, `R_MAX` and `r_max` all reach the same field;
    the spatial dimension keeps its upper-case name.
    """
    raw = dotenv_values(path)
    values = {}
    for key, value in raw.items():
        if value is None:
            continue
        name = key.strip()
        values[name if name == "N" else name.lower()] = value.strip()
    return values
