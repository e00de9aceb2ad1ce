import logging
import os
import tempfile
from pathlib import Path

import numpy as np
import pandas as pd

from utils.errors import ConfigError

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"


def atomic_write_text(path: str | Path, text: str) -> Path:
    """Write text to a temporary file next to `path`, then rename it into place"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except Exception:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    logger.debug(f"Wrote {path}")
    return path


def write_csv(path: str | Path, frame: pd.DataFrame) -> Path:
    return atomic_write_text(path, frame.to_csv(index=False, float_format=FLOAT_FORMAT))


def write_snapshot(path: str | Path, field, params, t: float = 0.0) -> Path:
    """
    Field snapshot: header `N b q R_max M t`, then M rows `r Re(v) Im(v)`,
    every number with 17 significant digits.
    """
    grid = field.grid
    header = " ".join(
        FLOAT_FORMAT % value if isinstance(value, float) else str(value)
        for value in (params.N, float(params.b), float(params.q), float(grid.R_max), grid.M, float(t))
    )
    rows = np.column_stack([grid.nodes, field.values.real, field.values.imag])
    body = "\n".join(" ".join(FLOAT_FORMAT % x for x in row) for row in rows)
    return atomic_write_text(path, header + "\n" + body + "\n")


def read_snapshot(path: str | Path) -> dict:
    """
    Read a snapshot back. Returns the header values and the raw columns;
    callers rebuild the grid (see controllers.grid_controller.field_from_snapshot).
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"Snapshot file not found: {path}")
    with open(path, encoding="utf-8") as handle:
        header = handle.readline().split()
        if len(header) != 6:
            raise ConfigError(f"Malformed snapshot header in {path}: expected `N b q R_max M t`")
        data = np.loadtxt(handle, ndmin=2)
    N, b, q, R_max, M, t = header
    if data.shape != (int(M), 3):
        raise ConfigError(f"Snapshot {path} declares M={M} rows but holds {data.shape[0]}")
    return {
        "N": int(N),
        "b": float(b),
        "q": float(q),
        "R_max": float(R_max),
        "M": int(M),
        "t": float(t),
        "r": data[:, 0],
        "values": data[:, 1] + 1j * data[:, 2],
    }
