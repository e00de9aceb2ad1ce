from pathlib import Path
from typing import Annotated, Optional

import typer

from routes.base_routes import execute, show


def sweep(
    N: Annotated[Optional[str], typer.Option("--N", help="a:step:b or a single value")] = None,
    b: Annotated[Optional[str], typer.Option("--b")] = None,
    q: Annotated[Optional[str], typer.Option("--q")] = None,
    command: Annotated[Optional[str], typer.Option("--command", help="command run at every point")] = None,
    R_max: Annotated[Optional[float], typer.Option("--R-max")] = None,
    M: Annotated[Optional[int], typer.Option("--M")] = None,
    workers: Annotated[Optional[int], typer.Option("--workers")] = None,
    config: Annotated[Optional[Path], typer.Option("--config")] = None,
    output_dir: Annotated[Optional[str], typer.Option("--output-dir")] = None,
):
    """
    Run one command over a cartesian grid of (N, b, q)
    """
    manifest = execute("sweep", config, {
        "sweep_n": N, "sweep_b": b, "sweep_q": q, "sweep_command": command,
        "r_max": R_max, "m": M, "workers": workers, "output_dir": output_dir,
    })
    show("sweep", {
        "points": manifest.outputs["points"],
        "skipped or failed": manifest.outputs["not_ok"],
    }, manifest)
