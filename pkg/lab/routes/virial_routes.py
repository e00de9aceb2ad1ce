from pathlib import Path
from typing import Annotated, Optional

import typer

from routes.base_routes import execute, show


def virial(
    N: Annotated[Optional[int], typer.Option("--N")] = None,
    b: Annotated[Optional[float], typer.Option("--b")] = None,
    q: Annotated[Optional[float], typer.Option("--q")] = None,
    R_max: Annotated[Optional[float], typer.Option("--R-max")] = None,
    M: Annotated[Optional[int], typer.Option("--M")] = None,
    dt: Annotated[Optional[float], typer.Option("--dt")] = None,
    T: Annotated[Optional[float], typer.Option("--T")] = None,
    snapshot_stride: Annotated[Optional[int], typer.Option("--snapshot-stride")] = None,
    cutoff_R: Annotated[Optional[float], typer.Option("--cutoff-R", help="omit for the pure weight r²")] = None,
    init: Annotated[Optional[str], typer.Option("--init")] = None,
    config: Annotated[Optional[Path], typer.Option("--config")] = None,
    output_dir: Annotated[Optional[str], typer.Option("--output-dir")] = None,
):
    """
    Check the localised virial identity along a trajectory
    """
    manifest = execute("virial", config, {
        "N": N, "b": b, "q": q, "r_max": R_max, "m": M, "dt": dt, "t_final": T,
        "snapshot_stride": snapshot_stride, "cutoff_r": cutoff_R, "init": init, "output_dir": output_dir,
    })
    outputs = manifest.outputs
    show("virial", {
        "max relative mismatch": outputs["virial"]["max_relative_mismatch"],
        "cutoff certified": outputs["cutoff"]["passed"],
        "M_R eventually decreasing": outputs["bound"]["eventually_decreasing"],
        "terminated": outputs["terminated"],
    }, manifest)
