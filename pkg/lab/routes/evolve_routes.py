from pathlib import Path
from typing import Annotated, Optional

import typer

from routes.base_routes import execute, show


def evolve(
    N: Annotated[Optional[int], typer.Option("--N")] = None,
    b: Annotated[Optional[float], typer.Option("--b")] = None,
    q: Annotated[Optional[float], typer.Option("--q")] = None,
    R_max: Annotated[Optional[float], typer.Option("--R-max")] = None,
    M: Annotated[Optional[int], typer.Option("--M")] = None,
    dt: Annotated[Optional[float], typer.Option("--dt")] = None,
    T: Annotated[Optional[float], typer.Option("--T", help="final time")] = None,
    snapshot_stride: Annotated[Optional[int], typer.Option("--snapshot-stride")] = None,
    init: Annotated[Optional[str], typer.Option("--init", help="gaussian[:A:w] | scaled-zeta:λ | snapshot:path")] = None,
    absorbing: Annotated[Optional[bool], typer.Option("--absorbing/--no-absorbing")] = None,
    config: Annotated[Optional[Path], typer.Option("--config")] = None,
    output_dir: Annotated[Optional[str], typer.Option("--output-dir")] = None,
):
    """
    Integrate the equation in time and monitor mass, energy and blow-up
    """
    manifest = execute("evolve", config, {
        "N": N, "b": b, "q": q, "r_max": R_max, "m": M, "dt": dt, "t_final": T,
        "snapshot_stride": snapshot_stride, "init": init, "absorbing": absorbing, "output_dir": output_dir,
    })
    outputs = manifest.outputs
    show("evolution", {
        "terminated": outputs["trajectory"]["terminated"],
        "t_stop": outputs["trajectory"]["t_stop"],
        "mass drift": outputs["mass_drift"],
        "energy drift": outputs["energy_drift"],
        "blow-up flagged": outputs["blowup"]["detected"],
    }, manifest)
