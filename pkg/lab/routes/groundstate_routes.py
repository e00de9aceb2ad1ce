from pathlib import Path
from typing import Annotated, Optional

import typer

from routes.base_routes import execute, show


def groundstate(
    N: Annotated[Optional[int], typer.Option("--N", help="spatial dimension")] = None,
    b: Annotated[Optional[float], typer.Option("--b", help="weight exponent of |x|^b")] = None,
    q: Annotated[Optional[float], typer.Option("--q", help="nonlinearity exponent")] = None,
    R_max: Annotated[Optional[float], typer.Option("--R-max")] = None,
    M: Annotated[Optional[int], typer.Option("--M", help="number of grid nodes")] = None,
    max_iter: Annotated[Optional[int], typer.Option("--max-iter")] = None,
    survey_widths: Annotated[Optional[str], typer.Option("--survey-widths", help="e.g. 0.5,1,2")] = None,
    config: Annotated[Optional[Path], typer.Option("--config", help="KEY=value run file")] = None,
    output_dir: Annotated[Optional[str], typer.Option("--output-dir")] = None,
):
    """
    Compute the ground state ζ and the sharp GN constant, with residual certificates
    """
    manifest = execute("groundstate", config, {
        "N": N, "b": b, "q": q, "r_max": R_max, "m": M,
        "max_iter": max_iter, "survey_widths": survey_widths, "output_dir": output_dir,
    })
    gs = manifest.outputs["ground_state"]
    show("ground state", {
        "C_opt": gs["c_opt"],
        "‖ζ‖²": gs["mass_z"],
        "‖Δζ‖²": gs["kinetic_z"],
        "Euler residual": gs["residual_euler"],
        "Pohozaev residuals": ", ".join(f"{x:.3g}" for x in gs["residual_pohozaev"]),
        "sharp formula residual": gs["residual_copt_formula"],
    }, manifest)
