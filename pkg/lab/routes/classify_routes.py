from pathlib import Path
from typing import Annotated, Optional

import typer

from routes.base_routes import execute, show


def classify(
    N: Annotated[Optional[int], typer.Option("--N")] = None,
    b: Annotated[Optional[float], typer.Option("--b")] = None,
    q: Annotated[Optional[float], typer.Option("--q")] = None,
    R_max: Annotated[Optional[float], typer.Option("--R-max")] = None,
    M: Annotated[Optional[int], typer.Option("--M")] = None,
    init: Annotated[Optional[str], typer.Option("--init")] = None,
    config: Annotated[Optional[Path], typer.Option("--config")] = None,
    output_dir: Annotated[Optional[str], typer.Option("--output-dir")] = None,
):
    """
    Compare the initial datum with the ground-state thresholds
    """
    manifest = execute("classify", config, {
        "N": N, "b": b, "q": q, "r_max": R_max, "m": M, "init": init, "output_dir": output_dir,
    })
    report = manifest.outputs["classification"]
    rows = {
        "classification": report["classification"],
        "E^s_c M^(2-s_c) (v0)": report["lhs_energy_mass"],
        "E^s_c M^(2-s_c) (ζ)": report["rhs_energy_mass"],
        "‖Δv‖^s_c ‖v‖^(2-s_c) (v0)": report["lhs_grad_mass"],
        "‖Δζ‖^s_c ‖ζ‖^(2-s_c)": report["rhs_grad_mass"],
    }
    for index, note in enumerate(report["notes"]):
        rows[f"note {index + 1}"] = note
    show("dichotomy", rows, manifest)
