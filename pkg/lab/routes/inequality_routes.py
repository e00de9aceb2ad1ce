from pathlib import Path
from typing import Annotated, Optional

import typer

from routes.base_routes import execute, show


def verify_inequalities(
    N: Annotated[Optional[int], typer.Option("--N")] = None,
    b: Annotated[Optional[float], typer.Option("--b")] = None,
    q: Annotated[Optional[float], typer.Option("--q")] = None,
    R_max: Annotated[Optional[float], typer.Option("--R-max")] = None,
    M: Annotated[Optional[int], typer.Option("--M")] = None,
    n_samples: Annotated[Optional[int], typer.Option("--n-samples")] = None,
    seed: Annotated[Optional[int], typer.Option("--seed")] = None,
    config: Annotated[Optional[Path], typer.Option("--config")] = None,
    output_dir: Annotated[Optional[str], typer.Option("--output-dir")] = None,
):
    """
    Sample the GN, Strauss and Hardy inequalities on random radial profiles
    """
    manifest = execute("verify-inequalities", config, {
        "N": N, "b": b, "q": q, "r_max": R_max, "m": M,
        "n_samples": n_samples, "seed": seed, "output_dir": output_dir,
    })
    report = manifest.outputs["inequalities"]
    show("inequalities", {
        "C_opt": report["c_opt"],
        "max GN ratio": report["gn_max_ratio"],
        "GN violations": report["gn_violations"],
        "Strauss constant": report["strauss_constant"],
        "fractional Strauss constant": report["strauss_fractional_constant"],
        "Hardy constant": report["hardy_constant"],
    }, manifest)
