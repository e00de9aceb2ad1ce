from pathlib import Path
from typing import Annotated, Optional

import typer

from routes.base_routes import execute, show


def counterexample(
    N: Annotated[Optional[int], typer.Option("--N")] = None,
    b: Annotated[Optional[float], typer.Option("--b")] = None,
    q: Annotated[Optional[float], typer.Option("--q")] = None,
    bump_n: Annotated[Optional[str], typer.Option("--bump-n", help="translation radii, e.g. 4,8,16,32")] = None,
    config: Annotated[Optional[Path], typer.Option("--config")] = None,
    output_dir: Annotated[Optional[str], typer.Option("--output-dir")] = None,
):
    """
    Translated bumps below the radial bound q = 1 + 2b/(N-1): fit the growth of the GN quotient
    """
    manifest = execute("counterexample", config, {
        "N": N, "b": b, "q": q, "bump_n": bump_n, "output_dir": output_dir,
    })
    report = manifest.outputs["counterexample"]
    show("counterexample", {
        "fitted slope": report["slope"],
        "predicted slope": report["expected_slope"],
        "1 + 2b/(N-1)": report["radial_threshold"],
        "below threshold": report["below_threshold"],
    }, manifest)
