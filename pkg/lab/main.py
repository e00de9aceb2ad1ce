from typing import Annotated, Optional

import typer

from routes.classify_routes import classify
from routes.counterexample_routes import counterexample
from routes.evolve_routes import evolve
from routes.groundstate_routes import groundstate
from routes.inequality_routes import verify_inequalities
from routes.sweep_routes import sweep
from routes.virial_routes import virial
from utils.config import TOOL_NAME, VERSION
from utils.logging_config import setup_logging

app = typer.Typer(
    name=TOOL_NAME,
    help="Numerical lab for the focusing inhomogeneous biharmonic Schrödinger equation",
    no_args_is_help=True,
    add_completion=False,
)

# Register commands
app.command("groundstate")(groundstate)
app.command("evolve")(evolve)
app.command("classify")(classify)
app.command("virial")(virial)
app.command("verify-inequalities")(verify_inequalities)
app.command("counterexample")(counterexample)
app.command("sweep")(sweep)


def _version(value: bool):
    if value:
        typer.echo(f"{TOOL_NAME} {VERSION}")
        raise typer.Exit()


@app.callback()
def main(
    log_level: Annotated[Optional[str], typer.Option("--log-level", envvar="LAB_LOG_LEVEL")] = None,
    version: Annotated[bool, typer.Option("--version", callback=_version, is_eager=True)] = False,
):
    setup_logging(log_level)


if __name__ == "__main__":
    app()
