import json
import logging
from pathlib import Path

import typer
from rich.console import Console
from rich.markup import escape
from rich.table import Table

from controllers.run_controller import build_config, run
from models.manifest_model import RunManifest
from utils.errors import LabError

logger = logging.getLogger(__name__)
console = Console()


def execute(command: str, config_path: Path | None, overrides: dict) -> RunManifest:
    """Resolve the config, run the command and turn lab errors into exit codes"""
    try:
        config = build_config(overrides, config_path)
        return run(command, config)
    except LabError as exc:
        console.print(f"[bold red]{type(exc).__name__}[/]: {escape(exc.detail)}")
        if exc.payload:
            console.print_json(json.dumps(exc.payload, default=str))
        raise typer.Exit(code=exc.exit_code)


def summary_table(title: str, rows: dict) -> Table:
    table = Table(title=title, show_header=True)
    table.add_column("quantity")
    table.add_column("value", justify="right")
    for key, value in rows.items():
        table.add_row(key, f"{value:.10g}" if isinstance(value, float) else str(value))
    return table


def show(title: str, rows: dict, manifest: RunManifest):
    console.print(summary_table(title, rows))
    for name, path in manifest.files.items():
        console.print(f"{name}: {path}")
