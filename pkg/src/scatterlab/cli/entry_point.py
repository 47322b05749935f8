#
# Copyright (c) 2025, Daily
#
# SPDX-License-Identifier: BSD 2-Clause License
#

import os
import sys

import typer
from loguru import logger

from scatterlab.cli import SCATTERLAB_SCENARIO_PATH
from scatterlab.cli.commands.run import create_run_commands
from scatterlab.cli.commands.scenario import scenario_cli
from scatterlab.cli.config import apply_user_settings, config, user_config

apply_user_settings()
logger.remove()
logger.add(sys.stderr, level=config.get("cli_log_level"))


def version_callback(value: bool):
    if value:
        from scatterlab.__version__ import version

        typer.echo(f"∿ scatterlab version: {typer.style(version, fg=typer.colors.GREEN)}")
        raise typer.Exit()


def _setting_source(key: str) -> str:
    if "SCATTERLAB_" + key.upper() in os.environ:
        return "environment"
    return "settings file" if key in user_config else "default"


def show_config_callback(value: bool):
    if value:
        from rich.table import Table

        from scatterlab._utils.console_utils import console

        table = Table(show_header=True, header_style="bold")
        table.add_column("Setting")
        table.add_column("Value")
        table.add_column("Source", style="dim")
        for key, setting_value in config.to_dict().items():
            table.add_row(key, repr(setting_value), _setting_source(key))
        console.print(table)

        scenario_path = os.environ.get("SCATTERLAB_SCENARIO_PATH") or SCATTERLAB_SCENARIO_PATH
        found = "" if os.path.exists(scenario_path) else " [yellow](not found)[/yellow]"
        console.print(f"Default scenario: [dim]{scenario_path}[/dim]{found}")
        raise typer.Exit()


entrypoint_cli_typer = typer.Typer(
    no_args_is_help=True,
    add_completion=False,
    rich_markup_mode="markdown",
    short_help="Scattering amplitudes, propagators and S-matrix checks",
    help="∿ scatterlab: scenario-driven Born series, Green's functions and S-matrix laboratory.",
)


@entrypoint_cli_typer.callback()
def cli(
    ctx: typer.Context,
    _version: bool = typer.Option(None, "--version", callback=version_callback, help="CLI version"),
    _show_cli_config: bool = typer.Option(
        None,
        "--show-cli-config",
        callback=show_config_callback,
        help="Show effective settings (environment > user config file > defaults)",
    ),
):
    pass


create_run_commands(entrypoint_cli_typer)
entrypoint_cli_typer.add_typer(scenario_cli, rich_help_panel="Commands")

entrypoint_cli = typer.main.get_command(entrypoint_cli_typer)
