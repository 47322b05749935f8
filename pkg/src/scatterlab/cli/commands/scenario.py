#
# Copyright (c) 2025, Daily
#
# SPDX-License-Identifier: BSD 2-Clause License
#

import typer
from rich.table import Table

from scatterlab._utils.console_utils import console
from scatterlab._utils.scenario_utils import (
    CONFIG_OPTION,
    defaults_table,
    scenario_hash,
    with_scenario,
)

scenario_cli = typer.Typer(name="scenario", help="Scenario file helpers", no_args_is_help=True)


@scenario_cli.command(name="check", help="Validate a scenario and print it with defaults filled")
@with_scenario
def check(
    scenario=typer.Option(None, hidden=True),
    config: str | None = CONFIG_OPTION,
):
    console.print_json(data=scenario.to_dict())
    console.success(f"Scenario is valid. Hash: [bold]{scenario_hash(scenario)}[/bold]")


@scenario_cli.command(name="defaults", help="Show every scenario key with its default")
def defaults():
    table = Table(show_header=True, header_style="bold")
    table.add_column("Section")
    table.add_column("Key")
    table.add_column("Default")

    for section, keys in defaults_table().items():
        for key, value in keys.items():
            table.add_row(section, key, "(derived)" if value is None else repr(value))

    console.print(table)
