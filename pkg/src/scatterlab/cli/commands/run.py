#
# Copyright (c) 2025, Daily
#
# SPDX-License-Identifier: BSD 2-Clause License
#

import sys

import typer
from loguru import logger

from scatterlab._utils.console_utils import console
from scatterlab._utils.scenario_utils import CONFIG_OPTION, Scenario, with_scenario
from scatterlab.constants import (
    EXIT_IO,
    EXIT_NUMERIC,
    EXIT_SCENARIO,
    OUTPUT_FORMATS,
    Subcommand,
)
from scatterlab.exception import ConfigError, DomainError, Error, FieldFormatError, NumericError
from scatterlab.runner import run

OUT_OPTION: str | None = typer.Option(
    None, "--out", help="Write the table here instead of stdout (or the scenario's output.path)"
)
FORMAT_OPTION: str | None = typer.Option(
    None, "--format", help=f"Output format ({' or '.join(OUTPUT_FORMATS)})"
)
EPSILON_OPTION: float | None = typer.Option(
    None, "--epsilon", help="Override the resolvent ε", min=0.0, rich_help_panel="Numerics"
)
ORDER_OPTION: int | None = typer.Option(
    None, "--order", help="Override the truncation order", min=1, rich_help_panel="Numerics"
)
HORIZON_OPTION: float | None = typer.Option(
    None, "--horizon", help="Override the time horizon T", min=0.0, rich_help_panel="Numerics"
)
SEED_OPTION: int | None = typer.Option(
    None, "--seed", help="Override the random seed", min=0, rich_help_panel="Numerics"
)

_HELP = {
    "kinematics": "Elastic outgoing momenta over a sweep of detector directions",
    "greens-check": "FFT propagator against the closed form over the ε schedule",
    "amplitude": "Transition amplitudes for the scenario process",
    "xsec": "Relative dσ/dΩ = |C|² over the scattering angle",
    "reciprocity": "Reciprocity residuals for each process and its inverse",
    "smatrix": "Exact vs truncated S-matrix: unitarity, Born error and sum rule",
    "goldenrule": "Golden-rule rate vs horizon on the quasi-continuum model",
}


def _fail(subcommand: str, code: int, error: Exception):
    if isinstance(error, Error):
        console.run_failure(error, subcommand)
    else:
        console.error(f"I/O error: {error}", title_extra=subcommand)
    raise typer.Exit(code)


def execute(
    subcommand: Subcommand,
    scenario: Scenario,
    out: str | None,
    output_format: str | None,
    overrides: dict,
    exports: dict | None = None,
):
    if output_format is not None and output_format not in OUTPUT_FORMATS:
        console.error(f"Unknown format '{output_format}', expected {' or '.join(OUTPUT_FORMATS)}")
        raise typer.Exit(EXIT_SCENARIO)
    if subcommand == "xsec" and (overrides.get("order") or 1) > 1:
        console.error(
            "xsec uses the first Born amplitude; --order must be 1", title_extra=subcommand
        )
        raise typer.Exit(EXIT_SCENARIO)

    scenario = scenario.with_overrides(**overrides, format=output_format)
    try:
        table = run(subcommand, scenario, **(exports or {}))
        text = table.render(scenario.output.format)
        destination = out or scenario.output.path
        if destination:
            with open(destination, "w", encoding="utf-8", newline="") as f:
                f.write(text)
            console.success(
                f"Wrote {len(table.rows)} row(s) to {destination}", title_extra=subcommand
            )
        else:
            sys.stdout.write(text)
            sys.stdout.flush()
    except (DomainError, ConfigError) as e:
        _fail(subcommand, EXIT_SCENARIO, e)
    except NumericError as e:
        _fail(subcommand, EXIT_NUMERIC, e)
    except (FieldFormatError, OSError) as e:
        _fail(subcommand, EXIT_IO, e)
    logger.debug("{} finished", subcommand)


def _overrides(epsilon, order, horizon, seed) -> dict:
    return {"epsilon": epsilon, "order": order, "horizon": horizon, "seed": seed}


def _plain_command(app: typer.Typer, subcommand: Subcommand):
    @app.command(name=subcommand, help=_HELP[subcommand], rich_help_panel="Scenario")
    @with_scenario
    def command(
        scenario=typer.Option(None, hidden=True),
        config: str | None = CONFIG_OPTION,
        out: str | None = OUT_OPTION,
        output_format: str | None = FORMAT_OPTION,
        epsilon: float | None = EPSILON_OPTION,
        order: int | None = ORDER_OPTION,
        horizon: float | None = HORIZON_OPTION,
        seed: int | None = SEED_OPTION,
    ):
        execute(subcommand, scenario, out, output_format, _overrides(epsilon, order, horizon, seed))

    return command


def create_run_commands(app: typer.Typer):
    """Add one command per scenario subcommand to the main CLI app."""
    for subcommand in ("kinematics", "xsec", "reciprocity", "smatrix", "goldenrule"):
        _plain_command(app, subcommand)

    @app.command(name="greens-check", help=_HELP["greens-check"], rich_help_panel="Scenario")
    @with_scenario
    def greens_check(
        scenario=typer.Option(None, hidden=True),
        config: str | None = CONFIG_OPTION,
        out: str | None = OUT_OPTION,
        output_format: str | None = FORMAT_OPTION,
        epsilon: float | None = EPSILON_OPTION,
        order: int | None = ORDER_OPTION,
        horizon: float | None = HORIZON_OPTION,
        seed: int | None = SEED_OPTION,
        field_out: str | None = typer.Option(
            None, "--field-out", help="Also write the FFT propagator at the smallest ε (binary)"
        ),
    ):
        execute(
            "greens-check",
            scenario,
            out,
            output_format,
            _overrides(epsilon, order, horizon, seed),
            {"field_out": field_out},
        )

    @app.command(name="amplitude", help=_HELP["amplitude"], rich_help_panel="Scenario")
    @with_scenario
    def amplitude(
        scenario=typer.Option(None, hidden=True),
        config: str | None = CONFIG_OPTION,
        out: str | None = OUT_OPTION,
        output_format: str | None = FORMAT_OPTION,
        epsilon: float | None = EPSILON_OPTION,
        order: int | None = ORDER_OPTION,
        horizon: float | None = HORIZON_OPTION,
        seed: int | None = SEED_OPTION,
        tmatrix_out: str | None = typer.Option(
            None, "--tmatrix-out", help="Also write the T-matrix (<path>.json + <path>.bin)"
        ),
    ):
        execute(
            "amplitude",
            scenario,
            out,
            output_format,
            _overrides(epsilon, order, horizon, seed),
            {"tmatrix_out": tmatrix_out},
        )
