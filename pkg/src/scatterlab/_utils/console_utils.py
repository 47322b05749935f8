#
# Copyright (c) 2025, Daily
#
# SPDX-License-Identifier: BSD 2-Clause License
#

from rich.console import Console, Group
from rich.panel import Panel
from rich.table import Table

from scatterlab.cli import PANEL_TITLE_ERROR, PANEL_TITLE_SUCCESS
from scatterlab.exception import Error, ScenarioError

_STYLES = {PANEL_TITLE_SUCCESS: "green", PANEL_TITLE_ERROR: "red"}


class ScatterConsole(Console):
    def _panel(self, body, heading: str, title: str | None, title_extra, subtitle):
        colour = _STYLES[heading]
        if not title:
            title = heading if title_extra is None else f"{heading} - {title_extra}"
        self.print(
            Panel(
                body,
                title=f"[bold {colour}]{title}[/bold {colour}]",
                subtitle=subtitle,
                title_align="left",
                subtitle_align="left",
                border_style=colour,
            )
        )

    def success(
        self,
        message,
        title: str | None = None,
        title_extra: str | None = None,
        subtitle: str | None = None,
    ):
        self._panel(message, PANEL_TITLE_SUCCESS, title, title_extra, subtitle)

    def error(
        self,
        message,
        title: str | None = None,
        title_extra: str | None = None,
        subtitle: str | None = None,
    ):
        self._panel(message, PANEL_TITLE_ERROR, title, title_extra, subtitle)

    def scenario_problems(self, path: str, error: ScenarioError):
        """One row per problem, in file order."""
        table = Table(show_header=True, header_style="bold", box=None)
        table.add_column("Line", justify="right", style="dim")
        table.add_column("Problem")
        for problem in error.problems:
            table.add_row(str(problem.line or "-"), problem.message)
        self.error(
            Group(f"[red]{path}[/red] is not a valid scenario\n", table),
            title_extra=f"{len(error.problems)} problem(s)",
        )

    def run_failure(self, error: Error, subcommand: str | None = None):
        """Error panel with the exception notes (scenario hash, stage) as subtitle."""
        notes = "; ".join(getattr(error, "__notes__", []))
        self.error(
            error.message,
            title_extra=type(error).__name__ if subcommand is None else subcommand,
            subtitle=f"[dim]{notes}[/dim]" if notes else None,
        )


# Result tables go to stdout, so everything human-facing goes to stderr
console = ScatterConsole(stderr=True)
