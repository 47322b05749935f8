#
# Copyright (c) 2025, Daily
#
# SPDX-License-Identifier: BSD 2-Clause License
#

"""Scenario files: strict TOML with fixed sections, defaults and range checks.

Every problem found is reported at once, with the line it comes from.
"""

import functools
import hashlib
import json
import math
import os
import re
from collections.abc import Callable
from typing import Any, NamedTuple

import attr
import toml
import typer
from attr import dataclass, field
from loguru import logger

from scatterlab.born import MomentumGrid, Potential
from scatterlab.cli import SCATTERLAB_SCENARIO_PATH
from scatterlab.constants import (
    LAB_KINDS,
    OUTPUT_FORMATS,
    PROCESS_KINDS,
    LabKind,
    OutputFormat,
    ProcessKind,
)
from scatterlab.exception import ScenarioError, ScenarioProblem
from scatterlab.greenfn import EpsilonSchedule, SpatialGrid
from scatterlab.system import FiniteSystem, quasi_continuum_system, random_system

# ---- Sections


@dataclass(frozen=True)
class SystemSection:
    masses: list = field(factory=lambda: [1.0])
    charges: list = field(factory=lambda: [1.0])
    lab_kind: LabKind = "random"
    lab_dimension: int = 8
    lab_coupling: float = 0.1
    lab_spacing: float = 0.01
    lab_levels: int = 201


@dataclass(frozen=True)
class GridSection:
    side: float = 20.0
    n_points: int = 9
    spatial_side: float = 40.0
    spatial_points: int = 64


@dataclass(frozen=True)
class PotentialSection:
    kind: str = "yukawa"
    alpha: float | None = None
    mu: float = 1.0
    width: float = 1.0


@dataclass(frozen=True)
class ProcessSection:
    kind: ProcessKind = "single"
    momenta_in: list = field(factory=lambda: [[1, 0, 0]])
    momenta_out: list = field(factory=list)
    exchange_sign: int = 1
    theta_start_deg: float = 20.0
    theta_stop_deg: float = 160.0
    theta_steps: int = 15
    phi_deg: float = 0.0


@dataclass(frozen=True)
class NumericsSection:
    epsilon: float | None = None
    epsilon_schedule: list = field(factory=lambda: [0.1, 0.01, 0.001])
    order: int = 1
    horizon: float = 50.0
    horizons: list = field(factory=list)
    quadrature_points: int = 32
    seed: int = 0
    dt: float = 0.5


@dataclass(frozen=True)
class OutputSection:
    format: OutputFormat = "csv"
    path: str = ""


SECTIONS = {
    "system": SystemSection,
    "grid": GridSection,
    "potential": PotentialSection,
    "process": ProcessSection,
    "numerics": NumericsSection,
    "output": OutputSection,
}
REQUIRED_SECTIONS = ("system", "grid", "potential", "process")


@dataclass(frozen=True)
class Scenario:
    system: SystemSection = field(factory=SystemSection)
    grid: GridSection = field(factory=GridSection)
    potential: PotentialSection = field(factory=PotentialSection)
    process: ProcessSection = field(factory=ProcessSection)
    numerics: NumericsSection = field(factory=NumericsSection)
    output: OutputSection = field(factory=OutputSection)

    def to_dict(self):
        return attr.asdict(self)

    def with_overrides(self, **overrides) -> "Scenario":
        """Apply CLI flags; ``None`` means "keep the scenario value"."""
        numerics = {k: v for k, v in overrides.items() if k != "format" and v is not None}
        if "horizon" in numerics:
            numerics["horizons"] = [numerics["horizon"]]
        changes = {}
        if numerics:
            changes["numerics"] = attr.evolve(self.numerics, **numerics)
        if overrides.get("format") is not None:
            changes["output"] = attr.evolve(self.output, format=overrides["format"])
        return attr.evolve(self, **changes) if changes else self

    # ---- Model builders

    @property
    def masses(self) -> tuple[float, float]:
        masses = [float(m) for m in self.system.masses]
        return masses[0], masses[-1]

    def momentum_grid(self) -> MomentumGrid:
        return MomentumGrid(side=self.grid.side, n_points=self.grid.n_points)

    def spatial_grid(self) -> SpatialGrid:
        return SpatialGrid(side=self.grid.spatial_side, n_points=self.grid.spatial_points)

    def coupling(self) -> float:
        if self.potential.alpha is not None:
            return float(self.potential.alpha)
        return math.prod(float(q) for q in self.system.charges)

    def potential_model(self) -> Potential:
        kind = self.potential.kind
        if kind == "coulomb":
            return Potential.coulomb(self.coupling())
        if kind == "gaussian":
            return Potential.gaussian(self.coupling(), self.potential.width)
        return Potential.yukawa(self.coupling(), self.potential.mu)

    def epsilon_schedule(self) -> EpsilonSchedule:
        return EpsilonSchedule(self.numerics.epsilon_schedule)

    def finite_system(self) -> FiniteSystem:
        if self.system.lab_kind == "quasi_continuum":
            return quasi_continuum_system(
                levels=self.system.lab_levels,
                spacing=self.system.lab_spacing,
                coupling=self.system.lab_coupling,
            )
        return random_system(
            self.system.lab_dimension, self.system.lab_coupling, seed=self.numerics.seed
        )


def scenario_hash(scenario: Scenario) -> str:
    """First 16 hex digits of the SHA-256 of the canonical JSON of the resolved scenario."""
    canonical = json.dumps(scenario.to_dict(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


# ---- Key checks


class _Key(NamedTuple):
    transform: Callable[[Any], Any]
    check: Callable[[Any], str | None] = lambda v: None  # noqa: E731


def _number(value) -> float:
    if isinstance(value, bool) or not isinstance(value, int | float):
        raise TypeError("expected a number")
    if not math.isfinite(value):
        raise ValueError("expected a finite number")
    return float(value)


def _integer(value) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise TypeError("expected an integer")
    return value


def _string(value) -> str:
    if not isinstance(value, str):
        raise TypeError("expected a string")
    return value


def _number_list(value) -> list:
    if not isinstance(value, list):
        raise TypeError("expected a list of numbers")
    return [_number(v) for v in value]


def _lattice_list(value) -> list:
    if not isinstance(value, list) or not all(isinstance(v, list) and len(v) == 3 for v in value):
        raise TypeError("expected a list of [nx, ny, nz] integer triples")
    return [[_integer(c) for c in v] for v in value]


def _positive(v):
    return None if v > 0 else f"must be > 0 (got {v})"


def _non_negative(v):
    return None if v >= 0 else f"must be >= 0 (got {v})"


def _at_least(low):
    return lambda v: None if v >= low else f"must be >= {low} (got {v})"


def _between(low, high):
    return lambda v: None if low <= v <= high else f"must be between {low} and {high} (got {v})"


def _one_of(choices):
    return lambda v: None if v in choices else f"must be one of {choices} (got {v!r})"


def _all_positive(values):
    return None if all(v > 0 for v in values) else f"must all be > 0 (got {values})"


def _power_of_two(v):
    return None if v > 0 and v & (v - 1) == 0 else f"must be a power of two (got {v})"


def _decreasing_positive(values):
    if not values:
        return "must not be empty"
    if any(v <= 0 for v in values):
        return f"must all be > 0 (got {values})"
    if any(b >= a for a, b in zip(values, values[1:])):
        return f"must be strictly decreasing (got {values})"
    return None


def _count(low, high):
    def check(values):
        if low <= len(values) <= high:
            return None
        return f"must have between {low} and {high} entries (got {len(values)})"

    return check


def _all(*checks):
    def check(v):
        for c in checks:
            problem = c(v)
            if problem:
                return problem
        return None

    return check


_KEYS: dict[str, dict[str, _Key]] = {
    "system": {
        "masses": _Key(_number_list, _all(_count(1, 2), _all_positive)),
        "charges": _Key(_number_list, _count(1, 2)),
        "lab_kind": _Key(_string, _one_of(LAB_KINDS)),
        "lab_dimension": _Key(_integer, _between(1, 256)),
        "lab_coupling": _Key(_number, _non_negative),
        "lab_spacing": _Key(_number, _positive),
        "lab_levels": _Key(_integer, _between(1, 2048)),
    },
    "grid": {
        "side": _Key(_number, _positive),
        "n_points": _Key(_integer, _between(1, 25)),
        "spatial_side": _Key(_number, _positive),
        "spatial_points": _Key(_integer, _all(_power_of_two, _between(2, 256))),
    },
    "potential": {
        "kind": _Key(_string, _one_of(["coulomb", "yukawa", "gaussian"])),
        "alpha": _Key(_number),
        "mu": _Key(_number, _non_negative),
        "width": _Key(_number, _positive),
    },
    "process": {
        "kind": _Key(_string, _one_of(PROCESS_KINDS)),
        "momenta_in": _Key(_lattice_list, _count(1, 2)),
        "momenta_out": _Key(_lattice_list, _count(0, 2)),
        "exchange_sign": _Key(_integer, _one_of([1, -1])),
        "theta_start_deg": _Key(_number, _between(0.0, 180.0)),
        "theta_stop_deg": _Key(_number, _between(0.0, 180.0)),
        "theta_steps": _Key(_integer, _between(1, 10000)),
        "phi_deg": _Key(_number),
    },
    "numerics": {
        "epsilon": _Key(_number, _positive),
        "epsilon_schedule": _Key(_number_list, _decreasing_positive),
        "order": _Key(_integer, _between(1, 50)),
        "horizon": _Key(_number, _positive),
        "horizons": _Key(_number_list, lambda v: _all_positive(v) if v else None),
        "quadrature_points": _Key(_integer, _between(2, 256)),
        "seed": _Key(_integer, _between(0, 2**64 - 1)),
        "dt": _Key(_number, _positive),
    },
    "output": {
        "format": _Key(_string, _one_of(OUTPUT_FORMATS)),
        "path": _Key(_string),
    },
}

_SECTION_RE = re.compile(r"^\s*\[\s*([A-Za-z0-9_-]+)\s*\]")
_KEY_RE = re.compile(r"^\s*([A-Za-z0-9_-]+)\s*=")


def _line_index(text: str) -> tuple[dict[str, int], dict[tuple[str, str], int]]:
    """Line numbers of section headers and of ``key =`` lines, by section."""
    sections, keys = {}, {}
    current = ""
    for number, line in enumerate(text.splitlines(), start=1):
        if match := _SECTION_RE.match(line):
            current = match.group(1)
            sections.setdefault(current, number)
        elif match := _KEY_RE.match(line):
            keys.setdefault((current, match.group(1)), number)
    return sections, keys


def _cross_checks(values: dict, line_of) -> list[ScenarioProblem]:
    problems = []
    process, system, potential = values["process"], values["system"], values["potential"]
    count = 1 if process.get("kind", "single") == "single" else 2
    momenta_in = process.get("momenta_in")
    if momenta_in is not None and len(momenta_in) != count:
        problems.append(
            ScenarioProblem(
                line_of("process", "momenta_in"),
                f"[process] momenta_in: a {process.get('kind', 'single')} process needs "
                f"{count} momenta (got {len(momenta_in)})",
            )
        )
    momenta_out = process.get("momenta_out") or []
    if momenta_out and len(momenta_out) != count:
        problems.append(
            ScenarioProblem(
                line_of("process", "momenta_out"),
                f"[process] momenta_out: needs {count} momenta or none (got {len(momenta_out)})",
            )
        )
    masses = system.get("masses")
    if process.get("kind") == "pair_identical" and masses and len(set(masses)) > 1:
        problems.append(
            ScenarioProblem(
                line_of("system", "masses"),
                f"[system] masses: identical particles need equal masses (got {masses})",
            )
        )
    if potential.get("kind") == "yukawa" and potential.get("mu", 1.0) == 0:
        problems.append(
            ScenarioProblem(
                line_of("potential", "mu"),
                "[potential] mu: yukawa needs mu > 0 (use kind = \"coulomb\" for mu = 0)",
            )
        )
    defaults = ProcessSection()
    start = process.get("theta_start_deg", defaults.theta_start_deg)
    stop = process.get("theta_stop_deg", defaults.theta_stop_deg)
    if start > stop:
        problems.append(
            ScenarioProblem(
                line_of("process", "theta_stop_deg"),
                f"[process] theta_stop_deg: must be >= theta_start_deg ({stop} < {start})",
            )
        )
    return problems


def parse_scenario(text: str) -> Scenario:
    """Parse and validate scenario text, filling in defaults.

    Raises ScenarioError listing every problem found.
    """
    try:
        data = toml.loads(text)
    except toml.TomlDecodeError as exc:
        raise ScenarioError([ScenarioProblem(exc.lineno, f"Invalid TOML: {exc.msg}")]) from exc

    section_lines, key_lines = _line_index(text)

    def line_of(section, key=None):
        if key is None:
            return section_lines.get(section)
        return key_lines.get((section, key), section_lines.get(section))

    problems: list[ScenarioProblem] = []
    values: dict[str, dict] = {name: {} for name in SECTIONS}

    for name, content in data.items():
        if not isinstance(content, dict):
            message = (
                f"[{name}] must be a table"
                if name in SECTIONS
                else f"unknown key '{name}' outside any section"
            )
            problems.append(ScenarioProblem(line_of("", name), message))
            continue
        if name not in SECTIONS:
            problems.append(ScenarioProblem(line_of(name), f"unknown section [{name}]"))
            continue
        for key, raw in content.items():
            spec = _KEYS[name].get(key)
            if spec is None:
                problems.append(
                    ScenarioProblem(line_of(name, key), f"unknown key '{key}' in [{name}]")
                )
                continue
            try:
                value = spec.transform(raw)
            except (TypeError, ValueError) as exc:
                problems.append(ScenarioProblem(line_of(name, key), f"[{name}] {key}: {exc}"))
                continue
            if problem := spec.check(value):
                problems.append(ScenarioProblem(line_of(name, key), f"[{name}] {key}: {problem}"))
                continue
            values[name][key] = value

    for name in REQUIRED_SECTIONS:
        if name not in data:
            problems.append(ScenarioProblem(None, f"missing section [{name}]"))

    if not problems:
        problems.extend(_cross_checks(values, line_of))

    if problems:
        problems.sort(key=lambda p: (p.line is None, p.line or 0))
        raise ScenarioError(problems)

    scenario = Scenario(**{name: SECTIONS[name](**values[name]) for name in SECTIONS})
    logger.debug("Parsed scenario {}", scenario_hash(scenario))
    return scenario


def load_scenario_file(path: str) -> Scenario:
    with open(path, "rb") as f:
        raw = f.read()
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        line = raw.count(b"\n", 0, exc.start) + 1
        problem = ScenarioProblem(line, f"not valid UTF-8 (byte {exc.start})")
        raise ScenarioError([problem]) from exc
    return parse_scenario(text)


def defaults_table() -> dict:
    """Every section with its default values."""
    return Scenario().to_dict()


# ---- CLI glue

CONFIG_OPTION: str | None = typer.Option(
    None,
    "--config",
    help=f"Path to scenario file (default: {SCATTERLAB_SCENARIO_PATH})",
)


def with_scenario(func: Callable) -> Callable:
    """
    Decorator that loads the scenario file and injects it into the function as `scenario`.

    The path comes from the `config` kwarg (the --config typer option) and falls
    back to SCATTERLAB_SCENARIO_PATH or the default file name.
    """

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        from scatterlab._utils.console_utils import console
        from scatterlab.constants import EXIT_IO, EXIT_SCENARIO

        path = (
            kwargs.pop("config", None)
            or os.environ.get("SCATTERLAB_SCENARIO_PATH")
            or SCATTERLAB_SCENARIO_PATH
        )
        try:
            kwargs["scenario"] = load_scenario_file(path)
        except OSError as e:
            console.error(f"Unable to read scenario file {path}: {e.strerror or e}")
            raise typer.Exit(EXIT_IO)
        except ScenarioError as e:
            console.scenario_problems(path, e)
            raise typer.Exit(EXIT_SCENARIO)
        return func(*args, **kwargs)

    return wrapper
