"""
Unit tests for scenario parsing, defaults, hashing and the @with_scenario decorator.
"""

import sys
from pathlib import Path

import pytest
import typer

sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from scatterlab._utils.scenario_utils import (
    Scenario,
    defaults_table,
    load_scenario_file,
    parse_scenario,
    scenario_hash,
    with_scenario,
)
from scatterlab.constants import EXIT_IO, EXIT_SCENARIO
from scatterlab.exception import ScenarioError

MINIMAL = """\
[system]
masses = [1.0]

[grid]
side = 20.0

[potential]
kind = "yukawa"

[process]
kind = "single"
momenta_in = [[1, 0, 0]]
"""


def _problems(text: str) -> list:
    with pytest.raises(ScenarioError) as excinfo:
        parse_scenario(text)
    return excinfo.value.problems


@with_scenario
def dummy_command(scenario=None, config=None):
    """Minimal command decorated with @with_scenario."""
    return scenario


class TestParseScenario:
    def test_minimal_scenario_fills_defaults(self):
        """Only the required sections are needed; the rest comes from defaults."""
        scenario = parse_scenario(MINIMAL)

        assert scenario.grid.n_points == 9
        assert scenario.numerics.epsilon_schedule == [0.1, 0.01, 0.001]
        assert scenario.output.format == "csv"
        assert scenario.process.momenta_out == []

    def test_integers_accepted_for_floats(self):
        scenario = parse_scenario(MINIMAL.replace("side = 20.0", "side = 20"))
        assert scenario.grid.side == 20.0
        assert isinstance(scenario.grid.side, float)

    def test_unknown_key_reports_line(self):
        """Typos are rejected with the line they appear on."""
        problems = _problems(MINIMAL.replace("side = 20.0", "side = 20.0\nsidee = 3"))

        assert len(problems) == 1
        assert problems[0].line == 6
        assert "unknown key 'sidee' in [grid]" in problems[0].message

    def test_unknown_section(self):
        problems = _problems(MINIMAL + "\n[extras]\nfoo = 1\n")
        assert any("unknown section [extras]" in p.message for p in problems)

    def test_missing_required_section(self):
        text = MINIMAL.replace('[potential]\nkind = "yukawa"\n', "")
        problems = _problems(text)
        assert [p.message for p in problems] == ["missing section [potential]"]
        assert problems[0].line is None

    def test_all_problems_reported_in_line_order(self):
        """Every problem is collected, not only the first one."""
        text = MINIMAL.replace("side = 20.0", 'side = -1.0\nn_points = "nine"').replace(
            'kind = "single"', 'kind = "triple"'
        )

        problems = _problems(text)

        assert len(problems) == 3
        assert [p.line for p in problems] == sorted(p.line for p in problems)
        assert "[grid] side: must be > 0" in problems[0].message
        assert "[grid] n_points: expected an integer" in problems[1].message
        assert "[process] kind: must be one of" in problems[2].message

    def test_error_message_lists_lines(self):
        with pytest.raises(ScenarioError) as excinfo:
            parse_scenario(MINIMAL.replace("side = 20.0", "side = 0"))
        assert excinfo.value.message.startswith("line 5: [grid] side")

    def test_scalar_where_table_expected(self):
        problems = _problems("grid = 3\n" + MINIMAL.replace("[grid]\nside = 20.0\n", ""))
        assert any("[grid] must be a table" in p.message for p in problems)

    def test_invalid_toml(self):
        problems = _problems(MINIMAL + "[numerics\n")
        assert len(problems) == 1
        assert problems[0].message.startswith("Invalid TOML")

    def test_spatial_points_power_of_two(self):
        problems = _problems(MINIMAL.replace("side = 20.0", "spatial_points = 100"))
        assert "must be a power of two" in problems[0].message

    def test_epsilon_schedule_must_decrease(self):
        problems = _problems(MINIMAL + "\n[numerics]\nepsilon_schedule = [0.01, 0.1]\n")
        assert "strictly decreasing" in problems[0].message

    def test_identical_particles_need_equal_masses(self):
        text = MINIMAL.replace("masses = [1.0]", "masses = [1.0, 2.0]").replace(
            'kind = "single"\nmomenta_in = [[1, 0, 0]]',
            'kind = "pair_identical"\nmomenta_in = [[1, 0, 0], [-1, 0, 0]]',
        )
        problems = _problems(text)
        assert len(problems) == 1
        assert "identical particles need equal masses" in problems[0].message
        assert problems[0].line == 2

    def test_momentum_count_matches_process(self):
        text = MINIMAL.replace('kind = "single"', 'kind = "pair_distinguishable"')
        problems = _problems(text)
        assert "needs 2 momenta" in problems[0].message

    def test_yukawa_without_screening(self):
        problems = _problems(MINIMAL.replace('kind = "yukawa"', 'kind = "yukawa"\nmu = 0.0'))
        assert 'use kind = "coulomb"' in problems[0].message

    def test_theta_range_order(self):
        text = MINIMAL + "theta_start_deg = 120.0\ntheta_stop_deg = 30.0\n"
        problems = _problems(text)
        assert "theta_stop_deg" in problems[0].message


class TestScenarioModel:
    def test_coupling_defaults_to_charge_product(self):
        scenario = parse_scenario(MINIMAL.replace("masses = [1.0]", "charges = [2.0, -1.5]"))
        assert scenario.coupling() == -3.0
        assert scenario.potential_model().alpha == -3.0

    def test_explicit_alpha_wins(self):
        text = MINIMAL.replace('kind = "yukawa"', 'kind = "yukawa"\nalpha = 0.2')
        scenario = parse_scenario(text)
        assert scenario.coupling() == 0.2

    def test_quasi_continuum_system(self):
        text = MINIMAL.replace(
            "masses = [1.0]", 'lab_kind = "quasi_continuum"\nlab_levels = 11\nlab_spacing = 0.1'
        )
        system = parse_scenario(text).finite_system()
        assert system.dimension == 12

    def test_overrides(self):
        scenario = parse_scenario(MINIMAL)

        changed = scenario.with_overrides(epsilon=0.02, order=None, format="json")

        assert changed.numerics.epsilon == 0.02
        assert changed.numerics.order == scenario.numerics.order
        assert changed.output.format == "json"
        assert scenario.with_overrides(epsilon=None, format=None) is scenario

    def test_horizon_override_replaces_the_sweep(self):
        scenario = parse_scenario(MINIMAL + "\n[numerics]\nhorizons = [1.0, 2.0]\n")

        assert scenario.with_overrides(horizon=None).numerics.horizons == [1.0, 2.0]
        changed = scenario.with_overrides(horizon=3.0)
        assert changed.numerics.horizon == 3.0
        assert changed.numerics.horizons == [3.0]

    def test_defaults_table_covers_every_section(self):
        table = defaults_table()
        assert set(table) == {"system", "grid", "potential", "process", "numerics", "output"}
        assert table["numerics"]["quadrature_points"] == 32


class TestScenarioHash:
    def test_sixteen_hex_digits(self):
        digest = scenario_hash(parse_scenario(MINIMAL))
        assert len(digest) == 16
        int(digest, 16)

    def test_defaults_spelled_out_hash_the_same(self):
        """The hash covers the resolved scenario, not the file text."""
        explicit = MINIMAL + "\n[numerics]\norder = 1\nseed = 0\n"
        assert scenario_hash(parse_scenario(explicit)) == scenario_hash(parse_scenario(MINIMAL))

    def test_changes_with_values(self):
        base = parse_scenario(MINIMAL)
        assert scenario_hash(base) != scenario_hash(base.with_overrides(seed=1))

    def test_default_scenario(self):
        assert scenario_hash(Scenario()) == scenario_hash(parse_scenario(MINIMAL))


class TestWithScenario:
    def test_loads_file_from_config_option(self, tmp_path: Path):
        path = tmp_path / "scenario.toml"
        path.write_text(MINIMAL)

        scenario = dummy_command(config=str(path))

        assert scenario == load_scenario_file(str(path))

    def test_missing_file_exits_with_io_code(self):
        with pytest.raises(typer.Exit) as excinfo:
            dummy_command(config="/nonexistent/scenario.toml")
        assert excinfo.value.exit_code == EXIT_IO

    def test_invalid_file_exits_with_scenario_code(self, tmp_path: Path):
        path = tmp_path / "scenario.toml"
        path.write_text(MINIMAL.replace("side = 20.0", "side = -2.0"))

        with pytest.raises(typer.Exit) as excinfo:
            dummy_command(config=str(path))

        assert excinfo.value.exit_code == EXIT_SCENARIO

    def test_non_utf8_file_exits_with_scenario_code(self, tmp_path: Path):
        path = tmp_path / "scenario.toml"
        path.write_bytes(b"[system]\nmasses = [1.0] # \xff\xfe\n")

        with pytest.raises(ScenarioError) as excinfo:
            load_scenario_file(str(path))
        assert excinfo.value.problems[0].line == 2
        assert "UTF-8" in excinfo.value.problems[0].message

        with pytest.raises(typer.Exit) as excinfo:
            dummy_command(config=str(path))
        assert excinfo.value.exit_code == EXIT_SCENARIO

    def test_environment_path(self, tmp_path: Path, monkeypatch):
        path = tmp_path / "other.toml"
        path.write_text(MINIMAL.replace("side = 20.0", "side = 12.0"))
        monkeypatch.setenv("SCATTERLAB_SCENARIO_PATH", str(path))

        assert dummy_command().grid.side == 12.0
