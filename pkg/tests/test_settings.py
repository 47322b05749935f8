"""
Unit tests for the settings layers: library defaults, SCATTERLAB_* environment
variables and the user settings file.
"""

import os
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from scatterlab.cli import config as cli_config_module
from scatterlab.cli.config import _CLI_SETTINGS, ConfigCLI, _settings_problems, apply_user_settings
from scatterlab.config import config as library_config


def _unset(monkeypatch, key: str):
    """Remove SCATTERLAB_<KEY> for the test and again at teardown."""
    name = "SCATTERLAB_" + key.upper()
    monkeypatch.setenv(name, "")
    monkeypatch.delenv(name)


class TestSettingsFileChecks:
    """Entries of the user settings file are checked against the known settings."""

    def test_valid_entries(self):
        assert _settings_problems({"cli_log_level": "DEBUG", "born_relative_cutoff": 1e-10}) == []

    def test_unknown_key(self):
        assert _settings_problems({"colour": "red"}) == ["unknown setting 'colour'"]

    def test_user_config_path_is_not_settable(self):
        assert _settings_problems({"user_config_path": "/tmp/x.toml"}) == [
            "unknown setting 'user_config_path'"
        ]

    def test_nested_table(self):
        assert _settings_problems({"log_level": {"level": "INFO"}}) == [
            "'log_level' must be a single value"
        ]

    def test_unconvertible_value(self):
        problems = _settings_problems({"dyson_quadrature_points": "many"})
        assert problems == ["'dyson_quadrature_points' has an invalid value 'many'"]

    def test_all_problems_reported_in_key_order(self):
        problems = _settings_problems({"zeta": 1, "alpha": 2})
        assert problems == ["unknown setting 'alpha'", "unknown setting 'zeta'"]


class TestPrecedence:
    """Environment beats the settings file, which beats the default."""

    def test_default(self, monkeypatch):
        monkeypatch.setattr(cli_config_module, "user_config", {})
        _unset(monkeypatch, "forward_tolerance")
        assert ConfigCLI(_CLI_SETTINGS).get("forward_tolerance") == 1e-9

    def test_file_over_default(self, monkeypatch):
        monkeypatch.setattr(cli_config_module, "user_config", {"forward_tolerance": 1e-6})
        _unset(monkeypatch, "forward_tolerance")
        assert ConfigCLI(_CLI_SETTINGS).get("forward_tolerance") == 1e-6

    def test_environment_over_file(self, monkeypatch):
        monkeypatch.setattr(cli_config_module, "user_config", {"forward_tolerance": 1e-6})
        monkeypatch.setenv("SCATTERLAB_FORWARD_TOLERANCE", "1e-3")
        assert ConfigCLI(_CLI_SETTINGS).get("forward_tolerance") == 1e-3

    def test_log_level_is_upper_cased(self, monkeypatch):
        monkeypatch.setenv("SCATTERLAB_CLI_LOG_LEVEL", "debug")
        assert ConfigCLI(_CLI_SETTINGS).get("cli_log_level") == "DEBUG"

    @pytest.mark.parametrize(
        "key,expected",
        [("dyson_quadrature_points", 32), ("greens_oversample", 16), ("log_level", "INFO")],
    )
    def test_library_defaults(self, monkeypatch, key, expected):
        _unset(monkeypatch, key)
        assert library_config.get(key) == expected


class TestApplyUserSettings:
    """Library settings written in the settings file reach scatterlab.config."""

    def test_file_setting_is_exported(self, monkeypatch):
        monkeypatch.setattr(cli_config_module, "user_config", {"born_relative_cutoff": 1e-8})
        _unset(monkeypatch, "born_relative_cutoff")

        apply_user_settings()

        assert library_config.get("born_relative_cutoff") == 1e-8

    def test_environment_is_not_overwritten(self, monkeypatch):
        monkeypatch.setattr(cli_config_module, "user_config", {"born_relative_cutoff": 1e-8})
        monkeypatch.setenv("SCATTERLAB_BORN_RELATIVE_CUTOFF", "1e-6")

        apply_user_settings()

        assert library_config.get("born_relative_cutoff") == 1e-6

    def test_cli_only_settings_stay_out_of_the_library(self, monkeypatch):
        monkeypatch.setattr(cli_config_module, "user_config", {"cli_log_level": "DEBUG"})
        _unset(monkeypatch, "cli_log_level")

        apply_user_settings()

        assert "SCATTERLAB_CLI_LOG_LEVEL" not in os.environ
