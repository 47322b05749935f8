#
# Copyright (c) 2025, Daily
#
# SPDX-License-Identifier: BSD 2-Clause License
#

import os

import toml

from scatterlab.cli import SCATTERLAB_USER_CONFIG_PATH
from scatterlab.config import _SETTINGS, Config, _Setting
from scatterlab.exception import ConfigError

# ---- Constants

user_config_path: str = os.environ.get("SCATTERLAB_CONFIG_PATH") or os.path.expanduser(
    SCATTERLAB_USER_CONFIG_PATH
)

_CLI_SETTINGS = {
    **_SETTINGS,
    "user_config_path": _Setting(user_config_path),
    "cli_log_level": _Setting("INFO", str.upper),
}

# ---- Config TOML methods


def _settings_problems(data: dict) -> list[str]:
    """Unknown keys, nested tables and values their setting cannot convert."""
    problems = []
    for key, value in sorted(data.items()):
        setting = _CLI_SETTINGS.get(key)
        if setting is None or key == "user_config_path":
            problems.append(f"unknown setting '{key}'")
        elif isinstance(value, dict | list):
            problems.append(f"'{key}' must be a single value")
        else:
            try:
                setting.transform(str(value))
            except ValueError:
                problems.append(f"'{key}' has an invalid value {value!r}")
    return problems


def _read_user_config() -> dict:
    if not os.path.exists(user_config_path):
        return {}

    try:
        with open(user_config_path) as f:
            config_data = toml.load(f)
    except toml.TomlDecodeError as exc:
        problem = f"Invalid TOML syntax in settings file: {exc}"
    except PermissionError:
        problem = f"Permission denied when reading settings file: {user_config_path}"
    except OSError as exc:
        problem = f"I/O error when reading settings file: {exc}"
    else:
        problems = _settings_problems(config_data)
        if not problems:
            return config_data
        problem = "Bad settings file entries: " + ", ".join(problems) + "."
    raise ConfigError(f"{problem} Fix or remove {user_config_path}.")


user_config = _read_user_config()

# --- Config


class ConfigCLI(Config):
    def get(self, key, default=None, use_env=True):
        """Looks up a setting: SCATTERLAB_<KEY> first, then the user settings file,
        then the built-in default.
        """
        s = self.settings[key]
        env_var_key = "SCATTERLAB_" + key.upper()
        if use_env and env_var_key in os.environ:
            return s.transform(os.environ[env_var_key])
        if key in user_config:
            return s.transform(str(user_config[key]))
        return s.default if s.default is not None else default


config = ConfigCLI(_CLI_SETTINGS)


def apply_user_settings():
    """Expose numerical settings from the user settings file to the library.

    Environment variables keep priority over the file.
    """
    from scatterlab.config import config as library_config

    for key, value in user_config.items():
        if key in library_config.settings and "SCATTERLAB_" + key.upper() not in os.environ:
            library_config.override_locally(key, str(value))
