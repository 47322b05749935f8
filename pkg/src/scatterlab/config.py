#
# Copyright (c) 2025, Daily
#
# SPDX-License-Identifier: BSD 2-Clause License
#

import os
import typing

# ---- Constants


class _Setting(typing.NamedTuple):
    default: typing.Any = None
    transform: typing.Callable[[str], typing.Any] = lambda x: x  # noqa: E731


_SETTINGS = {
    "log_level": _Setting("INFO"),
    # Relative tolerances
    "kinematics_tolerance": _Setting(1e-12, float),
    "forward_tolerance": _Setting(1e-9, float),
    "hermitian_tolerance": _Setting(1e-12, float),
    "born_relative_cutoff": _Setting(1e-14, float),
    # Default ε = max(fraction·E, multiple·grid energy spacing)
    "epsilon_energy_fraction": _Setting(0.05, float),
    "epsilon_spacing_multiple": _Setting(5.0, float),
    "dyson_quadrature_points": _Setting(32, int),
    "pair_grid_max_points": _Setting(32, int),
    "greens_oversample": _Setting(16, int),
    # Largest tolerated band-edge shift of a fitted decay rate, and the ladder size cap
    "decay_fit_bias": _Setting(0.01, float),
    "decay_fit_max_levels": _Setting(1_000_000, int),
    "result_timestamp": _Setting("1970-01-01T00:00:00Z"),
}


class Config:
    def __init__(self, settings):
        self.settings = settings

    def get(self, key, default=None, use_env=True):
        s = self.settings[key]
        env_var_key = "SCATTERLAB_" + key.upper()
        if use_env and env_var_key in os.environ:
            return s.transform(os.environ[env_var_key])
        elif s.default is not None:
            return s.default
        else:
            return default

    def override_locally(self, key: str, value: str):
        self.settings[key]
        os.environ["SCATTERLAB_" + key.upper()] = value

    def __getitem__(self, key):
        return self.get(key)

    def __repr__(self):
        return repr(self.to_dict())

    def to_dict(self):
        return {key: self.get(key) for key in self.settings.keys()}


config = Config(_SETTINGS)
