#
# Copyright (c) 2025, Daily
#
# SPDX-License-Identifier: BSD 2-Clause License
#

SCATTERLAB_CLI_NAME = "scatterlab"
SCATTERLAB_USER_CONFIG_PATH = "~/.config/scatterlab/scatterlab.toml"
SCATTERLAB_SCENARIO_PATH = "scenario.toml"

PANEL_TITLE_ERROR = "∿ Error"
PANEL_TITLE_SUCCESS = "∿ Success"
