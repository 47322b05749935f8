#
# Copyright (c) 2025, Daily
#
# SPDX-License-Identifier: BSD 2-Clause License
#

from importlib.metadata import PackageNotFoundError
from importlib.metadata import version as get_version

try:
    version = get_version("scatterlab")
except PackageNotFoundError:
    # Running from a source checkout
    version = "0.0.0-dev"
