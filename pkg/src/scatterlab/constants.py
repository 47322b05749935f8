#
# Copyright (c) 2025, Daily
#
# SPDX-License-Identifier: BSD 2-Clause License
#

"""
Tags shared by the library and the CLI.

Each Literal is the source of truth; the runtime lists are derived from it
for validation and help text.
"""

from typing import Literal, get_args

PotentialKind = Literal["coulomb", "yukawa", "gaussian", "matrix"]
POTENTIAL_KINDS = list(get_args(PotentialKind))

ProcessKind = Literal["single", "pair_distinguishable", "pair_identical"]
PROCESS_KINDS = list(get_args(ProcessKind))

# Which particle's outgoing momentum is pinned to the detector direction
Which = Literal["first", "second"]
WHICH_VALUES = list(get_args(Which))

OutputFormat = Literal["csv", "json"]
OUTPUT_FORMATS = list(get_args(OutputFormat))

Subcommand = Literal[
    "kinematics", "greens-check", "amplitude", "xsec", "reciprocity", "smatrix", "goldenrule"
]
SUBCOMMANDS = list(get_args(Subcommand))

LabKind = Literal["random", "quasi_continuum"]
LAB_KINDS = list(get_args(LabKind))

ReciprocityForm = Literal["transpose", "conjugate"]
RECIPROCITY_FORMS = list(get_args(ReciprocityForm))

# CLI exit codes
EXIT_OK = 0
EXIT_SCENARIO = 2
EXIT_NUMERIC = 3
EXIT_IO = 4
