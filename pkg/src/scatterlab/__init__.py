#
# Copyright (c) 2025, Daily
#
# SPDX-License-Identifier: BSD 2-Clause License
#

import sys

from loguru import logger

from scatterlab.born import MomentumGrid, Potential, TMatrix, born1_single, dyson_term, t_matrix
from scatterlab.config import config
from scatterlab.exception import (
    ConfigError,
    DomainError,
    Error,
    FieldFormatError,
    NonConvergentError,
    NumericError,
    ScenarioError,
    SingularityError,
    UnsupportedOrderError,
)
from scatterlab.greenfn import (
    ComplexField,
    EpsilonSchedule,
    SpatialGrid,
    fft_retarded_propagator,
    free_propagator,
    retarded_free_propagator,
)
from scatterlab.kinematics import (
    CollisionInput,
    CollisionOutcome,
    FreeParticle,
    Momentum3,
    solve_outgoing,
)
from scatterlab.smatrix import evolution_report, fit_quasi_continuum_decay, s_matrix
from scatterlab.system import FiniteSystem, quasi_continuum_system, random_system
from scatterlab.transition import (
    ProcessSpec,
    amplitude,
    detector_amplitude,
    detector_readings,
    golden_rule_rate,
    reciprocity_residual,
)

logger.remove()
logger.add(sys.stderr, level=str(config.get("log_level")))


__all__ = [
    # Kinematics
    "CollisionInput",
    "CollisionOutcome",
    "FreeParticle",
    "Momentum3",
    "solve_outgoing",
    # Green's functions
    "ComplexField",
    "EpsilonSchedule",
    "SpatialGrid",
    "fft_retarded_propagator",
    "free_propagator",
    "retarded_free_propagator",
    # Perturbation theory
    "MomentumGrid",
    "Potential",
    "TMatrix",
    "born1_single",
    "dyson_term",
    "t_matrix",
    # Transitions and S-matrix
    "FiniteSystem",
    "ProcessSpec",
    "amplitude",
    "detector_amplitude",
    "detector_readings",
    "evolution_report",
    "fit_quasi_continuum_decay",
    "golden_rule_rate",
    "quasi_continuum_system",
    "random_system",
    "reciprocity_residual",
    "s_matrix",
    # Exceptions
    "ConfigError",
    "DomainError",
    "Error",
    "FieldFormatError",
    "NonConvergentError",
    "NumericError",
    "ScenarioError",
    "SingularityError",
    "UnsupportedOrderError",
]
