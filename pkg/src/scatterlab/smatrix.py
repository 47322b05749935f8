#
# Copyright (c) 2025, Daily
#
# SPDX-License-Identifier: BSD 2-Clause License
#

"""Interaction-picture evolution, S-matrix and sum-rule checks on finite systems.

The exact evolution comes from an eigendecomposition of the full Hermitian H and
is the reference every truncated expansion is measured against.
"""

import json
from typing import Literal

import numpy as np
import scipy.linalg
import scipy.sparse.linalg
from attr import dataclass, field
from loguru import logger

from scatterlab.born import MAX_DYSON_ORDER, dyson_matrix
from scatterlab.config import config
from scatterlab.exception import DomainError, UnsupportedOrderError
from scatterlab.system import (
    FiniteSystem,
    decay_fit_levels,
    golden_rule_rate_expected,
    quasi_continuum_hamiltonian,
)

Exact = Literal["exact"]


def unitarity_defect(u: np.ndarray) -> float:
    """‖U†U - 1‖_F."""
    return float(np.linalg.norm(u.conj().T @ u - np.eye(u.shape[0])))


def _matrix_to_pairs(u: np.ndarray) -> list:
    return [[[z.real, z.imag] for z in row] for row in u.tolist()]


def evolve_exact(system: FiniteSystem, t: float, t0: float) -> np.ndarray:
    """e^{iH₀t}·e^{-iH(t - t0)}·e^{-iH₀t0}."""
    energies, vectors = scipy.linalg.eigh(system.hamiltonian)
    full = (vectors * np.exp(-1j * energies * (t - t0))) @ vectors.conj().T
    return np.exp(1j * system.h0 * t)[:, None] * full * np.exp(-1j * system.h0 * t0)[None, :]


def evolve_born(
    system: FiniteSystem, t: float, t0: float, order: int, quadrature_points: int | None = None
) -> np.ndarray:
    """1 plus the time-ordered terms up to ``order``."""
    if order > MAX_DYSON_ORDER:
        raise UnsupportedOrderError(order, MAX_DYSON_ORDER)
    u = np.eye(system.dimension, dtype=complex)
    for n in range(1, order + 1):
        u = u + dyson_matrix(system, n, t, t0, quadrature_points)
    return u


def s_matrix(system: FiniteSystem, horizon: float, order: int | Exact = "exact") -> np.ndarray:
    """U(T/2, -T/2); callers sweep T to study the long-horizon limit."""
    if not horizon > 0:
        raise DomainError(f"Horizon must be positive, got {horizon}")
    if order == "exact":
        return evolve_exact(system, horizon / 2.0, -horizon / 2.0)
    return evolve_born(system, horizon / 2.0, -horizon / 2.0, int(order))


def t1_and_sum_rule(s: np.ndarray, n: int) -> tuple[np.ndarray, float]:
    """T₁ = S - 1 and |Σ_m |T₁_mn|² + (T₁ + T₁†)_nn|, which vanishes for unitary S."""
    s = np.asarray(s, dtype=complex)
    if s.ndim != 2 or s.shape[0] != s.shape[1]:
        raise DomainError(f"S must be square, got shape {s.shape}")
    if not 0 <= n < s.shape[0]:
        raise DomainError(f"State index {n} out of range for N={s.shape[0]}")
    t1 = s - np.eye(s.shape[0])
    residual = abs(np.sum(np.abs(t1[:, n]) ** 2) + 2.0 * t1[n, n].real)
    return t1, float(residual)


@dataclass(frozen=True, eq=False)
class EvolutionReport:
    U_exact: np.ndarray
    U_born: np.ndarray
    order: int
    unitarity_defect: float = field(init=False)
    born_unitarity_defect: float = field(init=False)
    born_error: float = field(init=False)

    def __attrs_post_init__(self):
        object.__setattr__(self, "unitarity_defect", unitarity_defect(self.U_exact))
        object.__setattr__(self, "born_unitarity_defect", unitarity_defect(self.U_born))
        object.__setattr__(self, "born_error", float(np.linalg.norm(self.U_born - self.U_exact)))

    def to_dict(self):
        return {
            "order": self.order,
            "unitarity_defect": self.unitarity_defect,
            "born_unitarity_defect": self.born_unitarity_defect,
            "born_error": self.born_error,
            "U_exact": _matrix_to_pairs(self.U_exact),
            "U_born": _matrix_to_pairs(self.U_born),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def evolution_report(
    system: FiniteSystem, t: float, t0: float, order: int, quadrature_points: int | None = None
) -> EvolutionReport:
    report = EvolutionReport(
        U_exact=evolve_exact(system, t, t0),
        U_born=evolve_born(system, t, t0, order, quadrature_points),
        order=order,
    )
    logger.debug(
        "Evolution report: defect {:.2e}, order-{} error {:.2e}",
        report.unitarity_defect,
        order,
        report.born_error,
    )
    return report


def survival_probability(system: FiniteSystem, n: int, horizons) -> np.ndarray:
    """|S_nn(T)|² for each horizon T, sharing one eigendecomposition."""
    horizons = np.atleast_1d(np.asarray(horizons, dtype=float))
    energies, vectors = scipy.linalg.eigh(system.hamiltonian)
    weights = np.abs(vectors[n, :]) ** 2
    amplitudes = np.exp(-1j * np.outer(horizons, energies)) @ weights
    return np.abs(amplitudes) ** 2


def decay_window(expected_rate: float, count: int = 12) -> np.ndarray:
    """Horizons spanning 0.5/Γ to 3/Γ, past the initial transient and well before recurrence."""
    if not expected_rate > 0:
        raise DomainError(f"Expected rate must be positive, got {expected_rate}")
    return np.linspace(0.5 / expected_rate, 3.0 / expected_rate, count)


def fit_decay_rate(system: FiniteSystem, n: int, horizons) -> float:
    """Γ from a straight-line fit of ln|S_nn(T)|² against T."""
    horizons = np.asarray(horizons, dtype=float)
    if horizons.size < 2:
        raise DomainError("Need at least two horizons to fit a decay rate")
    survival = survival_probability(system, n, horizons)
    slope, _ = np.polyfit(horizons, np.log(survival), 1)
    return float(-slope)


@dataclass(frozen=True, eq=False)
class DecayFit:
    rate: float
    expected_rate: float
    levels: int
    horizons: np.ndarray

    @property
    def relative_error(self) -> float:
        return abs(self.rate - self.expected_rate) / self.expected_rate


def sparse_survival_probability(hamiltonian, n: int, horizons) -> np.ndarray:
    """|⟨n|e^{-iHT}|n⟩|² over evenly spaced horizons, for a sparse Hermitian H."""
    horizons = np.asarray(horizons, dtype=float)
    if horizons.size < 2 or not np.allclose(np.diff(horizons), horizons[1] - horizons[0]):
        raise DomainError("Sparse evolution needs at least two evenly spaced horizons")
    start = np.zeros(hamiltonian.shape[0], dtype=complex)
    start[n] = 1.0
    # expm_multiply estimates norms with onenormest, which draws from numpy's global generator
    saved = np.random.get_state()
    np.random.seed(0)
    try:
        states = scipy.sparse.linalg.expm_multiply(
            -1j * hamiltonian,
            start,
            start=horizons[0],
            stop=horizons[-1],
            num=horizons.size,
            endpoint=True,
        )
    finally:
        np.random.set_state(saved)
    return np.abs(states[:, n]) ** 2


def fit_quasi_continuum_decay(
    spacing: float,
    coupling: float,
    levels: int = 0,
    initial_energy: float = 0.0,
    bias: float | None = None,
) -> DecayFit:
    """Fit Γ on a quasi-continuum ladder at least as wide as ``decay_fit_levels`` asks.

    Narrower ladders cannot hold an exponential decay at rates comparable to their
    bandwidth, so ``levels`` is only a lower bound.
    """
    expected = golden_rule_rate_expected(coupling, spacing)
    needed = decay_fit_levels(spacing, coupling, bias)
    ceiling = config.get("decay_fit_max_levels")
    if needed > ceiling:
        raise DomainError(
            f"A {needed}-level ladder is needed for this decay fit (cap {ceiling}); "
            "raise decay_fit_bias or decay_fit_max_levels"
        )
    levels = max(levels, needed)
    hamiltonian = quasi_continuum_hamiltonian(levels, spacing, coupling, initial_energy)
    horizons = decay_window(expected)
    survival = sparse_survival_probability(hamiltonian, 0, horizons)
    slope, _ = np.polyfit(horizons, np.log(survival), 1)
    fit = DecayFit(rate=float(-slope), expected_rate=expected, levels=levels, horizons=horizons)
    logger.debug(
        "Decay fit on {} levels: Γ = {:.6g} (expected {:.6g})", levels, fit.rate, expected
    )
    return fit


def final_state_distribution(s: np.ndarray, n: int) -> np.ndarray:
    """|S_mn|² over final states m, with the initial state itself zeroed."""
    probabilities = np.abs(np.asarray(s)[:, n]) ** 2
    probabilities[n] = 0.0
    return probabilities
