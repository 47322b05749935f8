#
# Copyright (c) 2025, Daily
#
# SPDX-License-Identifier: BSD 2-Clause License
#

"""Finite-dimensional laboratory systems H = H₀ + H₁ with diagonal H₀."""

import math

import numpy as np
import scipy.sparse
from attr import dataclass, field
from loguru import logger

from scatterlab.config import config
from scatterlab.exception import DomainError


def _readonly(array: np.ndarray) -> np.ndarray:
    array = np.array(array, copy=True)
    array.setflags(write=False)
    return array


def check_hermitian(matrix: np.ndarray, tolerance: float | None = None) -> None:
    if tolerance is None:
        tolerance = config.get("hermitian_tolerance")
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise DomainError(f"Expected a square matrix, got shape {matrix.shape}")
    scale = max(1.0, float(np.max(np.abs(matrix), initial=0.0)))
    defect = float(np.max(np.abs(matrix - matrix.conj().T), initial=0.0))
    if defect > tolerance * scale:
        raise DomainError(f"Matrix is not Hermitian (max |H - H†| = {defect:.3e})")


@dataclass(frozen=True, eq=False)
class FiniteSystem:
    h0: np.ndarray = field(converter=lambda v: _readonly(np.asarray(v, dtype=float)))
    h1: np.ndarray = field(converter=lambda v: _readonly(np.asarray(v, dtype=complex)))

    def __attrs_post_init__(self):
        if self.h0.ndim != 1 or self.h0.size == 0:
            raise DomainError("h0 must be a non-empty vector of level energies")
        if not np.all(np.isfinite(self.h0)):
            raise DomainError("h0 must be finite")
        if self.h1.shape != (self.h0.size, self.h0.size):
            raise DomainError(f"h1 must be {self.h0.size}x{self.h0.size}, got {self.h1.shape}")
        check_hermitian(self.h1)

    @property
    def dimension(self) -> int:
        return self.h0.size

    @property
    def hamiltonian(self) -> np.ndarray:
        return np.diag(self.h0).astype(complex) + self.h1

    def with_coupling(self, factor: float) -> "FiniteSystem":
        """Same H₀ with H₁ multiplied by ``factor``."""
        return FiniteSystem(h0=self.h0, h1=factor * self.h1)

    def to_dict(self):
        return {
            "dimension": self.dimension,
            "h0": self.h0.tolist(),
            "h1": [[[z.real, z.imag] for z in row] for row in self.h1.tolist()],
        }


def random_system(
    dimension: int,
    coupling: float,
    seed: int = 0,
    h0: np.ndarray | None = None,
) -> FiniteSystem:
    """Seeded random system with a Gaussian Hermitian H₁ of spectral norm ``coupling``.

    Without ``h0`` the levels are spread linearly over [-1, 1].
    """
    if dimension < 1:
        raise DomainError(f"dimension must be positive, got {dimension}")
    rng = np.random.default_rng(seed)
    if h0 is None:
        h0 = np.linspace(-1.0, 1.0, dimension) if dimension > 1 else np.zeros(1)
    a = rng.normal(size=(dimension, dimension)) + 1j * rng.normal(size=(dimension, dimension))
    h1 = 0.5 * (a + a.conj().T)
    norm = np.linalg.norm(h1, 2)
    if norm > 0:
        h1 *= coupling / norm
    logger.debug("random_system(N={}, coupling={}, seed={})", dimension, coupling, seed)
    return FiniteSystem(h0=h0, h1=h1)


def _ladder(levels: int, spacing: float) -> np.ndarray:
    if levels < 1 or not spacing > 0:
        raise DomainError("quasi-continuum needs at least one level and a positive spacing")
    return (np.arange(levels) - (levels - 1) / 2.0) * spacing


def quasi_continuum_system(
    levels: int = 201,
    spacing: float = 0.01,
    coupling: float = 0.1,
    initial_energy: float = 0.0,
) -> FiniteSystem:
    """One discrete level (index 0) coupled uniformly to a ladder of ``levels`` states.

    The ladder is centered on zero with the given spacing, so the initial level sits
    in the middle of the band when ``initial_energy`` is 0.
    """
    ladder = _ladder(levels, spacing)
    h0 = np.concatenate(([initial_energy], ladder))
    h1 = np.zeros((levels + 1, levels + 1), dtype=complex)
    h1[0, 1:] = coupling
    h1[1:, 0] = coupling
    return FiniteSystem(h0=h0, h1=h1)


def quasi_continuum_hamiltonian(
    levels: int,
    spacing: float = 0.01,
    coupling: float = 0.1,
    initial_energy: float = 0.0,
) -> scipy.sparse.csr_matrix:
    """Sparse H₀ + H₁ of the quasi-continuum model, for ladders too wide to hold densely."""
    ladder = _ladder(levels, spacing)
    size = levels + 1
    diagonal = np.arange(size)
    band = np.arange(1, size)
    rows = np.concatenate((diagonal, np.zeros(levels, dtype=int), band))
    cols = np.concatenate((diagonal, band, np.zeros(levels, dtype=int)))
    data = np.concatenate(([initial_energy], ladder, np.full(2 * levels, coupling)))
    return scipy.sparse.csr_matrix((data.astype(complex), (rows, cols)), shape=(size, size))


def decay_fit_levels(spacing: float, coupling: float, bias: float | None = None) -> int:
    """Smallest ladder whose finite band shifts the fitted decay rate by less than ``bias``.

    A flat band of N levels has half-width W = NΔ/2 and raises the rate by the factor
    1/(1 − x) with x = 2g²/(ΔW) = 4g²/(NΔ²).
    """
    if bias is None:
        bias = config.get("decay_fit_bias")
    if not (spacing > 0 and bias > 0):
        raise DomainError("spacing and bias must be positive")
    x = bias / (1.0 + bias)
    return max(1, math.ceil(4.0 * coupling**2 / (spacing**2 * x)))


def golden_rule_rate_expected(coupling: float, spacing: float) -> float:
    """Continuum decay rate 2πg²/Δ of the quasi-continuum model."""
    return 2.0 * np.pi * coupling**2 / spacing
