#
# Copyright (c) 2025, Daily
#
# SPDX-License-Identifier: BSD 2-Clause License
#

"""Free-particle Green's functions and free evolution of fields on a periodic grid.

Closed forms live next to an FFT construction of the same retarded propagator,
which serves as an independent check of the closed form.
"""

import math
from pathlib import Path

import numpy as np
import scipy.fft
from attr import dataclass, field
from loguru import logger

from scatterlab._utils import binary_utils
from scatterlab.config import config
from scatterlab.exception import DomainError
from scatterlab.system import FiniteSystem

_PHASE_3PI_4 = np.exp(-0.75j * np.pi)


def _is_power_of_two(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


# ---- Domain types


@dataclass(frozen=True)
class SpaceTimePoint:
    r: tuple[float, float, float]
    t: float

    def __attrs_post_init__(self):
        if not all(math.isfinite(c) for c in (*self.r, self.t)):
            raise DomainError("Space-time point components must be finite")


@dataclass(frozen=True)
class SpatialGrid:
    """Periodic cube of side ``side`` sampled at ``n_points`` per axis.

    Coordinates are x_j = (j - n/2)·dx, so the origin is a grid point.
    """

    side: float
    n_points: int

    def __attrs_post_init__(self):
        if not self.side > 0:
            raise DomainError(f"Grid side must be positive, got {self.side}")
        if not _is_power_of_two(self.n_points):
            raise DomainError(f"n_points must be a power of two, got {self.n_points}")

    @property
    def spacing(self) -> float:
        return self.side / self.n_points

    def coordinates(self) -> np.ndarray:
        return (np.arange(self.n_points) - self.n_points // 2) * self.spacing

    def wavenumbers(self) -> np.ndarray:
        """Reciprocal lattice in FFT order."""
        return 2.0 * np.pi * scipy.fft.fftfreq(self.n_points, d=self.spacing)

    def mesh(self) -> np.ndarray:
        """Positions as an (n, n, n, 3) array."""
        x = self.coordinates()
        return np.stack(np.meshgrid(x, x, x, indexing="ij"), axis=-1)


@dataclass(frozen=True)
class EpsilonSchedule:
    values: tuple[float, ...] = field(converter=lambda v: tuple(float(e) for e in v))

    def __attrs_post_init__(self):
        if not self.values:
            raise DomainError("Epsilon schedule must not be empty")
        if any(not e > 0 for e in self.values):
            raise DomainError("Epsilon schedule values must be positive")
        if any(b >= a for a, b in zip(self.values, self.values[1:])):
            raise DomainError("Epsilon schedule must be strictly decreasing")

    def __iter__(self):
        return iter(self.values)

    def __len__(self):
        return len(self.values)


@dataclass(frozen=True, eq=False)
class ComplexField:
    """Complex samples on a grid: rank 3 for one particle, rank 6 for a pair."""

    values: np.ndarray
    grid: SpatialGrid
    time: float = 0.0

    def __attrs_post_init__(self):
        values = np.array(self.values, dtype=complex, copy=True)
        n = self.grid.n_points
        if values.shape not in ((n,) * 3, (n,) * 6):
            raise DomainError(f"Field shape {values.shape} does not fit a grid of {n} points")
        if values.ndim == 6 and n > config.get("pair_grid_max_points"):
            raise DomainError(
                f"Pair fields are limited to {config.get('pair_grid_max_points')} points per axis"
            )
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def rank(self) -> int:
        return self.values.ndim

    @property
    def is_pair(self) -> bool:
        return self.rank == 6

    def with_values(self, values: np.ndarray, time: float) -> "ComplexField":
        return ComplexField(values=values, grid=self.grid, time=time)

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.values) ** 2) * self.grid.spacing**self.rank))

    def checksum(self) -> complex:
        """Σ values·dx^rank, the discrete integral of the field."""
        return complex(np.sum(self.values) * self.grid.spacing**self.rank)

    def width(self, axis: int = 0) -> float:
        """Standard deviation of |ψ|² along one axis."""
        weight = np.abs(self.values) ** 2
        weight = weight / weight.sum()
        shape = [1] * self.rank
        shape[axis] = self.grid.n_points
        x = self.grid.coordinates().reshape(shape)
        mean = float(np.sum(weight * x))
        return math.sqrt(float(np.sum(weight * (x - mean) ** 2)))

    def to_bytes(self) -> bytes:
        return binary_utils.encode(self.values, self.grid.n_points, self.grid.side, self.time)

    @classmethod
    def from_bytes(cls, data: bytes) -> "ComplexField":
        header, flat = binary_utils.decode(data)
        grid = SpatialGrid(side=header.side, n_points=header.n_points)
        shape = binary_utils.shape_for(header, flat.size, ranks=(3, 6))
        return cls(values=flat.reshape(shape), grid=grid, time=header.time)


def write_field(path: str | Path, f: ComplexField) -> None:
    Path(path).write_bytes(f.to_bytes())


def read_field(path: str | Path) -> ComplexField:
    return ComplexField.from_bytes(Path(path).read_bytes())


# ---- Closed forms


def _check_mass(m: float) -> None:
    if not m > 0:
        raise DomainError(f"Mass must be positive, got {m}")


def _displacement_squared(r, r0) -> np.ndarray:
    d = np.asarray(r, dtype=float) - np.asarray(r0, dtype=float)
    return np.sum(d * d, axis=-1)


def _as_result(value: np.ndarray):
    return complex(value) if np.ndim(value) == 0 else value


def continued_free_propagator(r, r0, dt: float, m: float):
    """Closed-form free propagator continued to any dt ≠ 0.

    (m / 2πi·dt)^{3/2} on the principal branch times exp(i·m·|r - r0|² / 2dt).
    Positions broadcast over a trailing axis of length 3.
    """
    _check_mass(m)
    if dt == 0:
        raise DomainError("The free propagator is singular at dt = 0")
    magnitude = (m / (2.0 * np.pi * abs(dt))) ** 1.5
    prefactor = magnitude * (_PHASE_3PI_4 if dt > 0 else np.conj(_PHASE_3PI_4))
    return _as_result(prefactor * np.exp(1j * m * _displacement_squared(r, r0) / (2.0 * dt)))


def free_propagator(r, r0, dt: float, m: float):
    if not dt > 0:
        raise DomainError(f"free_propagator needs dt > 0, got {dt}")
    return continued_free_propagator(r, r0, dt, m)


def retarded_free_propagator(r, r0, t: float, t0: float, m: float):
    """θ(t - t0)·g(r, r0; t - t0) with θ(0) = 0."""
    if t <= t0:
        _check_mass(m)
        return _as_result(np.zeros(np.shape(_displacement_squared(r, r0)), dtype=complex))
    return free_propagator(r, r0, t - t0, m)


def pair_propagator(r1, r1p, r2, r2p, t: float, t0: float, m1: float, m2: float):
    """Product of the two single-particle propagators."""
    return free_propagator(r1, r1p, t - t0, m1) * free_propagator(r2, r2p, t - t0, m2)


def symmetrized_pair_propagator(
    r1, r1p, r2, r2p, t: float, t0: float, m: float, sign: int, m2: float | None = None
):
    """Direct plus ``sign`` times exchange propagator for identical particles."""
    if sign not in (1, -1):
        raise DomainError(f"Exchange sign must be +1 or -1, got {sign}")
    if m2 is not None and m2 != m:
        raise DomainError(f"Identical particles need equal masses, got {m} and {m2}")
    dt = t - t0
    direct = free_propagator(r1, r1p, dt, m) * free_propagator(r2, r2p, dt, m)
    exchange = free_propagator(r1, r2p, dt, m) * free_propagator(r2, r1p, dt, m)
    return direct + sign * exchange


def spectral_propagator(system: FiniteSystem, t: float, t0: float) -> np.ndarray:
    return np.diag(np.exp(-1j * system.h0 * (t - t0)))


# ---- FFT construction


def _refinement(grid: SpatialGrid, m: float, dt: float, oversample: int) -> tuple[int, int]:
    """Power-of-two factors (s_n, s_L) for the internal lattice.

    The internal band must hold the kernel's local wavenumber m·x/dt over the
    whole box, and the internal box must be long enough that periodic images
    fall outside that band.
    """
    k_max = np.pi / grid.spacing
    k_needed = oversample * max(k_max, m * (grid.side / 2.0) / dt)
    s_n = 1 << max(0, math.ceil(math.log2(k_needed / k_max)))
    k_internal = k_max * s_n
    l_needed = 4.0 * dt * k_internal / m
    s_l = 1 << max(0, math.ceil(math.log2(l_needed / grid.side)))
    return s_n, s_l


def _axis_kernel(n: int, spacing: float, m: float, dt: float) -> np.ndarray:
    """One-dimensional kernel ifft(exp(-i·k²·dt/2m))/dx, centered."""
    k = 2.0 * np.pi * scipy.fft.fftfreq(n, d=spacing)
    kernel = scipy.fft.ifft(np.exp(-1j * k * k * dt / (2.0 * m))) / spacing
    return scipy.fft.fftshift(kernel)


def fft_retarded_propagator(
    grid: SpatialGrid,
    m: float,
    dt: float,
    eps: float,
    refine: bool = True,
    oversample: int | None = None,
) -> ComplexField:
    """Retarded free propagator over displacements, built from exp(-i·k²·dt/2m) by inverse FFT.

    The ω → ω + iε regulator shows up as an overall e^{-ε·dt}. The kernel is
    separable, so the 3D field is the outer product of three 1D inverse
    transforms. With ``refine`` the 1D transform runs on a finer and longer
    lattice whose points include the output grid, and is decimated back.
    """
    _check_mass(m)
    if not dt > 0:
        raise DomainError(f"fft_retarded_propagator needs dt > 0, got {dt}")
    if not eps > 0:
        raise DomainError(f"eps must be positive, got {eps}")

    n = grid.n_points
    if refine:
        s_n, s_l = _refinement(grid, m, dt, oversample or config.get("greens_oversample"))
        n_internal = n * s_n * s_l
        axis = _axis_kernel(n_internal, grid.spacing / s_n, m, dt)
        centre = n_internal // 2
        axis = axis[centre + (np.arange(n) - n // 2) * s_n]
        logger.debug("FFT propagator on {} internal points (s_n={}, s_L={})", n_internal, s_n, s_l)
    else:
        axis = _axis_kernel(n, grid.spacing, m, dt)

    values = np.exp(-eps * dt) * np.einsum("i,j,k->ijk", axis, axis, axis)
    return ComplexField(values=values, grid=grid, time=dt)


def closed_form_field(grid: SpatialGrid, m: float, dt: float) -> ComplexField:
    """free_propagator(x, 0, dt, m) sampled on the grid."""
    return ComplexField(values=free_propagator(grid.mesh(), np.zeros(3), dt, m), grid=grid, time=dt)


def relative_l2_discrepancy(
    f: ComplexField, reference: ComplexField, inner_fraction: float = 0.5
) -> float:
    """‖f - reference‖ / ‖reference‖ over the central cube |x_i| ≤ inner_fraction·L/2."""
    x = f.grid.coordinates()
    inside = np.abs(x) <= inner_fraction * f.grid.side / 2.0
    mask = inside[:, None, None] & inside[None, :, None] & inside[None, None, :]
    diff = np.linalg.norm((f.values - reference.values)[mask])
    return float(diff / np.linalg.norm(reference.values[mask]))


def propagator_oracle_study(
    grid: SpatialGrid, m: float, dt: float, schedule: EpsilonSchedule, refine: bool = True
) -> list[tuple[float, float]]:
    """(ε, inner-box discrepancy against the closed form) for each ε in the schedule."""
    reference = closed_form_field(grid, m, dt)
    study = []
    for eps in schedule:
        fft_field = fft_retarded_propagator(grid, m, dt, eps, refine=refine)
        study.append((eps, relative_l2_discrepancy(fft_field, reference)))
        logger.debug("ε={:g}: discrepancy {:.3e}", eps, study[-1][1])
    return study


# ---- States and free evolution


def plane_wave_field(grid: SpatialGrid, p, time: float = 0.0) -> ComplexField:
    """e^{ip·r}/(2π)^{3/2}; periodic on the grid when p lies on the reciprocal lattice."""
    phase = grid.mesh() @ np.asarray(p, dtype=float)
    return ComplexField(values=np.exp(1j * phase) / (2.0 * np.pi) ** 1.5, grid=grid, time=time)


def gaussian_packet_field(grid: SpatialGrid, sigma: float, center=(0.0, 0.0, 0.0), p=(0, 0, 0)):
    """Unit-norm packet with |ψ|² of standard deviation ``sigma`` on each axis."""
    if not sigma > 0:
        raise DomainError(f"sigma must be positive, got {sigma}")
    d = grid.mesh() - np.asarray(center, dtype=float)
    values = np.exp(-np.sum(d * d, axis=-1) / (4.0 * sigma**2) + 1j * (d @ np.asarray(p, float)))
    packet = ComplexField(values=values, grid=grid)
    return packet.with_values(values / packet.norm(), time=0.0)


def _swap_particles(values: np.ndarray) -> np.ndarray:
    return np.transpose(values, (3, 4, 5, 0, 1, 2))


def pair_plane_wave_field(grid: SpatialGrid, p1, p2, exchange_sign: int | None = None):
    """Two-particle plane wave, optionally (anti)symmetrized without normalization."""
    if grid.n_points > config.get("pair_grid_max_points"):
        raise DomainError(
            f"Pair fields are limited to {config.get('pair_grid_max_points')} points per axis"
        )
    first = plane_wave_field(grid, p1).values
    second = plane_wave_field(grid, p2).values
    values = np.multiply.outer(first, second)
    if exchange_sign is not None:
        if exchange_sign not in (1, -1):
            raise DomainError(f"Exchange sign must be +1 or -1, got {exchange_sign}")
        values = values + exchange_sign * _swap_particles(values)
    return ComplexField(values=values, grid=grid)


def _free_multiplier(grid: SpatialGrid, dt: float, m: float) -> np.ndarray:
    k = grid.wavenumbers()
    k2 = k[:, None, None] ** 2 + k[None, :, None] ** 2 + k[None, None, :] ** 2
    return np.exp(-1j * k2 * dt / (2.0 * m))


def propagate_state(psi0: ComplexField, dt: float, m: float) -> ComplexField:
    """Free evolution by dt, applied as a diagonal multiplier in reciprocal space."""
    _check_mass(m)
    if not dt > 0:
        raise DomainError(f"propagate_state needs dt > 0, got {dt}")
    if psi0.is_pair:
        raise DomainError("Use propagate_pair_state for two-particle fields")
    spectrum = scipy.fft.fftn(psi0.values) * _free_multiplier(psi0.grid, dt, m)
    return psi0.with_values(scipy.fft.ifftn(spectrum), time=psi0.time + dt)


def propagate_pair_state(
    psi0: ComplexField,
    dt: float,
    m1: float,
    m2: float | None = None,
    exchange_sign: int | None = None,
) -> ComplexField:
    """Free evolution of a pair field.

    With ``exchange_sign`` the symmetrized pair propagator is applied, i.e. the
    direct evolution plus sign times its particle-swapped copy.
    """
    m2 = m1 if m2 is None else m2
    _check_mass(m1)
    _check_mass(m2)
    if not dt > 0:
        raise DomainError(f"propagate_pair_state needs dt > 0, got {dt}")
    if not psi0.is_pair:
        raise DomainError("propagate_pair_state expects a rank-6 pair field")
    multiplier = np.multiply.outer(
        _free_multiplier(psi0.grid, dt, m1), _free_multiplier(psi0.grid, dt, m2)
    )
    evolved = scipy.fft.ifftn(scipy.fft.fftn(psi0.values) * multiplier)
    if exchange_sign is not None:
        if exchange_sign not in (1, -1):
            raise DomainError(f"Exchange sign must be +1 or -1, got {exchange_sign}")
        if m1 != m2:
            raise DomainError(f"Identical particles need equal masses, got {m1} and {m2}")
        evolved = evolved + exchange_sign * _swap_particles(evolved)
    return psi0.with_values(evolved, time=psi0.time + dt)
