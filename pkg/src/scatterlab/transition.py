#
# Copyright (c) 2025, Daily
#
# SPDX-License-Identifier: BSD 2-Clause License
#

"""Transition amplitudes for one particle, distinguishable pairs and identical pairs.

An amplitude keeps the no-scattering Kronecker channel (``delta_part``) apart from
the box-normalized T-matrix element (``scattered_part``).
"""

import functools

import numpy as np
from attr import dataclass, field
from loguru import logger

from scatterlab.born import MomentumGrid, Potential, default_epsilon, pair_t_matrix, t_matrix
from scatterlab.constants import PROCESS_KINDS, ProcessKind, ReciprocityForm
from scatterlab.exception import DomainError, SingularityError
from scatterlab.kinematics import (
    CollisionInput,
    CollisionOutcome,
    Momentum3,
    kinetic_energy,
    solve_outgoing,
)
from scatterlab.system import FiniteSystem

_COUNTS = {"single": 1, "pair_distinguishable": 2, "pair_identical": 2}


def _momenta(values) -> tuple[Momentum3, ...]:
    return tuple(p if isinstance(p, Momentum3) else Momentum3.of(p) for p in values)


@dataclass(frozen=True, eq=False)
class ProcessSpec:
    kind: ProcessKind
    momenta_in: tuple[Momentum3, ...] = field(converter=_momenta)
    momenta_out: tuple[Momentum3, ...] = field(converter=_momenta)
    masses: tuple[float, ...] = field(converter=lambda v: tuple(float(m) for m in v))
    potential: Potential
    grid: MomentumGrid
    order: int = 1
    exchange_sign: int = 1
    epsilon: float | None = None
    energy: float | None = None

    def __attrs_post_init__(self):
        if self.kind not in PROCESS_KINDS:
            raise DomainError(f"Unknown process kind {self.kind!r}, expected {PROCESS_KINDS}")
        count = _COUNTS[self.kind]
        if len(self.momenta_in) != count or len(self.momenta_out) != count:
            raise DomainError(f"{self.kind} processes need {count} incoming and outgoing momenta")
        if len(self.masses) != count:
            raise DomainError(f"{self.kind} processes need {count} mass(es)")
        if any(not m > 0 for m in self.masses):
            raise DomainError(f"Masses must be positive, got {self.masses}")
        if self.kind == "pair_identical" and self.masses[0] != self.masses[1]:
            raise DomainError(f"Identical particles need equal masses, got {self.masses}")
        if self.exchange_sign not in (1, -1):
            raise DomainError(f"Exchange sign must be +1 or -1, got {self.exchange_sign}")
        if self.order < 1:
            raise DomainError(f"Truncation order must be at least 1, got {self.order}")
        if self.potential.kind == "matrix":
            raise DomainError("Scattering processes need a potential with a momentum-space form")
        for p in (*self.momenta_in, *self.momenta_out):
            self.grid.index_of(p)

    @property
    def total_energy(self) -> float:
        """Energy argument of the resolvent; the incoming kinetic energy unless pinned."""
        if self.energy is not None:
            return self.energy
        return sum(kinetic_energy(p, m) for p, m in zip(self.momenta_in, self.masses))

    @property
    def resolved_epsilon(self) -> float:
        if self.epsilon is not None:
            return self.epsilon
        return default_epsilon(self.grid, self.total_energy, min(self.masses))

    def _replace(self, momenta_in, momenta_out) -> "ProcessSpec":
        return ProcessSpec(
            kind=self.kind,
            momenta_in=momenta_in,
            momenta_out=momenta_out,
            masses=self.masses,
            potential=self.potential,
            grid=self.grid,
            order=self.order,
            exchange_sign=self.exchange_sign,
            epsilon=self.resolved_epsilon,
            energy=self.total_energy,
        )

    def reversed(self) -> "ProcessSpec":
        """The inverse process at the same energy and ε."""
        return self._replace(self.momenta_out, self.momenta_in)

    def negated(self) -> "ProcessSpec":
        """Every momentum flipped; needs a grid symmetric under p → -p."""
        return self._replace(
            tuple(-p for p in self.momenta_in), tuple(-p for p in self.momenta_out)
        )


@dataclass(frozen=True)
class Amplitude:
    delta_part: float = 0.0
    scattered_part: complex = 0j

    @property
    def value(self) -> complex:
        return self.delta_part + self.scattered_part

    def conjugate(self) -> "Amplitude":
        return Amplitude(self.delta_part, complex(self.scattered_part).conjugate())


@dataclass(frozen=True)
class DetectorReading:
    direction: Momentum3
    amplitude_a: complex = 0j
    amplitude_b: complex = 0j
    outcomes: tuple[CollisionOutcome | None, CollisionOutcome | None] = (None, None)
    snap_distances: tuple[float | None, float | None] = (None, None)
    root: int = 0

    @property
    def total(self) -> complex:
        return self.amplitude_a + self.amplitude_b

    @property
    def intensity(self) -> float:
        return abs(self.total) ** 2

    @property
    def is_empty(self) -> bool:
        return self.outcomes == (None, None)


def probability(a: Amplitude) -> float:
    return abs(a.value) ** 2


# ---- Amplitudes


def _kronecker(a: Momentum3, b: Momentum3, grid: MomentumGrid) -> float:
    return 1.0 if grid.index_of(a) == grid.index_of(b) else 0.0


def _check_transfer(pot: Potential, p: Momentum3, p_prime: Momentum3, grid: MomentumGrid):
    if pot.kind == "coulomb" and pot.alpha != 0 and grid.index_of(p) == grid.index_of(p_prime):
        raise SingularityError()


@functools.lru_cache(maxsize=16)
def _cached_single(grid, pot, energy, eps, order, mass):
    return t_matrix(grid, pot, energy, eps, order, mass)


@functools.lru_cache(maxsize=16)
def _cached_pair(grid, pot, total, energy, eps, order, m1, m2):
    return pair_t_matrix(grid, pot, total, energy, eps, order, m1, m2)


def _single_amplitude(spec: ProcessSpec) -> Amplitude:
    (p,), (p_prime,) = spec.momenta_in, spec.momenta_out
    _check_transfer(spec.potential, p, p_prime, spec.grid)
    t = _cached_single(
        spec.grid,
        spec.potential,
        spec.total_energy,
        spec.resolved_epsilon,
        spec.order,
        spec.masses[0],
    )
    return Amplitude(
        delta_part=_kronecker(p, p_prime, spec.grid),
        scattered_part=spec.grid.delta_weight * t.element(p_prime, p),
    )


def _pair_matrix(spec: ProcessSpec):
    n_in = [spec.grid.lattice_coordinates(p) for p in spec.momenta_in]
    n_out = [spec.grid.lattice_coordinates(p) for p in spec.momenta_out]
    total = tuple(a + b for a, b in zip(*n_in))
    if total != tuple(a + b for a, b in zip(*n_out)):
        return None
    m1, m2 = spec.masses
    energy, eps = spec.total_energy, spec.resolved_epsilon
    return _cached_pair(spec.grid, spec.potential, total, energy, eps, spec.order, m1, m2)


def _pair_amplitude(spec: ProcessSpec) -> Amplitude:
    (p1, p2), (p1p, p2p) = spec.momenta_in, spec.momenta_out
    grid = spec.grid
    delta = _kronecker(p1, p1p, grid) * _kronecker(p2, p2p, grid)
    t = _pair_matrix(spec)
    if t is None:
        return Amplitude(delta_part=delta)
    _check_transfer(spec.potential, p1, p1p, grid)
    return Amplitude(delta_part=delta, scattered_part=grid.delta_weight**2 * t.element(p1p, p1))


def _identical_amplitude(spec: ProcessSpec) -> Amplitude:
    """½ Σ over direct and exchange orderings of both the in and the out state.

    Grouped as ½(X + s·Y) with Y the out-swapped X, so swapping the outgoing
    momenta maps the result to exactly s times itself.
    """
    (p1, p2), (p1p, p2p) = spec.momenta_in, spec.momenta_out
    grid, s = spec.grid, spec.exchange_sign
    k = _kronecker
    delta = k(p1, p1p, grid) * k(p2, p2p, grid) + s * k(p2, p1p, grid) * k(p1, p2p, grid)
    t = _pair_matrix(spec)
    if t is None:
        return Amplitude(delta_part=delta)
    for out in (p1p, p2p):
        for inc in (p1, p2):
            _check_transfer(spec.potential, inc, out, grid)
    x = t.element(p1p, p1) + s * t.element(p1p, p2)
    y = t.element(p2p, p1) + s * t.element(p2p, p2)
    return Amplitude(delta_part=delta, scattered_part=grid.delta_weight**2 * 0.5 * (x + s * y))


def amplitude(spec: ProcessSpec) -> Amplitude:
    if spec.kind == "single":
        return _single_amplitude(spec)
    if spec.kind == "pair_distinguishable":
        return _pair_amplitude(spec)
    return _identical_amplitude(spec)


def reciprocity_residual(spec: ProcessSpec, form: ReciprocityForm = "transpose") -> float:
    """Distance between the scattered amplitude of a process and of its inverse.

    ``transpose`` compares C with C(reversed), which holds at every order because
    T(E + iε) is complex symmetric for real even potentials. ``conjugate`` compares
    C with C*(reversed), which holds only where T is also real (first order).
    """
    if not spec.potential.is_real:
        raise DomainError("Reciprocity needs a real potential")
    forward = amplitude(spec).scattered_part
    backward = amplitude(spec.reversed()).scattered_part
    if form == "conjugate":
        backward = backward.conjugate()
    elif form != "transpose":
        raise DomainError(f"Unknown reciprocity form {form!r}")
    return abs(forward - backward)


# ---- Detector


def _scattered(inp: CollisionInput, direction: Momentum3, which: str) -> list[CollisionOutcome]:
    """Non-forward solutions along ``direction``, fastest first."""
    return [o for o in solve_outgoing(inp, direction, which) if not o.is_forward]


def _branch(
    inp: CollisionInput, direction: Momentum3, which: str, grid: MomentumGrid, root: int = 0
) -> tuple[CollisionOutcome, tuple[Momentum3, Momentum3], float] | None:
    outcomes = _scattered(inp, direction, which)
    if len(outcomes) <= root:
        return None
    outcome = outcomes[root]
    index = 0 if which == "first" else 1
    snapped, distance = grid.snap(outcome.momenta_out[index])
    if distance > 0.25 * grid.unit:
        logger.warning(
            "Detector {} branch snapped {:.3g} away from its kinematic solution", which, distance
        )
    total = inp.momenta_in[0] + inp.momenta_in[1]
    partner = grid.from_lattice(
        np.add(*[grid.lattice_coordinates(p) for p in inp.momenta_in])
        - np.asarray(grid.lattice_coordinates(snapped))
    )
    if not (grid.contains(snapped) and grid.contains(partner)):
        logger.warning(
            "Outgoing momenta for {} branch leave the grid (|P|={:.3g}); skipping",
            which,
            total.norm(),
        )
        return None
    momenta_out = (snapped, partner) if index == 0 else (partner, snapped)
    return outcome, momenta_out, distance


def _direction(direction) -> Momentum3:
    return direction if isinstance(direction, Momentum3) else Momentum3.of(direction)


def detector_amplitude(
    inp: CollisionInput,
    direction,
    pot: Potential,
    order: int,
    grid: MomentumGrid,
    exchange_sign: int | None = None,
    epsilon: float | None = None,
    root: int = 0,
) -> DetectorReading:
    """C = C_a + C_b for a detector along ``direction``.

    C_a puts the first particle on the detector ray, C_b the second. Kinematic
    solutions are snapped to the lattice and the partner momentum is fixed by
    conservation on the lattice. With ``exchange_sign`` the particles are identical.

    A heavy particle on a light one can reach the detector with two speeds;
    ``root`` picks the solution, 0 being the fastest. ``detector_readings``
    returns all of them.
    """
    n = _direction(direction)
    kind = "pair_distinguishable" if exchange_sign is None else "pair_identical"
    masses = (inp.particles[0].mass, inp.particles[1].mass)
    energy = sum(kinetic_energy(p, m) for p, m in zip(inp.momenta_in, masses))

    values, outcomes, distances = [0j, 0j], [None, None], [None, None]
    for slot, which in enumerate(("first", "second")):
        branch = _branch(inp, n, which, grid, root)
        if branch is None:
            continue
        outcome, momenta_out, distance = branch
        spec = ProcessSpec(
            kind=kind,
            momenta_in=inp.momenta_in,
            momenta_out=momenta_out,
            masses=masses,
            potential=pot,
            grid=grid,
            order=order,
            exchange_sign=exchange_sign or 1,
            epsilon=epsilon,
            energy=energy,
        )
        values[slot] = amplitude(spec).value
        outcomes[slot] = outcome
        distances[slot] = distance

    return DetectorReading(
        direction=n,
        amplitude_a=values[0],
        amplitude_b=values[1],
        outcomes=tuple(outcomes),
        snap_distances=tuple(distances),
        root=root,
    )


def detector_readings(
    inp: CollisionInput,
    direction,
    pot: Potential,
    order: int,
    grid: MomentumGrid,
    exchange_sign: int | None = None,
    epsilon: float | None = None,
) -> list[DetectorReading]:
    """One reading per kinematic solution along ``direction``, fastest first."""
    n = _direction(direction)
    count = max(len(_scattered(inp, n, which)) for which in ("first", "second"))
    return [
        detector_amplitude(inp, n, pot, order, grid, exchange_sign, epsilon, root)
        for root in range(count)
    ]


# ---- Golden rule


def horizon_kernel(delta_e, horizon: float):
    """sin²(ΔE·T/2)/(ΔE/2)²/T, equal to T at ΔE = 0."""
    if not horizon > 0:
        raise DomainError(f"Horizon must be positive, got {horizon}")
    return horizon * np.sinc(np.asarray(delta_e) * horizon / (2.0 * np.pi)) ** 2


def golden_rule_rate(system: FiniteSystem, n: int, m: int, horizon: float) -> float:
    """Finite-horizon first-order rate from level n to level m."""
    if m == n:
        raise DomainError("Golden-rule rates need distinct initial and final levels")
    for index in (n, m):
        if not 0 <= index < system.dimension:
            raise DomainError(f"Level index {index} out of range for N={system.dimension}")
    delta_e = system.h0[m] - system.h0[n]
    return float(abs(system.h1[m, n]) ** 2 * horizon_kernel(delta_e, horizon))


def summed_golden_rule_rate(system: FiniteSystem, n: int, horizon: float) -> float:
    """First-order rate out of level n summed over every other level."""
    if not 0 <= n < system.dimension:
        raise DomainError(f"Level index {n} out of range for N={system.dimension}")
    kernel = horizon_kernel(system.h0 - system.h0[n], horizon)
    rates = np.abs(system.h1[:, n]) ** 2 * kernel
    rates[n] = 0.0
    return float(np.sum(rates))
