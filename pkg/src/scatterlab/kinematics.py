#
# Copyright (c) 2025, Daily
#
# SPDX-License-Identifier: BSD 2-Clause License
#

"""Momentum bookkeeping and the lab-frame elastic two-body solver.

Natural units throughout: ħ = 1, masses and momenta are plain floats.
"""

import math

from attr import dataclass
from loguru import logger

from scatterlab.config import config
from scatterlab.constants import Which
from scatterlab.exception import DomainError


@dataclass(frozen=True, slots=True)
class Momentum3:
    px: float
    py: float
    pz: float

    def __attrs_post_init__(self):
        if not (math.isfinite(self.px) and math.isfinite(self.py) and math.isfinite(self.pz)):
            raise DomainError(f"Momentum components must be finite, got {self.as_tuple()}")

    @classmethod
    def of(cls, components) -> "Momentum3":
        px, py, pz = components
        return cls(float(px), float(py), float(pz))

    @classmethod
    def zero(cls) -> "Momentum3":
        return cls(0.0, 0.0, 0.0)

    def __add__(self, other: "Momentum3") -> "Momentum3":
        return Momentum3(self.px + other.px, self.py + other.py, self.pz + other.pz)

    def __sub__(self, other: "Momentum3") -> "Momentum3":
        return Momentum3(self.px - other.px, self.py - other.py, self.pz - other.pz)

    def __neg__(self) -> "Momentum3":
        return Momentum3(-self.px, -self.py, -self.pz)

    def scaled(self, factor: float) -> "Momentum3":
        return Momentum3(factor * self.px, factor * self.py, factor * self.pz)

    def dot(self, other: "Momentum3") -> float:
        return self.px * other.px + self.py * other.py + self.pz * other.pz

    def norm2(self) -> float:
        return self.dot(self)

    def norm(self) -> float:
        return math.sqrt(self.norm2())

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.px, self.py, self.pz)


@dataclass(frozen=True, slots=True)
class FreeParticle:
    mass: float
    coupling_charge: float = 1.0

    def __attrs_post_init__(self):
        if not self.mass > 0:
            raise DomainError(f"Particle mass must be positive, got {self.mass}")


@dataclass(frozen=True, slots=True)
class CollisionInput:
    particles: tuple[FreeParticle, FreeParticle]
    momenta_in: tuple[Momentum3, Momentum3]

    def swapped(self) -> "CollisionInput":
        """The same collision with the particle labels exchanged."""
        return CollisionInput(
            particles=(self.particles[1], self.particles[0]),
            momenta_in=(self.momenta_in[1], self.momenta_in[0]),
        )


@dataclass(frozen=True, slots=True)
class CollisionOutcome:
    momenta_out: tuple[Momentum3, Momentum3]
    momentum_residual: Momentum3
    energy_residual: float
    is_forward: bool = False

    @property
    def conservation_residual(self) -> tuple[Momentum3, float]:
        return (self.momentum_residual, self.energy_residual)

    def swapped(self) -> "CollisionOutcome":
        return CollisionOutcome(
            momenta_out=(self.momenta_out[1], self.momenta_out[0]),
            momentum_residual=self.momentum_residual,
            energy_residual=self.energy_residual,
            is_forward=self.is_forward,
        )


def kinetic_energy(p: Momentum3, m: float) -> float:
    if not m > 0:
        raise DomainError(f"Mass must be positive, got {m}")
    return p.norm2() / (2.0 * m)


def total_invariants(inp: CollisionInput) -> tuple[Momentum3, float]:
    """Total momentum and kinetic energy of the incoming pair."""
    (a, b), (pa, pb) = inp.particles, inp.momenta_in
    return pa + pb, kinetic_energy(pa, a.mass) + kinetic_energy(pb, b.mass)


def momentum_transfer(p: Momentum3, p_prime: Momentum3) -> Momentum3:
    return p - p_prime


def _unit(direction) -> Momentum3:
    n = direction if isinstance(direction, Momentum3) else Momentum3.of(direction)
    if abs(n.norm() - 1.0) > 1e-12:
        raise DomainError(f"Direction must be a unit vector, |n| = {n.norm():.17g}")
    return n


def _quadratic_roots(a: float, b: float, c: float, tolerance: float) -> list[float]:
    """Real roots of a·k² + b·k + c with a > 0, using the cancellation-free form."""
    disc = b * b - 4.0 * a * c
    if disc < 0.0:
        # Rounding can push a double root slightly negative
        if disc < -tolerance * (b * b + abs(4.0 * a * c)):
            return []
        disc = 0.0
    if disc == 0.0:
        return [-b / (2.0 * a)]
    q = -0.5 * (b + math.copysign(math.sqrt(disc), b))
    roots = [q / a]
    if q != 0.0:
        roots.append(c / q)
    return sorted(roots, reverse=True)


def solve_outgoing(
    inp: CollisionInput, direction, which: Which = "first"
) -> list[CollisionOutcome]:
    """Solve elastic momentum and energy conservation with one outgoing momentum on a ray.

    The particle selected by ``which`` leaves along ``direction`` with magnitude k;
    its partner carries P − k·n. Energy conservation is then a quadratic in k whose
    non-positive roots are dropped. The no-scattering root is kept and flagged.
    """
    if which not in ("first", "second"):
        raise DomainError(f"which must be 'first' or 'second', got {which!r}")
    n = _unit(direction)
    tolerance = config.get("kinematics_tolerance")
    forward_tolerance = config.get("forward_tolerance")

    total, energy = total_invariants(inp)
    c_index = 0 if which == "first" else 1
    o_index = 1 - c_index
    m_c = inp.particles[c_index].mass
    m_o = inp.particles[o_index].mass
    p_c = inp.momenta_in[c_index]

    a = 0.5 * (1.0 / m_c + 1.0 / m_o)
    b = -total.dot(n) / m_o
    c = total.norm2() / (2.0 * m_o) - energy

    scale = max(inp.momenta_in[0].norm(), inp.momenta_in[1].norm(), math.sqrt(2.0 * m_c * energy))
    outcomes = []
    for k in _quadratic_roots(a, b, c, tolerance):
        if k <= tolerance * scale:
            continue
        out_c = n.scaled(k)
        out_o = total - out_c
        momenta_out = (out_c, out_o) if c_index == 0 else (out_o, out_c)
        energy_out = kinetic_energy(momenta_out[0], inp.particles[0].mass) + kinetic_energy(
            momenta_out[1], inp.particles[1].mass
        )
        is_forward = (out_c - p_c).norm() <= forward_tolerance * max(scale, 1.0)
        outcomes.append(
            CollisionOutcome(
                momenta_out=momenta_out,
                # The partner is defined as P − k·n
                momentum_residual=Momentum3.zero(),
                energy_residual=energy_out - energy,
                is_forward=is_forward,
            )
        )

    logger.debug("solve_outgoing({}): {} outcome(s)", which, len(outcomes))
    return outcomes
