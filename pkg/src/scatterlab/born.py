#
# Copyright (c) 2025, Daily
#
# SPDX-License-Identifier: BSD 2-Clause License
#

"""Potentials, box-normalized momentum grids and the Born series.

Plane waves live in a periodic box of side L, so δ(p - p') becomes
(L/2π)³ times a Kronecker delta. One conversion constant, ``delta_weight``,
is used everywhere.
"""

import functools
import itertools
import json
import math
from collections.abc import Iterator
from pathlib import Path

import numpy as np
from attr import dataclass, field
from loguru import logger
from numpy.polynomial.legendre import leggauss

from scatterlab._utils import binary_utils
from scatterlab.config import config
from scatterlab.constants import POTENTIAL_KINDS, PotentialKind
from scatterlab.exception import (
    DomainError,
    NonConvergentError,
    SingularityError,
    UnsupportedOrderError,
)
from scatterlab.kinematics import Momentum3
from scatterlab.system import FiniteSystem, check_hermitian

MAX_DYSON_ORDER = 3


# ---- Potentials


@dataclass(frozen=True, eq=False)
class Potential:
    """Interaction H₁ as a tagged family.

    ``alpha`` folds q₁q₂/4πε₀ into one constant. A non-zero imaginary part makes
    the interaction absorptive, which breaks the hypotheses of reciprocity.
    """

    kind: PotentialKind
    alpha: complex = 1.0
    mu: float = 0.0
    width: float = 1.0
    matrix: np.ndarray | None = None

    def __attrs_post_init__(self):
        if self.kind not in POTENTIAL_KINDS:
            raise DomainError(f"Unknown potential kind {self.kind!r}, expected {POTENTIAL_KINDS}")
        if self.kind == "yukawa" and not self.mu > 0:
            raise DomainError(f"yukawa needs mu > 0, got {self.mu} (use coulomb for mu = 0)")
        if self.kind == "gaussian" and not self.width > 0:
            raise DomainError(f"gaussian needs width > 0, got {self.width}")
        if self.kind == "matrix":
            if self.matrix is None:
                raise DomainError("matrix potential needs a matrix payload")
            payload = np.array(self.matrix, dtype=complex, copy=True)
            check_hermitian(payload)
            payload.setflags(write=False)
            object.__setattr__(self, "matrix", payload)

    @classmethod
    def coulomb(cls, alpha: complex) -> "Potential":
        return cls(kind="coulomb", alpha=alpha)

    @classmethod
    def yukawa(cls, alpha: complex, mu: float) -> "Potential":
        return cls(kind="yukawa", alpha=alpha, mu=mu)

    @classmethod
    def gaussian(cls, alpha: complex, width: float) -> "Potential":
        return cls(kind="gaussian", alpha=alpha, width=width)

    @classmethod
    def from_matrix(cls, matrix: np.ndarray) -> "Potential":
        return cls(kind="matrix", alpha=1.0, matrix=matrix)

    @property
    def is_real(self) -> bool:
        return complex(self.alpha).imag == 0.0

    def with_alpha(self, alpha: complex) -> "Potential":
        return Potential(
            kind=self.kind, alpha=alpha, mu=self.mu, width=self.width, matrix=self.matrix
        )

    def to_dict(self):
        alpha = complex(self.alpha)
        data = {
            "kind": self.kind,
            "alpha": alpha.real if self.is_real else [alpha.real, alpha.imag],
        }
        if self.kind == "yukawa":
            data["mu"] = self.mu
        if self.kind == "gaussian":
            data["width"] = self.width
        return data


def _fourier_values(pot: Potential, q2: np.ndarray) -> np.ndarray:
    """Ṽ as a function of |q|²; every supported kind is spherically symmetric."""
    alpha = complex(pot.alpha) if not pot.is_real else float(np.real(pot.alpha))
    if pot.kind == "yukawa":
        return 4.0 * np.pi * alpha / (q2 + pot.mu**2)
    if pot.kind == "gaussian":
        return alpha * (2.0 * np.pi) ** 1.5 * pot.width**3 * np.exp(-q2 * pot.width**2 / 2.0)
    if pot.kind == "coulomb":
        with np.errstate(divide="ignore", invalid="ignore"):
            return 4.0 * np.pi * alpha / q2
    raise DomainError("matrix potentials have no momentum-space form")


def fourier_potential(pot: Potential, q: Momentum3) -> complex:
    """Ṽ(q) = ∫dr e^{-iq·r} V(r)."""
    q2 = q.norm2()
    if pot.kind == "coulomb" and q2 == 0.0:
        raise SingularityError()
    return complex(_fourier_values(pot, np.float64(q2)))


def born1_single(p: Momentum3, p_prime: Momentum3, pot: Potential) -> complex:
    """First Born amplitude (2π)⁻³·Ṽ(p - p') between continuum plane waves."""
    return fourier_potential(pot, p - p_prime) / (2.0 * np.pi) ** 3


def coulomb_limit(
    p: Momentum3,
    p_prime: Momentum3,
    alpha: float,
    screenings: tuple[float, ...] = (0.1, 0.05, 0.025),
) -> complex:
    """Extrapolate screened amplitudes linearly in μ² to μ = 0."""
    if len(screenings) < 2:
        raise DomainError("Need at least two screening lengths to extrapolate")
    mu2 = np.array([mu * mu for mu in screenings])
    values = np.array([born1_single(p, p_prime, Potential.yukawa(alpha, mu)) for mu in screenings])
    real = np.polynomial.polynomial.polyfit(mu2, values.real, 1)[0]
    imag = np.polynomial.polynomial.polyfit(mu2, values.imag, 1)[0]
    return complex(real, imag)


# ---- Momentum grid


@dataclass(frozen=True)
class MomentumGrid:
    """Box momenta p = 2π·n/L for integer n in a centered cube, lexicographically ordered.

    Odd n_points give n ∈ [-(N-1)/2, (N-1)/2]; even give n ∈ [-N/2, N/2 - 1].
    """

    side: float
    n_points: int

    def __attrs_post_init__(self):
        if not self.side > 0:
            raise DomainError(f"Grid side must be positive, got {self.side}")
        if self.n_points < 1:
            raise DomainError(f"n_points must be positive, got {self.n_points}")

    @property
    def low(self) -> int:
        return -(self.n_points // 2)

    @property
    def high(self) -> int:
        return self.low + self.n_points - 1

    @property
    def unit(self) -> float:
        return 2.0 * np.pi / self.side

    @property
    def size(self) -> int:
        return self.n_points**3

    @property
    def delta_weight(self) -> float:
        """(L/2π)³: the box value of δ(0) between plane waves."""
        return (self.side / (2.0 * np.pi)) ** 3

    def energy_spacing(self, m: float) -> float:
        return self.unit**2 / (2.0 * m)

    @functools.cached_property
    def integer_points(self) -> np.ndarray:
        axis = range(self.low, self.high + 1)
        points = np.array(list(itertools.product(axis, axis, axis)), dtype=np.int64)
        points.setflags(write=False)
        return points

    def momenta(self) -> np.ndarray:
        return self.unit * self.integer_points

    def momentum(self, index: int) -> Momentum3:
        return Momentum3.of(self.unit * self.integer_points[index])

    def from_lattice(self, n) -> Momentum3:
        return Momentum3.of(self.unit * np.asarray(n, dtype=float))

    def lattice_coordinates(self, p: Momentum3) -> tuple[int, int, int]:
        """Integer coordinates of ``p``; it must sit on the lattice but may leave the cube."""
        scaled = np.array(p.as_tuple()) / self.unit
        rounded = np.rint(scaled)
        if np.max(np.abs(scaled - rounded)) > 1e-9:
            raise DomainError(f"Momentum {p.as_tuple()} is off the lattice (L={self.side})")
        return tuple(int(v) for v in rounded)

    def contains(self, p: Momentum3) -> bool:
        try:
            n = self.lattice_coordinates(p)
        except DomainError:
            return False
        return all(self.low <= c <= self.high for c in n)

    def index_of(self, p: Momentum3) -> int:
        n = self.lattice_coordinates(p)
        if not all(self.low <= c <= self.high for c in n):
            raise DomainError(f"Momentum {p.as_tuple()} lies outside the grid cube")
        span = self.n_points
        return ((n[0] - self.low) * span + (n[1] - self.low)) * span + (n[2] - self.low)

    def snap(self, p: Momentum3) -> tuple[Momentum3, float]:
        """Nearest lattice momentum and its distance from ``p``; may lie outside the cube."""
        nearest = self.from_lattice(np.rint(np.array(p.as_tuple()) / self.unit))
        return nearest, (nearest - p).norm()

    def to_dict(self):
        return {"side": self.side, "n_points": self.n_points}


def born1_pair(
    p1: Momentum3,
    p2: Momentum3,
    p1p: Momentum3,
    p2p: Momentum3,
    pot: Potential,
    grid: MomentumGrid,
) -> complex:
    """First Born pair amplitude; zero unless total lattice momentum is conserved."""
    n1, n2, n1p, n2p = (grid.lattice_coordinates(p) for p in (p1, p2, p1p, p2p))
    for p in (p1, p2, p1p, p2p):
        grid.index_of(p)
    if any(a + b != c + d for a, b, c, d in zip(n1, n2, n1p, n2p)):
        return 0j
    return grid.delta_weight * fourier_potential(pot, p1 - p1p) / (2.0 * np.pi) ** 3


# ---- T-matrix


def default_epsilon(grid: MomentumGrid, energy: float, m: float) -> float:
    """ε = max(fraction·E, multiple·level spacing)."""
    return max(
        config.get("epsilon_energy_fraction") * energy,
        config.get("epsilon_spacing_multiple") * grid.energy_spacing(m),
    )


@dataclass(frozen=True, eq=False)
class TMatrix:
    grid: MomentumGrid
    energy: float
    epsilon: float
    order: int
    values: np.ndarray
    term_norms: tuple[float, ...] = ()
    total_momentum: tuple[int, int, int] | None = None

    def __attrs_post_init__(self):
        values = np.array(self.values, dtype=complex, copy=True)
        if values.shape != (self.grid.size, self.grid.size):
            raise DomainError(f"T-matrix shape {values.shape} does not match the grid")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def element(self, p_out: Momentum3, p_in: Momentum3) -> complex:
        return complex(self.values[self.grid.index_of(p_out), self.grid.index_of(p_in)])

    def header(self):
        return {
            "grid": self.grid.to_dict(),
            "energy": self.energy,
            "epsilon": self.epsilon,
            "order": self.order,
            "term_norms": list(self.term_norms),
            "total_momentum": list(self.total_momentum) if self.total_momentum else None,
        }

    def export(self, path: str | Path) -> tuple[Path, Path]:
        """Write ``<path>.json`` (header) and ``<path>.bin`` (matrix payload)."""
        base = Path(path)
        json_path, bin_path = base.with_suffix(".json"), base.with_suffix(".bin")
        json_path.write_text(json.dumps(self.header(), indent=2, sort_keys=True) + "\n")
        bin_path.write_bytes(
            binary_utils.encode(self.values, self.grid.n_points, self.grid.side, 0.0)
        )
        return json_path, bin_path

    @classmethod
    def load(cls, path: str | Path) -> "TMatrix":
        base = Path(path)
        header = json.loads(base.with_suffix(".json").read_text())
        bin_header, flat = binary_utils.decode(base.with_suffix(".bin").read_bytes())
        binary_utils.shape_for(bin_header, flat.size, ranks=(6,))
        grid = MomentumGrid(**header["grid"])
        total = header.get("total_momentum")
        return cls(
            grid=grid,
            energy=header["energy"],
            epsilon=header["epsilon"],
            order=header["order"],
            values=flat.reshape(grid.size, grid.size),
            term_norms=tuple(header.get("term_norms", ())),
            total_momentum=tuple(total) if total else None,
        )


def potential_matrix(grid: MomentumGrid, pot: Potential) -> np.ndarray:
    """V[p, p'] = Ṽ(p - p')/L³.

    For Coulomb the q = 0 entries are set to zero (uniform neutralizing background).
    """
    n = grid.integer_points
    sq = np.sum(n * n, axis=1)
    q2 = (sq[:, None] + sq[None, :] - 2 * (n @ n.T)) * grid.unit**2
    values = _fourier_values(pot, q2.astype(float)) / grid.side**3
    if pot.kind == "coulomb":
        values = np.where(q2 == 0, 0.0, values)
    return np.asarray(values, dtype=complex)


def single_propagator_diagonal(grid: MomentumGrid, energy: float, eps: float, m: float):
    p2 = np.sum(grid.momenta() ** 2, axis=1)
    return 1.0 / (energy - p2 / (2.0 * m) + 1j * eps)


def pair_propagator_diagonal(
    grid: MomentumGrid, total: tuple[int, int, int], energy: float, eps: float, m1: float, m2: float
):
    """1/(E - k²/2m₁ - (P - k)²/2m₂ + iε) over particle-1 momenta k."""
    k = grid.momenta()
    rest = grid.unit * np.asarray(total, dtype=float) - k
    kinetic = np.sum(k * k, axis=1) / (2.0 * m1) + np.sum(rest * rest, axis=1) / (2.0 * m2)
    return 1.0 / (energy - kinetic + 1j * eps)


def born_terms(v: np.ndarray, d: np.ndarray, max_order: int) -> Iterator[np.ndarray]:
    """The Born terms V, V·D·V, V·D·V·D·V, ... up to ``max_order`` of them."""
    term = v
    for k in range(1, max_order + 1):
        if k > 1:
            term = v @ (d[:, None] * term)
        yield term


def sum_born_series(v: np.ndarray, d: np.ndarray, max_order: int) -> tuple[np.ndarray, list, int]:
    """Sum Born terms until ``max_order`` or until the newest term is negligible.

    Returns the sum, the Frobenius norms of the terms used and the order reached.
    """
    if max_order < 1:
        raise DomainError(f"max_order must be at least 1, got {max_order}")
    cutoff = config.get("born_relative_cutoff")
    total = np.zeros_like(v)
    norms: list[float] = []
    growing = 0
    for order, term in enumerate(born_terms(v, d, max_order), start=1):
        norm = float(np.linalg.norm(term))
        total = total + term
        norms.append(norm)
        if norm == 0.0:
            break
        if order > 1:
            ratio = norm / norms[-2]
            growing = growing + 1 if ratio >= 1.0 else 0
            if growing >= 2:
                raise NonConvergentError(ratio=ratio, order=order)
            if norm < cutoff * np.linalg.norm(total):
                break
    logger.debug("Born series stopped at order {} (term norms {})", len(norms), norms)
    return total, norms, len(norms)


def t_matrix(
    grid: MomentumGrid,
    pot: Potential,
    E: float,
    eps: float | None = None,
    max_order: int = 1,
    m: float = 1.0,
) -> TMatrix:
    """Born-series T(E + iε) for one particle on the box momentum basis."""
    if not m > 0:
        raise DomainError(f"Mass must be positive, got {m}")
    eps = default_epsilon(grid, E, m) if eps is None else eps
    if not eps > 0:
        raise DomainError(f"eps must be positive, got {eps}")
    v = potential_matrix(grid, pot)
    d = single_propagator_diagonal(grid, E, eps, m)
    values, norms, order = sum_born_series(v, d, max_order)
    return TMatrix(
        grid=grid, energy=E, epsilon=eps, order=order, values=values, term_norms=tuple(norms)
    )


def pair_t_matrix(
    grid: MomentumGrid,
    pot: Potential,
    total_momentum: tuple[int, int, int],
    E: float,
    eps: float,
    max_order: int,
    m1: float,
    m2: float,
) -> TMatrix:
    """Two-body T at fixed total lattice momentum, indexed by particle-1 momenta.

    The interaction only transfers momentum between the particles, so V has the
    same Ṽ(k - k')/L³ form as for one particle.
    """
    if not eps > 0:
        raise DomainError(f"eps must be positive, got {eps}")
    v = potential_matrix(grid, pot)
    d = pair_propagator_diagonal(grid, total_momentum, E, eps, m1, m2)
    values, norms, order = sum_born_series(v, d, max_order)
    return TMatrix(
        grid=grid,
        energy=E,
        epsilon=eps,
        order=order,
        values=values,
        term_norms=tuple(norms),
        total_momentum=tuple(total_momentum),
    )


# ---- Time-ordered terms on finite systems


def _interaction_picture(system: FiniteSystem, times: np.ndarray) -> np.ndarray:
    """H_I(s)_ab = e^{i(E_a - E_b)s}·H1_ab for every s in ``times``; shape (..., N, N)."""
    gaps = system.h0[:, None] - system.h0[None, :]
    return np.exp(1j * gaps * times[..., None, None]) * system.h1


def _nested_integral(
    system: FiniteSystem, n: int, upper: np.ndarray, t0: float, nodes, weights
) -> np.ndarray:
    """∫_{t0}^{s} H_I(u)·F_{n-1}(u) du for each s in ``upper``, with F_0 = 1."""
    dim = system.dimension
    if n == 0:
        return np.broadcast_to(np.eye(dim, dtype=complex), (*upper.shape, dim, dim))
    half = (upper[:, None] - t0) / 2.0
    u = t0 + half * (nodes[None, :] + 1.0)
    w = half * weights[None, :]
    inner = _nested_integral(system, n - 1, u.ravel(), t0, nodes, weights)
    inner = inner.reshape(*u.shape, dim, dim)
    return np.einsum("bq,bqij,bqjk->bik", w, _interaction_picture(system, u), inner)


def dyson_matrix(
    system: FiniteSystem, n: int, t: float, t0: float, quadrature_points: int | None = None
) -> np.ndarray:
    """Order-n interaction-picture term (-i)ⁿ∫…∫ H_I(t₁)…H_I(tₙ), t0 ≤ tₙ ≤ … ≤ t₁ ≤ t.

    Iterated Gauss-Legendre quadrature, one rule per nesting level.
    """
    if n < 0:
        raise DomainError(f"Order must be non-negative, got {n}")
    if n > MAX_DYSON_ORDER:
        raise UnsupportedOrderError(n, MAX_DYSON_ORDER)
    if t < t0:
        raise DomainError(f"Time-ordered terms need t >= t0, got t={t}, t0={t0}")
    if n == 0:
        return np.eye(system.dimension, dtype=complex)
    points = quadrature_points or config.get("dyson_quadrature_points")
    nodes, weights = leggauss(points)
    nested = _nested_integral(system, n, np.array([float(t)]), float(t0), nodes, weights)[0]
    return (-1j) ** n * nested


def dyson_term(
    system: FiniteSystem,
    n: int,
    t: float,
    t0: float,
    state_in: int,
    state_out: int,
    quadrature_points: int | None = None,
) -> complex:
    """Order-n contribution to the amplitude ⟨state_out|U(t, t0)|state_in⟩."""
    for index in (state_in, state_out):
        if not 0 <= index < system.dimension:
            raise DomainError(f"State index {index} out of range for N={system.dimension}")
    return complex(dyson_matrix(system, n, t, t0, quadrature_points)[state_out, state_in])


def dyson_remainder_bound(system: FiniteSystem, order: int, t: float, t0: float) -> float:
    """(‖H₁‖Δt)^{n+1}/(n+1)!·e^{‖H₁‖Δt}, bounding the error of the order-n sum."""
    x = float(np.linalg.norm(system.h1, 2)) * (t - t0)
    return x ** (order + 1) / math.factorial(order + 1) * math.exp(x)
