"""Tests for momentum bookkeeping and the elastic two-body solver."""

import math
import sys
from pathlib import Path

import numpy as np
import pytest

# Import from source, not installed package.
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from scatterlab.exception import DomainError
from scatterlab.kinematics import (
    CollisionInput,
    FreeParticle,
    Momentum3,
    kinetic_energy,
    momentum_transfer,
    solve_outgoing,
    total_invariants,
)

ULP_SCALE = 4e-16


def _collision(p1, p2, m1=1.0, m2=1.0) -> CollisionInput:
    return CollisionInput(
        particles=(FreeParticle(m1), FreeParticle(m2)),
        momenta_in=(Momentum3.of(p1), Momentum3.of(p2)),
    )


class TestMomentum3:
    def test_rejects_nan(self):
        with pytest.raises(DomainError):
            Momentum3(math.nan, 0.0, 0.0)

    def test_rejects_inf(self):
        with pytest.raises(DomainError):
            Momentum3(0.0, math.inf, 0.0)

    def test_arithmetic(self):
        p = Momentum3(1.0, 2.0, 3.0)
        q = Momentum3(0.5, -1.0, 2.0)
        assert (p + q).as_tuple() == (1.5, 1.0, 5.0)
        assert (p - q).as_tuple() == (0.5, 3.0, 1.0)
        assert (-p).as_tuple() == (-1.0, -2.0, -3.0)
        assert p.dot(q) == 0.5 - 2.0 + 6.0
        assert p.norm2() == 14.0

    def test_is_hashable_value(self):
        assert Momentum3(1.0, 0.0, 0.0) == Momentum3.of((1, 0, 0))
        assert len({Momentum3(1.0, 0.0, 0.0), Momentum3.of([1, 0, 0])}) == 1


class TestFreeParticle:
    @pytest.mark.parametrize("mass", [0.0, -1.0])
    def test_non_positive_mass_rejected(self, mass):
        with pytest.raises(DomainError):
            FreeParticle(mass)


class TestKineticEnergy:
    @pytest.mark.parametrize(
        "p, m, expected",
        [
            ((1, 0, 0), 1.0, 0.5),
            ((0, 0, 0), 3.7, 0.0),
            ((3, 4, 0), 2.0, 6.25),
        ],
    )
    def test_values(self, p, m, expected):
        assert kinetic_energy(Momentum3.of(p), m) == expected

    @pytest.mark.parametrize("mass", [0.0, -2.0])
    def test_non_positive_mass(self, mass):
        with pytest.raises(DomainError):
            kinetic_energy(Momentum3(1.0, 0.0, 0.0), mass)


class TestTotalInvariants:
    @pytest.mark.parametrize(
        "p1, p2, m1, m2, total, energy",
        [
            ((1, 0, 0), (-1, 0, 0), 1.0, 1.0, (0, 0, 0), 1.0),
            ((1, 0, 0), (0, 0, 0), 1.0, 1.0, (1, 0, 0), 0.5),
            ((1, 2, 0), (0, 1, 1), 1.0, 2.0, (1, 3, 1), 3.0),
        ],
    )
    def test_sums(self, p1, p2, m1, m2, total, energy):
        P, E = total_invariants(_collision(p1, p2, m1, m2))
        assert P.as_tuple() == tuple(float(x) for x in total)
        assert E == pytest.approx(energy, rel=1e-15)


class TestMomentumTransfer:
    @pytest.mark.parametrize(
        "p, p_prime, expected",
        [
            ((1, 0, 0), (1, 0, 0), (0, 0, 0)),
            ((1, 0, 0), (0, 1, 0), (1, -1, 0)),
            ((2, 0, 0), (-2, 0, 0), (4, 0, 0)),
        ],
    )
    def test_difference(self, p, p_prime, expected):
        q = momentum_transfer(Momentum3.of(p), Momentum3.of(p_prime))
        assert q.as_tuple() == tuple(float(x) for x in expected)


class TestSolveOutgoing:
    def test_center_of_mass_frame_keeps_magnitude(self):
        outcomes = solve_outgoing(_collision((1, 0, 0), (-1, 0, 0)), (1.0, 0.0, 0.0))

        assert len(outcomes) == 1
        (p1, p2) = outcomes[0].momenta_out
        assert p1.as_tuple() == pytest.approx((1.0, 0.0, 0.0), abs=1e-15)
        assert p2.as_tuple() == pytest.approx((-1.0, 0.0, 0.0), abs=1e-15)
        assert outcomes[0].is_forward

    def test_forty_five_degrees_off_target_at_rest(self):
        c = math.cos(math.pi / 4)
        outcomes = solve_outgoing(_collision((1, 0, 0), (0, 0, 0)), (c, c, 0.0))

        assert len(outcomes) == 1
        outcome = outcomes[0]
        assert outcome.momenta_out[0].as_tuple() == pytest.approx((0.5, 0.5, 0.0), abs=1e-15)
        assert outcome.momenta_out[1].as_tuple() == pytest.approx((0.5, -0.5, 0.0), abs=1e-15)
        assert not outcome.is_forward

        residual, energy_residual = outcome.conservation_residual
        assert residual.norm() <= ULP_SCALE
        assert abs(energy_residual) <= 1e-12 * 0.5

    def test_backward_is_forbidden_for_equal_masses(self):
        assert solve_outgoing(_collision((1, 0, 0), (0, 0, 0)), (-1.0, 0.0, 0.0)) == []

    def test_forward_solution_is_flagged(self):
        outcomes = solve_outgoing(_collision((1, 0, 0), (0, 0, 0)), (1.0, 0.0, 0.0))

        assert len(outcomes) == 1
        assert outcomes[0].is_forward
        assert outcomes[0].momenta_out[0].as_tuple() == pytest.approx((1.0, 0.0, 0.0))

    def test_light_target_allows_two_solutions(self):
        """A heavy projectile on a light target has two magnitudes per forward cone."""
        theta = math.radians(10.0)
        inp = _collision((3, 0, 0), (0, 0, 0), m1=3.0, m2=1.0)
        outcomes = solve_outgoing(inp, (math.cos(theta), math.sin(theta), 0.0))

        assert len(outcomes) == 2
        magnitudes = [o.momenta_out[0].norm() for o in outcomes]
        assert magnitudes[0] > magnitudes[1] > 0
        for outcome in outcomes:
            assert abs(outcome.energy_residual) <= 1e-12 * 1.5

    def test_which_second_constrains_partner(self):
        c = math.cos(math.pi / 4)
        outcomes = solve_outgoing(_collision((1, 0, 0), (0, 0, 0)), (c, -c, 0.0), which="second")

        assert len(outcomes) == 1
        assert outcomes[0].momenta_out[1].as_tuple() == pytest.approx((0.5, -0.5, 0.0), abs=1e-15)
        assert outcomes[0].momenta_out[0].as_tuple() == pytest.approx((0.5, 0.5, 0.0), abs=1e-15)

    def test_swapping_labels_swaps_outcomes(self):
        inp = _collision((1, 0.5, 0), (0, -0.25, 0), m1=1.0, m2=2.0)
        n = (0.6, 0.8, 0.0)

        first = solve_outgoing(inp, n, which="first")
        second = solve_outgoing(inp.swapped(), n, which="second")

        assert len(first) == len(second)
        for a, b in zip(first, second):
            assert a.swapped().momenta_out == b.momenta_out

    def test_non_unit_direction(self):
        with pytest.raises(DomainError):
            solve_outgoing(_collision((1, 0, 0), (0, 0, 0)), (1.0, 1.0, 0.0))

    def test_unknown_which(self):
        with pytest.raises(DomainError):
            solve_outgoing(_collision((1, 0, 0), (0, 0, 0)), (1.0, 0.0, 0.0), which="third")

    @pytest.mark.parametrize("theta_deg", [5.0, 30.0, 60.0, 85.0])
    def test_residuals_within_tolerance(self, theta_deg):
        theta = math.radians(theta_deg)
        inp = _collision((1.3, -0.2, 0.4), (-0.1, 0.7, 0.0), m1=1.0, m2=1.7)
        P, E = total_invariants(inp)

        for outcome in solve_outgoing(inp, (math.cos(theta), math.sin(theta), 0.0)):
            assert outcome.momentum_residual.norm() <= ULP_SCALE * max(P.norm(), 1.0) * 4
            assert abs(outcome.energy_residual) <= 1e-12 * E

    def test_momentum_residual_is_exactly_zero(self):
        inp = _collision((0.1, 0.3, -0.7), (0.2, -0.6, 0.1), m1=0.3, m2=7.0)
        n = Momentum3.of(np.array([0.3, -0.5, 0.8]) / np.linalg.norm([0.3, -0.5, 0.8]))

        outcomes = solve_outgoing(inp, n) + solve_outgoing(inp, n, which="second")

        assert outcomes
        assert all(o.momentum_residual == Momentum3.zero() for o in outcomes)


def _random_unit(rng: np.random.Generator) -> Momentum3:
    v = rng.normal(size=3)
    return Momentum3.of(v / np.linalg.norm(v))


@pytest.mark.slow
class TestRandomizedConservation:
    """Seeded sweeps with masses in [0.1, 10] and momentum components in [-5, 5]."""

    CALLS = 100_000

    def test_energy_and_momentum_balance(self):
        rng = np.random.default_rng(2024)
        for _ in range(self.CALLS):
            m1, m2 = rng.uniform(0.1, 10.0, size=2)
            inp = _collision(rng.uniform(-5, 5, size=3), rng.uniform(-5, 5, size=3), m1, m2)
            _, energy = total_invariants(inp)
            which = "first" if rng.random() < 0.5 else "second"

            for outcome in solve_outgoing(inp, _random_unit(rng), which):
                assert outcome.momentum_residual == Momentum3.zero()
                assert abs(outcome.energy_residual) <= 1e-12 * energy

    def test_equal_masses_leave_at_right_angles(self):
        rng = np.random.default_rng(11)
        for _ in range(10_000):
            m = rng.uniform(0.1, 10.0)
            inp = _collision(rng.uniform(-5, 5, size=3), (0, 0, 0), m, m)

            for outcome in solve_outgoing(inp, _random_unit(rng)):
                p1, p2 = outcome.momenta_out
                assert abs(p1.dot(p2)) <= 1e-10

    def test_heavy_projectile_has_a_maximum_angle(self):
        rng = np.random.default_rng(5)
        for _ in range(10_000):
            m2 = rng.uniform(0.1, 5.0)
            m1 = rng.uniform(1.01 * m2, 10.0)
            theta = rng.uniform(math.asin(m2 / m1) + 1e-3, math.pi)
            inp = _collision((rng.uniform(0.5, 5.0), 0, 0), (0, 0, 0), m1, m2)

            n = (math.cos(theta), math.sin(theta), 0.0)
            assert solve_outgoing(inp, n) == []
