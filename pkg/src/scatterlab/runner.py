#
# Copyright (c) 2025, Daily
#
# SPDX-License-Identifier: BSD 2-Clause License
#

"""Scenario subcommands: each turns a Scenario into a ResultTable."""

import math
from collections.abc import Callable
from pathlib import Path

import numpy as np
from loguru import logger

from scatterlab import greenfn
from scatterlab.__version__ import version
from scatterlab._utils.scenario_utils import Scenario, scenario_hash
from scatterlab._utils.table_utils import ResultTable, result_timestamp
from scatterlab.born import MomentumGrid, born1_single, coulomb_limit, pair_t_matrix, t_matrix
from scatterlab.constants import SUBCOMMANDS, Subcommand
from scatterlab.exception import DomainError, Error
from scatterlab.kinematics import CollisionInput, FreeParticle, Momentum3, solve_outgoing
from scatterlab.smatrix import (
    evolution_report,
    fit_quasi_continuum_decay,
    s_matrix,
    survival_probability,
    t1_and_sum_rule,
)
from scatterlab.system import golden_rule_rate_expected, quasi_continuum_system
from scatterlab.transition import (
    ProcessSpec,
    amplitude,
    probability,
    reciprocity_residual,
    summed_golden_rule_rate,
)

DEFAULT_GOLDEN_RULE_HORIZONS = (20.0, 50.0, 100.0, 200.0, 300.0)


def direction(theta_deg: float, phi_deg: float, axis: Momentum3 | None = None) -> Momentum3:
    """Unit vector at polar angle θ and azimuth φ about ``axis`` (default +z)."""
    theta, phi = math.radians(theta_deg), math.radians(phi_deg)
    local = np.array(
        [math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi), math.cos(theta)]
    )
    if axis is not None and axis.norm() > 0:
        z = np.array(axis.as_tuple()) / axis.norm()
        helper = np.array([0.0, 0.0, 1.0]) if abs(z[2]) < 0.9 else np.array([1.0, 0.0, 0.0])
        x = np.cross(helper, z)
        x /= np.linalg.norm(x)
        y = np.cross(z, x)
        local = local[0] * x + local[1] * y + local[2] * z
    local /= np.linalg.norm(local)
    return Momentum3.of(local)


def _angles(scenario: Scenario) -> np.ndarray:
    p = scenario.process
    return np.linspace(p.theta_start_deg, p.theta_stop_deg, p.theta_steps)


def _lattice_momenta(scenario: Scenario, grid: MomentumGrid, key: str) -> list[Momentum3]:
    return [grid.from_lattice(n) for n in getattr(scenario.process, key)]


def _process_masses(scenario: Scenario) -> tuple[float, ...]:
    m1, m2 = scenario.masses
    return (m1,) if scenario.process.kind == "single" else (m1, m2)


def _elastic_partners(scenario: Scenario, grid: MomentumGrid, momenta_in) -> list[tuple]:
    """Outgoing lattice states with the incoming energy and total momentum, lexicographic."""
    masses = _process_masses(scenario)
    energy = sum(p.norm2() / (2.0 * m) for p, m in zip(momenta_in, masses))
    tolerance = 1e-9 * max(energy, 1.0)
    partners = []
    if len(momenta_in) == 1:
        for index in range(grid.size):
            p = grid.momentum(index)
            if abs(p.norm2() / (2.0 * masses[0]) - energy) <= tolerance:
                partners.append((p,))
        return partners
    n_total = np.add(*[grid.lattice_coordinates(p) for p in momenta_in])
    for index in range(grid.size):
        p1 = grid.momentum(index)
        p2 = grid.from_lattice(n_total - grid.integer_points[index])
        if not grid.contains(p2):
            continue
        e = p1.norm2() / (2.0 * masses[0]) + p2.norm2() / (2.0 * masses[1])
        if abs(e - energy) <= tolerance:
            partners.append((p1, p2))
    return partners


def _spec(scenario: Scenario, grid, momenta_in, momenta_out) -> ProcessSpec:
    return ProcessSpec(
        kind=scenario.process.kind,
        momenta_in=momenta_in,
        momenta_out=momenta_out,
        masses=_process_masses(scenario),
        potential=scenario.potential_model(),
        grid=grid,
        order=scenario.numerics.order,
        exchange_sign=scenario.process.exchange_sign,
        epsilon=scenario.numerics.epsilon,
    )


def _zero_transfer(scenario: Scenario, grid, momenta_in, momenta_out) -> bool:
    """True when an outgoing momentum repeats an incoming one the amplitude pairs it with."""
    if scenario.process.kind == "pair_identical":
        seen = {grid.index_of(p) for p in momenta_in}
        return any(grid.index_of(p) in seen for p in momenta_out)
    return grid.index_of(momenta_out[0]) == grid.index_of(momenta_in[0])


def _outgoing_sets(scenario: Scenario, grid, momenta_in) -> list[tuple]:
    """Explicit outgoing momenta, or every elastic partner of the incoming state.

    Under an unscreened Coulomb potential, partners at zero momentum transfer are
    left out.
    """
    momenta_out = _lattice_momenta(scenario, grid, "momenta_out")
    if momenta_out:
        return [tuple(momenta_out)]
    partners = _elastic_partners(scenario, grid, momenta_in)
    pot = scenario.potential_model()
    if pot.kind != "coulomb" or pot.alpha == 0:
        return partners
    kept = [out for out in partners if not _zero_transfer(scenario, grid, momenta_in, out)]
    logger.debug("Skipped {} zero-transfer partner(s) under Coulomb", len(partners) - len(kept))
    return kept


def _lattice_columns(count: int) -> list[str]:
    names = []
    for i in range(1, count + 1):
        names += [f"n{i}x_out", f"n{i}y_out", f"n{i}z_out"]
    return names


# ---- Subcommands


def run_kinematics(scenario: Scenario, **_) -> ResultTable:
    grid = scenario.momentum_grid()
    momenta = _lattice_momenta(scenario, grid, "momenta_in")
    if len(momenta) == 1:
        momenta.append(Momentum3.zero())
    m1, m2 = scenario.masses
    charges = [float(q) for q in scenario.system.charges]
    inp = CollisionInput(
        particles=(FreeParticle(m1, charges[0]), FreeParticle(m2, charges[-1])),
        momenta_in=(momenta[0], momenta[1]),
    )
    table = ResultTable(
        subcommand="kinematics",
        columns=[
            "theta_deg", "which", "root",
            "p1x_out", "p1y_out", "p1z_out", "p2x_out", "p2y_out", "p2z_out",
            "momentum_residual", "energy_residual", "is_forward",
        ],  # fmt: skip
    )
    for theta in _angles(scenario):
        n = direction(float(theta), scenario.process.phi_deg, axis=momenta[0])
        for which in ("first", "second"):
            for root, outcome in enumerate(solve_outgoing(inp, n, which)):
                p1, p2 = outcome.momenta_out
                table.add_row(
                    float(theta), which, root,
                    *p1.as_tuple(), *p2.as_tuple(),
                    outcome.momentum_residual.norm(), outcome.energy_residual, outcome.is_forward,
                )  # fmt: skip
    return table


def run_greens_check(scenario: Scenario, field_out: str | None = None, **_) -> ResultTable:
    grid = scenario.spatial_grid()
    m, dt = scenario.masses[0], scenario.numerics.dt
    schedule = scenario.epsilon_schedule()
    study = greenfn.propagator_oracle_study(grid, m, dt, schedule)
    table = ResultTable(
        subcommand="greens-check",
        columns=["epsilon", "relative_l2_discrepancy", "damping"],
    )
    for eps, discrepancy in study:
        table.add_row(eps, discrepancy, math.exp(-eps * dt))
    discrepancies = [d for _, d in study]
    table.metadata["summary"] = {
        "monotone": all(b < a for a, b in zip(discrepancies, discrepancies[1:])),
        "final_discrepancy": discrepancies[-1],
    }
    if field_out:
        field = greenfn.fft_retarded_propagator(grid, m, dt, schedule.values[-1])
        greenfn.write_field(field_out, field)
        logger.info("Wrote propagator field to {}", field_out)
    return table


def run_amplitude(scenario: Scenario, tmatrix_out: str | None = None, **_) -> ResultTable:
    grid = scenario.momentum_grid()
    momenta_in = _lattice_momenta(scenario, grid, "momenta_in")
    count = len(momenta_in)
    table = ResultTable(
        subcommand="amplitude",
        columns=[*_lattice_columns(count), "delta_part", "c_re", "c_im", "probability"],
    )
    spec = None
    for momenta_out in _outgoing_sets(scenario, grid, momenta_in):
        spec = _spec(scenario, grid, momenta_in, momenta_out)
        a = amplitude(spec)
        lattice = [c for p in momenta_out for c in grid.lattice_coordinates(p)]
        scattered = complex(a.scattered_part)
        table.add_row(*lattice, a.delta_part, scattered.real, scattered.imag, probability(a))
    if tmatrix_out and spec is not None:
        _export_tmatrix(spec, tmatrix_out)
    return table


def _export_tmatrix(spec: ProcessSpec, path: str) -> None:
    if spec.kind == "single":
        t = t_matrix(
            spec.grid, spec.potential, spec.total_energy, spec.resolved_epsilon, spec.order,
            spec.masses[0],
        )  # fmt: skip
    else:
        total = tuple(
            int(v) for v in np.add(*[spec.grid.lattice_coordinates(p) for p in spec.momenta_in])
        )
        t = pair_t_matrix(
            spec.grid, spec.potential, total, spec.total_energy, spec.resolved_epsilon,
            spec.order, *spec.masses,
        )  # fmt: skip
    json_path, bin_path = t.export(Path(path))
    logger.info("Wrote T-matrix to {} and {}", json_path, bin_path)


def run_xsec(scenario: Scenario, **_) -> ResultTable:
    """Relative dσ/dΩ = |C|² from the first Born amplitude at continuum momenta."""
    grid = scenario.momentum_grid()
    p = _lattice_momenta(scenario, grid, "momenta_in")[0]
    if p.norm() == 0:
        raise DomainError("xsec needs a non-zero incoming momentum")
    pot = scenario.potential_model()
    if scenario.numerics.order > 1:
        logger.info("xsec evaluates the first Born term; numerics.order={} does not apply",
                    scenario.numerics.order)  # fmt: skip
    table = ResultTable(
        subcommand="xsec",
        columns=["theta_deg", "q2", "c_re", "c_im", "dsigma_domega"],
    )
    for theta in _angles(scenario):
        p_out = direction(float(theta), scenario.process.phi_deg, axis=p).scaled(p.norm())
        c = born1_single(p, p_out, pot)
        table.add_row(float(theta), (p - p_out).norm2(), c.real, c.imag, abs(c) ** 2)

    thetas = np.radians(np.array(table.column("theta_deg")))
    intensity = np.array(table.column("dsigma_domega"))
    summary = {"born_order": 1}
    if len(thetas) >= 2 and np.all(intensity > 0) and np.all(thetas > 0):
        slope, _ = np.polyfit(np.log(np.sin(thetas / 2.0)), np.log(intensity), 1)
        summary["sin_half_angle_exponent"] = float(slope)
    if pot.kind == "coulomb":
        p_out = direction(90.0, scenario.process.phi_deg, axis=p).scaled(p.norm())
        exact = born1_single(p, p_out, pot)
        screened = coulomb_limit(p, p_out, float(np.real(pot.alpha)))
        summary["yukawa_limit_relative_error"] = abs(screened - exact) / abs(exact)
    table.metadata["summary"] = summary
    return table


def run_reciprocity(scenario: Scenario, **_) -> ResultTable:
    grid = scenario.momentum_grid()
    momenta_in = _lattice_momenta(scenario, grid, "momenta_in")
    count = len(momenta_in)
    table = ResultTable(
        subcommand="reciprocity",
        columns=[
            *_lattice_columns(count),
            "amplitude_abs", "residual", "negated_residual", "probability", "reversed_probability",
        ],  # fmt: skip
    )
    for momenta_out in _outgoing_sets(scenario, grid, momenta_in):
        spec = _spec(scenario, grid, momenta_in, momenta_out)
        a = amplitude(spec)
        flipped = [-p for p in (*momenta_in, *momenta_out)]
        negated = (
            reciprocity_residual(spec.negated())
            if all(grid.contains(p) for p in flipped)
            else float("nan")
        )
        lattice = [c for p in momenta_out for c in grid.lattice_coordinates(p)]
        table.add_row(
            *lattice,
            abs(a.scattered_part),
            reciprocity_residual(spec),
            negated,
            probability(a),
            probability(amplitude(spec.reversed())),
        )
    table.metadata["summary"] = {"max_residual": max(table.column("residual"), default=0.0)}
    return table


def _horizons(scenario: Scenario, fallback) -> list[float]:
    return [float(h) for h in scenario.numerics.horizons] or list(fallback)


def run_smatrix(scenario: Scenario, **_) -> ResultTable:
    system = scenario.finite_system()
    order = scenario.numerics.order
    points = scenario.numerics.quadrature_points
    table = ResultTable(
        subcommand="smatrix",
        columns=[
            "horizon", "unitarity_defect", "born_unitarity_defect", "born_error",
            "sum_rule_exact", "sum_rule_born", "survival",
        ],  # fmt: skip
    )
    for horizon in _horizons(scenario, [scenario.numerics.horizon]):
        report = evolution_report(system, horizon / 2.0, -horizon / 2.0, order, points)
        _, exact_rule = t1_and_sum_rule(report.U_exact, 0)
        _, born_rule = t1_and_sum_rule(report.U_born, 0)
        table.add_row(
            horizon,
            report.unitarity_defect,
            report.born_unitarity_defect,
            report.born_error,
            exact_rule,
            born_rule,
            float(survival_probability(system, 0, [horizon])[0]),
        )
    table.metadata["summary"] = {"order": order, "dimension": system.dimension}
    return table


def run_goldenrule(scenario: Scenario, **_) -> ResultTable:
    section = scenario.system
    system = quasi_continuum_system(
        levels=section.lab_levels, spacing=section.lab_spacing, coupling=section.lab_coupling
    )
    expected = golden_rule_rate_expected(section.lab_coupling, section.lab_spacing)
    table = ResultTable(
        subcommand="goldenrule",
        columns=["horizon", "summed_rate", "expected_rate", "relative_error", "survival_exact"],
    )
    for horizon in _horizons(scenario, DEFAULT_GOLDEN_RULE_HORIZONS):
        rate = summed_golden_rule_rate(system, 0, horizon)
        survival = abs(s_matrix(system, horizon)[0, 0]) ** 2
        table.add_row(horizon, rate, expected, abs(rate - expected) / expected, survival)
    fit = fit_quasi_continuum_decay(
        section.lab_spacing, section.lab_coupling, levels=section.lab_levels
    )
    if fit.levels > section.lab_levels:
        logger.info("Decay fit widened the ladder from {} to {} levels", section.lab_levels,
                    fit.levels)  # fmt: skip
    table.metadata["summary"] = {
        "expected_rate": expected,
        "fitted_decay_rate": fit.rate,
        "fit_relative_error": fit.relative_error,
        "fit_levels": fit.levels,
    }
    return table


_RUNNERS: dict[str, Callable[..., ResultTable]] = {
    "kinematics": run_kinematics,
    "greens-check": run_greens_check,
    "amplitude": run_amplitude,
    "xsec": run_xsec,
    "reciprocity": run_reciprocity,
    "smatrix": run_smatrix,
    "goldenrule": run_goldenrule,
}


def run(subcommand: Subcommand, scenario: Scenario, **exports) -> ResultTable:
    """Run one subcommand and stamp the table with reproducibility metadata.

    ``exports`` carries optional side outputs (``field_out``, ``tmatrix_out``).
    """
    if subcommand not in SUBCOMMANDS:
        raise DomainError(f"Unknown subcommand {subcommand!r}, expected one of {SUBCOMMANDS}")
    digest = scenario_hash(scenario)
    logger.debug("Running {} for scenario {}", subcommand, digest)
    try:
        table = _RUNNERS[subcommand](scenario, **exports)
    except Error as e:
        e.add_note(f"while running '{subcommand}' for scenario {digest}")
        raise
    table.metadata = {
        "scenario_hash": digest,
        "version": version,
        "timestamp": result_timestamp(),
        "subcommand": subcommand,
        "summary": table.metadata.get("summary", {}),
    }
    return table
