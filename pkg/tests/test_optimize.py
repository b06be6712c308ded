"""Focusing phase rule and the circle-manifold conjugate-gradient refinement."""

import numpy as np
import pytest

from metabeam import (
    ApertureLayout,
    PolarizabilitySet,
    coupling_matrix,
    excitation_field,
    focusing_phases,
    objective_and_gradient,
    optimize_phases,
    radiation_damping,
    solve_model,
)
from metabeam.fields import channel_matrix
from metabeam.optimize import _coherent_mapping

from conftest import make_random_layout

ON_AXIS = np.array([0.0, 0.0, 1.0])


def _wrap_difference(a, b):
    return np.angle(np.exp(1j * (a - b)))


# --------------------------------------------------------- focusing phases

def test_phases_equal_for_mirrored_elements(constants):
    # equal rho, psi -> -psi (same cos): identical R_n and identical angle(h0y)
    positions = np.array([[0.02, 0.01], [0.02, -0.01]])
    layout = ApertureLayout(positions, np.zeros(2, int), np.zeros(2), 0.05)
    phases = focusing_phases(layout, 1.0, constants)
    assert abs(_wrap_difference(phases[0], phases[1])) <= 1e-12


def test_phases_opposite_cos_sign_differ_by_pi(constants):
    # equal rho with cos(psi) of opposite sign: the Hankel part of angle(h0y)
    # is shared, the sign flip contributes exactly pi
    positions = np.array([[0.02, 0.01], [-0.02, 0.01]])
    layout = ApertureLayout(positions, np.zeros(2, int), np.zeros(2), 0.05)
    phases = focusing_phases(layout, 1.0, constants)
    assert abs(abs(_wrap_difference(phases[0], phases[1])) - np.pi) <= 1e-12


def test_phases_align_coherent_moment_term(constants, damping, layout_d005):
    # m_y = -(1/2C)(j h0y + |h0y| e^{jkR_n}); the second (coherent) term times
    # e^{-jkR_n} must share one phase across all elements
    distance = 1.0
    phases = focusing_phases(layout_d005, distance, constants)
    h0y = excitation_field(layout_d005, constants)[1::2] * constants.feed_current
    r_n = np.sqrt(distance**2 + layout_d005.rho**2)
    coherent = -(0.5 / damping) * np.exp(1j * phases) * h0y
    aligned = coherent * np.exp(-1j * constants.wavenumber * r_n)
    angles = np.angle(aligned)
    spread = np.abs(_wrap_difference(angles, angles[0]))
    assert spread.max() <= 1e-9


def test_phases_wrapped(constants, layout_d02):
    phases = focusing_phases(layout_d02, 0.3, constants)
    assert np.all(phases >= 0.0) and np.all(phases < 2 * np.pi)


# ------------------------------------------------------ objective/gradient

def test_all_off_configuration(constants, layout_d005):
    matrix = coupling_matrix(layout_d005, constants)
    phases = np.full(len(layout_d005), 1.5 * np.pi)
    value, gradient = objective_and_gradient(phases, layout_d005, constants, ON_AXIS, matrix)
    assert value <= 1e-30
    assert np.all(np.isfinite(gradient))


def test_adjoint_gradient_matches_central_differences(constants):
    layout = make_random_layout(20, constants, seed=12)
    matrix = coupling_matrix(layout, constants)
    rng = np.random.default_rng(1)
    phases = rng.uniform(0, 2 * np.pi, 20)
    _, adjoint = objective_and_gradient(phases, layout, constants, ON_AXIS, matrix)
    step = 1e-6
    finite = np.zeros(20)
    for n in range(20):
        plus = phases.copy()
        plus[n] += step
        minus = phases.copy()
        minus[n] -= step
        g_plus, _ = objective_and_gradient(plus, layout, constants, ON_AXIS, matrix)
        g_minus, _ = objective_and_gradient(minus, layout, constants, ON_AXIS, matrix)
        finite[n] = (g_plus - g_minus) / (2 * step)
    scale = np.abs(finite).max()
    assert np.abs(adjoint - finite).max() <= 1e-6 * scale


def test_uncoupled_gradient_symbolic_oracle(constants, damping, layout_d005):
    # with G = 0, e_theta = sum_n gamma_n A(phi_n) with gamma_n fixed, so
    # dg/dphi_n = 2 Re{conj(e) gamma_n dA/dphi_n} is available in closed form
    rng = np.random.default_rng(6)
    phases = rng.uniform(0, 2 * np.pi, len(layout_d005))
    value, gradient = objective_and_gradient(phases, layout_d005, constants, ON_AXIS, None)
    c_theta = channel_matrix(layout_d005, ON_AXIS, constants)[0]
    h0 = excitation_field(layout_d005, constants) * constants.feed_current
    gamma = c_theta[0::2] * h0[0::2] + c_theta[1::2] * h0[1::2]
    amplitude = -(0.5 / damping) * (1j + np.exp(1j * phases))
    e_theta = np.sum(gamma * amplitude)
    assert abs(e_theta) ** 2 == pytest.approx(value, rel=1e-12)
    oracle = 2 * np.real(np.conj(e_theta) * gamma * (-(0.5j / damping) * np.exp(1j * phases)))
    np.testing.assert_allclose(gradient, oracle, rtol=1e-10, atol=1e-10 * np.abs(oracle).max())


# ---------------------------------------------------------------- optimize

def test_monotone_from_analytic_start(constants, layout_d005):
    phases0 = focusing_phases(layout_d005, 1.0, constants)
    initial, _ = objective_and_gradient(phases0, layout_d005, constants, ON_AXIS, None)
    final_phases, trace = optimize_phases(
        phases0, layout_d005, constants, ON_AXIS, max_iters=100
    )
    final, _ = objective_and_gradient(final_phases, layout_d005, constants, ON_AXIS, None)
    assert final >= initial - 1e-12 * initial
    diffs = np.diff(trace.objectives)
    assert np.all(diffs >= -1e-12 * np.abs(trace.objectives[0]))
    assert trace.unit_modulus_error <= 1e-12


def test_random_start_reaches_analytic_objective(constants, layout_d005):
    rng = np.random.default_rng(3)
    phases0 = rng.uniform(0, 2 * np.pi, len(layout_d005))
    analytic, _ = objective_and_gradient(
        focusing_phases(layout_d005, 1.0, constants), layout_d005, constants, ON_AXIS, None
    )
    final_phases, trace = optimize_phases(phases0, layout_d005, constants, ON_AXIS)
    final, _ = objective_and_gradient(final_phases, layout_d005, constants, ON_AXIS, None)
    assert abs(final - analytic) / analytic <= 0.01
    assert trace.termination in ("gradient_tolerance", "max_iterations", "line_search_failure")


def test_coupled_refinement_beats_analytic_start(constants, layout_d005):
    matrix = coupling_matrix(layout_d005, constants)
    phases0 = focusing_phases(layout_d005, 1.0, constants)
    initial, _ = objective_and_gradient(phases0, layout_d005, constants, ON_AXIS, matrix)
    final_phases, trace = optimize_phases(
        phases0, layout_d005, constants, ON_AXIS, coupling=matrix, max_iters=200
    )
    final, _ = objective_and_gradient(final_phases, layout_d005, constants, ON_AXIS, matrix)
    assert final >= initial
    assert final > 2.0 * initial  # coupling is exploitable, not just absorbed


def test_gauge_invariance_coherent_only_model(constants, layout_d005):
    # with the fixed +j term removed the objective depends on phase
    # differences only: a global shift must not change the objective or the
    # accepted-step sequence; the full Lorentzian mapping has no such gauge.
    rng = np.random.default_rng(10)
    phases0 = rng.uniform(0, 2 * np.pi, len(layout_d005))
    shift = 1.234

    def run(phis):
        return optimize_phases(
            phis,
            layout_d005,
            constants,
            ON_AXIS,
            max_iters=40,
            mapping=_coherent_mapping,
        )

    _, trace_a = run(phases0)
    _, trace_b = run(phases0 + shift)
    assert len(trace_a.objectives) == len(trace_b.objectives)
    a = np.array(trace_a.objectives)
    b = np.array(trace_b.objectives)
    np.testing.assert_allclose(a, b, rtol=1e-9)


def test_optimizer_rejects_bad_iteration_count(constants, layout_d005):
    with pytest.raises(ValueError):
        optimize_phases(
            np.zeros(len(layout_d005)), layout_d005, constants, ON_AXIS, max_iters=0
        )


def test_trace_export(tmp_path, constants, layout_d005):
    from metabeam import write_trace_csv

    phases0 = focusing_phases(layout_d005, 1.0, constants)
    _, trace = optimize_phases(phases0, layout_d005, constants, ON_AXIS, max_iters=20)
    path = tmp_path / "trace.csv"
    write_trace_csv(path, trace)
    lines = path.read_text().splitlines()
    assert lines[0] == "iteration,objective,gradient_norm"
    assert len(lines) == 1 + trace.iterations
