"""
Tests for the adaptive DP45 integrator and the fixed-step references
"""

import math

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from core.campaign import baseline_scenario
from core.integrator import (
    DP45_TABLEAU,
    IntegrationError,
    OdeProblem,
    StepControl,
    dp45_step,
    fixed_step_dp45,
    integrate,
    observed_order,
    rk4_reference,
)
from core.sir_model import as_ode_problem, vector_field


def decay_problem(t_end=1.0):
    return OdeProblem(rhs=lambda t, y: -y, t0=0.0, t_end=t_end, y0=np.array([1.0]))


def test_tableau_is_consistent():
    assert DP45_TABLEAU.stages == 7
    assert sum(DP45_TABLEAU.b) == pytest.approx(1.0, abs=1e-14)
    assert sum(DP45_TABLEAU.b_hat) == pytest.approx(1.0, abs=1e-14)
    for c_i, row in zip(DP45_TABLEAU.c, DP45_TABLEAU.a):
        assert sum(row) == pytest.approx(c_i, abs=1e-12)


def test_single_step_matches_exponential():
    y_next, error = dp45_step(lambda t, y: -y, 0.0, np.array([1.0]), 0.1)
    assert y_next[0] == pytest.approx(math.exp(-0.1), abs=1e-9)
    assert abs(error[0]) < 1e-6


def test_single_step_uses_seven_evaluations():
    calls = []

    def rhs(t, y):
        calls.append(t)
        return -y

    dp45_step(rhs, 0.0, np.array([1.0]), 0.5)
    assert len(calls) == 7
    assert calls == pytest.approx([0.5 * c for c in DP45_TABLEAU.c])


def test_step_rejects_non_finite_rhs():
    with pytest.raises(IntegrationError):
        dp45_step(lambda t, y: np.array([np.nan]), 0.0, np.array([1.0]), 0.1)


@pytest.mark.parametrize('slope', [0.0, 1.0, -3.5])
def test_constant_and_linear_fields_are_exact(slope):
    problem = OdeProblem(rhs=lambda t, y: np.full_like(y, slope), t0=0.0, t_end=10.0, y0=np.array([2.0]))
    times = np.linspace(0.0, 10.0, 11)
    series = integrate(problem, sample_times=times)
    assert np.max(np.abs(series.component(0) - (2.0 + slope * times))) <= 1e-12


def test_samples_are_hit_exactly():
    times = np.linspace(0.0, 3.0, 31)
    series = integrate(decay_problem(3.0), sample_times=times)
    assert np.array_equal(series.times, times)
    assert series.states.shape == (31, 1)


def test_decay_accuracy_at_tight_tolerance():
    times = np.linspace(0.0, 5.0, 51)
    series = integrate(decay_problem(5.0), StepControl(rtol=1e-8, atol=1e-10), times)
    assert np.max(np.abs(series.component(0) - np.exp(-times))) < 1e-7


@pytest.mark.parametrize('loose', [1e-3, 1e-5, 1e-7, 1e-9])
def test_tighter_tolerance_never_loses_accuracy(loose):
    def final_error(rtol):
        series = integrate(decay_problem(), StepControl(rtol=rtol, atol=rtol * 1e-3))
        return abs(float(series.final_state[0]) - math.exp(-1.0))

    assert final_error(loose / 100) <= final_error(loose)


def test_repeated_integration_is_bitwise_identical():
    scn = baseline_scenario()
    problem = as_ode_problem(scn.params, scn.pop, scn.initial, scn.t_end)
    times = scn.sample_times()
    first = integrate(problem, sample_times=times)
    second = integrate(problem, sample_times=times)
    assert np.array_equal(first.times, second.times)
    assert np.array_equal(first.states, second.states)
    assert (first.steps_taken, first.steps_rejected) == (second.steps_taken, second.steps_rejected)


def test_oversized_first_step_is_rejected_then_recovers():
    series = integrate(decay_problem(10.0), StepControl(h_init=10.0))
    assert series.steps_rejected >= 1
    assert series.final_state[0] == pytest.approx(math.exp(-10.0), abs=1e-6)


def test_max_steps_exhaustion_raises():
    with pytest.raises(IntegrationError) as excinfo:
        integrate(decay_problem(100.0), StepControl(max_steps=3), np.linspace(0.0, 100.0, 11))
    assert 'max_steps' in str(excinfo.value)
    assert excinfo.value.h is not None


def test_non_finite_state_raises():
    problem = OdeProblem(rhs=lambda t, y: np.full_like(y, np.nan) if t > 0.5 else -y,
                         t0=0.0, t_end=2.0, y0=np.array([1.0]))
    with pytest.raises(IntegrationError):
        integrate(problem)


@pytest.mark.parametrize('samples', [
    [0.0, 0.5],            # does not end at t_end
    [0.1, 1.0],            # does not start at t0
    [0.0, 0.5, 0.5, 1.0],  # not strictly increasing
])
def test_invalid_sample_times(samples):
    with pytest.raises(ValueError):
        integrate(decay_problem(), sample_times=samples)


@pytest.mark.parametrize('kwargs', [
    {'rtol': 0.0}, {'atol': -1.0}, {'safety': 1.5}, {'min_scale': 2.0}, {'h_init': 0.0}, {'max_steps': 0},
])
def test_step_control_validation(kwargs):
    with pytest.raises(ValueError):
        StepControl(**kwargs)


def test_problem_rejects_wrong_rhs_shape():
    problem = OdeProblem(rhs=lambda t, y: np.array([1.0, 2.0]), t0=0.0, t_end=1.0, y0=np.array([1.0]))
    with pytest.raises(ValueError):
        integrate(problem)


def test_projection_applied_to_accepted_states():
    problem = OdeProblem(rhs=lambda t, y: -np.ones_like(y), t0=0.0, t_end=1.0, y0=np.array([0.5]),
                         projection=lambda t, y: np.maximum(y, 0.0))
    series = integrate(problem, sample_times=np.linspace(0.0, 1.0, 11))
    assert np.all(series.component(0) >= 0.0)
    assert series.final_state[0] == 0.0


def test_dp45_observed_order():
    exact = math.exp(-1.0)
    errors = [abs(fixed_step_dp45(decay_problem(), h).final_state[0] - exact) for h in (0.2, 0.1)]
    assert 4.0 <= observed_order(*errors) <= 6.0


def test_rk4_observed_order():
    exact = math.exp(-1.0)
    errors = [abs(rk4_reference(decay_problem(), h).final_state[0] - exact) for h in (0.2, 0.1)]
    assert observed_order(*errors) == pytest.approx(4.0, abs=0.3)


def test_tampered_weight_destroys_order():
    tampered = DP45_TABLEAU.replace_weight(0, DP45_TABLEAU.b[0] + 1e-3)
    exact = math.exp(-1.0)
    errors = [abs(fixed_step_dp45(decay_problem(), h, tableau=tampered).final_state[0] - exact)
              for h in (0.2, 0.1)]
    assert observed_order(*errors) < 2.0


def test_tableau_lookup_happens_at_call_time(monkeypatch):
    from core import integrator
    tampered = DP45_TABLEAU.replace_weight(0, DP45_TABLEAU.b[0] + 1e-3)
    monkeypatch.setattr(integrator, 'DP45_TABLEAU', tampered)
    y_next, _ = integrator.dp45_step(lambda t, y: np.ones_like(y), 0.0, np.array([0.0]), 1.0)
    assert y_next[0] == pytest.approx(1.0 + 1e-3)


def test_baseline_agrees_with_rk4_reference():
    scn = baseline_scenario()
    problem = as_ode_problem(scn.params, scn.pop, scn.initial, scn.t_end)
    times = scn.sample_times()
    adaptive = integrate(problem, StepControl(rtol=1e-8), times)
    reference = rk4_reference(problem, 1e-3, times)
    assert np.max(np.abs(adaptive.states - reference.states)) <= 1e-3


def test_baseline_agrees_with_solve_ivp():
    scn = baseline_scenario()
    problem = as_ode_problem(scn.params, scn.pop, scn.initial, scn.t_end)
    times = scn.sample_times()
    ours = integrate(problem, StepControl(rtol=1e-9, atol=1e-10), times)
    oracle = solve_ivp(vector_field(scn.params, scn.pop), (0.0, scn.t_end), scn.initial.as_array(),
                       method='DOP853', t_eval=times, rtol=1e-12, atol=1e-12)
    assert oracle.success
    assert np.max(np.abs(ours.states - oracle.y.T)) < 1e-4


def test_observed_order_degenerate_errors():
    assert observed_order(1e-3, 0.0) == math.inf
    assert observed_order(32.0, 1.0) == pytest.approx(5.0)
