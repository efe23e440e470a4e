"""
Tests for campaign scenarios, metrics and sweeps
"""

import numpy as np
import pytest

from core.campaign import (
    FINAL_SIZE_TOLERANCE,
    Scenario,
    ScenarioError,
    ScenarioRunError,
    SeedEfficiencyError,
    SweepParameter,
    SweepResult,
    SweepSpec,
    baseline_scenario,
    figure_presets,
    metrics,
    panel_scenarios,
    run_scenario,
    same_effect,
    seed_efficiency,
    settled,
    sweep,
)
from core.integrator import IntegrationError, StepControl
from core.sir_model import (
    CompartmentState,
    ModelParams,
    OutbreakClass,
    Population,
    final_size,
    peak_time_analytic,
)

N = 1000.0


def scenario(beta, gamma, seed=100.0, t_end=100.0, n_samples=1001, label='test'):
    return Scenario(
        params=ModelParams(beta, gamma),
        initial=CompartmentState(N - seed, seed, 0.0),
        pop=Population(N),
        t_end=t_end,
        n_samples=n_samples,
        label=label,
    )


def oracle_reach(scn):
    _, r_inf = final_size(scn.params, scn.initial.s, scn.initial.i, scn.initial.r, scn.pop)
    return r_inf


def test_baseline_conserves_population(baseline_traj):
    assert baseline_traj.conservation_error() <= 1e-3
    assert len(baseline_traj.times) == 1001
    assert baseline_traj.times[-1] == 100.0


def test_baseline_is_monotone(baseline_traj):
    assert np.all(np.diff(baseline_traj.s) <= 1e-9 * N)
    assert np.all(np.diff(baseline_traj.r) >= -1e-9 * N)


def test_baseline_metrics(baseline_traj):
    m = metrics(baseline_traj)
    assert m.r0 == 2.5
    assert m.classification == OutbreakClass.SUPERCRITICAL
    assert m.went_viral
    assert m.peak_sharers == pytest.approx(275.63, rel=0.02)
    assert 15.0 <= m.t_peak <= 25.0
    assert m.t_peak == pytest.approx(15.8, abs=0.2)
    assert m.cumulative_reach == pytest.approx(906.7, abs=FINAL_SIZE_TOLERANCE * N)
    assert m.reach_fraction == pytest.approx(m.cumulative_reach / N)
    assert m.audience_reached >= m.cumulative_reach
    assert m.depletion_time is None
    assert m.half_reach_time is not None and 0.0 < m.half_reach_time < 100.0


def test_baseline_is_settled(baseline_traj):
    assert settled(baseline_traj)


def test_state_lookup(baseline_traj):
    assert baseline_traj.state_at(0.0) == CompartmentState(900.0, 100.0, 0.0)
    assert baseline_traj.index_at(15.83) == 158
    assert baseline_traj.final_state.r == baseline_traj.r[-1]


def test_critical_campaign_final_size_at_long_horizon():
    traj = run_scenario(scenario(0.1, 0.1, t_end=300.0, n_samples=3001))
    r_inf = oracle_reach(traj.scenario)
    assert traj.r[-1] == pytest.approx(r_inf, abs=FINAL_SIZE_TOLERANCE * N)
    assert abs(r_inf - 394.0) <= 10.0
    assert metrics(traj).classification == OutbreakClass.CRITICAL
    assert not metrics(traj).went_viral


def test_critical_campaign_approaches_final_size_from_below():
    traj = run_scenario(scenario(0.1, 0.1))
    r_inf = oracle_reach(traj.scenario)
    assert traj.r[-1] <= r_inf + FINAL_SIZE_TOLERANCE * N
    assert not settled(traj)


def test_subcritical_campaign_reaches_under_two_hundred():
    traj = run_scenario(scenario(0.25, 0.5))
    m = metrics(traj)
    assert m.classification == OutbreakClass.SUBCRITICAL
    assert m.cumulative_reach < 200.0
    assert m.cumulative_reach == pytest.approx(oracle_reach(traj.scenario), abs=FINAL_SIZE_TOLERANCE * N)
    assert m.peak_sharers == 100.0
    assert m.t_peak == 0.0


def test_slow_forgetting_exhausts_audience_within_forty():
    traj = run_scenario(scenario(0.25, 0.01))
    assert traj.state_at(40.0).s < 0.01 * N
    assert metrics(traj).depletion_time < 40.0


def test_disease_free_run_stays_put():
    traj = run_scenario(scenario(0.25, 0.1, seed=0.0))
    m = metrics(traj)
    assert np.all(traj.s == N)
    assert m.peak_sharers == 0.0
    assert m.t_peak == 0.0
    assert m.cumulative_reach == 0.0


def test_endless_sharing_is_reported_viral():
    traj = run_scenario(scenario(0.25, 0.0))
    m = metrics(traj)
    assert m.r0 == float('inf')
    assert m.classification == OutbreakClass.SUPERCRITICAL
    assert m.half_reach_time is None


def test_time_rescaling():
    control = StepControl(rtol=1e-10, atol=1e-10)
    slow = run_scenario(scenario(0.25, 0.1, t_end=100.0), control)
    fast = run_scenario(scenario(0.5, 0.2, t_end=50.0), control)
    assert np.max(np.abs(slow.s - fast.s)) < 1e-4
    assert np.max(np.abs(slow.i - fast.i)) < 1e-4
    assert np.max(np.abs(slow.r - fast.r)) < 1e-4


def test_run_failure_carries_label():
    with pytest.raises(ScenarioRunError) as excinfo:
        run_scenario(scenario(0.25, 0.1, label='tiny-budget'), StepControl(max_steps=5))
    assert excinfo.value.label == 'tiny-budget'
    assert isinstance(excinfo.value.__cause__, IntegrationError)


@pytest.mark.parametrize('kwargs', [
    {'initial': CompartmentState(900.0, 50.0, 0.0)},
    {'t_end': 0.0},
    {'n_samples': 1},
])
def test_scenario_validation(kwargs):
    values = dict(params=ModelParams(0.25, 0.1), initial=CompartmentState(900.0, 100.0, 0.0),
                  pop=Population(N))
    values.update(kwargs)
    with pytest.raises(ScenarioError):
        Scenario(**values)


def test_beta_sweep_ordering():
    spec = SweepSpec(base=baseline_scenario(), parameter=SweepParameter.BETA, values=(0.1, 0.25, 0.5, 0.7))
    results = sweep(spec)
    reach = [r.metrics.cumulative_reach for r in results]
    assert all(a < b for a, b in zip(reach, reach[1:]))
    for result in results[2:]:
        assert result.trajectory.state_at(60.0).r / N > 0.95


def test_gamma_sweep_ordering():
    spec = SweepSpec(base=baseline_scenario(), parameter=SweepParameter.GAMMA, values=(0.01, 0.1, 0.2, 0.5))
    results = sweep(spec)
    settled_reach = [r.metrics.cumulative_reach for r in results[1:]]
    assert all(a > b for a, b in zip(settled_reach, settled_reach[1:]))
    audience = [r.metrics.audience_reached for r in results]
    assert all(a > b for a, b in zip(audience, audience[1:]))

    long_spec = SweepSpec(base=baseline_scenario(t_end=1000.0, n_samples=2001),
                          parameter=SweepParameter.GAMMA, values=spec.values)
    long_reach = [r.metrics.cumulative_reach for r in sweep(long_spec)]
    assert all(a > b for a, b in zip(long_reach, long_reach[1:]))


def test_higher_beta_peaks_sooner_and_higher():
    spec = figure_presets()[0]
    results = sweep(spec)
    peaks = [r.metrics.peak_sharers for r in results]
    assert all(a < b for a, b in zip(peaks, peaks[1:]))
    # beta = 0.1 gives R0*S0/N = 0.9: sharing only declines, peak at t = 0
    assert results[0].metrics.t_peak == 0.0
    t_peaks = [r.metrics.t_peak for r in results[1:]]
    assert all(a > b for a, b in zip(t_peaks, t_peaks[1:]))

    fastest = results[-1]
    base = baseline_scenario()
    expected = peak_time_analytic(ModelParams(0.7, 0.1), 900.0, 100.0, base.pop)
    assert fastest.metrics.t_peak == pytest.approx(expected, abs=0.2)
    assert fastest.metrics.t_peak < 10.0
    assert fastest.metrics.peak_sharers == pytest.approx(594.2, rel=0.02)


def test_larger_seed_peaks_sooner():
    results = sweep(figure_presets()[2])
    t_peaks = [r.metrics.t_peak for r in results]
    assert all(a > b for a, b in zip(t_peaks, t_peaks[1:]))
    assert t_peaks[0] > 40.0
    assert t_peaks[-1] < 11.0


def test_seed_efficiency_claim():
    spec = SweepSpec(base=baseline_scenario(), parameter=SweepParameter.SEED, values=(100, 200))
    rows = seed_efficiency(spec)
    assert [row.value for row in rows] == [100.0, 200.0]
    assert abs(rows[0].reach_fraction - rows[1].reach_fraction) < 0.05
    assert same_effect(rows[0], rows[1])

    base = baseline_scenario()
    expected_shift = (peak_time_analytic(base.params, 800.0, 200.0, base.pop)
                      - peak_time_analytic(base.params, 900.0, 100.0, base.pop))
    assert rows[1].t_peak_shift == pytest.approx(expected_shift, abs=0.2)
    assert abs(rows[1].t_peak_shift) < 0.4 * rows[0].t_peak
    assert rows[0].marginal_reach_per_seed is None
    assert rows[1].marginal_reach_per_seed == pytest.approx(
        (rows[1].cumulative_reach - rows[0].cumulative_reach) / 100.0)


def test_seed_efficiency_needs_two_runs(baseline_traj):
    spec = SweepSpec(base=baseline_scenario(), parameter=SweepParameter.SEED, values=(100, 200))
    results = [SweepResult(value=100.0, trajectory=baseline_traj, metrics=metrics(baseline_traj)),
               SweepResult(value=200.0, error='failed')]
    with pytest.raises(SeedEfficiencyError):
        seed_efficiency(spec, results=results)


def test_seed_efficiency_requires_seed_sweep():
    spec = SweepSpec(base=baseline_scenario(), parameter=SweepParameter.BETA, values=(0.1, 0.2))
    with pytest.raises(ScenarioError):
        seed_efficiency(spec)


def test_sweep_is_deterministic_across_worker_counts():
    spec = SweepSpec(base=baseline_scenario(), parameter=SweepParameter.BETA, values=(0.7, 0.1, 0.25))
    sequential = sweep(spec, workers=1)
    parallel = sweep(spec, workers=3)
    assert [r.value for r in parallel] == [0.7, 0.1, 0.25]
    for a, b in zip(sequential, parallel):
        assert np.array_equal(a.trajectory.i, b.trajectory.i)
        assert a.metrics == b.metrics


def test_sweep_keeps_going_after_a_failing_value():
    spec = SweepSpec(base=baseline_scenario(), parameter=SweepParameter.BETA, values=(0.25, -1.0, 0.5))
    results = sweep(spec)
    assert [r.ok for r in results] == [True, False, True]
    assert 'beta' in results[1].error


def test_seed_sweep_rejects_seed_above_population():
    with pytest.raises(ScenarioError):
        SweepSpec(base=baseline_scenario(), parameter=SweepParameter.SEED, values=(100, 2000))


def test_figure_presets():
    presets = figure_presets()
    assert [spec.name for spec in presets] == ['fig2', 'fig3', 'fig4']
    assert presets[0].values == (0.1, 0.25, 0.5, 0.7)
    assert presets[1].values == (0.01, 0.1, 0.2, 0.5)
    assert presets[2].values == (1.0, 10.0, 100.0, 200.0)

    panels = panel_scenarios(presets[2])
    assert [p.label.split()[0] for p in panels] == ['fig4a', 'fig4b', 'fig4c', 'fig4d']
    for value, panel in zip(presets[2].values, panels):
        assert panel.pop.n == N
        assert panel.initial.s == N - value
        assert panel.initial.i == value
        assert panel.initial.r == 0.0
