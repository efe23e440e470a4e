"""
Campaign Module

Scenario construction, sweep experiments and marketing metrics on top of the
SIR model:
- run_scenario: integrate one campaign on a uniform sampling grid
- metrics: peak sharers, peak time, cumulative reach, depletion and half-reach times
- sweep: one independent run per value of beta, gamma or the seed population
- seed_efficiency: reach gained per extra seeded sharer between consecutive seeds
- figure_presets: the beta, gamma and seed experiments on the S(0)=900, I(0)=100 campaign
"""

import logging
from enum import Enum
from dataclasses import dataclass
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence, Tuple

import numpy as np

from core.integrator import IntegrationError, StepControl, integrate
from core.sir_model import (
    CONSERVATION_TOLERANCE,
    CompartmentState,
    ModelDomainError,
    ModelParams,
    OutbreakClass,
    Population,
    UndefinedReproductionNumber,
    as_ode_problem,
    basic_reproduction_number,
    classify_outbreak,
    final_size,
)

logger = logging.getLogger(__name__)

DEFAULT_T_END = 100.0
DEFAULT_SAMPLES = 1001
BASELINE_POPULATION = 1000.0
BASELINE_SUSCEPTIBLE = 900.0
BASELINE_INFECTED = 100.0
BASELINE_BETA = 0.25
BASELINE_GAMMA = 0.1

# S below 1% of N counts as "the population ceases to be susceptible"
DEPLETION_FRACTION = 0.01
HALF_REACH_FRACTION = 0.5
# Largest difference in reach fraction still treated as "almost the same effect"
SAME_EFFECT_REACH_BAND = 0.05
FINAL_SIZE_TOLERANCE = 0.005
MONOTONICITY_TOLERANCE = 1e-9
PANEL_LETTERS = 'abcdefghijklmnopqrstuvwxyz'


class ScenarioError(ValueError):
    """Scenario or sweep description violating its invariants"""


class ScenarioRunError(RuntimeError):
    """A scenario run failed; label names the scenario"""

    def __init__(self, label: str, reason):
        self.label = label
        self.reason = reason
        super().__init__(f"scenario '{label}' failed: {reason}")


class SeedEfficiencyError(ValueError):
    """Not enough successful seed runs to compare"""


class SweepParameter(str, Enum):
    BETA = 'beta'
    GAMMA = 'gamma'
    SEED = 'seed'


@dataclass(frozen=True)
class Scenario:
    """One simulation run: parameters, initial state, horizon and uniform sampling grid"""
    params: ModelParams
    initial: CompartmentState
    pop: Population
    t_end: float = DEFAULT_T_END
    n_samples: int = DEFAULT_SAMPLES
    label: str = 'scenario'

    def __post_init__(self):
        if abs(self.initial.total - self.pop.n) > 1e-9 * self.pop.n:
            raise ScenarioError(
                f"initial compartments sum to {self.initial.total}, expected n={self.pop.n}")
        if not self.t_end > 0:
            raise ScenarioError(f"t_end must be > 0 (got {self.t_end})")
        if int(self.n_samples) != self.n_samples or self.n_samples < 2:
            raise ScenarioError(f"n_samples must be an integer >= 2 (got {self.n_samples})")

    def sample_times(self) -> np.ndarray:
        return np.linspace(0.0, self.t_end, int(self.n_samples))

    def with_params(self, params: ModelParams, label: Optional[str] = None) -> 'Scenario':
        return Scenario(params, self.initial, self.pop, self.t_end, self.n_samples, label or self.label)

    def with_seed(self, seed: float, label: Optional[str] = None) -> 'Scenario':
        """I(0) = seed, S(0) = n - seed, R(0) = 0 with the population unchanged"""
        initial = CompartmentState(s=self.pop.n - seed, i=seed, r=0.0)
        return Scenario(self.params, initial, self.pop, self.t_end, self.n_samples, label or self.label)


@dataclass(frozen=True)
class Trajectory:
    """Sampled S, I, R series of one scenario run"""
    scenario: Scenario
    times: np.ndarray
    s: np.ndarray
    i: np.ndarray
    r: np.ndarray
    steps_taken: int = 0
    steps_rejected: int = 0

    def __post_init__(self):
        size = len(self.times)
        if not (len(self.s) == len(self.i) == len(self.r) == size):
            raise ScenarioError("trajectory series must align with times")

    @property
    def n(self) -> float:
        return self.scenario.pop.n

    @property
    def final_state(self) -> CompartmentState:
        return CompartmentState(float(self.s[-1]), float(self.i[-1]), float(self.r[-1]))

    def index_at(self, t: float) -> int:
        return int(np.argmin(np.abs(self.times - t)))

    def state_at(self, t: float) -> CompartmentState:
        """State at the sample nearest to t"""
        k = self.index_at(t)
        return CompartmentState(float(self.s[k]), float(self.i[k]), float(self.r[k]))

    def conservation_error(self) -> float:
        return float(np.max(np.abs(self.s + self.i + self.r - self.n)))


@dataclass(frozen=True)
class CampaignMetrics:
    """Marketing summary of a trajectory"""
    peak_sharers: float
    t_peak: float
    cumulative_reach: float
    reach_fraction: float
    audience_reached: float
    depletion_time: Optional[float]
    half_reach_time: Optional[float]
    r0: Optional[float]
    classification: Optional[OutbreakClass]

    @property
    def went_viral(self) -> bool:
        # Critical (R0 = 1) is reported as non-viral
        return self.classification == OutbreakClass.SUPERCRITICAL


@dataclass(frozen=True)
class SweepSpec:
    """A family of runs varying one of beta, gamma or the seed population I(0)"""
    base: Scenario
    parameter: SweepParameter
    values: Tuple[float, ...]
    name: str = 'sweep'

    def __post_init__(self):
        object.__setattr__(self, 'parameter', SweepParameter(self.parameter))
        values = tuple(float(v) for v in self.values)
        object.__setattr__(self, 'values', values)
        if not values:
            raise ScenarioError("a sweep needs at least one value")
        if not all(np.isfinite(values)):
            raise ScenarioError("sweep values must be finite")
        if self.parameter == SweepParameter.SEED:
            bad = [v for v in values if not 0 <= v <= self.base.pop.n]
            if bad:
                raise ScenarioError(f"seed values must lie in [0, {self.base.pop.n:g}] (got {bad})")

    def panel_label(self, index: int) -> str:
        letter = PANEL_LETTERS[index] if index < len(PANEL_LETTERS) else str(index)
        return f"{self.name}{letter}"

    def scenario_for(self, value: float, index: int = 0) -> Scenario:
        label = f"{self.panel_label(index)} {self.parameter.value}={value:g}"
        if self.parameter == SweepParameter.BETA:
            return self.base.with_params(ModelParams(beta=value, gamma=self.base.params.gamma), label)
        if self.parameter == SweepParameter.GAMMA:
            return self.base.with_params(ModelParams(beta=self.base.params.beta, gamma=value), label)
        return self.base.with_seed(value, label)


@dataclass(frozen=True)
class SweepResult:
    value: float
    trajectory: Optional[Trajectory] = None
    metrics: Optional[CampaignMetrics] = None
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass(frozen=True)
class SeedEfficiencyRow:
    value: float
    reach_fraction: float
    t_peak: float
    cumulative_reach: float
    marginal_reach_per_seed: Optional[float] = None
    t_peak_shift: Optional[float] = None


def baseline_scenario(label: str = 'baseline', t_end: float = DEFAULT_T_END,
                      n_samples: int = DEFAULT_SAMPLES) -> Scenario:
    """beta=0.25, gamma=0.1, S(0)=900, I(0)=100, R(0)=0, N=1000"""
    return Scenario(
        params=ModelParams(beta=BASELINE_BETA, gamma=BASELINE_GAMMA),
        initial=CompartmentState(s=BASELINE_SUSCEPTIBLE, i=BASELINE_INFECTED, r=0.0),
        pop=Population(n=BASELINE_POPULATION),
        t_end=t_end,
        n_samples=n_samples,
        label=label,
    )


def scenario_from_config(config, label: str = 'run') -> Scenario:
    """Scenario from a validated RunConfig; N is the sum of the initial compartments"""
    initial = CompartmentState(s=config.s0, i=config.i0, r=config.r0)
    return Scenario(
        params=ModelParams(beta=config.beta, gamma=config.gamma),
        initial=initial,
        pop=Population(n=initial.total),
        t_end=config.t_end,
        n_samples=config.n_samples,
        label=label,
    )


def sweep_from_config(config) -> SweepSpec:
    if config.sweep_param is None:
        raise ScenarioError("configuration has no sweep_param")
    return SweepSpec(base=scenario_from_config(config, label='sweep'),
                     parameter=config.sweep_param,
                     values=config.sweep_values,
                     name=f"{config.sweep_param}-sweep")


def _check_invariants(traj: Trajectory):
    n = traj.n
    drift = traj.conservation_error()
    if drift > CONSERVATION_TOLERANCE * n:
        raise ScenarioRunError(traj.scenario.label, f"population not conserved (max drift {drift:.3g})")
    if np.any(np.diff(traj.s) > MONOTONICITY_TOLERANCE * n):
        raise ScenarioRunError(traj.scenario.label, "S increased between samples")
    if np.any(np.diff(traj.r) < -MONOTONICITY_TOLERANCE * n):
        raise ScenarioRunError(traj.scenario.label, "R decreased between samples")


def run_scenario(scn: Scenario, control: Optional[StepControl] = None) -> Trajectory:
    """
    Integrate the SIR system for one scenario on its uniform grid.

    Raises:
        ScenarioRunError: integration failure or a violated conservation /
            monotonicity invariant; the scenario label is attached
    """
    problem = as_ode_problem(scn.params, scn.pop, scn.initial, scn.t_end)
    try:
        series = integrate(problem, control, scn.sample_times())
    except IntegrationError as e:
        raise ScenarioRunError(scn.label, e) from e

    traj = Trajectory(
        scenario=scn,
        times=series.times,
        s=series.component(0),
        i=series.component(1),
        r=series.component(2),
        steps_taken=series.steps_taken,
        steps_rejected=series.steps_rejected,
    )
    _check_invariants(traj)
    logger.debug(f"✅ {scn.label}: {series.steps_taken} steps, {series.steps_rejected} rejected")
    return traj


def _first_time(times: np.ndarray, mask: np.ndarray) -> Optional[float]:
    hits = np.flatnonzero(mask)
    return float(times[hits[0]]) if hits.size else None


def metrics(traj: Trajectory) -> CampaignMetrics:
    """Grid-based campaign summary (peak ties resolve to the earliest sample)"""
    scn = traj.scenario
    n = traj.n
    k = int(np.argmax(traj.i))
    cumulative_reach = float(traj.r[-1])

    try:
        r0 = basic_reproduction_number(scn.params)
        classification = classify_outbreak(scn.params)
        _, r_inf = final_size(scn.params, scn.initial.s, scn.initial.i, scn.initial.r, scn.pop)
        half_reach_time = _first_time(traj.times, traj.r >= HALF_REACH_FRACTION * r_inf)
    except UndefinedReproductionNumber:
        spreading = scn.params.beta > 0
        r0 = float('inf') if spreading else None
        classification = OutbreakClass.SUPERCRITICAL if spreading else None
        half_reach_time = None

    return CampaignMetrics(
        peak_sharers=float(traj.i[k]),
        t_peak=float(traj.times[k]),
        cumulative_reach=cumulative_reach,
        reach_fraction=float(np.clip(cumulative_reach / n, 0.0, 1.0)),
        audience_reached=float(n - traj.s[-1]),
        depletion_time=_first_time(traj.times, traj.s < DEPLETION_FRACTION * n),
        half_reach_time=half_reach_time,
        r0=r0,
        classification=classification,
    )


def settled(traj: Trajectory) -> bool:
    """True when final_size predicts at most 0.5% of N still to be reached after t_end"""
    scn = traj.scenario
    if scn.params.gamma == 0:
        return False
    end = traj.final_state
    _, r_inf = final_size(scn.params, end.s, end.i, end.r, scn.pop)
    return r_inf - end.r <= FINAL_SIZE_TOLERANCE * scn.pop.n


def panel_scenarios(spec: SweepSpec) -> List[Scenario]:
    return [spec.scenario_for(value, index) for index, value in enumerate(spec.values)]


def _run_sweep_value(spec: SweepSpec, index: int, control: Optional[StepControl]) -> SweepResult:
    value = spec.values[index]
    try:
        traj = run_scenario(spec.scenario_for(value, index), control)
        return SweepResult(value=value, trajectory=traj, metrics=metrics(traj))
    except (ScenarioRunError, ModelDomainError, ScenarioError) as e:
        logger.error(f"❌ Sweep value {value:g} failed: {e}")
        return SweepResult(value=value, error=str(e))


def sweep(spec: SweepSpec, control: Optional[StepControl] = None,
          workers: Optional[int] = None) -> List[SweepResult]:
    """
    One independent run per value, results in the order of spec.values.

    Runs are spread over a thread pool (workers=1 runs them in sequence); a
    failing value is reported in its SweepResult without stopping the others.
    """
    indices = range(len(spec.values))
    workers = workers or min(4, len(spec.values))
    logger.info(f"🔁 Sweep {spec.name}: {spec.parameter.value} over {list(spec.values)} ({workers} workers)")

    if workers == 1:
        results = [_run_sweep_value(spec, index, control) for index in indices]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda index: _run_sweep_value(spec, index, control), indices))

    failed = sum(1 for result in results if not result.ok)
    if failed:
        logger.warning(f"⚠️ Sweep {spec.name}: {failed}/{len(results)} values failed")
    return results


def seed_efficiency(spec: SweepSpec, control: Optional[StepControl] = None,
                    results: Optional[Sequence[SweepResult]] = None,
                    workers: Optional[int] = None) -> List[SeedEfficiencyRow]:
    """
    Compare seed sizes: reach fraction, peak time and marginal reach per extra seed.

    marginal_reach_per_seed = delta cumulative_reach / delta seed between consecutive
    (sorted) seed values; the first row has none.

    Raises:
        SeedEfficiencyError: fewer than two successful runs
    """
    if spec.parameter != SweepParameter.SEED:
        raise ScenarioError("seed efficiency needs a seed sweep")
    if results is None:
        results = sweep(spec, control, workers)
    successful = sorted((result for result in results if result.ok), key=lambda result: result.value)
    if len(successful) < 2:
        raise SeedEfficiencyError(f"need at least 2 successful seed runs, got {len(successful)}")

    rows = []
    previous = None
    for result in successful:
        m = result.metrics
        marginal = None
        shift = None
        if previous is not None:
            shift = m.t_peak - previous.metrics.t_peak
            if result.value != previous.value:
                marginal = (m.cumulative_reach - previous.metrics.cumulative_reach) / (result.value - previous.value)
        rows.append(SeedEfficiencyRow(
            value=result.value,
            reach_fraction=m.reach_fraction,
            t_peak=m.t_peak,
            cumulative_reach=m.cumulative_reach,
            marginal_reach_per_seed=marginal,
            t_peak_shift=shift,
        ))
        previous = result
    return rows


def same_effect(a: SeedEfficiencyRow, b: SeedEfficiencyRow, band: float = SAME_EFFECT_REACH_BAND) -> bool:
    """Two seedings reach almost the same share of the audience"""
    return abs(a.reach_fraction - b.reach_fraction) < band


def figure_presets() -> List[SweepSpec]:
    """The beta sweep (gamma=0.1), gamma sweep (beta=0.25) and seed sweep of the baseline campaign"""
    base = baseline_scenario()
    return [
        SweepSpec(base=base, parameter=SweepParameter.BETA, values=(0.1, 0.25, 0.5, 0.7), name='fig2'),
        SweepSpec(base=base, parameter=SweepParameter.GAMMA, values=(0.01, 0.1, 0.2, 0.5), name='fig3'),
        SweepSpec(base=base, parameter=SweepParameter.SEED, values=(1, 10, 100, 200), name='fig4'),
    ]
