"""
Core module for the viral campaign simulator

This package provides the numerical core:
- integrator: adaptive Dormand-Prince (4,5) and fixed-step RK4 integrators
- sir_model: SIR dynamics, reproduction numbers and analytic oracles
- campaign: scenarios, sweeps and marketing metrics
"""

from .integrator import (
    DP45_TABLEAU,
    ButcherTableau,
    IntegrationError,
    OdeProblem,
    SolutionSeries,
    StepControl,
    dp45_step,
    fixed_step_dp45,
    integrate,
    rk4_reference,
)
from .sir_model import (
    CompartmentState,
    InfectivityFactors,
    ModelDomainError,
    ModelParams,
    OutbreakClass,
    Population,
    UndefinedReproductionNumber,
    basic_reproduction_number,
    classify_outbreak,
    compose_infectivity,
    equilibrium_residual,
    final_size,
    peak_infected_analytic,
    peak_time_analytic,
    rhs,
    trajectory_invariant,
)
from .campaign import (
    CampaignMetrics,
    Scenario,
    ScenarioError,
    ScenarioRunError,
    SeedEfficiencyError,
    SweepParameter,
    SweepResult,
    SweepSpec,
    Trajectory,
    baseline_scenario,
    figure_presets,
    metrics,
    run_scenario,
    seed_efficiency,
    sweep,
)

__all__ = [
    'DP45_TABLEAU', 'ButcherTableau', 'IntegrationError', 'OdeProblem', 'SolutionSeries',
    'StepControl', 'dp45_step', 'fixed_step_dp45', 'integrate', 'rk4_reference',
    'CompartmentState', 'InfectivityFactors', 'ModelDomainError', 'ModelParams', 'OutbreakClass',
    'Population', 'UndefinedReproductionNumber', 'basic_reproduction_number', 'classify_outbreak',
    'compose_infectivity', 'equilibrium_residual', 'final_size', 'peak_infected_analytic',
    'peak_time_analytic', 'rhs', 'trajectory_invariant',
    'CampaignMetrics', 'Scenario', 'ScenarioError', 'ScenarioRunError', 'SeedEfficiencyError',
    'SweepParameter', 'SweepResult', 'SweepSpec', 'Trajectory', 'baseline_scenario',
    'figure_presets', 'metrics', 'run_scenario', 'seed_efficiency', 'sweep',
]

__version__ = '1.0.0'
