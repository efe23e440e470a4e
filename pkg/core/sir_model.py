"""
SIR Model Module

Susceptible-Infected-Recovered dynamics of a viral marketing campaign.

Compartments (real-valued head-counts):
- S: target audience not yet reached by the message
- I: members actively sharing the message
- R: members who stopped sharing

    dS/dt = -beta * S * I / N
    dI/dt =  beta * S * I / N - gamma * I
    dR/dt =  gamma * I

Also provides the reproduction numbers with threshold classification,
equilibrium residuals and the analytic oracles (trajectory invariant,
final size, peak height and peak time) used to validate simulations.
"""

import math
import logging
from enum import Enum
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy.integrate import quad
from scipy.optimize import bisect

from core.integrator import IntegrationError, OdeProblem

logger = logging.getLogger(__name__)

# Compartments may drift this far below zero before a run is aborted
NEGATIVE_DRIFT_TOLERANCE = 1e-9
CRITICAL_BAND = 1e-12
CONSERVATION_TOLERANCE = 1e-6


class ModelDomainError(ValueError):
    """Parameters or state outside the domain of the model"""


class UndefinedReproductionNumber(ModelDomainError):
    """R0 = beta/gamma is undefined for gamma = 0 (infinite sharing period)"""

    def __init__(self, message="R0 is undefined for gamma = 0 (infinite sharing period)"):
        super().__init__(message)


class OutbreakClass(str, Enum):
    SUBCRITICAL = 'Subcritical'
    CRITICAL = 'Critical'
    SUPERCRITICAL = 'Supercritical'


def _require_finite(name, value, minimum=0.0):
    if not math.isfinite(value):
        raise ModelDomainError(f"{name} must be finite (got {value})")
    if value < minimum:
        raise ModelDomainError(f"{name} must be >= {minimum:g} (got {value})")


@dataclass(frozen=True)
class InfectivityFactors:
    """beta = delta * tau: contact rate per period and per-contact transmission probability"""
    delta: float
    tau: float

    def __post_init__(self):
        _require_finite('delta', self.delta)
        _require_finite('tau', self.tau)
        if self.tau > 1:
            raise ModelDomainError(f"tau is a probability and must be <= 1 (got {self.tau})")


@dataclass(frozen=True)
class ModelParams:
    """Infectivity beta and recovery (message-abandonment) rate gamma per unit time"""
    beta: float
    gamma: float

    def __post_init__(self):
        _require_finite('beta', self.beta)
        _require_finite('gamma', self.gamma)

    @classmethod
    def from_factors(cls, factors: InfectivityFactors, gamma: float) -> 'ModelParams':
        return cls(beta=compose_infectivity(factors), gamma=gamma)

    def scaled(self, factor: float) -> 'ModelParams':
        """Both rates multiplied by factor (a rescaling of time)"""
        return ModelParams(beta=self.beta * factor, gamma=self.gamma * factor)


@dataclass(frozen=True)
class CompartmentState:
    s: float
    i: float
    r: float

    def __post_init__(self):
        for name in ('s', 'i', 'r'):
            _require_finite(name, getattr(self, name), minimum=-NEGATIVE_DRIFT_TOLERANCE)

    @property
    def total(self) -> float:
        return self.s + self.i + self.r

    def as_array(self) -> np.ndarray:
        return np.array([self.s, self.i, self.r], dtype=float)

    @classmethod
    def from_array(cls, values) -> 'CompartmentState':
        s, i, r = (float(v) for v in values)
        return cls(s=s, i=i, r=r)


@dataclass(frozen=True)
class Population:
    """Total audience size N = S + I + R"""
    n: float

    def __post_init__(self):
        if not math.isfinite(self.n) or self.n <= 0:
            raise ModelDomainError(f"population size must be > 0 (got {self.n})")


def rhs(state: CompartmentState, params: ModelParams, pop: Population) -> Tuple[float, float, float]:
    """Right-hand side of the SIR system at one state: (dS/dt, dI/dt, dR/dt)"""
    if pop.n <= 0:
        raise ModelDomainError(f"population size must be > 0 (got {pop.n})")
    infections = params.beta * state.s * state.i / pop.n
    recoveries = params.gamma * state.i
    return -infections, infections - recoveries, recoveries


def compose_infectivity(factors: InfectivityFactors) -> float:
    return factors.delta * factors.tau


def basic_reproduction_number(params: ModelParams) -> float:
    """R0 = beta / gamma, mean secondary sharers caused by one sharer in a fresh audience"""
    if params.gamma == 0:
        raise UndefinedReproductionNumber()
    return params.beta / params.gamma


def effective_reproduction_number(state: CompartmentState, params: ModelParams, pop: Population) -> float:
    """R0 * S / N; active sharing declines once this drops below 1"""
    return basic_reproduction_number(params) * state.s / pop.n


def classify_outbreak(params: ModelParams) -> OutbreakClass:
    """Threshold classification of R0: below 1 the message does not go viral"""
    r0 = basic_reproduction_number(params)
    if abs(r0 - 1.0) <= CRITICAL_BAND:
        return OutbreakClass.CRITICAL
    return OutbreakClass.SUBCRITICAL if r0 < 1.0 else OutbreakClass.SUPERCRITICAL


def equilibrium_residual(state: CompartmentState, params: ModelParams, pop: Population) -> float:
    """Max-norm of the right-hand side; zero for every state with I = 0"""
    return max(abs(component) for component in rhs(state, params, pop))


def is_equilibrium(state: CompartmentState, params: ModelParams, pop: Population) -> bool:
    return equilibrium_residual(state, params, pop) <= 1e-12 * max(1.0, pop.n)


def trajectory_invariant(state: CompartmentState, params: ModelParams, pop: Population) -> float:
    """
    V = i + s - (n / R0) * ln(s), constant along every solution with s > 0.

    Follows from dividing dI/dt by dS/dt. Only meaningful as a conserved
    quantity; the absolute value has no interpretation.
    """
    if params.beta == 0:
        raise ModelDomainError("trajectory invariant is undefined for beta = 0")
    if state.s <= 0:
        raise ModelDomainError(f"trajectory invariant needs s > 0 (got {state.s})")
    r0 = basic_reproduction_number(params)
    return state.i + state.s - (pop.n / r0) * math.log(state.s)


def final_size(params: ModelParams, s0: float, i0: float, r0: float, pop: Population) -> Tuple[float, float]:
    """
    Long-run susceptible remainder and total reach of a campaign.

    Solves x = s0 * exp(-R0 * (n - x - r0) / n) for x in [0, s0] by bisection
    (absolute tolerance 1e-9 * n). The map is monotone on the bracket so the
    root is unique whenever i0 > 0.

    Returns:
        tuple: (s_inf, r_inf) with r_inf = n - s_inf
    """
    reproduction = basic_reproduction_number(params)
    n = pop.n
    if abs(s0 + i0 + r0 - n) > CONSERVATION_TOLERANCE * n:
        raise ModelDomainError(f"initial compartments sum to {s0 + i0 + r0}, expected n={n}")
    if i0 == 0:
        return s0, r0
    if reproduction == 0 or s0 == 0:
        return s0, n - s0

    def gap(x):
        return x - s0 * math.exp(-reproduction * (n - x - r0) / n)

    s_inf = bisect(gap, 0.0, s0, xtol=1e-9 * n, maxiter=200)
    return s_inf, n - s_inf


def peak_infected_analytic(params: ModelParams, s0: float, i0: float, pop: Population) -> Tuple[float, float]:
    """
    Height of the sharing peak from the trajectory invariant.

    dI/dt = 0 at S* = n / R0. When R0 * s0 / n <= 1 active sharing only
    declines and the peak is the starting point.

    Returns:
        tuple: (s_at_peak, i_peak)
    """
    if params.beta == 0:
        raise ModelDomainError("peak is undefined for beta = 0")
    reproduction = basic_reproduction_number(params)
    if s0 <= 0:
        raise ModelDomainError(f"peak needs s0 > 0 (got {s0})")
    if i0 == 0:
        return s0, 0.0
    if reproduction * s0 / pop.n <= 1.0:
        return s0, i0
    s_star = pop.n / reproduction
    i_peak = i0 + s0 - s_star + (pop.n / reproduction) * math.log(s_star / s0)
    return s_star, i_peak


def peak_time_analytic(params: ModelParams, s0: float, i0: float, pop: Population) -> float:
    """
    Time of the sharing peak: integral of ds / (beta * s * i(s) / n) from S* up to s0,
    with i(s) taken from the trajectory invariant. 0 when the peak is at the start.
    """
    s_star, _ = peak_infected_analytic(params, s0, i0, pop)
    if i0 == 0 or s_star >= s0:
        return 0.0
    n = pop.n
    reproduction = params.beta / params.gamma

    def infected(s):
        return i0 + s0 - s + (n / reproduction) * math.log(s / s0)

    def dt_ds(s):
        return n / (params.beta * s * infected(s))

    duration, _ = quad(dt_ds, s_star, s0, epsabs=1e-10, epsrel=1e-10, limit=200)
    return duration


def clamp_negative_drift(t: float, y: np.ndarray) -> np.ndarray:
    """Projection applied after each accepted step: tiny negatives -> 0, real negatives abort"""
    if np.any(y < -NEGATIVE_DRIFT_TOLERANCE):
        raise IntegrationError(f"compartment fell below -{NEGATIVE_DRIFT_TOLERANCE:g}", t)
    return np.where(y < 0, 0.0, y)


def vector_field(params: ModelParams, pop: Population):
    """rhs in the (t, y) form the integrator consumes, y = (S, I, R)"""
    beta, gamma, n = params.beta, params.gamma, pop.n

    def field(t, y):
        infections = beta * y[0] * y[1] / n
        recoveries = gamma * y[1]
        return np.array([-infections, infections - recoveries, recoveries])

    return field


def as_ode_problem(params: ModelParams, pop: Population, initial: CompartmentState,
                   t_end: float, t0: float = 0.0) -> OdeProblem:
    return OdeProblem(rhs=vector_field(params, pop), t0=t0, t_end=t_end,
                      y0=initial.as_array(), projection=clamp_negative_drift)
