"""
Integrator Module

Explicit adaptive Runge-Kutta (4,5) integrator (Dormand-Prince pair) for
first-order ODE systems y' = f(t, y), plus fixed-step marchers used as
verification references:
- integrate: adaptive DP45 landing exactly on every requested sample time
- rk4_reference: classical fourth order Runge-Kutta with constant step
- fixed_step_dp45: DP45 with constant step and no error control (order checks)

All functions are pure; results are immutable and safe to share between threads.
"""

import math
import logging
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

logger = logging.getLogger(__name__)

RhsFunction = Callable[[float, np.ndarray], np.ndarray]
Projection = Callable[[float, np.ndarray], np.ndarray]


class IntegrationError(RuntimeError):
    """Integration failure at time t (and step h when one was being attempted)"""

    def __init__(self, reason: str, t: float, h: Optional[float] = None):
        self.reason = reason
        self.t = t
        self.h = h
        where = f"t={t:.6g}" if h is None else f"t={t:.6g}, h={h:.3g}"
        super().__init__(f"{reason} ({where})")


@dataclass(frozen=True)
class ButcherTableau:
    """Explicit embedded Runge-Kutta pair: nodes c, matrix rows a, weights b and b_hat"""
    c: Tuple[float, ...]
    a: Tuple[Tuple[float, ...], ...]
    b: Tuple[float, ...]
    b_hat: Tuple[float, ...]
    _b: np.ndarray = field(init=False, repr=False, compare=False)
    _b_err: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        stages = len(self.c)
        if len(self.a) != stages or len(self.b) != stages or len(self.b_hat) != stages:
            raise ValueError("Butcher tableau sizes do not match the number of stages")
        for row_index, row in enumerate(self.a):
            if len(row) != row_index:
                raise ValueError(f"Row {row_index} of an explicit tableau must have {row_index} entries")
        object.__setattr__(self, '_b', np.array(self.b, dtype=float))
        object.__setattr__(self, '_b_err', np.array(self.b, dtype=float) - np.array(self.b_hat, dtype=float))

    @property
    def stages(self) -> int:
        return len(self.c)

    def replace_weight(self, index: int, value: float) -> 'ButcherTableau':
        """Copy with one 5th-order weight changed (used to inject faults in checks)"""
        b = list(self.b)
        b[index] = value
        return ButcherTableau(c=self.c, a=self.a, b=tuple(b), b_hat=self.b_hat)


# Dormand & Prince (1980), "A family of embedded Runge-Kutta formulae",
# J. Comput. Appl. Math. 6(1); table as printed in Hairer, Norsett & Wanner,
# "Solving Ordinary Differential Equations I" (2nd ed.), Table 5.2.
# Exact rationals, converted to float once at import.
DP45_TABLEAU = ButcherTableau(
    c=(0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0),
    a=(
        (),
        (1 / 5,),
        (3 / 40, 9 / 40),
        (44 / 45, -56 / 15, 32 / 9),
        (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
        (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
        (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
    ),
    b=(35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0),
    b_hat=(5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40),
)


@dataclass(frozen=True)
class OdeProblem:
    """
    Initial value problem y' = rhs(t, y), y(t0) = y0 on [t0, t_end].

    projection, when given, is applied to every accepted state and may raise
    IntegrationError to abort (e.g. a state leaving its physical domain).
    """
    rhs: RhsFunction
    t0: float
    t_end: float
    y0: np.ndarray
    projection: Optional[Projection] = None

    def __post_init__(self):
        y0 = np.array(self.y0, dtype=float)
        if y0.ndim != 1 or y0.size == 0:
            raise ValueError("y0 must be a non-empty vector")
        if not np.all(np.isfinite(y0)):
            raise ValueError("y0 must be finite")
        if not (math.isfinite(self.t0) and math.isfinite(self.t_end)) or not self.t_end > self.t0:
            raise ValueError(f"t_end must be greater than t0 (got t0={self.t0}, t_end={self.t_end})")
        y0.setflags(write=False)
        object.__setattr__(self, 'y0', y0)

    @property
    def dimension(self) -> int:
        return self.y0.size

    def evaluate(self, t: float, y: np.ndarray) -> np.ndarray:
        """rhs(t, y) as a float vector, checked against the problem dimension"""
        dy = np.asarray(self.rhs(t, y), dtype=float)
        if dy.shape != (self.dimension,):
            raise ValueError(f"rhs returned shape {dy.shape}, expected ({self.dimension},)")
        return dy


@dataclass(frozen=True)
class StepControl:
    """Error-control settings of the adaptive integrator"""
    rtol: float = 1e-6
    atol: float = 1e-9
    safety: float = 0.9
    min_scale: float = 0.2
    max_scale: float = 5.0
    h_init: Optional[float] = None
    max_steps: int = 100000

    def __post_init__(self):
        if not self.rtol > 0:
            raise ValueError(f"rtol must be > 0 (got {self.rtol})")
        if not self.atol >= 0:
            raise ValueError(f"atol must be >= 0 (got {self.atol})")
        if not 0 < self.safety < 1:
            raise ValueError(f"safety must be in (0, 1) (got {self.safety})")
        if not 0 < self.min_scale < 1 < self.max_scale:
            raise ValueError("step scale bounds must satisfy 0 < min_scale < 1 < max_scale")
        if self.h_init is not None and not self.h_init > 0:
            raise ValueError(f"h_init must be > 0 (got {self.h_init})")
        if self.max_steps < 1:
            raise ValueError(f"max_steps must be >= 1 (got {self.max_steps})")


@dataclass(frozen=True)
class SolutionSeries:
    """States sampled at strictly increasing times; row k of states belongs to times[k]"""
    times: np.ndarray
    states: np.ndarray
    steps_taken: int
    steps_rejected: int = 0

    def __post_init__(self):
        times = np.array(self.times, dtype=float)
        states = np.array(self.states, dtype=float)
        if times.ndim != 1 or times.size < 2:
            raise ValueError("a solution series needs at least two samples")
        if states.shape[0] != times.size:
            raise ValueError("times and states must have equal length")
        if np.any(np.diff(times) <= 0):
            raise ValueError("sample times must be strictly increasing")
        times.setflags(write=False)
        states.setflags(write=False)
        object.__setattr__(self, 'times', times)
        object.__setattr__(self, 'states', states)

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]

    def component(self, index: int) -> np.ndarray:
        return self.states[:, index]


def dp45_step(rhs: RhsFunction, t: float, y, h: float,
              tableau: Optional[ButcherTableau] = None) -> Tuple[np.ndarray, np.ndarray]:
    """
    Advance one Dormand-Prince step of size h from (t, y).

    Args:
        rhs: right-hand side f(t, y)
        t: current time
        y: current state vector
        h: step size, > 0
        tableau: embedded pair to use (defaults to DP45_TABLEAU)

    Returns:
        tuple: (y_next, error_estimate) where y_next is the 5th-order advance and
        error_estimate the componentwise difference of the 5th- and 4th-order solutions.
        Exactly one rhs evaluation per stage (7 for DP45).

    Raises:
        IntegrationError: rhs produced a non-finite value
    """
    if tableau is None:
        tableau = DP45_TABLEAU
    if not h > 0:
        raise ValueError(f"step size must be > 0 (got {h})")

    y = np.asarray(y, dtype=float)
    k = np.empty((tableau.stages, y.size))
    for stage, (c_i, a_i) in enumerate(zip(tableau.c, tableau.a)):
        y_stage = y + h * np.dot(a_i, k[:stage]) if stage else y
        k[stage] = rhs(t + c_i * h, y_stage)
        if not np.all(np.isfinite(k[stage])):
            raise IntegrationError("non-finite value produced by rhs", t, h)

    y_next = y + h * (tableau._b @ k)
    error_estimate = h * (tableau._b_err @ k)
    return y_next, error_estimate


def _error_norm(error: np.ndarray, y: np.ndarray, y_next: np.ndarray, control: StepControl) -> float:
    """RMS of the error scaled by atol + rtol * max(|y|, |y_next|)"""
    scale = control.atol + control.rtol * np.maximum(np.abs(y), np.abs(y_next))
    ratio = np.zeros_like(error)
    positive = scale > 0
    ratio[positive] = error[positive] / scale[positive]
    # zero scale only happens with atol == 0 on a zero component
    ratio[~positive & (error != 0)] = np.inf
    return float(np.sqrt(np.mean(ratio ** 2)))


def _validate_samples(problem: OdeProblem, sample_times) -> np.ndarray:
    if sample_times is None:
        return np.array([problem.t0, problem.t_end], dtype=float)
    times = np.array(sample_times, dtype=float)
    if times.ndim != 1 or times.size < 2:
        raise ValueError("sample_times needs at least t0 and t_end")
    span = problem.t_end - problem.t0
    if abs(times[0] - problem.t0) > 1e-12 * max(1.0, span) or \
            abs(times[-1] - problem.t_end) > 1e-12 * max(1.0, span):
        raise ValueError("sample_times must start at t0 and end at t_end")
    times[0] = problem.t0
    times[-1] = problem.t_end
    if np.any(np.diff(times) <= 0):
        raise ValueError("sample_times must be strictly increasing")
    return times


def _accept(problem: OdeProblem, t: float, y: np.ndarray, h: float) -> np.ndarray:
    if not np.all(np.isfinite(y)):
        raise IntegrationError("non-finite state", t, h)
    if problem.projection is not None:
        y = problem.projection(t, y)
    return y


def integrate(problem: OdeProblem, control: Optional[StepControl] = None,
              sample_times: Optional[Sequence[float]] = None,
              tableau: Optional[ButcherTableau] = None) -> SolutionSeries:
    """
    Adaptive DP45 integration returning the state at exactly each sample time.

    Steps are clamped so that one accepted step ends on every sample time; no
    interpolation is involved. A step is accepted when the RMS scaled error is
    <= 1; the next step is h * safety * err^(-1/5), limited to
    [min_scale * h, max_scale * h]. Rejected steps are retried with the shrunken step.

    Raises:
        IntegrationError: max_steps exceeded, step size underflow or a non-finite state
    """
    control = control or StepControl()
    times = _validate_samples(problem, sample_times)

    t = problem.t0
    y = problem.y0.copy()
    h = control.h_init if control.h_init is not None else (problem.t_end - problem.t0) / 100
    states = [y.copy()]
    steps_taken = 0
    steps_rejected = 0

    for target in times[1:]:
        while t < target:
            if steps_taken + steps_rejected >= control.max_steps:
                raise IntegrationError(f"max_steps={control.max_steps} exceeded", t, h)
            if h <= 1e-14 * max(1.0, abs(t)):
                raise IntegrationError("step size underflow", t, h)

            remaining = target - t
            landing = h >= remaining - 1e-12 * max(1.0, abs(target))
            h_try = remaining if landing else h

            y_next, error = dp45_step(problem.evaluate, t, y, h_try, tableau)
            err = _error_norm(error, y, y_next, control)

            if err <= 1.0:
                t = target if landing else t + h_try
                y = _accept(problem, t, y_next, h_try)
                steps_taken += 1
                factor = control.max_scale if err == 0 else control.safety * err ** -0.2
            else:
                steps_rejected += 1
                factor = control.safety * err ** -0.2 if math.isfinite(err) else control.min_scale
            h = h_try * min(control.max_scale, max(control.min_scale, factor))

        states.append(y.copy())

    logger.debug(f"✅ DP45 reached t={t:.6g}: {steps_taken} steps, {steps_rejected} rejected")
    return SolutionSeries(times=times, states=np.array(states),
                          steps_taken=steps_taken, steps_rejected=steps_rejected)


def _rk4_step(rhs: RhsFunction, t: float, y: np.ndarray, h: float) -> np.ndarray:
    k1 = rhs(t, y)
    k2 = rhs(t + h / 2, y + h / 2 * k1)
    k3 = rhs(t + h / 2, y + h / 2 * k2)
    k4 = rhs(t + h, y + h * k3)
    return y + h / 6 * (k1 + 2 * (k2 + k3) + k4)


def _dp45_fixed(tableau: Optional[ButcherTableau]):
    def step(rhs, t, y, h):
        y_next, _ = dp45_step(rhs, t, y, h, tableau)
        return y_next
    return step


def _march(step, problem: OdeProblem, h: float, sample_times) -> SolutionSeries:
    """Constant-step marching; the last substep of each gap is clamped onto the sample time"""
    if not h > 0:
        raise ValueError(f"step size must be > 0 (got {h})")
    times = _validate_samples(problem, sample_times)

    y = problem.y0.copy()
    states = [y.copy()]
    steps_taken = 0
    for start, target in zip(times[:-1], times[1:]):
        gap = target - start
        full_steps = int(math.floor(gap / h + 1e-9))
        remainder = gap - full_steps * h
        for j in range(full_steps):
            t = start + j * h
            y = _accept(problem, t + h, step(problem.evaluate, t, y, h), h)
        steps_taken += full_steps
        if remainder > 1e-12 * max(1.0, gap):
            t = start + full_steps * h
            y = _accept(problem, target, step(problem.evaluate, t, y, remainder), remainder)
            steps_taken += 1
        states.append(y.copy())

    return SolutionSeries(times=times, states=np.array(states), steps_taken=steps_taken)


def rk4_reference(problem: OdeProblem, h: float,
                  sample_times: Optional[Sequence[float]] = None) -> SolutionSeries:
    """Classical RK4 with constant step h; no error control, deterministic"""
    return _march(_rk4_step, problem, h, sample_times)


def fixed_step_dp45(problem: OdeProblem, h: float,
                    sample_times: Optional[Sequence[float]] = None,
                    tableau: Optional[ButcherTableau] = None) -> SolutionSeries:
    """DP45 5th-order solution with constant step h (error estimate ignored)"""
    return _march(_dp45_fixed(tableau), problem, h, sample_times)


def observed_order(error_h: float, error_half: float) -> float:
    """Convergence order estimated from global errors at steps h and h/2"""
    if error_half <= 0 or error_h <= 0:
        return math.inf
    return math.log2(error_h / error_half)
