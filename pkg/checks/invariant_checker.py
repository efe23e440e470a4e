"""
Invariant Checker Module
Property checks over simulated campaigns: conservation, monotonicity, threshold
behaviour, final size, invariant constancy, peak height, equilibria and
integrator order
"""

import json
import math
import logging
from datetime import datetime
from typing import Iterable, List, Optional

import numpy as np

from core import integrator
from core.campaign import (
    FINAL_SIZE_TOLERANCE,
    MONOTONICITY_TOLERANCE,
    Scenario,
    ScenarioRunError,
    Trajectory,
    baseline_scenario,
    figure_presets,
    panel_scenarios,
    run_scenario,
    settled,
)
from core.sir_model import (
    CONSERVATION_TOLERANCE,
    CompartmentState,
    ModelDomainError,
    UndefinedReproductionNumber,
    basic_reproduction_number,
    equilibrium_residual,
    final_size,
    is_equilibrium,
    peak_infected_analytic,
    trajectory_invariant,
)

logger = logging.getLogger(__name__)

INVARIANT_TOLERANCE = 1e-3          # fraction of n
INVARIANT_MIN_SUSCEPTIBLE = 1e-3    # fraction of n; ln(s) is ill-conditioned below
PEAK_TOLERANCE = 0.02
THRESHOLD_S_TOLERANCE = 0.02        # fraction of n / R0
ORDER_RANGE = (4.0, 6.0)
ORDER_STEP = 0.2
EXACTNESS_TOLERANCE = 1e-12


def default_scenarios() -> List[Scenario]:
    """Baseline campaign plus every figure panel"""
    scenarios = [baseline_scenario()]
    for spec in figure_presets():
        scenarios.extend(panel_scenarios(spec))
    return scenarios


class InvariantChecker:
    """Runs the property suite and keeps track of results"""

    def __init__(self, console=None, tableau: Optional[integrator.ButcherTableau] = None, verbose=False,
                 control: Optional[integrator.StepControl] = None):
        self.console = console
        self.tableau = tableau
        self.control = control
        self.verbose = verbose
        self.tracking = {
            'checks_run': 0,
            'passed': 0,
            'failures': [],
            'residuals': {},
            'by_check': {},
            'started': None,
            'finished': None,
        }

    def _report(self, message, level='info'):
        if self.console:
            self.console.log(message, level)
        else:
            getattr(logger, level, logger.info)(message)

    def _record(self, name: str, label: str, result):
        passed, message = result
        self.tracking['checks_run'] += 1
        counts = self.tracking['by_check'].setdefault(name, {'run': 0, 'passed': 0})
        counts['run'] += 1
        if passed:
            self.tracking['passed'] += 1
            counts['passed'] += 1
        else:
            self.tracking['failures'].append({'check': name, 'scenario': label, 'message': message})
        if self.verbose or not passed:
            icon = '✅' if passed else '❌'
            self._report(f"{icon} {name} [{label}]: {message}", 'info' if passed else 'error')
        return passed

    def _residual(self, label: str, key: str, value: float):
        self.tracking['residuals'].setdefault(label, {})[key] = value

    # --- trajectory checks -------------------------------------------------

    def check_conservation(self, traj: Trajectory):
        drift = traj.conservation_error()
        self._residual(traj.scenario.label, 'conservation', drift)
        limit = CONSERVATION_TOLERANCE * traj.n
        if drift > limit:
            return False, f"max |S+I+R-N| = {drift:.3e} exceeds {limit:.1e}"
        return True, f"max |S+I+R-N| = {drift:.3e}"

    def check_monotonicity(self, traj: Trajectory):
        tol = MONOTONICITY_TOLERANCE * traj.n
        rise = float(np.max(np.diff(traj.s), initial=0.0))
        fall = float(-np.min(np.diff(traj.r), initial=0.0))
        self._residual(traj.scenario.label, 'monotonicity', max(rise, fall))
        if rise > tol:
            return False, f"S increased by {rise:.3e}"
        if fall > tol:
            return False, f"R decreased by {fall:.3e}"
        return True, "S non-increasing, R non-decreasing"

    def check_threshold(self, traj: Trajectory):
        """Sharing grows at the start iff R0 * S(0) / N > 1"""
        scn = traj.scenario
        try:
            effective = basic_reproduction_number(scn.params) * scn.initial.s / scn.pop.n
        except UndefinedReproductionNumber:
            return True, "skipped (R0 undefined)"

        tol = MONOTONICITY_TOLERANCE * traj.n
        if effective > 1.0 and scn.initial.i > 0:
            if traj.i[1] <= traj.i[0]:
                return False, f"R0*S0/N = {effective:.4g} > 1 but I did not grow"
            k = int(np.argmax(traj.i))
            if k == len(traj.i) - 1:
                return False, f"R0*S0/N = {effective:.4g} > 1 but I has no maximum before t_end"
            return self._check_peak_susceptible(traj, k, effective)
        growth = float(np.max(np.diff(traj.i), initial=0.0))
        if growth > tol:
            return False, f"R0*S0/N = {effective:.4g} <= 1 but I grew by {growth:.3e}"
        return True, f"R0*S0/N = {effective:.4g}, I declines"

    def _check_peak_susceptible(self, traj: Trajectory, k: int, effective: float):
        """S at the sampled I maximum sits at n / R0 (dI/dt = 0 there)"""
        scn = traj.scenario
        s_star = scn.pop.n / basic_reproduction_number(scn.params)
        s_peak = float(traj.s[k])
        error = abs(s_peak - s_star) / s_star
        self._residual(scn.label, 'threshold', error)
        # the true maximum may fall between samples; S* bracketed by the neighbours is a grid match
        bracketed = traj.s[k + 1] <= s_star <= traj.s[k - 1]
        if error > THRESHOLD_S_TOLERANCE and not bracketed:
            return False, f"S at peak {s_peak:.4f} vs n/R0 {s_star:.4f}"
        return True, f"R0*S0/N = {effective:.4g}, S at peak {s_peak:.4f} vs n/R0 {s_star:.4f}"

    def check_final_size(self, traj: Trajectory):
        scn = traj.scenario
        try:
            _, r_inf = final_size(scn.params, scn.initial.s, scn.initial.i, scn.initial.r, scn.pop)
        except UndefinedReproductionNumber:
            return True, "skipped (R0 undefined)"

        reach = float(traj.r[-1])
        gap = reach - r_inf
        self._residual(scn.label, 'final_size', gap)
        limit = FINAL_SIZE_TOLERANCE * scn.pop.n
        if settled(traj):
            if abs(gap) > limit:
                return False, f"R(t_end) = {reach:.4f} vs final size {r_inf:.4f}"
            return True, f"R(t_end) = {reach:.4f} matches final size {r_inf:.4f}"
        if gap > limit:
            return False, f"R(t_end) = {reach:.4f} overshoots final size {r_inf:.4f}"
        return True, f"R(t_end) = {reach:.4f} below final size {r_inf:.4f} (not settled)"

    def check_invariant(self, traj: Trajectory):
        scn = traj.scenario
        floor = INVARIANT_MIN_SUSCEPTIBLE * scn.pop.n
        mask = traj.s >= floor
        if scn.params.beta == 0 or scn.params.gamma == 0 or not np.any(mask):
            return True, "skipped (invariant undefined)"
        try:
            values = np.array([
                trajectory_invariant(CompartmentState(float(s), float(i), float(r)), scn.params, scn.pop)
                for s, i, r in zip(traj.s[mask], traj.i[mask], traj.r[mask])
            ])
        except ModelDomainError as e:
            return False, f"invariant evaluation failed: {e}"
        drift = float(np.max(np.abs(values - values[0])))
        self._residual(scn.label, 'invariant', drift)
        limit = INVARIANT_TOLERANCE * scn.pop.n
        if drift > limit:
            return False, f"invariant drifted by {drift:.3e}"
        return True, f"invariant drift {drift:.3e}"

    def check_peak(self, traj: Trajectory):
        scn = traj.scenario
        try:
            _, i_peak = peak_infected_analytic(scn.params, scn.initial.s, scn.initial.i, scn.pop)
        except ModelDomainError:
            return True, "skipped (peak undefined)"
        sampled = float(np.max(traj.i))
        if i_peak == 0:
            return (sampled == 0), f"sampled peak {sampled:.4f}, analytic 0"
        error = abs(sampled - i_peak) / i_peak
        self._residual(scn.label, 'peak', error)
        if error > PEAK_TOLERANCE:
            return False, f"sampled peak {sampled:.4f} vs analytic {i_peak:.4f}"
        return True, f"sampled peak {sampled:.4f} vs analytic {i_peak:.4f}"

    # --- scenario-free checks ----------------------------------------------

    def check_equilibria(self, scn: Scenario):
        """Disease-free states (n,0,0) and (s,0,n-s) are rest points"""
        n = scn.pop.n
        states = [CompartmentState(n, 0.0, 0.0), CompartmentState(0.4 * n, 0.0, 0.6 * n)]
        worst = max(equilibrium_residual(state, scn.params, scn.pop) for state in states)
        self._residual(scn.label, 'equilibrium', worst)
        if not all(is_equilibrium(state, scn.params, scn.pop) for state in states):
            return False, f"equilibrium residual {worst:.3e}"
        return True, f"equilibrium residual {worst:.3e}"

    def check_exactness(self):
        """Constant and linear fields are integrated exactly"""
        worst = 0.0
        for slope in (0.0, 1.0):
            problem = integrator.OdeProblem(
                rhs=lambda t, y, slope=slope: np.full_like(y, slope),
                t0=0.0, t_end=10.0, y0=np.array([2.0]),
            )
            series = integrator.integrate(problem, tableau=self.tableau)
            expected = 2.0 + slope * series.times
            worst = max(worst, float(np.max(np.abs(series.component(0) - expected))))
        if worst > EXACTNESS_TOLERANCE:
            return False, f"constant/linear field error {worst:.3e}"
        return True, f"constant/linear field error {worst:.3e}"

    def check_order(self):
        """Observed order of fixed-step DP45 on y' = -y over [0, 1]"""
        problem = integrator.OdeProblem(rhs=lambda t, y: -y, t0=0.0, t_end=1.0, y0=np.array([1.0]))
        exact = math.exp(-1.0)
        errors = []
        for h in (ORDER_STEP, ORDER_STEP / 2):
            series = integrator.fixed_step_dp45(problem, h, tableau=self.tableau)
            errors.append(abs(float(series.final_state[0]) - exact))
        if errors[1] == 0:
            return False, "error vanished at h/2; order undefined"
        order = integrator.observed_order(errors[0], errors[1])
        self._residual('integrator', 'order', order)
        lo, hi = ORDER_RANGE
        if not lo <= order <= hi:
            return False, f"observed order {order:.3f} outside [{lo:g}, {hi:g}]"
        return True, f"observed order {order:.3f}"

    # --- suite -------------------------------------------------------------

    def check_scenario(self, scn: Scenario) -> bool:
        try:
            traj = run_scenario(scn, self.control)
        except ScenarioRunError as e:
            return self._record('run', scn.label, (False, str(e)))

        results = [
            self._record('conservation', scn.label, self.check_conservation(traj)),
            self._record('monotonicity', scn.label, self.check_monotonicity(traj)),
            self._record('threshold', scn.label, self.check_threshold(traj)),
            self._record('final_size', scn.label, self.check_final_size(traj)),
            self._record('invariant', scn.label, self.check_invariant(traj)),
            self._record('peak', scn.label, self.check_peak(traj)),
            self._record('equilibria', scn.label, self.check_equilibria(scn)),
        ]
        return all(results)

    def run_all(self, scenarios: Optional[Iterable[Scenario]] = None) -> bool:
        """Run every check; True iff all pass"""
        scenarios = list(scenarios) if scenarios is not None else default_scenarios()
        self.tracking['started'] = datetime.now().isoformat()

        ok = self._record('order', 'integrator', self.check_order())
        ok = self._record('exactness', 'integrator', self.check_exactness()) and ok
        for scn in scenarios:
            ok = self.check_scenario(scn) and ok

        self.tracking['finished'] = datetime.now().isoformat()
        for name, counts in self.tracking['by_check'].items():
            icon = '✅' if counts['passed'] == counts['run'] else '❌'
            self._report(f"{icon} {name}: {counts['passed']}/{counts['run']} passed")
        stats = self.get_stats()
        if ok:
            self._report(f"✅ All {stats['checks_run']} checks passed on {len(scenarios)} scenarios", 'info')
        else:
            self._report(f"❌ {stats['failed']}/{stats['checks_run']} checks failed", 'error')
            for failure in self.tracking['failures']:
                self._report(f"   - {failure['check']} [{failure['scenario']}]: {failure['message']}", 'error')
        return ok

    def get_stats(self):
        return {
            'checks_run': self.tracking['checks_run'],
            'passed': self.tracking['passed'],
            'failed': len(self.tracking['failures']),
            'scenarios': len([label for label in self.tracking['residuals'] if label != 'integrator']),
        }

    def save_report(self, path: str) -> bool:
        """Write tracking state and stats as JSON"""
        try:
            with open(path, 'w', encoding='utf-8') as f:
                json.dump({'stats': self.get_stats(), **self.tracking}, f, indent=2, ensure_ascii=False)
            return True
        except OSError as e:
            logger.error(f"❌ Error saving check report: {e}")
            return False
