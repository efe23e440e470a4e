"""
Settings Module
Ambient settings read from environment variables (a .env file is loaded first)
"""

import os
import logging
from dataclasses import dataclass
from typing import Optional

from dotenv import load_dotenv

from core.integrator import StepControl
from .run_config import ConfigError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Settings:
    log_level: str = 'INFO'
    log_file: Optional[str] = None
    sweep_workers: int = 4
    solver_rtol: float = 1e-6
    solver_atol: float = 1e-9

    def step_control(self) -> StepControl:
        return StepControl(rtol=self.solver_rtol, atol=self.solver_atol)


def _env(name, cast, default):
    raw = os.environ.get(name)
    if raw is None or raw == '':
        return default
    try:
        return cast(raw)
    except ValueError as e:
        raise ConfigError(f"invalid value {raw!r}: {e}", key=name) from e


def load_settings(env_file: Optional[str] = None) -> Settings:
    """Read LOG_LEVEL, LOG_FILE, SWEEP_WORKERS, SOLVER_RTOL and SOLVER_ATOL"""
    load_dotenv(env_file)

    settings = Settings(
        log_level=_env('LOG_LEVEL', str, 'INFO').upper(),
        log_file=_env('LOG_FILE', str, None),
        sweep_workers=_env('SWEEP_WORKERS', int, 4),
        solver_rtol=_env('SOLVER_RTOL', float, 1e-6),
        solver_atol=_env('SOLVER_ATOL', float, 1e-9),
    )
    if settings.sweep_workers < 1:
        raise ConfigError("must be >= 1", key='SWEEP_WORKERS')
    try:
        settings.step_control()
    except ValueError as e:
        key = 'SOLVER_RTOL' if str(e).startswith('rtol') else 'SOLVER_ATOL'
        raise ConfigError(str(e), key=key) from e
    return settings
