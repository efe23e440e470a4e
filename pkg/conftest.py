"""
Shared pytest fixtures
"""

import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from core.campaign import baseline_scenario, run_scenario

SETTINGS_VARIABLES = ('LOG_LEVEL', 'LOG_FILE', 'SWEEP_WORKERS', 'SOLVER_RTOL', 'SOLVER_ATOL')


@pytest.fixture(autouse=True)
def clean_settings_env(monkeypatch):
    """Settings come from defaults unless a test sets them"""
    for name in SETTINGS_VARIABLES:
        monkeypatch.delenv(name, raising=False)


@pytest.fixture
def baseline():
    return baseline_scenario()


@pytest.fixture(scope='session')
def baseline_traj():
    return run_scenario(baseline_scenario())
