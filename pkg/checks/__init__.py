"""
Checks Module
Invariant suite behind the `check` command
"""

from .invariant_checker import InvariantChecker, default_scenarios

__all__ = ['InvariantChecker', 'default_scenarios']
