"""
Utils Module
Logging helpers for the campaign simulator
"""

from .logger import ConsoleLogger, setup_logging

__all__ = ['ConsoleLogger', 'setup_logging']
