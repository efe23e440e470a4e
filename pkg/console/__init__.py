"""
Console Package

Command-line surface of the campaign simulator.
"""

from .cli import build_parser, format_summary, main

__all__ = ['build_parser', 'format_summary', 'main']
