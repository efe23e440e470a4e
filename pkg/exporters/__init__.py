"""
Exporters Module
CSV and SVG output for trajectories and sweeps
"""

from .csv_writer import (
    CsvFormatError,
    format_number,
    read_csv,
    write_csv,
    write_metrics_csv,
    write_text_file,
)
from .svg_chart import ChartError, sir_series, write_svg_chart

__all__ = [
    'CsvFormatError', 'format_number', 'read_csv', 'write_csv', 'write_metrics_csv',
    'write_text_file', 'ChartError', 'sir_series', 'write_svg_chart',
]
