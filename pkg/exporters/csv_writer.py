"""
CSV Writer Module
Trajectory and sweep-metrics export as deterministic CSV text
"""

import io
import csv
import logging
from typing import Iterable, Optional, Tuple

import numpy as np

from core.campaign import CampaignMetrics, SweepResult, Trajectory, settled

logger = logging.getLogger(__name__)

TRAJECTORY_HEADER = ('t', 'S', 'I', 'R')
METRICS_HEADER = (
    'label', 'value', 'r0', 'classification', 'peak_sharers', 't_peak', 'cumulative_reach',
    'reach_fraction', 'audience_reached', 'depletion_time', 'half_reach_time', 'settled', 'error',
)


class CsvFormatError(ValueError):
    """Text is not a trajectory CSV"""


def format_number(value: Optional[float]) -> str:
    """17 significant digits: parses back to the identical double; 900.0 renders as 900"""
    if value is None:
        return ''
    return format(float(value), '.17g')


def _writer(buffer):
    return csv.writer(buffer, lineterminator='\n')


def write_csv(traj: Trajectory) -> str:
    """Header `t,S,I,R`, one row per sample, LF line endings"""
    buffer = io.StringIO()
    writer = _writer(buffer)
    writer.writerow(TRAJECTORY_HEADER)
    for row in zip(traj.times, traj.s, traj.i, traj.r):
        writer.writerow([format_number(x) for x in row])
    return buffer.getvalue()


def read_csv(text: str) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """
    Parse a trajectory CSV back into (times, s, i, r).

    Raises:
        CsvFormatError: wrong header, ragged row or unparsable number
    """
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or tuple(rows[0]) != TRAJECTORY_HEADER:
        raise CsvFormatError(f"expected header {','.join(TRAJECTORY_HEADER)}")

    values = []
    for number, row in enumerate(rows[1:], start=2):
        if len(row) != len(TRAJECTORY_HEADER):
            raise CsvFormatError(f"line {number}: expected {len(TRAJECTORY_HEADER)} columns, got {len(row)}")
        try:
            values.append([float(x) for x in row])
        except ValueError as e:
            raise CsvFormatError(f"line {number}: {e}") from e

    table = np.array(values, dtype=float).reshape(-1, len(TRAJECTORY_HEADER))
    return table[:, 0], table[:, 1], table[:, 2], table[:, 3]


def _metrics_cells(m: CampaignMetrics):
    r0 = format_number(m.r0) if m.r0 is not None else ''
    classification = m.classification.value if m.classification is not None else ''
    return [
        r0, classification, format_number(m.peak_sharers), format_number(m.t_peak),
        format_number(m.cumulative_reach), format_number(m.reach_fraction),
        format_number(m.audience_reached), format_number(m.depletion_time),
        format_number(m.half_reach_time),
    ]


def write_metrics_csv(results: Iterable[SweepResult], labels: Optional[Iterable[str]] = None) -> str:
    """One row per sweep value; failed values keep their row with the error column filled"""
    results = list(results)
    labels = list(labels) if labels is not None else [str(k) for k in range(len(results))]

    buffer = io.StringIO()
    writer = _writer(buffer)
    writer.writerow(METRICS_HEADER)
    for label, result in zip(labels, results):
        if result.ok:
            cells = _metrics_cells(result.metrics)
            done = 'yes' if settled(result.trajectory) else 'no'
            writer.writerow([label, format_number(result.value), *cells, done, ''])
        else:
            writer.writerow([label, format_number(result.value)] + [''] * 10 + [result.error])
    return buffer.getvalue()


def write_text_file(path: str, text: str):
    """Write UTF-8 text keeping LF line endings on every platform"""
    with open(path, 'w', encoding='utf-8', newline='') as f:
        f.write(text)
    logger.debug(f"✅ Wrote {path} ({len(text)} chars)")
