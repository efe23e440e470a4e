"""
Tests for CSV and SVG output
"""

import xml.etree.ElementTree as ET

import numpy as np
import pytest

from core.campaign import SweepResult, metrics, run_scenario
from exporters.csv_writer import (
    CsvFormatError,
    format_number,
    read_csv,
    write_csv,
    write_metrics_csv,
)
from exporters.svg_chart import SIR_PALETTE, ChartError, sir_series, write_svg_chart

SVG_NS = '{http://www.w3.org/2000/svg}'
ALLOWED_ELEMENTS = {'svg', 'g', 'polyline', 'line', 'text', 'rect'}


def local_name(element):
    return element.tag.replace(SVG_NS, '')


def parse_svg(text):
    return ET.fromstring(text.encode('utf-8'))


def test_csv_layout(baseline_traj):
    text = write_csv(baseline_traj)
    lines = text.split('\n')
    assert lines[0] == 't,S,I,R'
    assert lines[1] == '0,900,100,0'
    assert text.endswith('\n')
    assert '\r' not in text
    assert len(text.splitlines()) == 1001 + 1


def test_csv_constant_trajectory(baseline):
    traj = run_scenario(baseline.with_seed(0.0))
    rows = write_csv(traj).splitlines()[1:]
    assert all(row.endswith(',1000,0,0') for row in rows)
    assert len({row.split(',')[0] for row in rows}) == len(rows)


def test_csv_round_trip_is_bit_exact(baseline_traj):
    times, s, i, r = read_csv(write_csv(baseline_traj))
    assert np.array_equal(times, baseline_traj.times)
    assert np.array_equal(s, baseline_traj.s)
    assert np.array_equal(i, baseline_traj.i)
    assert np.array_equal(r, baseline_traj.r)


@pytest.mark.parametrize('value,text', [(900.0, '900'), (0.0, '0'), (0.1, '0.10000000000000001'), (None, '')])
def test_number_format(value, text):
    assert format_number(value) == text


@pytest.mark.parametrize('text', ['', 'a,b,c,d\n1,2,3,4\n', 't,S,I,R\n1,2,3\n', 't,S,I,R\n1,2,x,4\n'])
def test_read_csv_rejects_bad_input(text):
    with pytest.raises(CsvFormatError):
        read_csv(text)


def test_metrics_csv(baseline_traj):
    results = [
        SweepResult(value=0.25, trajectory=baseline_traj, metrics=metrics(baseline_traj)),
        SweepResult(value=-1.0, error='beta must be >= 0'),
    ]
    lines = write_metrics_csv(results, ['beta=0.25', 'beta=-1']).splitlines()
    assert lines[0].startswith('label,value,r0,classification,peak_sharers')
    assert len(lines) == 3
    assert lines[1].startswith('beta=0.25,0.25,2.5,Supercritical,')
    assert lines[1].endswith(',yes,')
    assert lines[2].endswith(',beta must be >= 0')
    assert len(lines[2].split(',')) == len(lines[0].split(','))


def test_svg_baseline_structure(baseline_traj):
    root = parse_svg(write_svg_chart(sir_series(baseline_traj), 'baseline'))
    assert local_name(root) == 'svg'
    assert root.get('version') == '1.1'
    assert {local_name(e) for e in root.iter()} <= ALLOWED_ELEMENTS

    polylines = [e for e in root.iter() if local_name(e) == 'polyline']
    assert len(polylines) == 3
    assert [p.get('stroke') for p in polylines] == [SIR_PALETTE['S'], SIR_PALETTE['I'], SIR_PALETTE['R']]
    assert all(len(p.get('points').split()) == 1001 for p in polylines)

    legend = next(g for g in root.iter() if local_name(g) == 'g' and g.get('id') == 'legend')
    assert [t.text for t in legend if local_name(t) == 'text'] == ['S', 'I', 'R']

    axes = next(g for g in root.iter() if local_name(g) == 'g' and g.get('id') == 'axes')
    tick_labels = [t.text for t in axes if local_name(t) == 'text']
    assert '0' in tick_labels and '100' in tick_labels


def test_svg_is_deterministic(baseline_traj):
    series = sir_series(baseline_traj)
    assert write_svg_chart(series, 'baseline') == write_svg_chart(series, 'baseline')


def test_svg_constant_series_is_horizontal_and_padded():
    times = np.linspace(0.0, 10.0, 11)
    root = parse_svg(write_svg_chart([('S', times, np.full(11, 1000.0))], 'flat'))
    polyline = next(e for e in root.iter() if local_name(e) == 'polyline')
    ys = {point.split(',')[1] for point in polyline.get('points').split()}
    # y range 950..1050 puts the line in the middle of the plot area
    assert ys == {'196.00'}


def test_svg_title_is_escaped():
    times = np.linspace(0.0, 1.0, 3)
    root = parse_svg(write_svg_chart([('I', times, times)], 'beta<0.5 & more'))
    assert any(t.text == 'beta<0.5 & more' for t in root.iter() if local_name(t) == 'text')


def test_svg_custom_labels_get_distinct_colors():
    times = np.linspace(0.0, 1.0, 3)
    series = [('beta=0.1', times, times), ('beta=0.25', times, 2 * times)]
    root = parse_svg(write_svg_chart(series, 'overlay'))
    strokes = [e.get('stroke') for e in root.iter() if local_name(e) == 'polyline']
    assert len(set(strokes)) == 2


def test_svg_rejects_empty_series():
    with pytest.raises(ChartError):
        write_svg_chart([], 'nothing')


def test_svg_rejects_mismatched_times():
    with pytest.raises(ChartError):
        write_svg_chart([('S', [0.0, 1.0], [1.0, 2.0]), ('I', [0.0, 2.0], [1.0, 2.0])], 'bad')


def test_svg_rejects_non_finite_values():
    with pytest.raises(ChartError):
        write_svg_chart([('S', [0.0, 1.0], [1.0, np.nan])], 'bad')

