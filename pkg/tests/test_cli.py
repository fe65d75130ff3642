# tests/test_cli.py
import json
import math

import numpy as np
import pandas as pd
import pytest

from scripts.cli import json_ready, main


def write_config(tmp_path, text, name='run.ini'):
    path = tmp_path / name
    path.write_text(text, encoding='utf-8')
    return str(path)


def output_section(tmp_path):
    return f"""
[output]
orbit = {tmp_path / 'orbit.csv'}
full_trace = {tmp_path / 'trace.csv'}
metrics = {tmp_path / 'metrics.json'}
prediction = {tmp_path / 'prediction.json'}
study = {tmp_path / 'study.csv'}
slopes = {tmp_path / 'slopes.csv'}
optimize = {tmp_path / 'optimize.json'}
wavecheck = {tmp_path / 'wavecheck.json'}
"""


def read_json(path):
    with open(path, encoding='utf-8') as handle:
        return json.load(handle)


def test_predict_asymmetric(tmp_path):
    cfg = write_config(tmp_path, "[model]\ng_x = -2\ng_v = -2\n[simulation]\nn_agents = 400\n")
    out = tmp_path / 'prediction.json'
    assert main(['predict', '--config', cfg, '--out', str(out)]) == 0
    doc = read_json(out)
    assert doc['period'] == pytest.approx(2262.74, abs=1e-2)
    assert doc['c_plus'] == pytest.approx(1 + math.sqrt(2), abs=1e-12)
    assert doc['A'][0] == pytest.approx(-165.685, abs=1e-3)
    assert len(doc['T_cross']) == 6
    assert doc['classification']['category'] == 'attenuating_traveling_wave'
    assert doc['time_scale'] == pytest.approx(math.sqrt(2))


def test_predict_symmetric_energy_index_is_inf(tmp_path):
    cfg = write_config(tmp_path, "[model]\ng_x = -2\ng_v = -2\nrho_v_minus = -0.5\nrho_v_plus = -0.5\n")
    out = tmp_path / 'prediction.json'
    assert main(['predict', '--config', cfg, '--out', str(out)]) == 0
    assert read_json(out)['I_E'] == 'inf'


def test_predict_reports_violated_condition(tmp_path):
    cfg = write_config(tmp_path, "[model]\nrho_x_minus = -0.6\nrho_x_plus = -0.4\n")
    out = tmp_path / 'prediction.json'
    assert main(['predict', '--config', cfg, '--out', str(out)]) == 2
    doc = read_json(out)
    assert doc['error'] == 'not_normalizable'
    assert "ρ_{x,-1}=ρ_{x,1}" in doc['violated']


def test_json_round_trips(tmp_path):
    cfg = write_config(tmp_path, "[model]\ng_x = -2\ng_v = -2\n")
    out = tmp_path / 'prediction.json'
    main(['predict', '--config', cfg, '--out', str(out)])
    text = out.read_text(encoding='utf-8')
    again = json.dumps(json.loads(text), indent=2, sort_keys=True, ensure_ascii=False) + '\n'
    assert again == text


def test_json_ready_formats_numbers():
    assert json_ready(1 / 3) == float('0.333333333333333')
    assert json_ready(math.inf) == 'inf'
    assert json_ready((np.float64(2.0), np.int64(3))) == [2.0, 3]


def test_simulate_zero_velocity_is_flat_and_deterministic(tmp_path):
    cfg = write_config(tmp_path, "[leader]\nv0 = 0\n[simulation]\nn_agents = 10\nt_end = 50\n"
                       + output_section(tmp_path))
    assert main(['simulate', '--config', cfg]) == 0
    first = (tmp_path / 'orbit.csv').read_bytes()
    orbit = pd.read_csv(tmp_path / 'orbit.csv', comment='#')
    assert list(orbit.columns) == ['t', 'y']
    assert (orbit['y'] == 0).all()
    assert main(['simulate', '--config', cfg]) == 0
    assert (tmp_path / 'orbit.csv').read_bytes() == first


def test_simulate_full_trace(tmp_path):
    cfg = write_config(tmp_path, "[simulation]\nn_agents = 12\nt_end = 40\n" + output_section(tmp_path))
    assert main(['simulate', '--config', cfg, '--full-trace']) == 0
    trace = pd.read_csv(tmp_path / 'trace.csv')
    assert list(trace.columns) == ['t', 'agent_index', 'position_rel_leader']
    assert set(trace['agent_index']) == {4, 8, 12}


def test_metrics_on_sine(tmp_path):
    t = np.arange(0.0, 4 * math.pi + 0.01, 1e-3)
    pd.DataFrame({'t': t, 'y': np.sin(t)}).to_csv(tmp_path / 'sine.csv', index=False)
    out = tmp_path / 'metrics.json'
    assert main(['metrics', '--orbit', str(tmp_path / 'sine.csv'), '--out', str(out)]) == 0
    doc = read_json(out)
    np.testing.assert_allclose(doc['T_cross'], [math.pi * k for k in range(1, 5)], atol=1e-4)
    assert doc['complete'] is True


def test_metrics_without_features_exits_4(tmp_path):
    t = np.linspace(0.0, 10.0, 101)
    pd.DataFrame({'t': t, 'y': t}).to_csv(tmp_path / 'ramp.csv', index=False)
    out = tmp_path / 'metrics.json'
    assert main(['metrics', '--orbit', str(tmp_path / 'ramp.csv'), '--out', str(out)]) == 4
    assert read_json(out)['complete'] is False


def test_invalid_config_exits_2(tmp_path):
    cfg = write_config(tmp_path, "[model]\nunknown = 1\n")
    assert main(['predict', '--config', cfg]) == 2


def test_optimize(tmp_path):
    out = tmp_path / 'optimize.json'
    assert main(['optimize', '--out', str(out)]) == 0
    doc = read_json(out)
    assert doc['I_E'] == pytest.approx(0.17678, abs=1e-5)
    assert doc['admissible'] is True


def test_tiny_study(tmp_path):
    cfg = write_config(tmp_path, "[study]\nn_list = 20, 30\nboundaries = regular\n"
                       "rho_v1_list = 0\ng_v_list = -1\n" + output_section(tmp_path))
    assert main(['study', '--config', cfg, '--workers', '1']) == 0
    study = pd.read_csv(tmp_path / 'study.csv')
    assert list(study['N']) == [20, 30]
    assert (tmp_path / 'slopes.csv').exists()


@pytest.mark.slow
def test_simulate_asymmetric_trough(tmp_path):
    cfg = write_config(tmp_path, "[model]\ng_x = -2\ng_v = -2\n[simulation]\nn_agents = 400\n"
                       + output_section(tmp_path))
    assert main(['simulate', '--config', cfg]) == 0
    orbit = pd.read_csv(tmp_path / 'orbit.csv', comment='#')
    assert orbit['y'].min() == pytest.approx(-165.69, rel=0.03)


@pytest.mark.slow
def test_wavecheck_report(tmp_path):
    out = tmp_path / 'wavecheck.json'
    assert main(['wavecheck', '--out', str(out)]) == 0
    doc = read_json(out)
    assert doc['err_c_plus'] < 0.03
    assert doc['err_c_minus'] < 0.03
    assert doc['residual'] < 0.05
