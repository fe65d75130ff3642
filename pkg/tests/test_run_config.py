# tests/test_run_config.py
import pytest

from config import DATA_PATHS, MODEL_DEFAULTS, STUDY_CONFIG
from scripts.exceptions import ConfigurationError
from scripts.model import BoundaryKind, LeaderKind
from scripts.run_config import load_run_config, parse_float, parse_int


def write_config(tmp_path, text):
    path = tmp_path / 'run.ini'
    path.write_text(text)
    return str(path)


def test_defaults_without_file():
    cfg = load_run_config(None)
    assert cfg.params.g_x == MODEL_DEFAULTS['g_x']
    assert cfg.params.rho_v == MODEL_DEFAULTS['rho_v']
    assert cfg.boundary.kind is BoundaryKind.REGULAR
    assert cfg.leader.kind is LeaderKind.RAMP
    assert cfg.n_agents == MODEL_DEFAULTS['n_agents']
    assert cfg.t_end is None
    assert cfg.study.max_n == STUDY_CONFIG['large_n'] - 1
    assert cfg.output == DATA_PATHS


def test_sections_override_defaults(tmp_path):
    cfg = load_run_config(write_config(tmp_path, """
[model]
g_x = -2
g_v = -2.0
rho_v_minus = -1.0
rho_v_plus = 0

[boundary]
kind = variable_mass

[leader]
kind = pulse
epsilon = 2.5

[simulation]
n_agents = 400
t_end = 1e3

[study]
n_list = 100, 200
rho_v1_list = 0, -0.5

[output]
orbit = out/orbit.csv
"""))
    assert cfg.params.g_x == -2.0
    assert cfg.boundary.kind is BoundaryKind.VARIABLE_MASS
    assert cfg.leader.kind is LeaderKind.PULSE
    assert cfg.leader.epsilon == 2.5
    assert cfg.n_agents == 400
    assert cfg.t_end == 1000.0
    assert cfg.study.n_list == (100, 200)
    assert cfg.study.rho_v1_list == (0.0, -0.5)
    assert cfg.output['orbit'] == 'out/orbit.csv'
    assert cfg.output['study'] == DATA_PATHS['study']


def test_periodic_boundary_drops_the_leader(tmp_path):
    cfg = load_run_config(write_config(tmp_path, "[boundary]\nkind = periodic\n"))
    assert cfg.leader is None


@pytest.mark.parametrize('text', [
    "[model]\ngain = 1\n",
    "[models]\ng_x = -1\n",
    "[model]\nG_X = -1\n",
    "[model]\ng_x = -1\ng_x = -2\n",
    "[model]\ng_x = minus one\n",
    "[model]\ng_x = inf\n",
    "[model]\ng_x = 1e999\n",
    "[simulation]\nn_agents = 10.5\n",
    "[simulation]\nn_agents = 1\n",
    "[boundary]\nkind = free\n",
    "[boundary]\nkind = custom\n",
    "[study]\nn_list = 100,,200\n",
    "[model]\nrho_x_plus = -0.4\n",
    "[DEFAULT]\ng_x = -1\n",
    "g_x = -1\n",
])
def test_rejected_documents(tmp_path, text):
    with pytest.raises(ConfigurationError):
        load_run_config(write_config(tmp_path, text))


def test_missing_file_is_a_configuration_error(tmp_path):
    with pytest.raises(ConfigurationError):
        load_run_config(str(tmp_path / 'absent.ini'))


def test_literal_parsers():
    assert parse_float(' -2.5e-1 ') == -0.25
    assert parse_float('.5') == 0.5
    assert parse_int('+12') == 12
    for text in ('nan', '0x10', '1_000', ''):
        with pytest.raises(ConfigurationError):
            parse_float(text)
    with pytest.raises(ConfigurationError):
        parse_int('1.0')
