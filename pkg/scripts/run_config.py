# scripts/run_config.py
import sys
import os
import re
import math
import configparser
from dataclasses import dataclass, field

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
from config import (MODEL_DEFAULTS, INTEGRATOR_CONFIG, SIMULATION_CONFIG, STUDY_CONFIG,
                    WAVECHECK_CONFIG, PULSE_CONFIG, OPTIMIZE_CONFIG, DATA_PATHS)
from scripts.exceptions import ConfigurationError
from scripts.experiments import StudyConfig
from scripts.integrator import IntegratorConfig
from scripts.model import BoundaryKind, BoundarySpec, LeaderInput, LeaderKind, ModelParams

FLOAT_LITERAL = re.compile(r'[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?')
INT_LITERAL = re.compile(r'[+-]?\d+')


def parse_float(text):
    text = text.strip()
    if not FLOAT_LITERAL.fullmatch(text):
        raise ConfigurationError(f"expected a decimal number, got '{text}'")
    value = float(text)
    if not math.isfinite(value):
        raise ConfigurationError(f"number out of range: '{text}'")
    return value


def parse_int(text):
    text = text.strip()
    if not INT_LITERAL.fullmatch(text):
        raise ConfigurationError(f"expected an integer, got '{text}'")
    return int(text)


def _list_of(parse):
    def parse_list(text):
        items = [item for item in text.split(',')]
        if not text.strip() or any(not item.strip() for item in items):
            raise ConfigurationError(f"expected a comma separated list, got '{text}'")
        return tuple(parse(item) for item in items)
    return parse_list


def _choice(*names):
    def parse_choice(text):
        text = text.strip()
        if text not in names:
            raise ConfigurationError(f"'{text}' is not one of: {', '.join(names)}")
        return text
    return parse_choice


def parse_path(text):
    text = text.strip()
    if not text:
        raise ConfigurationError("empty path")
    return text


BOUNDARY_NAMES = tuple(k.value for k in BoundaryKind)
LEADER_NAMES = tuple(k.value for k in LeaderKind)

# section -> key -> (parser, default)
SCHEMA = {
    'model': {
        'g_x': (parse_float, MODEL_DEFAULTS['g_x']),
        'g_v': (parse_float, MODEL_DEFAULTS['g_v']),
        'rho_x_minus': (parse_float, MODEL_DEFAULTS['rho_x'][0]),
        'rho_x_zero': (parse_float, MODEL_DEFAULTS['rho_x'][1]),
        'rho_x_plus': (parse_float, MODEL_DEFAULTS['rho_x'][2]),
        'rho_v_minus': (parse_float, MODEL_DEFAULTS['rho_v'][0]),
        'rho_v_zero': (parse_float, MODEL_DEFAULTS['rho_v'][1]),
        'rho_v_plus': (parse_float, MODEL_DEFAULTS['rho_v'][2]),
    },
    'boundary': {
        'kind': (_choice(*BOUNDARY_NAMES), MODEL_DEFAULTS['boundary']),
        'beta_x': (parse_float, None),
        'beta_v': (parse_float, None),
    },
    'leader': {
        'kind': (_choice(*LEADER_NAMES), MODEL_DEFAULTS['leader']),
        'v0': (parse_float, MODEL_DEFAULTS['v0']),
        'epsilon': (parse_float, MODEL_DEFAULTS['pulse_epsilon']),
    },
    'simulation': {
        'n_agents': (parse_int, MODEL_DEFAULTS['n_agents']),
        'horizon_factor': (parse_float, SIMULATION_CONFIG['horizon_factor']),
        't_end': (parse_float, 0.0),  # 0 -> horizon_factor * N * (1/c_+ - 1/c_-)
        'k_max': (parse_int, SIMULATION_CONFIG['k_max']),
        'trace_agent_stride': (parse_int, SIMULATION_CONFIG['trace_agent_stride']),
        'trace_time_stride': (parse_int, SIMULATION_CONFIG['trace_time_stride']),
    },
    'integrator': {
        'rel_tol': (parse_float, INTEGRATOR_CONFIG['rel_tol']),
        'abs_tol': (parse_float, INTEGRATOR_CONFIG['abs_tol']),
        'initial_step': (parse_float, INTEGRATOR_CONFIG['initial_step']),
        'max_step': (parse_float, INTEGRATOR_CONFIG['max_step']),
        'sample_points': (parse_int, INTEGRATOR_CONFIG['sample_points']),
        'sample_dt': (parse_float, 0.0),  # 0 -> span / sample_points
    },
    'study': {
        'n_list': (_list_of(parse_int), STUDY_CONFIG['n_list']),
        'boundaries': (_list_of(_choice('variable_mass', 'regular')), STUDY_CONFIG['boundaries']),
        'rho_v1_list': (_list_of(parse_float), STUDY_CONFIG['rho_v1_list']),
        'g_v_list': (_list_of(parse_float), STUDY_CONFIG['g_v_list']),
        'g_x': (parse_float, STUDY_CONFIG['g_x']),
        'v0': (parse_float, STUDY_CONFIG['v0']),
        'horizon_factor': (parse_float, STUDY_CONFIG['horizon_factor']),
        'large_n': (parse_int, STUDY_CONFIG['large_n']),
    },
    'wavecheck': {
        'n_agents': (parse_int, WAVECHECK_CONFIG['n_agents']),
        'g_x': (parse_float, WAVECHECK_CONFIG['g_x']),
        'g_v': (parse_float, WAVECHECK_CONFIG['g_v']),
        'rho_v1': (parse_float, WAVECHECK_CONFIG['rho_v1']),
        'width': (parse_int, WAVECHECK_CONFIG['width']),
        'amplitude': (parse_float, WAVECHECK_CONFIG['amplitude']),
        'window_fraction': (parse_float, WAVECHECK_CONFIG['window_fraction']),
        'snapshots': (parse_int, WAVECHECK_CONFIG['snapshots']),
        'passes': (parse_int, WAVECHECK_CONFIG['passes']),
        'residual_width_fraction': (parse_float, WAVECHECK_CONFIG['residual_width_fraction']),
    },
    'pulsecheck': {
        'n_agents': (parse_int, PULSE_CONFIG['n_agents']),
        'g_x': (parse_float, PULSE_CONFIG['g_x']),
        'g_v': (parse_float, PULSE_CONFIG['g_v']),
        'rho_v1': (parse_float, PULSE_CONFIG['rho_v1']),
        'v0': (parse_float, PULSE_CONFIG['v0']),
        'epsilon': (parse_float, PULSE_CONFIG['epsilon']),
        'boundary': (_choice('variable_mass', 'regular'), PULSE_CONFIG['boundary']),
    },
    'optimize': {
        'g_x': (parse_float, OPTIMIZE_CONFIG['g_x']),
        'g_v': (parse_float, OPTIMIZE_CONFIG['g_v']),
        'rho_v1_min': (parse_float, OPTIMIZE_CONFIG['rho_v1_min']),
        'rho_v1_max': (parse_float, OPTIMIZE_CONFIG['rho_v1_max']),
        'tol': (parse_float, OPTIMIZE_CONFIG['tol']),
    },
    'output': {name: (parse_path, path) for name, path in DATA_PATHS.items()},
}


@dataclass(frozen=True)
class RunConfig:
    params: ModelParams
    boundary: BoundarySpec
    leader: LeaderInput
    n_agents: int
    simulation: dict
    integrator: IntegratorConfig
    study: StudyConfig
    wavecheck: dict
    pulsecheck: dict
    optimize: dict
    output: dict = field(default_factory=lambda: dict(DATA_PATHS))

    @property
    def t_end(self):
        return self.simulation['t_end'] or None


def read_sections(path=None):
    """Raw values per section, defaults filled in; unknown sections or keys are rejected"""
    values = {section: {key: default for key, (_, default) in keys.items()}
              for section, keys in SCHEMA.items()}
    if path is None:
        return values

    parser = configparser.ConfigParser(interpolation=None, strict=True)
    parser.optionxform = str
    try:
        with open(path, encoding='utf-8') as handle:
            parser.read_file(handle)
    except OSError as e:
        raise ConfigurationError(f"cannot read config {path}: {e}")
    except configparser.Error as e:
        raise ConfigurationError(f"malformed config {path}: {e}")

    if parser.defaults():
        raise ConfigurationError("[DEFAULT] section is not supported")
    for section in parser.sections():
        if section not in SCHEMA:
            raise ConfigurationError(f"unknown section [{section}]")
        for key, text in parser.items(section):
            if key not in SCHEMA[section]:
                raise ConfigurationError(f"unknown key '{key}' in [{section}]")
            parse, _ = SCHEMA[section][key]
            try:
                values[section][key] = parse(text)
            except ConfigurationError as e:
                raise ConfigurationError(f"[{section}] {key}: {e}")
    return values


def load_run_config(path=None):
    """Parse an INI run configuration (None -> documented defaults)"""
    v = read_sections(path)
    m, b, l, s, i = v['model'], v['boundary'], v['leader'], v['simulation'], v['integrator']

    params = ModelParams(
        g_x=m['g_x'], g_v=m['g_v'],
        rho_x=(m['rho_x_minus'], m['rho_x_zero'], m['rho_x_plus']),
        rho_v=(m['rho_v_minus'], m['rho_v_zero'], m['rho_v_plus']),
    ).check()
    boundary = BoundarySpec.from_name(b['kind'], b['beta_x'], b['beta_v'])
    if boundary.kind is BoundaryKind.PERIODIC:
        leader = None
    elif l['kind'] == LeaderKind.PULSE.value:
        leader = LeaderInput.pulse(l['v0'], l['epsilon'])
    else:
        leader = LeaderInput.ramp(l['v0'])

    if s['n_agents'] < 2:
        raise ConfigurationError("[simulation] n_agents must be at least 2")
    if s['t_end'] < 0 or s['horizon_factor'] <= 0:
        raise ConfigurationError("[simulation] t_end must be >= 0 and horizon_factor > 0")
    if min(s['k_max'], s['trace_agent_stride'], s['trace_time_stride']) < 1:
        raise ConfigurationError("[simulation] k_max and trace strides must be at least 1")

    integrator = IntegratorConfig(
        rel_tol=i['rel_tol'], abs_tol=i['abs_tol'],
        initial_step=i['initial_step'], max_step=i['max_step'],
        sample_points=i['sample_points'], sample_dt=i['sample_dt'] or None,
    ).check()

    st = v['study']
    study = StudyConfig(
        n_list=st['n_list'], boundaries=st['boundaries'],
        rho_v1_list=st['rho_v1_list'], g_v_list=st['g_v_list'],
        g_x=st['g_x'], v0=st['v0'], horizon_factor=st['horizon_factor'],
        integrator=integrator, max_n=st['large_n'] - 1,
    ).check()

    return RunConfig(params=params, boundary=boundary, leader=leader, n_agents=s['n_agents'],
                     simulation=s, integrator=integrator, study=study,
                     wavecheck=v['wavecheck'], pulsecheck=v['pulsecheck'],
                     optimize=v['optimize'], output=v['output'])
