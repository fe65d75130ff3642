# scripts/cli.py
import sys
import os
import math
import json
import argparse
from enum import Enum
from dataclasses import replace

import numpy as np
import pandas as pd

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
from scripts.exceptions import (ConfigurationError, NormalizationError, IntegrationFailure,
                                MetricsError, InsufficientFeaturesError, WaveCheckError)
from scripts.experiments import (run_grid, write_study, write_table, comparison_run,
                                 pulse_check, horizon, trace_frame)
from scripts.integrator import integrate_adaptive
from scripts.metrics import measure, relative_orbit
from scripts.model import (BoundaryKind, LeaderKind, ModelParams, assemble,
                           normalize, normalize_stencils)
from scripts.run_config import load_run_config
from scripts.theory import predict, classify, optimize_energy_index
from scripts.visualizations import FlockVisualizations
from scripts.waves import periodic_initial_condition, run_wave_check

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INTEGRATION = 3
EXIT_FEATURES = 4


def json_ready(value):
    """Plain JSON types; floats to 15 significant digits, infinities as strings"""
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, dict):
        return {str(k): json_ready(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [json_ready(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return None
        if math.isinf(value):
            return 'inf' if value > 0 else '-inf'
        return float(f"{value:.15g}")
    return value


def write_json(document, path):
    os.makedirs(os.path.dirname(path) or '.', exist_ok=True)
    with open(path, 'w', encoding='utf-8') as handle:
        handle.write(json.dumps(json_ready(document), indent=2, sort_keys=True, ensure_ascii=False))
        handle.write('\n')
    print(f"✅ Saved: {path}")
    return path


def cmd_predict(cfg, args):
    out = args.out or cfg.output['prediction']
    try:
        canonical = normalize_stencils(cfg.params)
    except NormalizationError as e:
        write_json({'error': 'not_normalizable', 'violated': e.violated}, out)
        print(f"❌ {e}")
        return EXIT_CONFIG

    k_max = cfg.simulation['k_max']
    v0 = cfg.leader.v0 if cfg.leader is not None else 1.0
    prediction = predict(canonical, cfg.n_agents, v0=v0, k_max=k_max)
    stability = classify(cfg.params)
    _, time_scale = normalize(cfg.params)
    write_json({
        'N': cfg.n_agents,
        'v0': v0,
        'c_plus': prediction.c_plus,
        'c_minus': prediction.c_minus,
        'u': prediction.u,
        'T_cross': prediction.T_cross,
        'A': prediction.A,
        'period': prediction.period,
        'attenuation': prediction.attenuation,
        'I_E': prediction.I_E,
        'classification': {
            'category': stability.category,
            'attenuation': stability.attenuation,
            'flock_stable_symmetric_family': stability.flock_stable_symmetric_family,
        },
        'time_scale': time_scale,
    }, out)
    return EXIT_OK


def _simulation_span(cfg):
    if cfg.leader is not None and cfg.leader.kind is LeaderKind.PULSE:
        t0 = -cfg.leader.epsilon
    else:
        t0 = 0.0
    if cfg.t_end:
        return t0, cfg.t_end
    try:
        return t0, horizon(cfg.params, cfg.n_agents, cfg.simulation['horizon_factor'])
    except NormalizationError as e:
        raise ConfigurationError(f"set [simulation] t_end explicitly: {e}")


def cmd_simulate(cfg, args):
    system = assemble(cfg.params, cfg.boundary, cfg.leader, cfg.n_agents)
    t_span = _simulation_span(cfg)
    state = None
    if cfg.boundary.kind is BoundaryKind.PERIODIC:
        state = periodic_initial_condition(cfg.n_agents, cfg.wavecheck['width'],
                                           cfg.wavecheck['amplitude'])
    integrator = cfg.integrator
    if args.full_trace:
        integrator = replace(integrator, snapshot_every=cfg.simulation['trace_time_stride'])

    print(f"🚀 Simulating N={cfg.n_agents} on t in [{t_span[0]:g}, {t_span[1]:g}]")
    traj = integrate_adaptive(system, t_span, integrator, state)
    orbit = pd.DataFrame({'t': traj.times, 'y': relative_orbit(traj)})
    out = args.out or cfg.output['orbit']
    write_table(orbit, out)
    print(f"✅ Saved {len(orbit)} samples to {out}")

    if args.full_trace:
        trace_out = cfg.output['full_trace']
        write_table(trace_frame(system, traj, cfg.simulation['trace_agent_stride']), trace_out)
        print(f"✅ Saved full trace to {trace_out}")

    if not traj.ok:
        with open(out, 'a', encoding='utf-8') as handle:
            handle.write(f"# status: integration_failed at t={traj.failure.last_time:.15g}\n")
        print(f"❌ {traj.failure}")
        return EXIT_INTEGRATION
    return EXIT_OK


def cmd_metrics(cfg, args):
    source = args.orbit or cfg.output['orbit']
    try:
        orbit = pd.read_csv(source, comment='#')
    except (OSError, pd.errors.ParserError) as e:
        raise ConfigurationError(f"cannot read orbit CSV {source}: {e}")
    if list(orbit.columns) != ['t', 'y']:
        raise ConfigurationError(f"orbit CSV must have header t,y, got {','.join(orbit.columns)}")

    metrics = measure(orbit['t'].to_numpy(), orbit['y'].to_numpy())
    write_json(metrics.as_dict(), args.out or cfg.output['metrics'])
    print(f"📊 {len(metrics.T_cross)} crossings, {len(metrics.A)} extrema")
    if not metrics.complete:
        raise InsufficientFeaturesError("fewer than three crossings or extrema: period/attenuation undefined")
    return EXIT_OK


def cmd_study(cfg, args):
    study = cfg.study
    if args.include_n3200:
        study = replace(study, max_n=None)
    print(f"🚀 Running study grid ({len(study.points())} points)...")
    print("=" * 60)
    rows = run_grid(study, workers=args.workers)
    report = write_study(rows, args.out or cfg.output['study'], cfg.output['slopes'])

    statuses = pd.Series([r.status for r in rows]).value_counts()
    print("\n📊 Run status:")
    for status, count in statuses.items():
        print(f"  {status}: {count}")
    print("📊 Median log-log slopes:")
    for quantity, slope in report.medians.items():
        print(f"  {quantity}: {slope:.3f}")
    if report.omitted:
        print(f"  {len(report.omitted)} parameter points omitted (fewer than 3 successful N)")
    print("=" * 60)
    return EXIT_OK


def cmd_wavecheck(cfg, args):
    w = cfg.wavecheck
    params = ModelParams.canonical(w['g_x'], w['g_v'], w['rho_v1'])
    print(f"🚀 Wave check on the periodic ring, N={w['n_agents']}")
    report = run_wave_check(params, n_agents=w['n_agents'], width=w['width'],
                            amplitude=w['amplitude'], integrator=cfg.integrator,
                            window_fraction=w['window_fraction'], snapshots=w['snapshots'],
                            passes=w['passes'],
                            residual_width_fraction=w['residual_width_fraction'])
    write_json(report.as_dict(), args.out or cfg.output['wavecheck'])
    print(f"📊 c+ {report.c_plus_emp:.4f} (pred {report.c_plus_pred:.4f}), "
          f"c- {report.c_minus_emp:.4f} (pred {report.c_minus_pred:.4f}), residual {report.residual:.4f}")
    return EXIT_OK


def cmd_optimize(cfg, args):
    o = cfg.optimize
    optimum = optimize_energy_index(o['g_x'], o['g_v'], o['rho_v1_min'], o['rho_v1_max'], o['tol'])
    write_json({
        'g_x': o['g_x'], 'g_v': o['g_v'],
        'range': [o['rho_v1_min'], o['rho_v1_max']],
        'rho_v1': optimum.rho_v1,
        'I_E': optimum.I_E,
        'attenuation': optimum.attenuation,
        'admissible': optimum.admissible,
    }, args.out or cfg.output['optimize'])
    print(f"📊 rho_v1* = {optimum.rho_v1:.6f}, I_E* = {optimum.I_E:.6f}")
    return EXIT_OK


def cmd_compare(cfg, args):
    table, _ = comparison_run(args.out or cfg.output['comparison'], integrator=cfg.integrator)
    print("\n📊 Symmetric vs asymmetric coupling:")
    print(table[['rho_v1', 'A1_meas', 'A1_pred', 'T_meas', 'T_pred',
                 'alpha_meas', 'alpha_pred']].to_string(index=False))
    return EXIT_OK


def cmd_pulsecheck(cfg, args):
    print(f"🚀 Pulse-train check, N={cfg.pulsecheck['n_agents']}")
    report = pulse_check(cfg.pulsecheck, integrator=cfg.integrator)
    write_json(report.as_dict(), args.out or cfg.output['pulsecheck'])
    print(f"📊 arrival {report.arrival_meas:.2f} (pred {report.arrival_pred:.2f}), "
          f"burst ratio {report.ratio_meas:.4f} (pred {report.ratio_pred:.4f})")
    return EXIT_OK


def cmd_plot(cfg, args):
    viz = FlockVisualizations(args.out or cfg.output['figures'])
    viz.generate_all_visualizations(cfg.output)
    return EXIT_OK


COMMANDS = {
    'predict': (cmd_predict, "closed-form transient prediction (JSON)"),
    'simulate': (cmd_simulate, "integrate the array and write the relative orbit (CSV)"),
    'metrics': (cmd_metrics, "extract crossings and extrema from an orbit CSV (JSON)"),
    'study': (cmd_study, "run the validation grid and convergence slopes (CSV)"),
    'wavecheck': (cmd_wavecheck, "track traveling pulses on the periodic ring (JSON)"),
    'optimize': (cmd_optimize, "minimize the energy index over rho_v1 (JSON)"),
    'compare': (cmd_compare, "symmetric vs asymmetric coupling traces and table (CSV)"),
    'pulsecheck': (cmd_pulsecheck, "compare leader-pulse bursts with the pulse train (JSON)"),
    'plot': (cmd_plot, "plot existing result files (PNG)"),
}


def build_parser():
    parser = argparse.ArgumentParser(prog='flock', description="Transients of 1-D oscillator arrays")
    subparsers = parser.add_subparsers(dest='command', required=True)
    for name, (_, help_text) in COMMANDS.items():
        sub = subparsers.add_parser(name, help=help_text)
        sub.add_argument('--config', help="INI run configuration (defaults when omitted)")
        sub.add_argument('--out', help="output path overriding the configured one")
        if name == 'simulate':
            sub.add_argument('--full-trace', action='store_true',
                             help="also write decimated per-agent positions")
        if name == 'metrics':
            sub.add_argument('--orbit', help="orbit CSV to analyze (t,y)")
        if name == 'study':
            sub.add_argument('--workers', type=int, default=os.cpu_count(),
                             help="worker processes (default: available cores)")
            sub.add_argument('--include-n3200', action='store_true',
                             help="also run the largest-N rows")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    handler, _ = COMMANDS[args.command]
    try:
        cfg = load_run_config(args.config)
        return handler(cfg, args)
    except ConfigurationError as e:
        print(f"❌ Invalid configuration: {e}")
        return EXIT_CONFIG
    except IntegrationFailure as e:
        print(f"❌ Integration failed: {e}")
        return EXIT_INTEGRATION
    except (MetricsError, WaveCheckError) as e:
        print(f"❌ {e}")
        return EXIT_FEATURES


if __name__ == "__main__":
    sys.exit(main())
