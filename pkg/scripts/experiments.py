# scripts/experiments.py
import sys
import os
import math
import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace, asdict

import numpy as np
import pandas as pd
from scipy.integrate import trapezoid
from tqdm import tqdm  # For progress bar

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
from config import (STUDY_CONFIG, SIMULATION_CONFIG, COMPARISON_CONFIG, PULSE_CONFIG,
                    METRICS_CONFIG, DATA_PATHS, FLOAT_FORMAT)
from scripts.exceptions import ConfigurationError, FlockError
from scripts.integrator import IntegratorConfig, integrate_adaptive
from scripts.metrics import measure, relative_orbit, relative_error
from scripts.model import (BoundaryKind, BoundarySpec, LeaderInput, ModelParams,
                           assemble, normalize_stencils)
from scripts.theory import predict, signal_velocities, burst_integrals

STUDY_COLUMNS = ['N', 'boundary', 'rho_v1', 'g_v', 'A1_meas', 'A1_pred', 'T_meas', 'T_pred',
                 'alpha_meas', 'alpha_pred', 'err_A1', 'err_T', 'err_alpha', 'status']
SLOPE_COLUMNS = ['boundary', 'rho_v1', 'g_v', 'slope_A1', 'slope_T', 'slope_alpha']
TRACE_COLUMNS = ['t', 'agent_index', 'position_rel_leader']

# quantity -> (error column of StudyRow, slope column)
QUANTITIES = {
    'A1': ('err_A1', 'slope_A1'),
    'T': ('err_T', 'slope_T'),
    'alpha': ('err_alpha', 'slope_alpha'),
}


@dataclass(frozen=True)
class StudyConfig:
    n_list: tuple = STUDY_CONFIG['n_list']
    boundaries: tuple = STUDY_CONFIG['boundaries']
    rho_v1_list: tuple = STUDY_CONFIG['rho_v1_list']
    g_v_list: tuple = STUDY_CONFIG['g_v_list']
    g_x: float = STUDY_CONFIG['g_x']
    v0: float = STUDY_CONFIG['v0']
    horizon_factor: float = STUDY_CONFIG['horizon_factor']
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    # rows with N above max_n are emitted with status 'skipped'
    max_n: int = None

    def check(self):
        if not (self.g_x < 0 and all(g < 0 for g in self.g_v_list)):
            raise ConfigurationError("study needs g_x < 0 and every g_v < 0")
        if not all(int(n) == n and n >= 2 for n in self.n_list):
            raise ConfigurationError("every N in the study must be an integer >= 2")
        for name in self.boundaries:
            if BoundarySpec.from_name(name).kind is BoundaryKind.PERIODIC:
                raise ConfigurationError("the study grid runs with a leader, periodic is not allowed")
        if not self.horizon_factor > 0:
            raise ConfigurationError("horizon_factor must be positive")
        self.integrator.check()
        return self

    def points(self):
        """Grid points in (N, boundary, rho_v1, g_v) order"""
        return list(itertools.product(sorted(self.n_list), sorted(self.boundaries),
                                      sorted(self.rho_v1_list), sorted(self.g_v_list)))


@dataclass(frozen=True)
class StudyRow:
    N: int
    boundary: str
    rho_v1: float
    g_v: float
    A1_meas: float = None
    A1_pred: float = None
    T_meas: float = None
    T_pred: float = None
    alpha_meas: float = None
    alpha_pred: float = None
    err_A1: float = None
    err_T: float = None
    err_alpha: float = None
    status: str = 'ok'

    @property
    def key(self):
        return (self.N, self.boundary, self.rho_v1, self.g_v)


@dataclass
class TransientRun:
    system: object
    prediction: object
    trajectory: object
    metrics: object
    horizon: float


@dataclass
class SlopeReport:
    table: pd.DataFrame
    medians: dict
    per_boundary: dict
    omitted: list


@dataclass(frozen=True)
class PulseCheckReport:
    n_agents: int
    arrival_meas: float
    arrival_pred: float
    err_arrival: float
    burst_integrals_meas: tuple
    burst_integrals_pred: tuple
    ratio_meas: float
    ratio_pred: float
    err_ratio: float

    def as_dict(self):
        return asdict(self)


def horizon(params, n_agents, horizon_factor=SIMULATION_CONFIG['horizon_factor']):
    """h * N * (1/c_+ - 1/c_-) in the time units of params"""
    velocities = signal_velocities(normalize_stencils(params))
    return horizon_factor * n_agents * velocities.slowness


def run_transient(params, boundary, n_agents, v0=1.0, horizon_factor=SIMULATION_CONFIG['horizon_factor'],
                  integrator=None, t_end=None, k_max=SIMULATION_CONFIG['k_max'], snapshot_every=None,
                  ripple_fraction=METRICS_CONFIG['ripple_fraction']):
    """Ramp-driven run of S_N with its closed-form prediction and measured transient"""
    system = assemble(params, boundary, LeaderInput.ramp(v0), n_agents)
    canonical = normalize_stencils(params)
    prediction = predict(canonical, n_agents, v0=v0, k_max=k_max)
    t1 = t_end if t_end else horizon(params, n_agents, horizon_factor)
    config = integrator or IntegratorConfig()
    if snapshot_every is not None:
        config = replace(config, snapshot_every=snapshot_every)
    traj = integrate_adaptive(system, (0.0, t1), config)
    metrics = measure(traj.times, relative_orbit(traj), ripple_fraction)
    return TransientRun(system, prediction, traj, metrics, t1)


def _run_point(task):
    """One study row; module level so worker processes can pickle it"""
    (n_agents, boundary, rho_v1, g_v), config, skip = task
    row = StudyRow(N=int(n_agents), boundary=boundary, rho_v1=float(rho_v1), g_v=float(g_v))
    params = ModelParams.canonical(config.g_x, g_v, rho_v1)
    prediction = predict(params, n_agents, v0=config.v0, k_max=SIMULATION_CONFIG['k_max'])
    row = replace(row, A1_pred=prediction.A[0], T_pred=prediction.period,
                  alpha_pred=prediction.attenuation)
    if skip:
        return replace(row, status='skipped')

    try:
        run = run_transient(params, BoundarySpec.from_name(boundary), n_agents, config.v0,
                            config.horizon_factor, config.integrator)
    except FlockError:
        return replace(row, status='integration_failed')
    if not run.trajectory.ok:
        return replace(row, status='integration_failed')

    m = run.metrics
    row = replace(row, A1_meas=m.A1, T_meas=m.period, alpha_meas=m.attenuation)
    if not m.complete:
        return replace(row, status='insufficient_features')
    return replace(row,
                   err_A1=relative_error(m.A1, row.A1_pred),
                   err_T=relative_error(m.period, row.T_pred),
                   err_alpha=relative_error(m.attenuation, row.alpha_pred))


def run_grid(config=None, workers=None, progress=True):
    """
    Run every grid point (in any order) and return the rows sorted by
    (N, boundary, rho_v1, g_v). Failed runs are rows with a status.
    """
    config = (config or StudyConfig()).check()
    # 1. Build the task list, flagging points above max_n
    tasks = [(point, config, config.max_n is not None and point[0] > config.max_n)
             for point in config.points()]

    # 2. Run serially or on the process pool
    if workers == 1:
        rows = [_run_point(t) for t in tqdm(tasks, desc="Study grid", disable=not progress)]
    else:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            rows = list(tqdm(executor.map(_run_point, tasks), total=len(tasks),
                             desc="Study grid", disable=not progress))
    # 3. Deterministic row order
    return sorted(rows, key=lambda r: r.key)


def study_frame(rows):
    return pd.DataFrame([asdict(r) for r in rows], columns=STUDY_COLUMNS)


def _log_log_slope(ns, errors):
    ns = np.asarray(ns, dtype=float)
    errors = np.asarray(errors, dtype=float)
    keep = np.isfinite(errors) & (errors > 0)
    if np.unique(ns[keep]).size < 2:
        return math.nan
    slope, _ = np.polyfit(np.log(ns[keep]), np.log(errors[keep]), 1)
    return float(slope)


def convergence_slopes(rows, min_distinct_n=3):
    """
    Least-squares slope of log(relative error) vs log(N) per parameter point
    and quantity, with the medians over the grid and per boundary kind.
    """
    groups = {}
    for row in rows:
        groups.setdefault((row.boundary, row.rho_v1, row.g_v), []).append(row)

    records, omitted = [], []
    for key in sorted(groups):
        ok = [r for r in groups[key] if r.status == 'ok']
        if len({r.N for r in ok}) < min_distinct_n:
            omitted.append(key)
            continue
        record = dict(zip(('boundary', 'rho_v1', 'g_v'), key))
        for err_name, slope_name in QUANTITIES.values():
            record[slope_name] = _log_log_slope([r.N for r in ok], [getattr(r, err_name) for r in ok])
        records.append(record)

    table = pd.DataFrame(records, columns=SLOPE_COLUMNS)

    def medians(frame):
        return {q: (float(np.nanmedian(frame[col])) if frame[col].notna().any() else math.nan)
                for q, (_, col) in QUANTITIES.items()}

    per_boundary = {b: medians(frame) for b, frame in table.groupby('boundary')}
    return SlopeReport(table=table, medians=medians(table), per_boundary=per_boundary,
                       omitted=omitted)


def write_table(frame, path):
    os.makedirs(os.path.dirname(path) or '.', exist_ok=True)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, na_rep='', lineterminator='\n')
    return path


def write_study(rows, study_path=DATA_PATHS['study'], slopes_path=DATA_PATHS['slopes']):
    """Study and slope tables; returns the SlopeReport"""
    write_table(study_frame(rows), study_path)
    report = convergence_slopes(rows)
    write_table(report.table, slopes_path)
    print(f"✅ Saved {len(rows)} rows to {study_path}")
    print(f"✅ Saved slopes to {slopes_path}")
    return report


def trace_frame(system, traj, agent_stride=SIMULATION_CONFIG['trace_agent_stride']):
    """Positions relative to the leader, long format, for a sampled subset of agents"""
    n = system.n_agents
    agents = np.unique(np.r_[np.arange(agent_stride, n + 1, agent_stride), n])
    z0, _ = system.leader_state(traj.snapshot_times)
    z0 = np.broadcast_to(np.asarray(z0, dtype=float), traj.snapshot_times.shape)
    rel = traj.snapshots[:, agents - 1] - z0[:, None]
    return pd.DataFrame({
        't': np.repeat(traj.snapshot_times, agents.size),
        'agent_index': np.tile(agents, traj.snapshot_times.size),
        'position_rel_leader': rel.ravel(),
    }, columns=TRACE_COLUMNS)


def comparison_run(out_dir=DATA_PATHS['comparison'], integrator=None, settings=None):
    """
    Symmetric vs asymmetric velocity coupling at N=400: per-agent traces and
    a measured/predicted summary table.
    """
    settings = {**COMPARISON_CONFIG, **(settings or {})}
    n = settings['n_agents']
    boundary = BoundarySpec.from_name(settings['boundary'])
    os.makedirs(out_dir, exist_ok=True)

    # 1. Run each coupling and keep its trace
    summary, traces = [], {}
    for rho_v1 in settings['rho_v1_values']:
        print(f"🚀 Comparison run rho_v1={rho_v1:g}, N={n}")
        params = ModelParams.canonical(settings['g_x'], settings['g_v'], rho_v1)
        run = run_transient(params, boundary, n, settings['v0'], integrator=integrator,
                            snapshot_every=SIMULATION_CONFIG['trace_time_stride'])
        if not run.trajectory.ok:
            raise run.trajectory.failure
        m, p = run.metrics, run.prediction
        summary.append({
            'rho_v1': rho_v1,
            'A1_meas': m.A1, 'A1_pred': p.A[0],
            'T_meas': m.period, 'T_pred': p.period,
            'alpha_meas': m.attenuation, 'alpha_pred': p.attenuation,
            'I_E': p.I_E,
            'first_extremum_time': m.t_ext[0] if m.t_ext else None,
            'arrival_pred': n / p.c_plus,
        })
        frame = trace_frame(run.system, run.trajectory)
        path = os.path.join(out_dir, f"trace_rho_v1_{rho_v1:g}.csv")
        write_table(frame, path)
        traces[rho_v1] = frame
        print(f"✅ Saved trace: {path}")

    # 2. Summary table
    table = pd.DataFrame(summary)
    write_table(table, os.path.join(out_dir, 'summary.csv'))
    print(f"✅ Saved summary: {os.path.join(out_dir, 'summary.csv')}")
    return table, traces


def pulse_check(settings=None, integrator=None):
    """
    Drive S_N with the leader pulse and compare the first two bursts at the
    last agent with the closed-form pulse train.
    """
    settings = {**PULSE_CONFIG, **(settings or {})}
    n, eps, v0 = settings['n_agents'], settings['epsilon'], settings['v0']
    params = ModelParams.canonical(settings['g_x'], settings['g_v'], settings['rho_v1'])
    velocities = signal_velocities(params)
    system = assemble(params, BoundarySpec.from_name(settings['boundary']),
                      LeaderInput.pulse(v0, eps), n)

    # 1. Integrate through the first two bursts
    first = n / velocities.c_plus
    spacing = velocities.slowness * n
    t0, t1 = -eps, first + 1.5 * spacing
    base = integrator or IntegratorConfig()
    config = replace(base, max_step=min(base.max_step, eps / 4),
                     initial_step=min(base.initial_step, eps / 4))
    traj = integrate_adaptive(system, (t0, t1), config)
    if not traj.ok:
        raise traj.failure

    # 2. Burst integrals and arrival time at the last agent
    t, z = traj.times, traj['z_N']
    integrals = []
    arrival = None
    for k in range(2):
        center = first + k * spacing
        window = (t >= center - spacing / 2) & (t <= center + spacing / 2)
        integral = float(trapezoid(z[window], t[window]))
        integrals.append(integral)
        if k == 0:
            arrival = float(trapezoid(t[window] * z[window], t[window]) / integral)

    # 3. Compare with the closed form
    predicted = burst_integrals(params, n, v0, k_max=2)
    ratio = integrals[1] / integrals[0]
    return PulseCheckReport(
        n_agents=n,
        arrival_meas=arrival, arrival_pred=first,
        err_arrival=relative_error(arrival, first),
        burst_integrals_meas=tuple(integrals), burst_integrals_pred=tuple(predicted),
        ratio_meas=ratio, ratio_pred=velocities.ratio,
        err_ratio=relative_error(ratio, velocities.ratio),
    )
