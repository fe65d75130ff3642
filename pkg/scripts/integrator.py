# scripts/integrator.py
import sys
import os
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import RK45

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
from config import INTEGRATOR_CONFIG
from scripts.exceptions import ConfigurationError, IntegrationFailure


@dataclass(frozen=True)
class IntegratorConfig:
    rel_tol: float = INTEGRATOR_CONFIG['rel_tol']
    abs_tol: float = INTEGRATOR_CONFIG['abs_tol']
    initial_step: float = INTEGRATOR_CONFIG['initial_step']
    max_step: float = INTEGRATOR_CONFIG['max_step']
    sample_dt: float = None          # None -> span / sample_points
    sample_points: int = INTEGRATOR_CONFIG['sample_points']
    snapshot_every: int = None       # keep full positions every n grid samples

    def check(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ConfigurationError("tolerances must be positive")
        if not (self.initial_step > 0 and self.max_step >= self.initial_step):
            raise ConfigurationError("need max_step >= initial_step > 0")
        if self.sample_dt is not None and not self.sample_dt > 0:
            raise ConfigurationError("sample_dt must be positive")
        if self.sample_points < 1:
            raise ConfigurationError("sample_points must be at least 1")
        if self.snapshot_every is not None and self.snapshot_every < 1:
            raise ConfigurationError("snapshot_every must be at least 1")
        return self

    def grid_spacing(self, t_span):
        t0, t1 = t_span
        return self.sample_dt if self.sample_dt is not None else (t1 - t0) / self.sample_points


@dataclass
class Trajectory:
    """
    Observables sampled on the uniform grid t0 + i * sample_dt.
    After a failure the series stop at the last sample reached.
    """
    times: np.ndarray
    series: dict
    sample_dt: float
    snapshot_times: np.ndarray = None
    snapshots: np.ndarray = None   # shape (len(snapshot_times), N), positions z_k
    failure: IntegrationFailure = None
    stats: dict = field(default_factory=dict)

    @property
    def ok(self):
        return self.failure is None

    def __getitem__(self, name):
        return self.series[name]


def uniform_grid(t_span, sample_dt):
    t0, t1 = t_span
    count = int(np.floor((t1 - t0) / sample_dt * (1 + 1e-12) + 1e-9))
    return t0 + np.arange(count + 1) * sample_dt


class _Recorder:
    """Collects observables (and optional snapshots) grid point by grid point"""

    def __init__(self, system, times, snapshot_every):
        self.system = system
        self.times = times
        self.snapshot_every = snapshot_every
        self.values = {}
        self.snap_times = []
        self.snaps = []
        self.count = 0

    def record(self, t, state):
        for name, value in self.system.observe(t, state).items():
            self.values.setdefault(name, []).append(value)
        if self.snapshot_every and self.count % self.snapshot_every == 0:
            self.snap_times.append(t)
            self.snaps.append(np.array(self.system.positions(state), dtype=float))
        self.count += 1

    def trajectory(self, sample_dt, failure=None, stats=None):
        times = self.times[:self.count]
        series = {name: np.asarray(vals, dtype=float) for name, vals in self.values.items()}
        snapshot_times = snapshots = None
        if self.snapshot_every:
            snapshot_times = np.asarray(self.snap_times, dtype=float)
            snapshots = np.asarray(self.snaps, dtype=float)
        return Trajectory(times, series, sample_dt, snapshot_times, snapshots,
                          failure, stats or {})


def _check_span(t_span, initial_state, system):
    t0, t1 = float(t_span[0]), float(t_span[1])
    if not t1 > t0:
        raise ConfigurationError(f"need t1 > t0, got {t_span}")
    y0 = np.asarray(initial_state, dtype=float)
    if not np.all(np.isfinite(y0)):
        raise ConfigurationError("initial state must be finite")
    if hasattr(system, 'dimension') and y0.shape != (system.dimension,):
        raise ConfigurationError(f"initial state must have length {system.dimension}")
    return t0, t1, y0


def integrate_adaptive(system, t_span, config=None, initial_state=None):
    """
    Dormand-Prince 4(5) integration with embedded error control
    (|err| <= abs_tol + rel_tol |state| per step). Observables are read off
    the step's dense output at each uniform grid point.
    """
    config = (config or IntegratorConfig()).check()
    if initial_state is None:
        initial_state = system.initial_state()
    t0, t1, y0 = _check_span(t_span, initial_state, system)
    sample_dt = config.grid_spacing((t0, t1))
    times = uniform_grid((t0, t1), sample_dt)
    recorder = _Recorder(system, times, config.snapshot_every)
    recorder.record(t0, y0)

    solver = RK45(system.rhs, t0, y0, times[-1],
                  rtol=config.rel_tol, atol=config.abs_tol,
                  first_step=min(config.initial_step, times[-1] - t0),
                  max_step=config.max_step)
    steps = 0
    failure = None
    while solver.status == 'running':
        t_prev = solver.t
        message = solver.step()
        steps += 1
        if solver.status == 'failed':
            failure = IntegrationFailure(message or "step size underflow", t_prev)
            break
        if not np.all(np.isfinite(solver.y)):
            failure = IntegrationFailure("non-finite state", t_prev)
            break
        dense = solver.dense_output()
        while recorder.count < len(times) and times[recorder.count] <= solver.t:
            t = times[recorder.count]
            recorder.record(t, dense(t))

    return recorder.trajectory(sample_dt, failure, {'steps': steps, 'nfev': solver.nfev})


def rk4_step(rhs, t, y, dt):
    k1 = rhs(t, y)
    k2 = rhs(t + dt / 2, y + dt / 2 * k1)
    k3 = rhs(t + dt / 2, y + dt / 2 * k2)
    k4 = rhs(t + dt, y + dt * k3)
    return y + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def integrate_fixed_rk4(system, t_span, dt, initial_state=None, sample_dt=None, snapshot_every=None):
    """
    Classical fourth-order fixed-step integration. dt must divide the span;
    samples are taken every round(sample_dt / dt) steps (default: every step).
    """
    if not dt > 0:
        raise ConfigurationError("dt must be positive")
    if initial_state is None:
        initial_state = system.initial_state()
    t0, t1, y = _check_span(t_span, initial_state, system)
    n_steps = int(round((t1 - t0) / dt))
    if n_steps < 1 or abs(n_steps * dt - (t1 - t0)) > 1e-9 * max(1.0, abs(t1 - t0)):
        raise ConfigurationError(f"dt={dt} does not divide the span {t1 - t0}")
    stride = 1 if sample_dt is None else max(1, int(round(sample_dt / dt)))
    times = t0 + np.arange(n_steps // stride + 1) * stride * dt
    recorder = _Recorder(system, times, snapshot_every)
    recorder.record(t0, y)

    failure = None
    for step in range(n_steps):
        t = t0 + step * dt
        y = rk4_step(system.rhs, t, y, dt)
        if not np.all(np.isfinite(y)):
            failure = IntegrationFailure("non-finite state", t)
            break
        if (step + 1) % stride == 0:
            recorder.record(t0 + (step + 1) * dt, y)

    return recorder.trajectory(stride * dt, failure, {'steps': n_steps})
