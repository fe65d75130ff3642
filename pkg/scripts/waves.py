# scripts/waves.py
import sys
import os
from dataclasses import dataclass, asdict, replace

import numpy as np

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
from config import WAVECHECK_CONFIG
from scripts.exceptions import ConfigurationError, WaveCheckError
from scripts.integrator import IntegratorConfig, integrate_adaptive
from scripts.metrics import parabolic_vertex, relative_error
from scripts.model import BoundaryKind, BoundarySpec, assemble, normalize_stencils
from scripts.theory import signal_velocities


@dataclass(frozen=True)
class WaveCheckReport:
    n_agents: int
    width: int
    c_plus_emp: float
    c_minus_emp: float
    c_plus_pred: float
    c_minus_pred: float
    err_c_plus: float
    err_c_minus: float
    residual: float
    snapshots_used: int
    residual_width: float

    def as_dict(self):
        return asdict(self)


def periodic_initial_condition(n_agents, width, amplitude=1.0, center=None):
    """
    Raised-cosine bump of the given width (in agents) on the ring, at rest.
    Agent k sits at array index k - 1; the default center is agent N/2.
    """
    if not 4 <= width <= n_agents / 4:
        raise ConfigurationError(f"bump width must lie in [4, N/4], got {width} for N={n_agents}")
    if center is None:
        center = n_agents / 2
    k = np.arange(1, n_agents + 1)
    distance = (k - center + n_agents / 2) % n_agents - n_agents / 2
    z = np.where(np.abs(distance) <= width / 2,
                 amplitude * np.cos(np.pi * distance / width) ** 2, 0.0)
    return np.concatenate((z, np.zeros(n_agents)))


def fourier_coefficients(positions):
    """|a_m| for m = 0..N/2 of the ring profile"""
    positions = np.asarray(positions, dtype=float)
    return np.abs(np.fft.rfft(positions)) / positions.size


def _peak_position(profile, lo, hi):
    """Sub-sample argmax of profile[lo:hi]"""
    i = lo + int(np.argmax(profile[lo:hi]))
    if 0 < i < profile.size - 1:
        offset, _ = parabolic_vertex(profile[i - 1], profile[i], profile[i + 1])
        return i + offset
    return float(i)


def pulse_window(traj, width, center=None, min_snapshots=WAVECHECK_CONFIG['min_snapshots']):
    """
    Snapshot indices where both pulses are resolved: each peak at least one
    width away from the launch point and from wrapping around the ring.
    Returns (indices, right peak positions, left peak positions).
    """
    if traj.snapshots is None:
        raise WaveCheckError("trajectory carries no full-state snapshots")
    n_agents = traj.snapshots.shape[1]
    c_idx = int(round((center if center is not None else n_agents / 2) - 1))

    used, right, left = [], [], []
    for s, profile in enumerate(traj.snapshots):
        r = _peak_position(profile, c_idx + 1, n_agents)
        l = _peak_position(profile, 0, c_idx)
        separated = (r - c_idx >= width) and (c_idx - l >= width)
        unwrapped = (n_agents - 1 - r >= width) and (l >= width)
        if separated and unwrapped:
            used.append(s)
            right.append(r)
            left.append(l)
    if len(used) < min_snapshots:
        raise WaveCheckError(
            f"only {len(used)} usable snapshots (need {min_snapshots}); pulses overlap or wrapped")
    return np.asarray(used), np.asarray(right), np.asarray(left)


def track_pulses(traj, width, center=None, min_snapshots=WAVECHECK_CONFIG['min_snapshots']):
    """Empirical (c_plus, c_minus) from least-squares fits of peak position against time"""
    used, right, left = pulse_window(traj, width, center, min_snapshots)
    times = traj.snapshot_times[used]
    c_plus, _ = np.polyfit(times, right, 1)
    c_minus, _ = np.polyfit(times, left, 1)
    return float(c_plus), float(c_minus)


def _characteristic_mean(xi, values, bin_width=1.0, period=None):
    """
    Average values along lines xi = const (bins of bin_width) and return an
    interpolating profile f(xi). With a period, xi is taken around the ring.
    """
    if period is not None:
        xi = np.mod(xi, period)
    bins = np.floor(xi / bin_width).astype(np.int64)
    order = np.argsort(bins, kind='stable')
    bins_sorted = bins[order]
    starts = np.flatnonzero(np.r_[True, bins_sorted[1:] != bins_sorted[:-1]])
    counts = np.diff(np.r_[starts, bins_sorted.size])
    xi_mean = np.add.reduceat(xi[order], starts) / counts
    value_mean = np.add.reduceat(values[order], starts) / counts
    if period is not None:
        return lambda x: np.interp(x, xi_mean, value_mean, period=period)
    return lambda x: np.interp(x, xi_mean, value_mean, left=0.0, right=0.0)


def wave_residual(traj, c_plus, c_minus, width=None, center=None, amplitude=None,
                  passes=WAVECHECK_CONFIG['passes'], snapshot_indices=None,
                  min_snapshots=WAVECHECK_CONFIG['min_snapshots'], periodic=False):
    """
    Split the snapshots into f_+(j - c_+ t) + f_-(j - c_- t) by alternating
    averages along both families of characteristics; return the sup-norm
    misfit relative to the initial amplitude.
    periodic=True wraps the characteristic coordinates around the ring.
    """
    if traj.snapshots is None:
        raise WaveCheckError("trajectory carries no full-state snapshots")
    if snapshot_indices is None:
        if width is None:
            snapshot_indices = np.arange(len(traj.snapshot_times))
        else:
            snapshot_indices, _, _ = pulse_window(traj, width, center, min_snapshots)
    if len(snapshot_indices) < min_snapshots:
        raise WaveCheckError(f"window of {len(snapshot_indices)} snapshots is too short for binning")
    if amplitude is None:
        amplitude = float(np.max(np.abs(traj.snapshots[0])))
    if amplitude == 0:
        raise WaveCheckError("initial disturbance has zero amplitude")

    Z = traj.snapshots[snapshot_indices]
    t = traj.snapshot_times[snapshot_indices][:, None]
    j = np.arange(1, Z.shape[1] + 1)[None, :]
    xi_plus = (j - c_plus * t).ravel()
    xi_minus = (j - c_minus * t).ravel()
    z = Z.ravel()
    period = Z.shape[1] if periodic else None

    f_minus = np.zeros_like(z)
    for _ in range(passes):
        f_plus = _characteristic_mean(xi_plus, z - f_minus, period=period)(xi_plus)
        f_minus = _characteristic_mean(xi_minus, z - f_plus, period=period)(xi_minus)
    return float(np.max(np.abs(z - f_plus - f_minus)) / abs(amplitude))


def _ring_run(system, base, state, span, snapshots):
    config = replace(base, sample_dt=span / snapshots, snapshot_every=1)
    traj = integrate_adaptive(system, (0.0, span), config, state)
    if not traj.ok:
        raise traj.failure
    return traj


def run_wave_check(params, n_agents=WAVECHECK_CONFIG['n_agents'], width=WAVECHECK_CONFIG['width'],
                   amplitude=WAVECHECK_CONFIG['amplitude'], integrator=None,
                   window_fraction=WAVECHECK_CONFIG['window_fraction'],
                   snapshots=WAVECHECK_CONFIG['snapshots'], passes=WAVECHECK_CONFIG['passes'],
                   residual_width_fraction=WAVECHECK_CONFIG['residual_width_fraction']):
    """
    Velocities from a narrow bump tracked until the fast pulse nears the wrap;
    residual from a bump scaled with the ring, reconstructed over one relative
    revolution N / (c_+ - c_-) of the two families.
    """
    canonical = normalize_stencils(params)
    predicted = signal_velocities(canonical)
    system = assemble(params, BoundarySpec(BoundaryKind.PERIODIC), None, n_agents)
    base = integrator or IntegratorConfig()

    # 1. Track the narrow bump's two pulses
    horizon = window_fraction * n_agents / max(abs(predicted.c_plus), abs(predicted.c_minus))
    narrow = _ring_run(system, base, periodic_initial_condition(n_agents, width, amplitude),
                       horizon, snapshots)
    c_plus, c_minus = track_pulses(narrow, width)
    used, _, _ = pulse_window(narrow, width)

    # 2. Reconstruct the wide bump along both characteristic families
    residual_width = residual_width_fraction * n_agents
    revolution = n_agents / (predicted.c_plus - predicted.c_minus)
    wide = _ring_run(system, base, periodic_initial_condition(n_agents, residual_width, amplitude),
                     revolution, snapshots)
    # the end point repeats the start's relative phase
    residual = wave_residual(wide, predicted.c_plus, predicted.c_minus, amplitude=amplitude,
                             passes=passes, snapshot_indices=np.arange(snapshots), periodic=True)

    return WaveCheckReport(
        n_agents=n_agents, width=width,
        c_plus_emp=c_plus, c_minus_emp=c_minus,
        c_plus_pred=predicted.c_plus, c_minus_pred=predicted.c_minus,
        err_c_plus=relative_error(c_plus, predicted.c_plus),
        err_c_minus=relative_error(c_minus, predicted.c_minus),
        residual=residual, snapshots_used=int(len(used)),
        residual_width=float(residual_width),
    )
