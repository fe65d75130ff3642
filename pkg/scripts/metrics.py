# scripts/metrics.py
import sys
import os
from dataclasses import dataclass

import numpy as np

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
from config import METRICS_CONFIG
from scripts.exceptions import MetricsError


@dataclass(frozen=True)
class TransientMetrics:
    """
    Measured transient of the relative orbit.
    period / attenuation are None when too few features were found.
    """
    A: tuple
    t_ext: tuple
    T_cross: tuple
    period: float = None
    attenuation: float = None

    @property
    def complete(self):
        return self.period is not None and self.attenuation is not None

    @property
    def A1(self):
        return self.A[0] if self.A else None

    def as_dict(self):
        return {
            'A': list(self.A),
            't_ext': list(self.t_ext),
            'T_cross': list(self.T_cross),
            'period': self.period,
            'attenuation': self.attenuation,
            'complete': self.complete,
        }


def relative_orbit(traj):
    """y(t) = z_N(t) - z_0(t) on the trajectory's grid"""
    if 'z_N' in traj.series and 'z_0' in traj.series:
        return traj.series['z_N'] - traj.series['z_0']
    if 'y' in traj.series:
        return np.asarray(traj.series['y'])
    raise MetricsError("trajectory has neither the relative orbit nor last-agent/leader series")


def parabolic_vertex(y_left, y_mid, y_right):
    """Offset (in samples) and value of the parabola through three equally spaced points"""
    curvature = y_left - 2 * y_mid + y_right
    if curvature == 0:
        return 0.0, y_mid
    offset = 0.5 * (y_left - y_right) / curvature
    offset = min(max(offset, -1.0), 1.0)
    value = y_mid - 0.25 * (y_left - y_right) * offset
    return offset, value


def _crossing_indices(y):
    """Pairs (i, j) of consecutive non-zero samples with opposite signs"""
    nonzero = np.flatnonzero(y != 0)
    if nonzero.size < 2:
        return []
    signs = np.sign(y[nonzero])
    flips = np.flatnonzero(signs[1:] != signs[:-1])
    return [(int(nonzero[f]), int(nonzero[f + 1])) for f in flips]


def find_crossings(times, y):
    """Zero crossings by sign change and linear interpolation"""
    times = np.asarray(times, dtype=float)
    y = np.asarray(y, dtype=float)
    if times.size < 2:
        return []
    dt = times[1] - times[0]
    crossings = []
    for i, j in _crossing_indices(y):
        t_cross = times[i] - y[i] * (times[j] - times[i]) / (y[j] - y[i])
        if t_cross - times[0] < dt:
            continue
        crossings.append(float(t_cross))
    return crossings


def _segments(times, y, crossings):
    """Sample index ranges before the first crossing and between crossings"""
    edges = [0] + [int(np.searchsorted(times, c)) for c in crossings]
    return [(edges[i], edges[i + 1]) for i in range(len(edges) - 1)] if crossings else [(0, len(y))]


def find_extrema(times, y, crossings=None, ripple_fraction=METRICS_CONFIG['ripple_fraction']):
    """
    One signed extremum per inter-crossing segment (and before the first
    crossing), refined by a three-point parabola. Extrema on the array ends
    or below ripple_fraction * max|y| are dropped.
    """
    times = np.asarray(times, dtype=float)
    y = np.asarray(y, dtype=float)
    if y.size < 3:
        return [], []
    if crossings is None:
        crossings = find_crossings(times, y)
    threshold = ripple_fraction * float(np.max(np.abs(y)))
    dt = times[1] - times[0]

    values, ext_times = [], []
    for start, stop in _segments(times, y, crossings):
        if stop - start < 1:
            continue
        i = start + int(np.argmax(np.abs(y[start:stop])))
        if i == 0 or i == y.size - 1:
            continue
        offset, value = parabolic_vertex(y[i - 1], y[i], y[i + 1])
        if abs(value) < threshold or value == 0:
            continue
        values.append(float(value))
        ext_times.append(float(times[i] + offset * dt))
    return values, ext_times


def summarize(A, T_cross, t_ext=()):
    """Period = mean(T_{k+2} - T_k); attenuation = A_3 / A_1"""
    A = tuple(float(a) for a in A)
    T_cross = tuple(float(t) for t in T_cross)
    period = attenuation = None
    if len(T_cross) >= 3:
        T = np.asarray(T_cross)
        period = float(np.mean(T[2:] - T[:-2]))
    if len(A) >= 3:
        attenuation = A[2] / A[0]
    return TransientMetrics(A=A, t_ext=tuple(t_ext), T_cross=T_cross,
                            period=period, attenuation=attenuation)


def significant_crossings(times, y, crossings=None, ripple_fraction=METRICS_CONFIG['ripple_fraction']):
    """
    Crossings that separate significant lobes of opposite sign. Ripple lobes
    are absorbed into their neighbors; of an odd run of crossings between two
    significant lobes the middle one is kept.
    """
    times = np.asarray(times, dtype=float)
    y = np.asarray(y, dtype=float)
    if crossings is None:
        crossings = find_crossings(times, y)
    if not crossings:
        return []
    threshold = ripple_fraction * float(np.max(np.abs(y)))
    edges = [0] + [int(np.searchsorted(times, c)) for c in crossings] + [y.size]

    lobes = []  # (lobe index, sign) of significant lobes
    for idx in range(len(edges) - 1):
        start, stop = edges[idx], edges[idx + 1]
        if stop <= start:
            continue
        i = start + int(np.argmax(np.abs(y[start:stop])))
        if abs(y[i]) >= threshold and y[i] != 0:
            lobes.append((idx, np.sign(y[i])))

    kept = []
    for (a, sign_a), (b, sign_b) in zip(lobes[:-1], lobes[1:]):
        if sign_a != sign_b:
            # crossings[j] separates lobe j from lobe j + 1
            run = crossings[a:b]
            kept.append(run[(len(run) - 1) // 2])
    return kept


def measure(times, y, ripple_fraction=METRICS_CONFIG['ripple_fraction']):
    """Crossings, extrema and their summary for a sampled relative orbit"""
    times = np.asarray(times, dtype=float)
    y = np.asarray(y, dtype=float)
    if y.size < 3 or not np.any(y):
        return summarize((), ())
    crossings = significant_crossings(times, y, ripple_fraction=ripple_fraction)
    A, t_ext = find_extrema(times, y, crossings, ripple_fraction)
    return summarize(A, crossings, t_ext)


def relative_error(measured, predicted):
    if predicted == 0:
        raise MetricsError("relative error undefined for a zero prediction")
    return abs(measured - predicted) / abs(predicted)
