# tests/test_waves.py
import numpy as np
import pytest

from scripts.exceptions import ConfigurationError, WaveCheckError
from scripts.integrator import IntegratorConfig, Trajectory, integrate_adaptive
from scripts.model import BoundaryKind, BoundarySpec, ModelParams, assemble, normalize
from scripts.waves import (fourier_coefficients, periodic_initial_condition, run_wave_check,
                           track_pulses, wave_residual)


def bump(x, width=16):
    return np.where(np.abs(x) <= width / 2, np.cos(np.pi * x / width) ** 2, 0.0)


def synthetic_trajectory(n_agents, times, waves):
    """Snapshots of sum(amplitude * bump(j - origin - c t)) for (c, amplitude, origin) in waves"""
    j = np.arange(1, n_agents + 1)
    snaps = np.array([sum(a * bump(j - origin - c * t) for c, a, origin in waves) for t in times])
    return Trajectory(times, {}, float(times[1] - times[0]), snapshot_times=times, snapshots=snaps)


def test_initial_condition_shape():
    state = periodic_initial_condition(200, 16)
    z, v = state[:200], state[200:]
    assert np.all(v == 0.0)
    assert z[99] == pytest.approx(1.0)  # agent N/2
    assert np.count_nonzero(z > 1e-12) == 15


def test_bump_mass_is_translation_invariant():
    sums = [periodic_initial_condition(200, 16, center=c)[:200].sum() for c in (50, 100, 173.3, 199)]
    np.testing.assert_allclose(sums, 8.0, atol=1e-12)


def test_bump_wraps_around_the_ring():
    z = periodic_initial_condition(100, 8, center=1)[:100]
    assert z[0] == pytest.approx(1.0)
    assert z[-1] == pytest.approx(z[1])


@pytest.mark.parametrize('width', [3, 51])
def test_width_out_of_range(width):
    with pytest.raises(ConfigurationError):
        periodic_initial_condition(200, width)


def test_fourier_coefficients_decay():
    n_agents = 256
    a = fourier_coefficients(periodic_initial_condition(n_agents, 16)[:n_agents])
    m = np.arange(a.size)
    weighted = m ** 2 * a
    # m^2 |a_m| stays bounded by its low-mode maximum up to m = N/2
    assert np.max(weighted[n_agents // 8:]) <= np.max(weighted[1:n_agents // 8])
    assert a[0] == pytest.approx(8.0 / n_agents)


def test_track_pulses_on_synthetic_waves():
    times = np.arange(0.0, 61.0)
    traj = synthetic_trajectory(400, times, [(2.0, 1.0, 200), (-1.0, 0.5, 200)])
    c_plus, c_minus = track_pulses(traj, width=16)
    assert c_plus == pytest.approx(2.0, abs=1e-9)
    assert c_minus == pytest.approx(-1.0, abs=1e-9)


def test_track_pulses_rejects_overlapping_window():
    times = np.arange(0.0, 10.0)
    traj = synthetic_trajectory(400, times, [(2.0, 1.0, 200), (-1.0, 0.5, 200)])
    with pytest.raises(WaveCheckError):
        track_pulses(traj, width=16)


def test_single_exact_wave_has_no_residual():
    times = np.arange(0.0, 30.0)
    traj = synthetic_trajectory(200, times, [(1.0, 1.0, 60)])
    assert wave_residual(traj, 1.0, -1.0, amplitude=1.0) < 1e-6


def test_residual_needs_enough_snapshots():
    times = np.arange(0.0, 5.0)
    traj = synthetic_trajectory(200, times, [(1.0, 1.0, 60)])
    with pytest.raises(WaveCheckError):
        wave_residual(traj, 1.0, -1.0)


def test_counter_rotating_waves_on_the_ring_split_exactly():
    # both waves wrap and overlap; one relative revolution is N / (c_+ - c_-) = 60
    n_agents, times = 120, np.arange(0.0, 60.0)
    ring = lambda center: periodic_initial_condition(n_agents, 30, center=center)[:n_agents]
    snaps = np.array([ring(40 + t) + 0.5 * ring(40 - t) for t in times])
    traj = Trajectory(times, {}, 1.0, snapshot_times=times, snapshots=snaps)
    assert wave_residual(traj, 1.0, -1.0, amplitude=1.0, periodic=True) < 1e-9


def test_ring_mean_is_conserved():
    params = ModelParams.canonical(-2.0, -2.0, 0.0)
    system = assemble(params, BoundarySpec(BoundaryKind.PERIODIC), None, 200)
    state = periodic_initial_condition(200, 16)
    config = IntegratorConfig(sample_dt=1.0, snapshot_every=1)
    traj = integrate_adaptive(system, (0.0, 40.0), config, state)
    means = traj.snapshots.mean(axis=1)
    np.testing.assert_allclose(means, means[0], rtol=1e-8)


@pytest.mark.slow
def test_wave_check_asymmetric_ring():
    params = ModelParams.canonical(-2.0, -2.0, 0.0)
    report = run_wave_check(params, n_agents=1000)
    assert report.c_plus_emp > 0 > report.c_minus_emp
    assert report.err_c_plus < 0.03
    assert report.err_c_minus < 0.03
    assert report.residual < 0.05
    assert report.snapshots_used >= 20
    assert report.residual_width == 250.0


@pytest.mark.slow
def test_wave_check_symmetric_ring():
    report = run_wave_check(ModelParams.canonical(-2.0, -2.0, -0.5), n_agents=1000)
    assert report.c_plus_emp == pytest.approx(-report.c_minus_emp, rel=0.02)


@pytest.mark.slow
def test_residual_shrinks_with_ring_size():
    params = ModelParams.canonical(-2.0, -2.0, 0.0)
    small = run_wave_check(params, n_agents=1000)
    large = run_wave_check(params, n_agents=2000)
    assert large.residual < small.residual


@pytest.mark.slow
def test_velocities_rescale_with_time():
    params = ModelParams.canonical(-2.0, -2.0, 0.0)
    scaled, time_scale = normalize(params)
    original = run_wave_check(params, n_agents=1000)
    rescaled = run_wave_check(scaled, n_agents=1000)
    assert rescaled.c_plus_emp * time_scale == pytest.approx(original.c_plus_emp, rel=0.02)
    assert rescaled.c_minus_emp * time_scale == pytest.approx(original.c_minus_emp, rel=0.02)


@pytest.mark.slow
@pytest.mark.parametrize('width', [8, 32])
def test_velocities_do_not_depend_on_width(width):
    params = ModelParams.canonical(-2.0, -2.0, 0.0)
    reference = run_wave_check(params, n_agents=1000, width=16)
    report = run_wave_check(params, n_agents=1000, width=width)
    assert report.c_plus_emp == pytest.approx(reference.c_plus_emp, rel=0.02)
    assert report.c_minus_emp == pytest.approx(reference.c_minus_emp, rel=0.02)
