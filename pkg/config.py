
# Default linearized model: canonical stencils, asymmetric velocity coupling
MODEL_DEFAULTS = {
    'g_x': -1.0,
    'g_v': -1.0,
    'rho_x': (-0.5, 1.0, -0.5),  # (rho_{x,-1}, rho_{x,0}, rho_{x,+1})
    'rho_v': (-1.0, 1.0, 0.0),   # (rho_{v,-1}, rho_{v,0}, rho_{v,+1})
    'boundary': 'regular',       # regular, variable_mass, custom or periodic
    'leader': 'ramp',            # ramp or pulse
    'v0': 1.0,
    'pulse_epsilon': 5.0,        # half-width of the leader pulse (time)
    'n_agents': 100,
}

# Adaptive Runge-Kutta settings
INTEGRATOR_CONFIG = {
    'rel_tol': 1e-6,
    'abs_tol': 1e-6,
    'initial_step': 1e-2,
    'max_step': 10.0,
    'sample_points': 4096,  # uniform output grid is span / sample_points
}

# Simulation horizon: h * N * (1/c_+ - 1/c_-)
SIMULATION_CONFIG = {
    'horizon_factor': 4.0,
    'k_max': 6,               # number of predicted A_k / T_k
    'trace_agent_stride': 4,  # agents kept in full-trace output
    'trace_time_stride': 8,   # sample-grid decimation for full-trace output
}

# Validation grid: 6 N x 2 boundaries x 6 rho_{v,1} x 5 g_v = 360 runs
STUDY_CONFIG = {
    'n_list': (100, 200, 400, 800, 1600, 3200),
    'boundaries': ('variable_mass', 'regular'),
    'rho_v1_list': (0.0, -0.1, -0.2, -0.3, -0.4, -0.5),
    'g_v_list': (-0.25, -0.5, -1.0, -2.0, -4.0),
    'g_x': -1.0,
    'v0': 1.0,
    'horizon_factor': 4.0,
    'large_n': 3200,  # rows at this N only run when explicitly requested
}

# Symmetric vs asymmetric comparison at N=400
COMPARISON_CONFIG = {
    'n_agents': 400,
    'g_x': -2.0,
    'g_v': -2.0,
    'rho_v1_values': (-0.5, 0.0),
    'v0': 1.0,
    'boundary': 'regular',
}

# Leader-pulse (P_N) run
PULSE_CONFIG = {
    'n_agents': 800,
    'g_x': -2.0,
    'g_v': -2.0,
    'rho_v1': 0.0,
    'v0': 1.0,
    'epsilon': 5.0,
    'boundary': 'regular',
}

# Traveling-wave check on the periodic ring
WAVECHECK_CONFIG = {
    'n_agents': 1000,
    'g_x': -2.0,
    'g_v': -2.0,
    'rho_v1': 0.0,
    'width': 16,
    'amplitude': 1.0,
    'window_fraction': 0.4,   # horizon = fraction * N / max|c_+-|
    'snapshots': 400,
    'min_snapshots': 20,
    'passes': 3,
    'residual_width_fraction': 0.25,  # wide bump for the residual, in units of N
}

# Energy-index search over rho_{v,1}
OPTIMIZE_CONFIG = {
    'g_x': -2.0,
    'g_v': -2.0,
    'rho_v1_min': -0.5,
    'rho_v1_max': 0.0,
    'tol': 1e-8,
}

# Feature extraction thresholds
METRICS_CONFIG = {
    'ripple_fraction': 1e-4,  # extrema below this fraction of max|y| are dropped
}

# Tolerances on exact relations
TOLERANCES = {
    'stencil_sum': 1e-12,
    'canonical': 1e-12,
    'marginal': 1e-12,
    'pulse_integral': 1e-10,
}

# Output files
DATA_PATHS = {
    'results_dir': 'results',
    'orbit': 'results/orbit.csv',
    'full_trace': 'results/full_trace.csv',
    'prediction': 'results/prediction.json',
    'metrics': 'results/metrics.json',
    'study': 'results/study.csv',
    'slopes': 'results/slopes.csv',
    'wavecheck': 'results/wavecheck.json',
    'optimize': 'results/optimize.json',
    'pulsecheck': 'results/pulsecheck.json',
    'comparison': 'results/comparison',
    'figures': 'visualizations',
}

# Numbers in CSV/JSON outputs
FLOAT_FORMAT = '%.15g'
