# scripts/theory.py
import sys
import os
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
from config import TOLERANCES
from scripts.exceptions import ConfigurationError, NormalizationError
from scripts.model import ModelParams, LeaderKind, normalize_stencils

INV_PHI = (math.sqrt(5) - 1) / 2  # 1 / phi
INV_PHI_SQUARE = (3 - math.sqrt(5)) / 2  # 1 / phi^2


@dataclass(frozen=True)
class SignalVelocities:
    c_plus: float
    c_minus: float

    @property
    def ratio(self):
        """c_- / c_+, the reflection factor of the free end"""
        return self.c_minus / self.c_plus

    @property
    def slowness(self):
        """1/c_+ - 1/c_-, time per agent for a round trip leg"""
        return 1.0 / self.c_plus - 1.0 / self.c_minus


@dataclass(frozen=True)
class TheoryPrediction:
    n_agents: int
    v0: float
    c_plus: float
    c_minus: float
    u: tuple
    T_cross: tuple
    A: tuple
    period: float
    attenuation: float
    I_E: float


class StabilityCategory(Enum):
    VIOLATES_NECESSARY_CONDITIONS = 'violates_necessary_conditions'
    AMPLIFYING_TRANSIENTS = 'amplifying_transients'
    MARGINAL_WAVE_EQUATION = 'marginal_wave_equation'
    ATTENUATING_TRAVELING_WAVE = 'attenuating_traveling_wave'


@dataclass(frozen=True)
class StabilityClass:
    category: StabilityCategory
    attenuation: float = None
    # None outside the family rho_v = rho_x = (-1-r, 1, r)
    flock_stable_symmetric_family: bool = None


@dataclass(frozen=True)
class EnergyOptimum:
    rho_v1: float
    I_E: float
    attenuation: float
    admissible: bool


def _require_canonical(params):
    if not params.is_canonical():
        raise ConfigurationError("parameters are not in canonical form, normalize first")
    if not (params.g_x <= 0 and params.g_v < 0):
        raise ConfigurationError("canonical form needs g_x <= 0 and g_v < 0")


def signal_velocities(params):
    _require_canonical(params)
    b = params.g_v * (1 + 2 * params.rho_v1)
    root = math.sqrt(b * b / 4 - params.g_x / 2)
    return SignalVelocities(c_plus=-b / 2 + root, c_minus=-b / 2 - root)


def violated_conditions(params):
    try:
        normalize_stencils(params)
    except NormalizationError as e:
        return e.violated
    return []


def necessary_conditions(params):
    return not violated_conditions(params)


def symmetric_family_verdict(params):
    """
    Flock stability inside the family rho_v = rho_x = (-1-r, 1, r), stencils
    scaled by their centre weight: stable iff r = -1/2. None outside the family.
    """
    tol = TOLERANCES['canonical']
    if params.rho_x[1] == 0 or params.rho_v[1] == 0:
        return None
    rho_x = [w / params.rho_x[1] for w in params.rho_x]
    rho_v = [w / params.rho_v[1] for w in params.rho_v]
    if any(abs(a - b) > tol for a, b in zip(rho_x, rho_v)):
        return None
    return abs(rho_x[2] + 0.5) <= tol


def classify(params):
    # raw stencils: off r = -1/2 the family fails the necessary conditions
    symmetric = symmetric_family_verdict(params)
    if not necessary_conditions(params):
        return StabilityClass(StabilityCategory.VIOLATES_NECESSARY_CONDITIONS,
                              flock_stable_symmetric_family=symmetric)
    canonical = normalize_stencils(params)
    velocities = signal_velocities(canonical)
    alpha = velocities.ratio ** 2
    gap = abs(velocities.c_plus) - abs(velocities.c_minus)
    if abs(gap) <= TOLERANCES['marginal']:
        category = StabilityCategory.MARGINAL_WAVE_EQUATION
    elif gap < 0:
        category = StabilityCategory.AMPLIFYING_TRANSIENTS
    else:
        category = StabilityCategory.ATTENUATING_TRAVELING_WAVE
    return StabilityClass(category, alpha, symmetric)


def predict(params, n_agents, v0=1.0, k_max=6):
    """Extrema A_k, crossing times T_k and post-reflection velocities u_k of the last agent"""
    if n_agents < 1 or k_max < 1:
        raise ConfigurationError("need n_agents >= 1 and k_max >= 1")
    velocities = signal_velocities(params)
    r = velocities.ratio
    cp = velocities.c_plus
    ks = np.arange(1, k_max + 1)
    u = -(r ** ks) * v0
    T_cross = velocities.slowness * ks * n_agents
    A = -(r ** (ks - 1)) * v0 / cp * n_agents
    return TheoryPrediction(
        n_agents=n_agents, v0=v0,
        c_plus=velocities.c_plus, c_minus=velocities.c_minus,
        u=tuple(float(x) for x in u),
        T_cross=tuple(float(x) for x in T_cross),
        A=tuple(float(x) for x in A),
        period=2 * n_agents * velocities.slowness,
        attenuation=r ** 2,
        I_E=energy_index(params),
    )


def symmetric_family_period(n_agents, g_x):
    """Period 4 sqrt(2) N / sqrt|g_x| of the flock-stable symmetric family"""
    return 4 * math.sqrt(2) * n_agents / math.sqrt(abs(g_x))


def burst_integrals(params, n_agents, v0=1.0, k_max=4):
    """Time integral of burst k of the pulse train: ((c_+ - c_-)/c_+) (c_-/c_+)^k v0"""
    velocities = signal_velocities(params)
    gain = (velocities.c_plus - velocities.c_minus) / velocities.c_plus
    return tuple(gain * velocities.ratio ** k * v0 for k in range(k_max))


def pulse_train(params, n_agents, v0, pulse, t):
    """
    Closed-form z_N(t) of the pulse-driven system, with every reflected
    burst taken as the leader's own pulse (dispersion ignored).
    """
    if pulse.kind is not LeaderKind.PULSE:
        raise ConfigurationError("pulse_train needs a pulse leader input")
    velocities = signal_velocities(params)
    r = velocities.ratio
    gain = (velocities.c_plus - velocities.c_minus) / velocities.c_plus
    first = n_agents / velocities.c_plus
    spacing = velocities.slowness * n_agents

    t = np.asarray(t, dtype=float)
    total = np.zeros_like(t)
    latest = float(np.max(t)) if t.size else first
    k_last = int(math.floor((latest - first + pulse.epsilon) / spacing)) if latest >= first - pulse.epsilon else -1
    for k in range(k_last + 1):
        p, _ = pulse.profile(t - first - k * spacing)
        total = total + r ** k * p
    result = gain * total * v0
    return float(result) if result.ndim == 0 else result


def energy_index(params):
    """I_E = 1 / (c_+^2 - c_-^2); +inf once the amplitude series stops converging"""
    velocities = signal_velocities(params)
    denominator = velocities.c_plus ** 2 - velocities.c_minus ** 2
    if denominator <= TOLERANCES['marginal'] * max(1.0, velocities.c_plus ** 2):
        return math.inf
    return 1.0 / denominator


def spectral_bound(g_x, g_v, r):
    """Bound on the real parts of the non-zero eigenvalues for rho_{v,1}=rho_{x,1}=r"""
    if not -1 < r < 0:
        raise ConfigurationError(f"r must lie in (-1, 0), got {r}")
    return max(-g_x / g_v, g_v * (1 - 2 * math.sqrt(abs(r) * (1 + r))))


def golden_section(f, a, b, tol=1e-8):
    """
    Golden-section search.
    Returns the bracket [c, d] with d - c <= tol around the minimum of a
    unimodal f on [a, b].
    """
    a, b = min(a, b), max(a, b)
    h = b - a
    if h <= tol:
        return a, b

    n = int(math.ceil(math.log(tol / h) / math.log(INV_PHI)))
    c = a + INV_PHI_SQUARE * h
    d = a + INV_PHI * h
    yc = f(c)
    yd = f(d)

    for _ in range(n - 1):
        if yc < yd:
            b = d
            d = c
            yd = yc
            h = INV_PHI * h
            c = a + INV_PHI_SQUARE * h
            yc = f(c)
        else:
            a = c
            c = d
            yc = yd
            h = INV_PHI * h
            d = a + INV_PHI * h
            yd = f(d)

    if yc < yd:
        return a, d
    return c, b


def _energy_at(g_x, g_v, rho_v1):
    params = ModelParams.canonical(g_x, g_v, rho_v1)
    velocities = signal_velocities(params)
    alpha = velocities.ratio ** 2
    return energy_index(params), alpha


def optimize_energy_index(g_x, g_v, rho_v1_min=-0.5, rho_v1_max=0.0, tol=1e-8):
    """rho_{v,1} minimizing I_E over the range, restricted to attenuating (alpha < 1) points"""
    if not (g_x < 0 and g_v < 0):
        raise ConfigurationError("optimize_energy_index needs g_x < 0 and g_v < 0")

    def objective(rho):
        value, alpha = _energy_at(g_x, g_v, rho)
        return value if alpha < 1 else math.inf

    lo, hi = golden_section(objective, rho_v1_min, rho_v1_max, tol)
    best = (lo + hi) / 2
    # the optimum may sit on an edge of the range
    candidates = [best, min(rho_v1_min, rho_v1_max), max(rho_v1_min, rho_v1_max)]
    best = min(candidates, key=objective)
    value, alpha = _energy_at(g_x, g_v, best)
    admissible = math.isfinite(value) and alpha < 1
    return EnergyOptimum(rho_v1=best, I_E=value, attenuation=alpha, admissible=admissible)
