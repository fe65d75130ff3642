# scripts/model.py
import sys
import os
import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np
from scipy.integrate import quad

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
from config import TOLERANCES
from scripts.exceptions import ConfigurationError, NormalizationError, StateDimensionError


@dataclass(frozen=True)
class ModelParams:
    """
    Gains and nearest-neighbor stencils of the linearized array.
    Stencils are stored as (rho_{-1}, rho_0, rho_{+1}).
    """
    g_x: float
    g_v: float
    rho_x: tuple = (-0.5, 1.0, -0.5)
    rho_v: tuple = (-1.0, 1.0, 0.0)

    def __post_init__(self):
        object.__setattr__(self, 'rho_x', tuple(float(r) for r in self.rho_x))
        object.__setattr__(self, 'rho_v', tuple(float(r) for r in self.rho_v))
        if len(self.rho_x) != 3 or len(self.rho_v) != 3:
            raise ConfigurationError("stencils must have exactly three weights")

    @classmethod
    def canonical(cls, g_x, g_v, rho_v1):
        """Canonical form: rho_{x,0}=rho_{v,0}=1, rho_{x,+-1}=-1/2"""
        return cls(g_x=float(g_x), g_v=float(g_v),
                   rho_x=(-0.5, 1.0, -0.5),
                   rho_v=(-1.0 - rho_v1, 1.0, float(rho_v1)))

    @property
    def rho_v1(self):
        return self.rho_v[2]

    @property
    def rho_x1(self):
        return self.rho_x[2]

    def check(self):
        """Reject stencils whose weights do not sum to zero"""
        tol = TOLERANCES['stencil_sum']
        for name, rho in (('rho_x', self.rho_x), ('rho_v', self.rho_v)):
            if abs(sum(rho)) > tol:
                raise ConfigurationError(
                    f"{name} weights must sum to 0, got {sum(rho):.3e}")
        if not all(math.isfinite(v) for v in (self.g_x, self.g_v, *self.rho_x, *self.rho_v)):
            raise ConfigurationError("model parameters must be finite")
        return self

    def is_canonical(self, tol=TOLERANCES['canonical']):
        return (abs(self.rho_x[1] - 1.0) <= tol and abs(self.rho_v[1] - 1.0) <= tol
                and abs(self.rho_x[0] + 0.5) <= tol and abs(self.rho_x[2] + 0.5) <= tol)


class BoundaryKind(Enum):
    VARIABLE_MASS = 'variable_mass'
    REGULAR = 'regular'
    CUSTOM = 'custom'
    PERIODIC = 'periodic'


@dataclass(frozen=True)
class BoundarySpec:
    kind: BoundaryKind = BoundaryKind.REGULAR
    beta_x: float = None
    beta_v: float = None

    @classmethod
    def from_name(cls, name, beta_x=None, beta_v=None):
        try:
            kind = BoundaryKind(name)
        except ValueError:
            valid = ', '.join(k.value for k in BoundaryKind)
            raise ConfigurationError(f"unknown boundary '{name}' (expected one of: {valid})")
        if kind is BoundaryKind.CUSTOM and (beta_x is None or beta_v is None):
            raise ConfigurationError("custom boundary needs beta_x and beta_v")
        return cls(kind, beta_x, beta_v)

    def resolve(self, params):
        """Feedback coefficients (beta_x, beta_v) of the last agent, None when periodic"""
        if self.kind is BoundaryKind.VARIABLE_MASS:
            return -params.rho_x[0], -params.rho_v[0]
        if self.kind is BoundaryKind.REGULAR:
            return 1.0, 1.0
        if self.kind is BoundaryKind.CUSTOM:
            return float(self.beta_x), float(self.beta_v)
        return None


class LeaderKind(Enum):
    RAMP = 'ramp'
    PULSE = 'pulse'


@dataclass(frozen=True)
class LeaderInput:
    """
    Prescribed orbit of agent 0.
    RAMP: z_0 = max(0, v0 t). PULSE: z_0 = v0 p(t) with the raised cosine
    p(t) = cos^2(pi t / (2 eps)) / eps on [-eps, eps].
    """
    kind: LeaderKind = LeaderKind.RAMP
    v0: float = 1.0
    epsilon: float = None

    @classmethod
    def ramp(cls, v0=1.0):
        return cls(LeaderKind.RAMP, float(v0))

    @classmethod
    def pulse(cls, v0=1.0, epsilon=1.0):
        if epsilon is None or epsilon <= 0:
            raise ConfigurationError("pulse half-width epsilon must be positive")
        return cls(LeaderKind.PULSE, float(v0), float(epsilon))

    def profile(self, t):
        """Unit pulse p(t) and its derivative p'(t)"""
        eps = self.epsilon
        t = np.asarray(t, dtype=float)
        inside = np.abs(t) <= eps
        phase = np.pi * t / eps
        p = np.where(inside, np.cos(phase / 2.0) ** 2 / eps, 0.0)
        dp = np.where(inside, -np.pi / (2.0 * eps ** 2) * np.sin(phase), 0.0)
        return p, dp

    def orbit(self, t):
        if self.kind is LeaderKind.RAMP:
            if np.ndim(t) == 0:
                return (self.v0 * t, self.v0) if t >= 0 else (0.0, 0.0)
            t = np.asarray(t, dtype=float)
            started = t >= 0
            return np.where(started, self.v0 * t, 0.0), np.where(started, self.v0, 0.0)
        p, dp = self.profile(t)
        if np.ndim(t) == 0:
            return self.v0 * float(p), self.v0 * float(dp)
        return self.v0 * p, self.v0 * dp

    def pulse_integral(self):
        """Time integral of p by adaptive quadrature"""
        value, _ = quad(lambda s: float(self.profile(s)[0]), -self.epsilon, self.epsilon,
                        epsabs=1e-13, epsrel=1e-13)
        return value

    def check(self):
        if not math.isfinite(self.v0):
            raise ConfigurationError("leader velocity must be finite")
        if self.kind is LeaderKind.PULSE:
            if self.epsilon is None or self.epsilon <= 0:
                raise ConfigurationError("pulse half-width epsilon must be positive")
            if abs(self.pulse_integral() - 1.0) > TOLERANCES['pulse_integral']:
                raise ConfigurationError("pulse profile does not have unit integral")
        return self


@dataclass(frozen=True)
class FlockSystem:
    """
    Agents 1..N of the linearized array as a first-order system.
    State layout is (z_1..z_N, zdot_1..zdot_N); the leader is forcing.
    """
    params: ModelParams
    boundary: BoundarySpec
    leader: LeaderInput
    n_agents: int

    @property
    def periodic(self):
        return self.boundary.kind is BoundaryKind.PERIODIC

    @property
    def dimension(self):
        return 2 * self.n_agents

    @property
    def betas(self):
        return self.boundary.resolve(self.params)

    def initial_state(self):
        return np.zeros(self.dimension)

    def leader_state(self, t):
        if self.leader is None:
            return 0.0, 0.0
        return self.leader.orbit(t)

    def rhs(self, t, state):
        """Derivative (zdot_1..zdot_N, zddot_1..zddot_N)"""
        n = self.n_agents
        state = np.asarray(state, dtype=float)
        if state.shape != (2 * n,):
            raise StateDimensionError(f"state must have length {2 * n}, got {state.shape}")
        p = self.params
        z, v = state[:n], state[n:]
        cxm, cx0, cxp = (p.g_x * r for r in p.rho_x)
        cvm, cv0, cvp = (p.g_v * r for r in p.rho_v)

        if self.periodic:
            acc = (cxm * np.roll(z, 1) + cx0 * z + cxp * np.roll(z, -1)
                   + cvm * np.roll(v, 1) + cv0 * v + cvp * np.roll(v, -1))
            return np.concatenate((v, acc))

        z0, v0 = self.leader.orbit(t)
        acc = np.empty(n)
        # interior rows k = 1..N-1
        acc[:-1] = cx0 * z[:-1] + cxp * z[1:] + cv0 * v[:-1] + cvp * v[1:]
        acc[1:-1] += cxm * z[:-2] + cvm * v[:-2]
        acc[0] += cxm * z0 + cvm * v0
        # last agent
        beta_x, beta_v = self.betas
        acc[-1] = p.g_x * beta_x * (z[-1] - z[-2]) + p.g_v * beta_v * (v[-1] - v[-2])
        return np.concatenate((v, acc))

    def positions(self, state):
        return np.asarray(state)[:self.n_agents]

    def observe(self, t, state):
        """Last-agent orbit, leader orbit and the relative orbit y = z_N - z_0"""
        z_last = float(state[self.n_agents - 1])
        z_lead = float(self.leader_state(t)[0])
        return {'z_N': z_last, 'z_0': z_lead, 'y': z_last - z_lead}


def assemble(params, boundary, leader, n_agents):
    """Validate the configuration and build the evaluable system"""
    if int(n_agents) != n_agents or n_agents < 2:
        raise ConfigurationError(f"need at least 2 agents, got {n_agents}")
    params.check()
    if boundary.kind is BoundaryKind.PERIODIC:
        if leader is not None:
            raise ConfigurationError("periodic system has no leader")
    else:
        if leader is None:
            raise ConfigurationError(f"{boundary.kind.value} boundary needs a leader input")
        leader.check()
        if boundary.kind is BoundaryKind.CUSTOM:
            boundary.resolve(params)
    return FlockSystem(params, boundary, leader, int(n_agents))


def rhs_eval(system, t, state):
    return system.rhs(t, state)


def leader_orbit(leader, t):
    return leader.orbit(t)


def normalize_stencils(params):
    """
    Scale stencils so that rho_{x,0} = rho_{v,0} = 1 (gains absorb the factors).
    Raises NormalizationError when the necessary stability conditions fail.
    """
    violated = []
    if abs(params.rho_x[0] - params.rho_x[2]) > TOLERANCES['canonical']:
        violated.append("ρ_{x,-1}=ρ_{x,1}")
    if not params.g_x * params.rho_x[1] < 0:
        violated.append("g_xρ_{x,0}<0")
    if not params.g_v * params.rho_v[1] < 0:
        violated.append("g_vρ_{v,0}<0")
    if violated:
        raise NormalizationError(violated)

    sx, sv = params.rho_x[1], params.rho_v[1]
    return ModelParams(g_x=params.g_x * sx, g_v=params.g_v * sv,
                       rho_x=tuple(r / sx for r in params.rho_x),
                       rho_v=tuple(r / sv for r in params.rho_v))


def normalize(params):
    """
    Canonical parameters with |g_x| = 1 and the factor sqrt|g_x| of the
    time rescale tau = sqrt|g_x| t. Velocities in tau units are v / time_scale.
    """
    scaled = normalize_stencils(params)
    time_scale = math.sqrt(abs(scaled.g_x))
    return replace(scaled, g_x=-1.0, g_v=scaled.g_v / time_scale), time_scale
