# tests/conftest.py
import sys
import os

import numpy as np
import pytest

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
from scripts.model import BoundarySpec, LeaderInput, ModelParams, assemble


class HarmonicOscillator:
    """x'' = -x with x(0)=1, x'(0)=0; exact solution cos t"""
    dimension = 2

    def initial_state(self):
        return np.array([1.0, 0.0])

    def rhs(self, t, state):
        return np.array([state[1], -state[0]])

    def positions(self, state):
        return np.asarray(state)[:1]

    def observe(self, t, state):
        return {'x': float(state[0]), 'y': float(state[0])}


@pytest.fixture
def oscillator():
    return HarmonicOscillator()


@pytest.fixture
def asymmetric_params():
    """g_x = g_v = -2, rho_{v,1} = 0: c_+- = 1 +- sqrt(2)"""
    return ModelParams.canonical(-2.0, -2.0, 0.0)


@pytest.fixture
def symmetric_params():
    """g_x = g_v = -2, rho_{v,1} = -1/2: c_+- = +-1"""
    return ModelParams.canonical(-2.0, -2.0, -0.5)


@pytest.fixture
def small_system():
    params = ModelParams.canonical(-1.0, -1.0, 0.0)
    return assemble(params, BoundarySpec.from_name('regular'), LeaderInput.ramp(1.0), 10)
