import math
import os
import sys

# Project root on the path so `config` and `core` import without installation
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

import numpy as np

from core.gaussian import GaussianState
from core.operators import Operator, QuantumState

SPECS_DIR = os.path.abspath(os.path.join(os.path.dirname(__file__), '..', 'specs'))


def spec_path(*parts) -> str:
    return os.path.join(SPECS_DIR, *parts)


def random_pure_state(rng: np.random.Generator, dim: int, hbar: float = 1.0) -> QuantumState:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return QuantumState.pure(v, hbar=hbar)


def random_mixed_state(rng: np.random.Generator, dim: int, rank: int = 2) -> QuantumState:
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ g.conj().T
    return QuantumState.mixed(rho / np.trace(rho).real)


def random_hermitian(rng: np.random.Generator, dim: int, label: str = "", scale: float = 1.0) -> Operator:
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return Operator.from_matrix(scale * (a + a.conj().T) / 2, label)


def random_antisymmetric(rng: np.random.Generator, n: int) -> np.ndarray:
    a = rng.normal(size=(n, n))
    return a - a.T


def random_gaussian_state(rng: np.random.Generator, hbar: float = 1.0, max_squeeze: float = 0.4,
                          max_thermal: float = 2.0, max_shift: float = 1.0,
                          pure: bool = False) -> GaussianState:
    """Rotated, squeezed, thermal, displaced single-mode state."""
    nu = 1.0 if pure else rng.uniform(1.0, max_thermal)
    s = rng.uniform(-max_squeeze, max_squeeze)
    theta = rng.uniform(0.0, math.pi)
    rot = np.array([[math.cos(theta), -math.sin(theta)], [math.sin(theta), math.cos(theta)]])
    cov = 0.5 * hbar * nu * rot @ np.diag([math.exp(2 * s), math.exp(-2 * s)]) @ rot.T
    means = rng.uniform(-max_shift, max_shift, size=2)
    return GaussianState(1, means, cov, hbar)
