"""
Concrete states and operator tuples: truncated Fock oscillators,
correlated coherent states, spin-j matrices and superpositions, and
the two-dimensional Gaussian wavefunction.
"""

import math
import sys
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from config import DEFAULT_HBAR, GRAY, RESET
from core.errors import DimensionMismatchError, InvalidStateError, TruncationError, TupleSizeError
from core.gaussian import (
    QUAD_TRIPLE_LABELS, GaussianState, fock_realization, linear_moments
)
from core.moments import MomentSet, moment_set
from core.operators import Operator, QuantumState, expectation
from core.settings_store import settings


# --- Truncated oscillator ---

def fock_quadrature_matrices(dim: int, hbar: float = DEFAULT_HBAR) -> Tuple[np.ndarray, np.ndarray]:
    """x = sqrt(hbar/2)(a + a^+), p = i sqrt(hbar/2)(a^+ - a) on `dim` levels."""
    if dim < 2:
        raise DimensionMismatchError(f"Fock dimension must be at least 2, got {dim}")
    a = np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1)
    scale = math.sqrt(hbar / 2.0)
    x = scale * (a + a.T)
    p = 1j * scale * (a.T - a)
    return x.astype(complex), p


@dataclass(frozen=True)
class FockPair:
    dim: int
    x: Operator
    p: Operator
    hbar: float


def fock_pair(dim: int, hbar: float = DEFAULT_HBAR) -> FockPair:
    x, p = fock_quadrature_matrices(dim, hbar)
    return FockPair(dim=dim, x=Operator(x, "x"), p=Operator(p, "p"), hbar=float(hbar))


def mode_operators(dim: int, n_modes: int, hbar: float = DEFAULT_HBAR) -> List[Operator]:
    """(x1, p1, x2, p2, ...) on the tensor product of `n_modes` truncated oscillators."""
    x, p = fock_quadrature_matrices(dim, hbar)
    eye = np.eye(dim)
    ops = []
    for mode in range(n_modes):
        for name, local in (("x", x), ("p", p)):
            full = np.ones((1, 1))
            for k in range(n_modes):
                full = np.kron(full, local if k == mode else eye)
            label = name if n_modes == 1 else f"{name}{mode + 1}"
            ops.append(Operator(full, label))
    return ops


def fock_vacuum(dim: int, modes: int = 1, hbar: float = DEFAULT_HBAR) -> QuantumState:
    if modes not in (1, 2):
        raise InvalidStateError(f"vacuum supports 1 or 2 modes, got {modes}")
    vector = np.zeros(dim ** modes, dtype=complex)
    vector[0] = 1.0
    return QuantumState(vector=vector, hbar=hbar)


def xp_operators(dim: int, hbar: float = DEFAULT_HBAR) -> List[Operator]:
    pair = fock_pair(dim, hbar)
    return [pair.x, pair.p]


def xpxi_operators(dim: int, hbar: float = DEFAULT_HBAR) -> List[Operator]:
    """(x, p, xi = x + p)."""
    pair = fock_pair(dim, hbar)
    xi = pair.x + pair.p
    return [pair.x, pair.p, Operator(xi.matrix, "xi")]


XPXI_ROWS = ((1.0, 0.0), (0.0, 1.0), (1.0, 1.0))


def quad_triple_operators(state: QuantumState) -> List[Operator]:
    """(dp^2, dx^2, (dp dx + dx dp)/2) centred on the state's own means."""
    dim = state.dim
    x, p = fock_quadrature_matrices(dim + 2, state.hbar)
    x0 = expectation(state, Operator(x[:dim, :dim]))
    p0 = expectation(state, Operator(p[:dim, :dim]))
    eye = np.eye(dim + 2)
    dx = x - x0 * eye
    dp = p - p0 * eye
    # products taken one level up, then compressed
    z1 = (dp @ dp)[:dim, :dim]
    z2 = (dx @ dx)[:dim, :dim]
    z3 = 0.5 * (dp @ dx + dx @ dp)[:dim, :dim]
    return [Operator.from_matrix(m, label) for m, label in zip((z1, z2, z3), QUAD_TRIPLE_LABELS)]


# --- Correlated coherent states ---

@dataclass(frozen=True)
class CcsParams:
    """sigma in units of hbar, correlation r in (-1, 1), displacement alpha."""
    sigma: float
    r: float
    alpha: complex = 0j

    def __post_init__(self):
        if not (math.isfinite(self.sigma) and self.sigma > 0):
            raise InvalidStateError(f"sigma must be positive, got {self.sigma}")
        if not (math.isfinite(self.r) and -1.0 < self.r < 1.0):
            raise InvalidStateError(f"correlation r must lie in (-1, 1), got {self.r}")


def ccs_moments(params: CcsParams, hbar: float = DEFAULT_HBAR) -> GaussianState:
    """Analytic moments: sxx spp (1 - r^2) = hbar^2/4 with sxp = r sqrt(sxx spp)."""
    one_minus = 1.0 - params.r ** 2
    sxx = params.sigma * hbar
    spp = hbar ** 2 / (4.0 * sxx * one_minus)
    sxp = params.r * math.sqrt(sxx * spp)
    alpha = complex(params.alpha)
    shift = math.sqrt(2.0 * hbar)
    return GaussianState.single_mode(sxx, spp, sxp, shift * alpha.real, shift * alpha.imag, hbar)


def pure_gaussian_fock_vector(sxx: float, sxp: float, x0: float, p0: float,
                              dim: int, hbar: float = DEFAULT_HBAR) -> np.ndarray:
    """
    Fock coefficients of the pure Gaussian wavefunction with the given moments,
    by quadrature against Hermite functions built from their three-term recurrence.
    Raises TruncationError when more than the tail tolerance lies above `dim`.
    """
    if dim < 2:
        raise DimensionMismatchError(f"Fock dimension must be at least 2, got {dim}")
    spp = (0.25 * hbar ** 2 + sxp ** 2) / sxx
    n_basis = max(2 * dim, dim + 64)

    half_width = 12.0 * math.sqrt(sxx)
    k_max = (abs(p0) + 12.0 * math.sqrt(spp) + math.sqrt(hbar * (2 * n_basis + 1))) / hbar
    step = 0.5 / k_max
    n_points = int(math.ceil(2.0 * half_width / step)) + 1
    xs = np.linspace(x0 - half_width, x0 + half_width, n_points)
    h = xs[1] - xs[0]

    kappa = 2.0 * sxp / hbar
    dx = xs - x0
    psi = (2.0 * math.pi * sxx) ** -0.25 * np.exp(
        -dx ** 2 * (1.0 - 1j * kappa) / (4.0 * sxx) + 1j * p0 * dx / hbar)

    coeffs = np.empty(n_basis, dtype=complex)
    prev = np.zeros_like(xs)
    cur = (math.pi * hbar) ** -0.25 * np.exp(-xs ** 2 / (2.0 * hbar))
    scale = math.sqrt(2.0 / hbar)
    for n in range(n_basis):
        coeffs[n] = h * np.sum(cur * psi)
        nxt = (scale * xs * cur - math.sqrt(n) * prev) / math.sqrt(n + 1)
        prev, cur = cur, nxt

    remaining = 1.0 - np.cumsum(np.abs(coeffs) ** 2)
    tail = max(0.0, float(remaining[dim - 1]))
    tol = settings.tolerance("tail")
    if settings.verbose:
        print(f"{GRAY}[States] Gaussian wavefunction tail weight {tail:.2e} at dim {dim}{RESET}",
              file=sys.stderr)
    if tail > tol:
        fits = np.nonzero(remaining <= tol)[0]
        suggested = int(fits[0]) + 1 if fits.size else 2 * n_basis
        raise TruncationError(f"state does not fit in {dim} Fock levels", tail, max(suggested, dim + 1))
    return coeffs[:dim]


def ccs_state(params: CcsParams, dim: int, hbar: float = DEFAULT_HBAR) -> QuantumState:
    gs = ccs_moments(params, hbar)
    vector = pure_gaussian_fock_vector(gs.sxx, gs.sxp, gs.means[0], gs.means[1], dim, hbar)
    return QuantumState.pure(vector, hbar=hbar)


# --- Angular momentum ---

def spin_operators(two_j: int, hbar: float = DEFAULT_HBAR) -> Tuple[Operator, Operator, Operator]:
    """(Lx, Ly, Lz) in the |j, m> basis ordered m = j, j-1, ..., -j."""
    if int(two_j) != two_j or two_j < 1:
        raise DimensionMismatchError(f"two_j must be a positive integer, got {two_j}")
    two_j = int(two_j)
    j = two_j / 2.0
    m = j - np.arange(two_j + 1)
    # L+ raises m, i.e. moves one index up
    raising = np.diag(np.sqrt(j * (j + 1) - m[1:] * (m[1:] + 1)), k=1) * hbar
    lx = 0.5 * (raising + raising.T)
    ly = -0.5j * (raising - raising.T)
    lz = hbar * np.diag(m)
    return Operator(lx, "Lx"), Operator(ly, "Ly"), Operator(lz.astype(complex), "Lz")


def spin_superposition(coeffs: Sequence[complex], hbar: float = DEFAULT_HBAR) -> QuantumState:
    return QuantumState.pure(np.asarray(coeffs, dtype=complex), hbar=hbar)


def spin_coefficients(theta: Sequence[float], phi: Sequence[float]) -> np.ndarray:
    """
    Unit vector with a real non-negative first entry:
    magnitudes from hyperspherical angles theta, phases phi on entries 1..d-1.
    """
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    if theta.shape != phi.shape or theta.ndim != 1 or theta.size < 1:
        raise DimensionMismatchError(f"theta and phi need equal non-zero length, got {theta.shape}, {phi.shape}")
    d = theta.size + 1
    magnitudes = np.empty(d)
    running = 1.0
    for k in range(d - 1):
        magnitudes[k] = running * math.cos(theta[k])
        running *= math.sin(theta[k])
    magnitudes[-1] = running
    phases = np.concatenate(([1.0 + 0j], np.exp(1j * phi)))
    return magnitudes * phases


def spin_vector_form(state: QuantumState, ops: Sequence[Operator]) -> Tuple[float, float]:
    """(<L^2> - |<L>|^2, hbar |<L>|): the summed triple bound for (Lx, Ly, Lz)."""
    if len(ops) != 3:
        raise TupleSizeError(f"spin_vector_form needs (Lx, Ly, Lz), got {len(ops)} operators")
    ms = moment_set(state, ops)
    return float(np.trace(ms.X)), state.hbar * float(np.linalg.norm(ms.means))


def spin_product_form(ms: MomentSet) -> Tuple[float, float]:
    """(Lxx Lyy Lzz, hbar^2 (Lxx <Lx>^2 + Lyy <Ly>^2 + Lzz <Lz>^2)/9)."""
    if ms.n != 3:
        raise TupleSizeError(f"spin_product_form needs three components, got {ms.n}")
    variances = np.diag(ms.X)
    lhs = float(np.prod(variances))
    rhs = ms.hbar ** 2 * float(np.sum(variances * ms.means ** 2)) / 9.0
    return lhs, rhs


# --- Two-dimensional Gaussian wavefunction ---

@dataclass(frozen=True)
class Gaussian2dParams:
    """psi(x, y) ~ exp(-a x^2/2 - b x y - c y^2/2)."""
    a: float
    b: float
    c: float

    def __post_init__(self):
        if not (self.a > 0 and self.c > 0):
            raise InvalidStateError(f"a and c must be positive, got a={self.a}, c={self.c}")
        if self.D <= 0:
            raise InvalidStateError(f"D = ac - b^2 must be positive, got {self.D}")

    @property
    def D(self) -> float:
        return self.a * self.c - self.b ** 2


PHASE_SPACE_LABELS = ("x", "p_x", "y", "p_y")


def gaussian2d_gaussian_state(params: Gaussian2dParams, hbar: float = DEFAULT_HBAR) -> GaussianState:
    a, b, c, D = params.a, params.b, params.c, params.D
    cov = np.zeros((4, 4))
    cov[0, 0], cov[2, 2], cov[0, 2] = c / (2 * D), a / (2 * D), -b / (2 * D)
    cov[1, 1], cov[3, 3], cov[1, 3] = 0.5 * a * hbar ** 2, 0.5 * c * hbar ** 2, 0.5 * b * hbar ** 2
    cov[2, 0], cov[3, 1] = cov[0, 2], cov[1, 3]
    return GaussianState(2, np.zeros(4), cov, hbar)


def gaussian2d_moments(params: Gaussian2dParams, hbar: float = DEFAULT_HBAR) -> MomentSet:
    """Moments of (x, p_x, y, p_y); the wavefunction is real, so position-momentum covariances vanish."""
    return linear_moments(gaussian2d_gaussian_state(params, hbar), np.eye(4), PHASE_SPACE_LABELS)


def gaussian2d_state(params: Gaussian2dParams, dim: int, hbar: float = DEFAULT_HBAR) -> QuantumState:
    """Tensor-product Fock realization, for cross-checking gaussian2d_moments."""
    return fock_realization(gaussian2d_gaussian_state(params, hbar), dim)
