"""
Gaussian states and their fourth-moment calculus.

Quadratures are ordered (x1, p1, x2, p2, ...). For a Gaussian state every
ordered product of centred quadratures decouples into pairings of the
ordered two-point function G = V + i(hbar/2)Omega; the Weyl-symmetric
products use V alone.
"""

import math
import sys
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from config import DEFAULT_HBAR, FOCK_TAIL_LEVELS, GRAY, RESET
from core.errors import ConfigError, InvalidStateError, SpecError, TruncationError
from core.moments import MomentSet
from core.operators import QuantumState, psd_check
from core.settings_store import settings

_QUADRATURE = {"x": 0, "p": 1}

# Dense tensor-product Fock spaces above this size are refused
MAX_FOCK_SPACE = 4096


def symplectic_form(n_modes: int) -> np.ndarray:
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


@dataclass(frozen=True, eq=False)
class GaussianState:
    """First and second moments of a Gaussian state, checked for physicality."""
    n_modes: int
    means: np.ndarray
    cov: np.ndarray
    hbar: float = DEFAULT_HBAR

    def __post_init__(self):
        n = int(self.n_modes)
        if n < 1:
            raise InvalidStateError(f"n_modes must be positive, got {self.n_modes}")
        if not math.isfinite(self.hbar) or self.hbar <= 0:
            raise InvalidStateError(f"hbar must be positive, got {self.hbar}")
        means = np.array(self.means, dtype=float).reshape(-1)
        cov = np.array(self.cov, dtype=float)
        if means.shape != (2 * n,) or cov.shape != (2 * n, 2 * n):
            raise InvalidStateError(
                f"{n}-mode state needs 2n means and a 2n x 2n covariance, got {means.shape} and {cov.shape}")
        if not (np.all(np.isfinite(means)) and np.all(np.isfinite(cov))):
            raise InvalidStateError("Gaussian state has non-finite moments")
        asym = float(np.max(np.abs(cov - cov.T)))
        if asym > settings.tolerance("herm") * max(1.0, float(np.max(np.abs(cov)))):
            raise InvalidStateError(f"covariance is not symmetric (max asymmetry {asym:.3e})")
        cov = 0.5 * (cov + cov.T)

        report = psd_check(cov + 0.5j * self.hbar * symplectic_form(n))
        if not report.is_psd:
            raise InvalidStateError(
                f"covariance violates V + i(hbar/2)Omega >= 0 (min eigenvalue {report.min_eigenvalue:.3e})")

        means.setflags(write=False)
        cov.setflags(write=False)
        object.__setattr__(self, "n_modes", n)
        object.__setattr__(self, "means", means)
        object.__setattr__(self, "cov", cov)
        object.__setattr__(self, "hbar", float(self.hbar))

    @classmethod
    def single_mode(cls, sxx: float, spp: float, sxp: float = 0.0,
                    mean_x: float = 0.0, mean_p: float = 0.0,
                    hbar: float = DEFAULT_HBAR) -> "GaussianState":
        return cls(1, [mean_x, mean_p], [[sxx, sxp], [sxp, spp]], hbar)

    @classmethod
    def vacuum(cls, n_modes: int = 1, hbar: float = DEFAULT_HBAR) -> "GaussianState":
        return cls(n_modes, np.zeros(2 * n_modes), 0.5 * hbar * np.eye(2 * n_modes), hbar)

    @property
    def sxx(self) -> float:
        return float(self.cov[0, 0])

    @property
    def spp(self) -> float:
        return float(self.cov[1, 1])

    @property
    def sxp(self) -> float:
        return float(self.cov[0, 1])

    def two_point(self) -> np.ndarray:
        """Ordered correlator G_ab = <dr_a dr_b>."""
        return self.cov + 0.5j * self.hbar * symplectic_form(self.n_modes)

    def purity_gap(self) -> float:
        """det(2V/hbar) - 1; zero for pure states."""
        return float(np.linalg.det(2.0 * self.cov / self.hbar)) - 1.0

    def is_pure(self, tol: float = 1e-9) -> bool:
        return abs(self.purity_gap()) <= tol

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n_modes": self.n_modes,
            "means": self.means.tolist(),
            "cov": self.cov.tolist(),
            "hbar": self.hbar,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any], hbar: Optional[float] = None) -> "GaussianState":
        try:
            n_modes = int(data["n_modes"])
            cov = data["cov"]
        except KeyError as e:
            raise SpecError("missing key", field=str(e.args[0])) from None
        means = data.get("means", [0.0] * (2 * n_modes))
        return cls(n_modes, means, cov, hbar if hbar is not None else data.get("hbar", DEFAULT_HBAR))


# --- Fourth moments ---

def wick_fourth(ab: float, cd: float, ac: float, bd: float, ad: float, bc: float) -> float:
    """Symmetric mean <ABCD>_W of centred Gaussian operators from their pair moments."""
    return ab * cd + ac * bd + ad * bc


def _pattern(gs: GaussianState, pattern: str) -> List[int]:
    if gs.n_modes != 1:
        raise InvalidStateError("fourth-moment patterns are single-mode only")
    if len(pattern) != 4 or any(ch not in _QUADRATURE for ch in pattern):
        raise ValueError(f"pattern must be four characters from 'x'/'p', got '{pattern}'")
    return [_QUADRATURE[ch] for ch in pattern]


def weyl_fourth(gs: GaussianState, pattern: str) -> float:
    """Weyl-symmetrized mean of the four centred quadratures named by pattern, e.g. 'xxpp'."""
    a, b, c, d = _pattern(gs, pattern)
    V = gs.cov
    return wick_fourth(V[a, b], V[c, d], V[a, c], V[b, d], V[a, d], V[b, c])


def ordered_fourth(gs: GaussianState, pattern: str) -> complex:
    """Mean of the product dr_a dr_b dr_c dr_d taken in exactly the given order."""
    a, b, c, d = _pattern(gs, pattern)
    G = gs.two_point()
    return complex(G[a, b] * G[c, d] + G[a, c] * G[b, d] + G[a, d] * G[b, c])


SYMMETRIC_TO_ORDERED = ("x2p2_sym_from_ordered", "xp_plus_px_sq")


def symmetric_to_ordered(correction_id: str, gs: GaussianState) -> float:
    """
    Ordered fourth moments from the Weyl-symmetric one.

    x2p2_sym_from_ordered: 1/2 <dx^2 dp^2 + dp^2 dx^2>
    xp_plus_px_sq:         <(dx dp + dp dx)^2>
    """
    sym = weyl_fourth(gs, "xxpp")
    hbar2 = gs.hbar ** 2
    if correction_id == "x2p2_sym_from_ordered":
        return sym - 0.5 * hbar2
    if correction_id == "xp_plus_px_sq":
        ordered_sum = 2.0 * (sym - 0.5 * hbar2)  # <x^2p^2 + p^2x^2>
        return 2.0 * ordered_sum + 3.0 * hbar2
    raise KeyError(f"unknown correction '{correction_id}', expected one of {SYMMETRIC_TO_ORDERED}")


# --- Moment sets of linear and quadratic observables ---

def linear_moments(gs: GaussianState, rows, labels: Sequence[str] = ()) -> MomentSet:
    """Moments of z = R r for real combinations R of the quadratures."""
    R = np.atleast_2d(np.array(rows, dtype=float))
    if R.shape[1] != 2 * gs.n_modes:
        raise InvalidStateError(f"rows need {2 * gs.n_modes} columns, got {R.shape[1]}")
    X = R @ gs.cov @ R.T
    Y = R @ (0.5 * gs.hbar * symplectic_form(gs.n_modes)) @ R.T
    return MomentSet(means=R @ gs.means, X=X, Y=Y, hbar=gs.hbar, labels=tuple(labels))


def quadratic_moments(gs: GaussianState, forms: Sequence[np.ndarray],
                      labels: Sequence[str] = ()) -> MomentSet:
    """
    Moments of z_m = sum_ab Q^m_ab dr_a dr_b for real symmetric Q^m.
    The connected four-point part is 2 tr(G^T Q^m G Q^n); its real and
    imaginary parts are X_mn and Y_mn.
    """
    size = 2 * gs.n_modes
    Qs = []
    for k, Q in enumerate(forms):
        Q = np.array(Q, dtype=float)
        if Q.shape != (size, size) or np.max(np.abs(Q - Q.T)) > 0:
            raise InvalidStateError(f"quadratic form {k} must be a symmetric {size}x{size} matrix")
        Qs.append(Q)

    G = gs.two_point()
    n = len(Qs)
    C = np.empty((n, n), dtype=complex)
    for m in range(n):
        GQG = G.T @ Qs[m] @ G
        for k in range(n):
            C[m, k] = 2.0 * np.sum(GQG * Qs[k])
    means = np.array([np.sum(Q * gs.cov) for Q in Qs])
    return MomentSet(means=means, X=C.real, Y=C.imag, hbar=gs.hbar, labels=tuple(labels))


QUAD_TRIPLE_LABELS = ("dp^2", "dx^2", "(dp dx + dx dp)/2")


def quad_triple_forms() -> List[np.ndarray]:
    return [
        np.array([[0.0, 0.0], [0.0, 1.0]]),
        np.array([[1.0, 0.0], [0.0, 0.0]]),
        np.array([[0.0, 0.5], [0.5, 0.0]]),
    ]


def quad_triple_moments(gs: GaussianState) -> MomentSet:
    """
    Moments of (dp^2, dx^2, (dp dx + dx dp)/2) for a single-mode Gaussian state.

    X12 is the centred covariance 2 sxp^2 - hbar^2/2; the uncentred symmetric
    product mean spp sxx + 2 sxp^2 - hbar^2/2 is `quad_triple_product_mean`.
    """
    if gs.n_modes != 1:
        raise InvalidStateError("the quadratic triple is defined for one mode")
    return quadratic_moments(gs, quad_triple_forms(), QUAD_TRIPLE_LABELS)


def quad_triple_product_mean(gs: GaussianState) -> float:
    """1/2 <dp^2 dx^2 + dx^2 dp^2> = spp sxx + 2 sxp^2 - hbar^2/2 (not centred by <dp^2><dx^2>)."""
    if gs.n_modes != 1:
        raise InvalidStateError("the quadratic triple is defined for one mode")
    return symmetric_to_ordered("x2p2_sym_from_ordered", gs)


def quad_triple_zero_comm_closed_form(gs: GaussianState) -> Tuple[float, float]:
    """
    (lhs, rhs) of the zero-commutator bound for the quadratic triple in closed form:
    2 spp sxx >= 32 hbar^2 spp sxx / (9 <(dp dx + dx dp)^2>).
    Equals the generic bound when sxp = 0, weaker otherwise.
    """
    if gs.n_modes != 1:
        raise InvalidStateError("the quadratic triple is defined for one mode")
    spp_sxx = gs.spp * gs.sxx
    lhs = 2.0 * spp_sxx
    rhs = 32.0 * gs.hbar ** 2 * spp_sxx / (9.0 * symmetric_to_ordered("xp_plus_px_sq", gs))
    return lhs, rhs


# --- Fock-basis realization ---

def _tail_error(what: str, tail: float, dim: int):
    raise TruncationError(f"{what} does not fit in {dim} Fock levels per mode", tail, 2 * dim)


def _quadratic_hamiltonian(gs: GaussianState, work: int) -> np.ndarray:
    """H = 1/2 dr^T V^-1 dr compressed onto `work` levels per mode."""
    from core.states import fock_quadrature_matrices

    n = gs.n_modes
    M = np.linalg.inv(gs.cov)
    x, p = fock_quadrature_matrices(work + 1, gs.hbar)
    eye_big = np.eye(work + 1)
    eye = np.eye(work)

    # per-mode centred quadratures and their compressed products
    singles = []
    products = []
    for mode in range(n):
        dx = x - gs.means[2 * mode] * eye_big
        dp = p - gs.means[2 * mode + 1] * eye_big
        quads = (dx, dp)
        singles.append([q[:work, :work] for q in quads])
        products.append([[(qa @ qb)[:work, :work] for qb in quads] for qa in quads])

    def embed(mode: int, local: np.ndarray, other_mode: Optional[int] = None,
              other_local: Optional[np.ndarray] = None) -> np.ndarray:
        out = np.ones((1, 1))
        for k in range(n):
            if k == mode:
                factor = local
            elif k == other_mode:
                factor = other_local
            else:
                factor = eye
            out = np.kron(out, factor)
        return out

    size = work ** n
    H = np.zeros((size, size), dtype=complex)
    for a in range(2 * n):
        for b in range(2 * n):
            if M[a, b] == 0.0:
                continue
            ma, qa = divmod(a, 2)
            mb, qb = divmod(b, 2)
            if ma == mb:
                term = embed(ma, products[ma][qa][qb])
            else:
                term = embed(ma, singles[ma][qa], mb, singles[mb][qb])
            H += 0.5 * M[a, b] * term
    return 0.5 * (H + H.conj().T)


def _outside_weight(populations: np.ndarray, n_modes: int, work: int, dim: int) -> float:
    grid = populations.reshape((work,) * n_modes)
    inside = grid[(slice(0, dim),) * n_modes]
    return max(0.0, float(np.sum(grid) - np.sum(inside)))


def _truncate(vector_or_rho: np.ndarray, n_modes: int, work: int, dim: int) -> np.ndarray:
    if vector_or_rho.ndim == 1:
        return vector_or_rho.reshape((work,) * n_modes)[(slice(0, dim),) * n_modes].reshape(-1)
    shaped = vector_or_rho.reshape((work,) * (2 * n_modes))
    cut = shaped[(slice(0, dim),) * (2 * n_modes)]
    return cut.reshape(dim ** n_modes, dim ** n_modes)


def fock_realization(gs: GaussianState, dim: int) -> QuantumState:
    """
    The Gaussian state in a truncated Fock basis with `dim` levels per mode.

    Single-mode pure states are projected onto Hermite functions. Mixed
    single-mode states are the Gibbs state of H = 1/2 dr^T V^-1 dr, and
    multi-mode pure states its ground state on the tensor-product space.
    """
    from core.states import pure_gaussian_fock_vector

    if dim < 2:
        raise ConfigError(f"Fock dimension must be at least 2, got {dim}")
    n = gs.n_modes
    # slightly sub-minimal determinants pass the physicality slack
    pure = gs.is_pure() or gs.purity_gap() < 0.0

    if n == 1 and pure:
        vector = pure_gaussian_fock_vector(gs.sxx, gs.sxp, gs.means[0], gs.means[1], dim, gs.hbar)
        return QuantumState.pure(vector, hbar=gs.hbar)
    if n > 1 and not pure:
        raise InvalidStateError("Fock realization of mixed multi-mode states is not supported")

    work = dim + FOCK_TAIL_LEVELS
    if work ** n > MAX_FOCK_SPACE:
        raise ConfigError(f"{n} modes at {dim} levels needs a {work ** n}-dimensional space, "
                          f"limit is {MAX_FOCK_SPACE}")
    energies, vectors = np.linalg.eigh(_quadratic_hamiltonian(gs, work))
    tol = settings.tolerance("tail")

    if pure:
        ground = vectors[:, 0]
        tail = _outside_weight(np.abs(ground) ** 2, n, work, dim)
        if settings.verbose:
            print(f"{GRAY}[Gaussian] ground-state tail weight {tail:.2e} at dim {dim}{RESET}", file=sys.stderr)
        if tail > tol:
            _tail_error("Gaussian ground state", tail, dim)
        return QuantumState.pure(_truncate(ground, n, work, dim), hbar=gs.hbar)

    nu = math.sqrt(float(np.linalg.det(gs.cov)))
    q = (nu - 0.5 * gs.hbar) / (nu + 0.5 * gs.hbar)
    beta = -(nu / gs.hbar) * math.log(q)
    weights = np.exp(-beta * (energies - energies[0]))
    weights /= np.sum(weights)
    rho = (vectors * weights) @ vectors.conj().T
    tail = _outside_weight(np.real(np.diag(rho)), n, work, dim)
    if settings.verbose:
        print(f"{GRAY}[Gaussian] Gibbs-state tail weight {tail:.2e} at dim {dim}{RESET}", file=sys.stderr)
    if tail > tol:
        _tail_error("Gaussian mixed state", tail, dim)
    rho = _truncate(rho, n, work, dim)
    return QuantumState.mixed(rho / np.trace(rho).real, hbar=gs.hbar)
