"""
Hermitian linear algebra substrate: operators, states, expectation values,
commutators and positive semi-definiteness checks.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from config import DEFAULT_HBAR
from core.errors import (
    DimensionMismatchError, ImaginaryResidueError, InvalidStateError, NonHermitianError
)
from core.settings_store import settings


def _frozen(array) -> np.ndarray:
    out = np.array(array, dtype=complex, copy=True)
    out.setflags(write=False)
    return out


def hermiticity_error(matrix: np.ndarray) -> float:
    """Largest entrywise |M - M^dagger|."""
    m = np.asarray(matrix)
    if m.size == 0:
        return 0.0
    return float(np.max(np.abs(m - m.conj().T)))


def hermitize(matrix: np.ndarray) -> np.ndarray:
    m = np.asarray(matrix, dtype=complex)
    return 0.5 * (m + m.conj().T)


def _require_square(matrix: np.ndarray, what: str):
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.shape[0] < 1:
        raise DimensionMismatchError(f"{what} must be a non-empty square matrix, got shape {matrix.shape}")


@dataclass(frozen=True, eq=False)
class Operator:
    """Finite-dimensional Hermitian observable."""
    matrix: np.ndarray
    label: str = ""

    def __post_init__(self):
        m = _frozen(self.matrix)
        _require_square(m, f"operator '{self.label}'")
        err = hermiticity_error(m)
        if err > settings.tolerance("herm"):
            raise NonHermitianError(f"operator '{self.label}' is not Hermitian (max |M - M^+| = {err:.3e})")
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_matrix(cls, matrix, label: str = "") -> "Operator":
        """Build from a product that is Hermitian up to rounding."""
        return cls(hermitize(matrix), label)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __add__(self, other: "Operator") -> "Operator":
        _require_same_dim(self.dim, other.dim)
        return Operator(self.matrix + other.matrix, f"{self.label}+{other.label}")

    def __sub__(self, other: "Operator") -> "Operator":
        _require_same_dim(self.dim, other.dim)
        return Operator(self.matrix - other.matrix, f"{self.label}-{other.label}")

    def scaled(self, factor: float, label: Optional[str] = None) -> "Operator":
        return Operator(float(factor) * self.matrix, label if label is not None else f"{factor:g}*{self.label}")

    def shifted(self, constant: float, label: Optional[str] = None) -> "Operator":
        """Add constant times the identity."""
        return Operator(self.matrix + float(constant) * np.eye(self.dim),
                        label if label is not None else self.label)

    def squared(self, label: Optional[str] = None) -> "Operator":
        return Operator.from_matrix(self.matrix @ self.matrix, label if label is not None else f"{self.label}^2")

    def symmetrized_product(self, other: "Operator", label: Optional[str] = None) -> "Operator":
        """(AB + BA)/2, Hermitian for Hermitian A, B."""
        _require_same_dim(self.dim, other.dim)
        ab = self.matrix @ other.matrix
        return Operator.from_matrix(0.5 * (ab + ab.conj().T),
                                    label if label is not None else f"sym({self.label},{other.label})")


def identity(dim: int, label: str = "I") -> Operator:
    return Operator(np.eye(dim), label)


@dataclass(frozen=True, eq=False)
class QuantumState:
    """Pure state (vector) or mixed state (density matrix) with its hbar convention."""
    vector: Optional[np.ndarray] = None
    rho: Optional[np.ndarray] = None
    hbar: float = DEFAULT_HBAR

    def __post_init__(self):
        if (self.vector is None) == (self.rho is None):
            raise InvalidStateError("exactly one of vector or rho must be given")
        if not np.isfinite(self.hbar) or self.hbar <= 0:
            raise InvalidStateError(f"hbar must be positive, got {self.hbar}")
        object.__setattr__(self, "hbar", float(self.hbar))

        if self.vector is not None:
            v = np.array(self.vector, dtype=complex).reshape(-1)
            if v.size < 1:
                raise InvalidStateError("state vector is empty")
            norm = np.linalg.norm(v)
            if abs(norm - 1.0) > settings.tolerance("norm"):
                raise InvalidStateError(f"state vector is not normalized (norm {norm:.15g})")
            v.setflags(write=False)
            object.__setattr__(self, "vector", v)
            return

        rho = _frozen(self.rho)
        _require_square(rho, "density matrix")
        err = hermiticity_error(rho)
        if err > settings.tolerance("herm"):
            raise InvalidStateError(f"density matrix is not Hermitian (max |rho - rho^+| = {err:.3e})")
        trace = np.trace(rho).real
        if abs(trace - 1.0) > settings.tolerance("norm"):
            raise InvalidStateError(f"density matrix trace is {trace:.15g}, expected 1")
        lowest = float(np.linalg.eigvalsh(rho)[0])
        if lowest < -settings.tolerance("mixed_eig"):
            raise InvalidStateError(f"density matrix has negative eigenvalue {lowest:.3e}")
        object.__setattr__(self, "rho", rho)

    @classmethod
    def pure(cls, vector, hbar: float = DEFAULT_HBAR, normalize: bool = True) -> "QuantumState":
        v = np.array(vector, dtype=complex).reshape(-1)
        if normalize:
            norm = np.linalg.norm(v)
            if norm == 0 or not np.isfinite(norm):
                raise InvalidStateError("cannot normalize a zero or non-finite vector")
            v = v / norm
        return cls(vector=v, hbar=hbar)

    @classmethod
    def mixed(cls, rho, hbar: float = DEFAULT_HBAR) -> "QuantumState":
        return cls(rho=hermitize(rho), hbar=hbar)

    @property
    def kind(self) -> str:
        return "pure" if self.vector is not None else "mixed"

    @property
    def dim(self) -> int:
        return self.vector.shape[0] if self.vector is not None else self.rho.shape[0]

    def density_matrix(self) -> np.ndarray:
        if self.rho is not None:
            return self.rho
        return np.outer(self.vector, self.vector.conj())

    def populations(self) -> np.ndarray:
        """Diagonal of the density matrix in the stored basis."""
        if self.vector is not None:
            return np.abs(self.vector) ** 2
        return np.real(np.diag(self.rho))


@dataclass(frozen=True)
class PsdReport:
    min_eigenvalue: float
    is_psd: bool
    tolerance: float


def _require_same_dim(a: int, b: int):
    if a != b:
        raise DimensionMismatchError(f"dimension mismatch: {a} vs {b}")


def raw_mean(state: QuantumState, matrix: np.ndarray) -> complex:
    """<psi|M|psi> or Tr(rho M) for an arbitrary (not necessarily Hermitian) M."""
    m = np.asarray(matrix)
    _require_same_dim(state.dim, m.shape[0])
    if state.vector is not None:
        return complex(np.vdot(state.vector, m @ state.vector))
    return complex(np.einsum("ij,ji->", state.rho, m))


def real_part_checked(value: complex, what: str = "expectation value") -> float:
    """Discard the imaginary residue, refusing anything above the configured slack."""
    slack = settings.tolerance("imag") * max(1.0, abs(value.real))
    if abs(value.imag) > slack:
        raise ImaginaryResidueError(f"{what} has imaginary part {value.imag:.3e} (allowed {slack:.1e})")
    return float(value.real)


def expectation(state: QuantumState, op: Operator) -> float:
    """Real mean value of a Hermitian observable."""
    _require_same_dim(state.dim, op.dim)
    return real_part_checked(raw_mean(state, op.matrix), f"<{op.label}>")


def commutator(a: Operator, b: Operator) -> np.ndarray:
    """ab - ba; anti-Hermitian for Hermitian inputs."""
    _require_same_dim(a.dim, b.dim)
    return a.matrix @ b.matrix - b.matrix @ a.matrix


def psd_check(matrix, tol: Optional[float] = None) -> PsdReport:
    """Smallest eigenvalue of a Hermitian matrix against a slack."""
    m = np.asarray(matrix, dtype=complex)
    _require_square(m, "matrix")
    err = hermiticity_error(m)
    if err > settings.tolerance("herm") * max(1.0, float(np.max(np.abs(m)))):
        raise NonHermitianError(f"psd_check needs a Hermitian matrix (max |M - M^+| = {err:.3e})")
    tolerance = settings.tolerance("psd") if tol is None else float(tol)
    lowest = float(np.linalg.eigvalsh(hermitize(m))[0])
    return PsdReport(min_eigenvalue=lowest, is_psd=lowest >= -tolerance, tolerance=tolerance)
