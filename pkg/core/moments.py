"""
Mean vector, covariance matrix X, commutator matrix Y and F = X + iY
for an ordered tuple of observables.
"""

import hashlib
import json
from dataclasses import dataclass, field
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np

from config import DEFAULT_HBAR, MAX_TUPLE_SIZE
from core.errors import (
    DimensionMismatchError, InvalidIndexError, InvalidStateError, SpecError, TupleSizeError
)
from core.operators import Operator, QuantumState, expectation, raw_mean, real_part_checked
from core.settings_store import settings


@dataclass(frozen=True, eq=False)
class MomentSet:
    """
    Second moments of an operator tuple.
    X_mn = <{dz_m, dz_n}>/2 (X_kk are the variances), Y_mn = <[z_m, z_n]>/(2i).
    """
    means: np.ndarray
    X: np.ndarray
    Y: np.ndarray
    hbar: float = DEFAULT_HBAR
    labels: Tuple[str, ...] = field(default=())
    centered: bool = True

    def __post_init__(self):
        means = np.array(self.means, dtype=float).reshape(-1)
        X = np.array(self.X, dtype=float)
        Y = np.array(self.Y, dtype=float)
        n = means.shape[0]
        if X.shape != (n, n) or Y.shape != (n, n):
            raise DimensionMismatchError(f"X and Y must be {n}x{n}, got {X.shape} and {Y.shape}")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(Y)) and np.all(np.isfinite(means))):
            raise InvalidStateError("moment set contains non-finite entries")

        tol = settings.tolerance("sym")
        scale = max(1.0, float(np.max(np.abs(X))) if n else 1.0)
        if n and np.max(np.abs(X - X.T)) > tol * scale:
            raise InvalidStateError("X is not symmetric")
        if n and np.max(np.abs(Y + Y.T)) > tol * scale:
            raise InvalidStateError("Y is not antisymmetric")
        if n and np.min(np.diag(X)) < -tol * scale:
            raise InvalidStateError(f"negative variance {np.min(np.diag(X)):.3e}")

        # exact (anti)symmetry from here on
        X = 0.5 * (X + X.T)
        Y = 0.5 * (Y - Y.T)
        for arr in (means, X, Y):
            arr.setflags(write=False)
        labels = tuple(self.labels) if self.labels else tuple(f"z{k + 1}" for k in range(n))
        if len(labels) != n:
            raise DimensionMismatchError(f"{len(labels)} labels for {n} observables")

        object.__setattr__(self, "means", means)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "Y", Y)
        object.__setattr__(self, "hbar", float(self.hbar))
        object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return self.means.shape[0]

    @property
    def F(self) -> np.ndarray:
        return self.X + 1j * self.Y

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "means": self.means.tolist(),
            "X": self.X.tolist(),
            "Y": self.Y.tolist(),
            "hbar": self.hbar,
            "labels": list(self.labels),
            "centered": self.centered,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "MomentSet":
        try:
            ms = cls(
                means=data["means"],
                X=data["X"],
                Y=data["Y"],
                hbar=data.get("hbar", DEFAULT_HBAR),
                labels=tuple(data.get("labels", ())),
                centered=bool(data.get("centered", True)),
            )
        except KeyError as e:
            raise SpecError("missing key", field=str(e.args[0])) from None
        if "n" in data and int(data["n"]) != ms.n:
            raise SpecError(f"declared n={data['n']} but means has {ms.n} entries", field="n")
        return ms

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @property
    def fingerprint(self) -> str:
        """SHA-256 of the canonical JSON form, shortened."""
        return hashlib.sha256(self.to_json().encode("utf-8")).hexdigest()[:16]

    def check_index(self, *indices: int):
        for k in indices:
            if not isinstance(k, (int, np.integer)) or k < 0 or k >= self.n:
                raise InvalidIndexError(f"index {k} out of range for a {self.n}-tuple")


def moment_set(state: QuantumState, ops: Sequence[Operator], centered: bool = True) -> MomentSet:
    """
    Moments of an ordered operator tuple in a state.
    Operators are centered first (dz = z - <z>I) to keep cancellation small for large means.
    """
    ops = list(ops)
    n = len(ops)
    if not 2 <= n <= MAX_TUPLE_SIZE:
        raise TupleSizeError(f"tuple size must be in [2, {MAX_TUPLE_SIZE}], got {n}")
    for op in ops:
        if op.dim != state.dim:
            raise DimensionMismatchError(f"operator '{op.label}' has dim {op.dim}, state has dim {state.dim}")

    means = np.array([expectation(state, op) for op in ops])
    eye = np.eye(state.dim)
    shifted: List[np.ndarray] = [
        op.matrix - means[k] * eye if centered else op.matrix for k, op in enumerate(ops)
    ]

    X = np.zeros((n, n))
    Y = np.zeros((n, n))
    for m in range(n):
        for k in range(m, n):
            prod = shifted[m] @ shifted[k]
            same = m == k or np.array_equal(shifted[m], shifted[k])
            reverse = prod if same else shifted[k] @ shifted[m]
            anti = raw_mean(state, prod + reverse)
            X[m, k] = X[k, m] = 0.5 * real_part_checked(anti, f"<{{{ops[m].label},{ops[k].label}}}>")
            if m != k:
                comm = raw_mean(state, prod - reverse)
                Y[m, k] = real_part_checked(comm / 2j, f"<[{ops[m].label},{ops[k].label}]>")
                Y[k, m] = -Y[m, k]

    return MomentSet(means=means, X=X, Y=Y, hbar=state.hbar,
                     labels=tuple(op.label for op in ops), centered=centered)


def schrodinger_bound(ms: MomentSet, j: int, k: int) -> float:
    """G^2 = X_jk^2 + Y_jk^2, the right side of the Robertson-Schrodinger pair bound."""
    ms.check_index(j, k)
    if j == k:
        raise InvalidIndexError("schrodinger_bound needs two distinct indices")
    return float(ms.X[j, k] ** 2 + ms.Y[j, k] ** 2)
