"""
Uncertainty inequalities evaluated on a MomentSet.

Every evaluator returns an InequalityReport with margin = lhs - rhs, except
the Robertson determinant chain, whose margin is its weaker link.
Indices are 0-based on input; reports carry 1-based indices.
The naive triple product bound is kept on purpose: it is false, and
`triple-product-naive-INCORRECT` reproduces the counterexample.
"""

import math
import sys
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from config import YELLOW, RESET
from core.errors import DegenerateDenominatorError, NonFiniteError, TupleSizeError
from core.moments import MomentSet
from core.settings_store import settings


@dataclass(frozen=True)
class InequalityReport:
    id: str
    lhs: float
    rhs: float
    margin: float
    satisfied: bool
    relative_margin: float
    n_required: int
    params: Tuple[float, ...] = ()
    indices: Tuple[int, ...] = ()  # 1-based
    fingerprint: str = ""
    correct: bool = True
    details: Dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "id": self.id,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "margin": self.margin,
            "relative_margin": self.relative_margin,
            "satisfied": self.satisfied,
            "params": list(self.params),
            "indices": list(self.indices),
            "n_required": self.n_required,
            "correct": self.correct,
            "fingerprint": self.fingerprint,
            "details": dict(self.details),
        }


@dataclass(frozen=True)
class FourTupleDerived:
    P: float
    Psi: float
    PsiStar: float
    Lambda: float


@dataclass(frozen=True)
class CatalogEntry:
    id: str
    n_required: int  # 0 means any size >= 2
    summary: str
    reference: str
    correct: bool = True


CATALOG: Tuple[CatalogEntry, ...] = (
    CatalogEntry("robertson-pair", 2, "X_jj X_kk >= Y_jk^2",
                 "Robertson (1929) two-observable product relation"),
    CatalogEntry("schrodinger-pair", 2, "X_jj X_kk >= X_jk^2 + Y_jk^2",
                 "Schrodinger (1930) / Robertson (1934) relation with the covariance term"),
    CatalogEntry("det-f", 0, "det(X + iY) >= 0",
                 "positive semi-definiteness of F = X + iY, any N"),
    CatalogEntry("triple-det", 3, "det(X + iY) >= 0 written out for three observables",
                 "det F >= 0 expanded for N = 3 with all covariance cross terms"),
    CatalogEntry("triple-product-naive-INCORRECT", 3,
                 "X11 X22 X33 >= X11 Y23^2 + X22 Y13^2 + X33 Y12^2 (false in general)",
                 "N = 3 determinant with covariances dropped; broken by correlated coherent states",
                 correct=False),
    CatalogEntry("triple-weighted-sum", 3, "sum a_k^2 X_kk >= 2 sqrt(sum (a_j a_k Y_jk)^2)",
                 "F >= 0 contracted with real weights a_k, covariance-free"),
    CatalogEntry("triple-sum", 3, "X11 + X22 + X33 >= 2 sqrt(Y12^2 + Y23^2 + Y13^2)",
                 "weighted sum with a_k = 1"),
    CatalogEntry("triple-sum-robertson", 3, "X11 + X22 + X33 >= |Y12| + |Y23| + |Y13|",
                 "sum of the three Robertson pair relations; weaker than triple-sum"),
    CatalogEntry("triple-sum-power", 3, "sum X_kk^(n+1) >= 2 sqrt(sum Y_jk^2 X_jj^n X_kk^n)",
                 "weighted sum with a_k^2 = X_kk^n"),
    CatalogEntry("triple-product", 3, "X11 X22 X33 >= 4/9 (X11 Y23^2 + X22 Y13^2 + X33 Y12^2)",
                 "weighted sum optimized over a_k; corrected covariance-free triple product"),
    CatalogEntry("triple-pair-bound", 3, "sqrt(X11 X22) >= sqrt((2 Y12/3)^2 + B^2) + B",
                 "triple product solved for the uncertainty product of the first pair"),
    CatalogEntry("zero-commutator-pair", 3, "sqrt(X11 X22) >= 8 |Y13 Y23| / (9 X33)",
                 "pair bound for commuting z1, z2 through an auxiliary z3"),
    CatalogEntry("quad-determinant", 4, "(g^2 - 4V)^2 >= 64 (xi1 xi2 xi3 xi4)^2 Lambda^2",
                 "F >= 0 for N = 4 in compact weighted form"),
    CatalogEntry("quad-sum", 4, "|(sum X_kk)^2 - 4 sum Y_jk^2| >= 8 Lambda",
                 "compact four-observable form with xi_k = 1"),
    CatalogEntry("quad-product", 4, "8P >= 2 Psi + Lambda^2 + Lambda sqrt(4 Psi + Lambda^2)",
                 "compact form optimized over xi_k; four-variance product relation"),
    CatalogEntry("quad-product-star", 4, "8P >= 2 Psi* + Lambda^2 + Lambda sqrt(4 Psi* + Lambda^2)",
                 "quad-product with Psi bounded below by pair Robertson relations"),
    CatalogEntry("quad-product-quadratic", 4, "(4P - Psi)^2 >= 4 P Lambda^2",
                 "quadratic form the four-variance product relation is solved from"),
    CatalogEntry("robertson-det-chain", 0, "prod X_kk >= det X >= det Y",
                 "Hadamard inequality chained with Robertson (1934) det X >= det Y"),
)

_CATALOG_BY_ID = {entry.id: entry for entry in CATALOG}


def catalog() -> List[CatalogEntry]:
    return list(CATALOG)


def catalog_entry(inequality_id: str) -> CatalogEntry:
    try:
        return _CATALOG_BY_ID[inequality_id]
    except KeyError:
        raise KeyError(f"unknown inequality id '{inequality_id}'") from None


def _report(inequality_id: str, lhs: float, rhs: float, ms: MomentSet,
            params: Sequence[float] = (), indices: Sequence[int] = (),
            details: Optional[Dict[str, float]] = None,
            margin: Optional[float] = None) -> InequalityReport:
    """Uniform report; `margin` defaults to lhs - rhs and always decides `satisfied`."""
    lhs, rhs = float(lhs), float(rhs)
    if not (math.isfinite(lhs) and math.isfinite(rhs)):
        raise NonFiniteError(f"{inequality_id}: non-finite sides lhs={lhs}, rhs={rhs}")
    entry = _CATALOG_BY_ID[inequality_id]
    margin = lhs - rhs if margin is None else float(margin)
    return InequalityReport(
        id=inequality_id,
        lhs=lhs,
        rhs=rhs,
        margin=margin,
        satisfied=margin >= -settings.tolerance("ineq"),
        relative_margin=margin / max(abs(lhs), abs(rhs), 1.0),
        n_required=entry.n_required,
        params=tuple(float(p) for p in params),
        indices=tuple(int(i) for i in indices),
        fingerprint=ms.fingerprint,
        correct=entry.correct,
        details=dict(details or {}),
    )


def _require_n(ms: MomentSet, n: int, inequality_id: str):
    if ms.n != n:
        raise TupleSizeError(f"{inequality_id} needs {n} observables, got {ms.n}")


def _pair_indices(ms: MomentSet, j: int, k: int):
    ms.check_index(j, k)
    if j == k:
        raise TupleSizeError("pair bounds need two distinct indices")


def _triple(ms: MomentSet):
    """Variances and the three commutator means Y12, Y23, Y13."""
    X, Y = ms.X, ms.Y
    return X[0, 0], X[1, 1], X[2, 2], Y[0, 1], Y[1, 2], Y[0, 2]


def _x33(ms: MomentSet, inequality_id: str) -> float:
    x33 = float(ms.X[2, 2])
    if x33 <= 0.0:
        raise DegenerateDenominatorError(f"{inequality_id} divides by X33, which is {x33:.3e}")
    return x33


# --- Pair bounds ---

def eval_robertson_pair(ms: MomentSet, j: int, k: int) -> InequalityReport:
    _pair_indices(ms, j, k)
    lhs = ms.X[j, j] * ms.X[k, k]
    rhs = ms.Y[j, k] ** 2
    return _report("robertson-pair", lhs, rhs, ms, indices=(j + 1, k + 1))


def eval_schrodinger_pair(ms: MomentSet, j: int, k: int) -> InequalityReport:
    _pair_indices(ms, j, k)
    lhs = ms.X[j, j] * ms.X[k, k]
    rhs = ms.X[j, k] ** 2 + ms.Y[j, k] ** 2
    return _report("schrodinger-pair", lhs, rhs, ms, indices=(j + 1, k + 1))


# --- Determinant forms ---

def det_f(ms: MomentSet) -> float:
    value = complex(np.linalg.det(ms.F))
    scale = max(1.0, float(np.max(np.abs(ms.F))) ** ms.n)
    if abs(value.imag) > settings.tolerance("psd") * scale:
        raise NonFiniteError(f"det(X + iY) has imaginary part {value.imag:.3e}")
    return value.real


def eval_detF(ms: MomentSet) -> InequalityReport:
    return _report("det-f", det_f(ms), 0.0, ms)


def eval_n3_det(ms: MomentSet) -> InequalityReport:
    _require_n(ms, 3, "triple-det")
    X, Y = ms.X, ms.Y
    x12, x23, x31 = X[0, 1], X[1, 2], X[2, 0]
    y12, y23, y31 = Y[0, 1], Y[1, 2], Y[2, 0]
    lhs = X[0, 0] * X[1, 1] * X[2, 2]
    rhs = (X[0, 0] * (x23 ** 2 + y23 ** 2)
           + X[1, 1] * (x31 ** 2 + y31 ** 2)
           + X[2, 2] * (x12 ** 2 + y12 ** 2)
           - 2.0 * x12 * x23 * x31
           + 2.0 * (x12 * y23 * y31 + x23 * y31 * y12 + x31 * y12 * y23))
    return _report("triple-det", lhs, rhs, ms)


def eval_false5(ms: MomentSet) -> InequalityReport:
    """The covariance-dropped triple product bound. Violated by some physical states."""
    _require_n(ms, 3, "triple-product-naive-INCORRECT")
    x11, x22, x33, y12, y23, y13 = _triple(ms)
    lhs = x11 * x22 * x33
    rhs = x11 * y23 ** 2 + x22 * y13 ** 2 + x33 * y12 ** 2
    return _report("triple-product-naive-INCORRECT", lhs, rhs, ms)


# --- Three observables ---

def eval_gen3(ms: MomentSet, alphas: Sequence[float]) -> InequalityReport:
    _require_n(ms, 3, "triple-weighted-sum")
    if len(alphas) != 3:
        raise TupleSizeError(f"triple-weighted-sum takes 3 weights, got {len(alphas)}")
    a1, a2, a3 = (float(a) for a in alphas)
    x11, x22, x33, y12, y23, y13 = _triple(ms)
    lhs = a1 ** 2 * x11 + a2 ** 2 * x22 + a3 ** 2 * x33
    rhs = 2.0 * math.sqrt((a1 * a2 * y12) ** 2 + (a2 * a3 * y23) ** 2 + (a1 * a3 * y13) ** 2)
    return _report("triple-weighted-sum", lhs, rhs, ms, params=(a1, a2, a3))


def eval_sum3(ms: MomentSet) -> InequalityReport:
    _require_n(ms, 3, "triple-sum")
    x11, x22, x33, y12, y23, y13 = _triple(ms)
    lhs = x11 + x22 + x33
    rhs = 2.0 * math.sqrt(y12 ** 2 + y23 ** 2 + y13 ** 2)
    return _report("triple-sum", lhs, rhs, ms)


def eval_sum3_robertson(ms: MomentSet) -> InequalityReport:
    _require_n(ms, 3, "triple-sum-robertson")
    x11, x22, x33, y12, y23, y13 = _triple(ms)
    lhs = x11 + x22 + x33
    rhs = abs(y12) + abs(y23) + abs(y13)
    return _report("triple-sum-robertson", lhs, rhs, ms)


def eval_sum3_power(ms: MomentSet, n_exp: float) -> InequalityReport:
    _require_n(ms, 3, "triple-sum-power")
    n_exp = float(n_exp)
    if n_exp < 0 or not math.isfinite(n_exp):
        raise ValueError(f"exponent must be a nonnegative real, got {n_exp}")
    x11, x22, x33, y12, y23, y13 = _triple(ms)
    variances = np.array([x11, x22, x33])
    if not n_exp.is_integer() and np.any(variances < -settings.tolerance("sym")):
        raise ValueError("fractional exponent of a negative variance")
    # rounding-level negatives
    x11, x22, x33 = (max(v, 0.0) for v in variances)
    lhs = x11 ** (n_exp + 1) + x22 ** (n_exp + 1) + x33 ** (n_exp + 1)
    rhs = 2.0 * math.sqrt(y12 ** 2 * x11 ** n_exp * x22 ** n_exp
                          + y23 ** 2 * x33 ** n_exp * x22 ** n_exp
                          + y13 ** 2 * x11 ** n_exp * x33 ** n_exp)
    return _report("triple-sum-power", lhs, rhs, ms, params=(n_exp,))


def eval_prod3(ms: MomentSet) -> InequalityReport:
    _require_n(ms, 3, "triple-product")
    x11, x22, x33, y12, y23, y13 = _triple(ms)
    lhs = x11 * x22 * x33
    rhs = (4.0 / 9.0) * (x11 * y23 ** 2 + x22 * y13 ** 2 + x33 * y12 ** 2)
    return _report("triple-product", lhs, rhs, ms)


def eval_pair_bound13(ms: MomentSet) -> InequalityReport:
    """Bound on sqrt(X11 X22) with the third observable as a helper."""
    _require_n(ms, 3, "triple-pair-bound")
    x11, x22, _, y12, y23, y13 = _triple(ms)
    x33 = _x33(ms, "triple-pair-bound")
    lhs = math.sqrt(max(x11 * x22, 0.0))
    b = 4.0 * abs(y13 * y23) / (9.0 * x33)
    rhs = math.sqrt((2.0 * y12 / 3.0) ** 2 + b ** 2) + b
    return _report("triple-pair-bound", lhs, rhs, ms, details={"B": b})


def eval_zero_comm(ms: MomentSet, warn: bool = True) -> InequalityReport:
    """Nonzero lower bound on sqrt(X11 X22) even when <[z1, z2]> vanishes."""
    _require_n(ms, 3, "zero-commutator-pair")
    x11, x22, _, y12, y23, y13 = _triple(ms)
    x33 = _x33(ms, "zero-commutator-pair")
    if warn and abs(y12) > 1e-9:
        print(f"{YELLOW}[Inequalities] zero-commutator-pair used with Y12 = {y12:.3e}; "
              f"triple-pair-bound is the sharper bound here{RESET}", file=sys.stderr)
    lhs = math.sqrt(max(x11 * x22, 0.0))
    rhs = 8.0 * abs(y13 * y23) / (9.0 * x33)
    return _report("zero-commutator-pair", lhs, rhs, ms)


# --- Four observables ---

_PAIRS4 = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))


def _lambda_signed(Y: np.ndarray) -> float:
    return float(Y[0, 1] * Y[2, 3] + Y[1, 2] * Y[0, 3] + Y[2, 0] * Y[1, 3])


def four_derived(ms: MomentSet) -> FourTupleDerived:
    _require_n(ms, 4, "four_derived")
    X, Y = ms.X, ms.Y
    x = np.diag(X)
    P = float(x[0] * x[1] * x[2] * x[3])
    Psi = float(Y[0, 1] ** 2 * x[2] * x[3] + Y[0, 2] ** 2 * x[1] * x[3] + Y[0, 3] ** 2 * x[2] * x[1]
                + Y[1, 2] ** 2 * x[0] * x[3] + Y[1, 3] ** 2 * x[2] * x[0] + Y[2, 3] ** 2 * x[0] * x[1])
    PsiStar = float(2.0 * (Y[0, 1] ** 2 * Y[2, 3] ** 2 + Y[1, 2] ** 2 * Y[0, 3] ** 2
                           + Y[2, 0] ** 2 * Y[1, 3] ** 2))
    return FourTupleDerived(P=P, Psi=Psi, PsiStar=PsiStar, Lambda=abs(_lambda_signed(Y)))


def eval_main4(ms: MomentSet, xis: Sequence[float]) -> InequalityReport:
    _require_n(ms, 4, "quad-determinant")
    if len(xis) != 4:
        raise TupleSizeError(f"quad-determinant takes 4 weights, got {len(xis)}")
    xi = np.array([float(v) for v in xis])
    g = float(np.sum(xi ** 2 * np.diag(ms.X)))
    V = float(sum((xi[j] * xi[k] * ms.Y[j, k]) ** 2 for j, k in _PAIRS4))
    lam = abs(_lambda_signed(ms.Y))
    lhs = (g ** 2 - 4.0 * V) ** 2
    rhs = 64.0 * float(np.prod(xi)) ** 2 * lam ** 2
    return _report("quad-determinant", lhs, rhs, ms, params=tuple(xi), details={"g": g, "V": V, "Lambda": lam})


def eval_sum4(ms: MomentSet) -> InequalityReport:
    _require_n(ms, 4, "quad-sum")
    trace = float(np.sum(np.diag(ms.X)))
    ysq = float(sum(ms.Y[j, k] ** 2 for j, k in _PAIRS4))
    lam = abs(_lambda_signed(ms.Y))
    return _report("quad-sum", abs(trace ** 2 - 4.0 * ysq), 8.0 * lam, ms)


def _prod4_rhs(psi: float, lam: float) -> float:
    return 2.0 * psi + lam ** 2 + lam * math.sqrt(max(4.0 * psi + lam ** 2, 0.0))


def eval_prod4(ms: MomentSet) -> InequalityReport:
    d = four_derived(ms)
    return _report("quad-product", 8.0 * d.P, _prod4_rhs(d.Psi, d.Lambda), ms,
                   details={"P": d.P, "Psi": d.Psi, "Lambda": d.Lambda})


def eval_prod4_star(ms: MomentSet) -> InequalityReport:
    """quad-product with Psi replaced by its variance-free lower bound Psi*."""
    d = four_derived(ms)
    return _report("quad-product-star", 8.0 * d.P, _prod4_rhs(d.PsiStar, d.Lambda), ms,
                   details={"P": d.P, "PsiStar": d.PsiStar, "Lambda": d.Lambda})


def eval_prod4_quadratic(ms: MomentSet) -> InequalityReport:
    d = four_derived(ms)
    return _report("quad-product-quadratic", (4.0 * d.P - d.Psi) ** 2, 4.0 * d.P * d.Lambda ** 2, ms,
                   details={"P": d.P, "Psi": d.Psi, "Lambda": d.Lambda})


# --- Robertson determinant chain ---

def eval_robertson_det(ms: MomentSet) -> InequalityReport:
    """
    prod X_kk >= det X >= det Y, reported as one chain.
    lhs/rhs are the chain ends; margin is the weaker of the two links.
    """
    product = float(np.prod(np.diag(ms.X)))
    det_x = float(np.linalg.det(ms.X))
    det_y = float(np.linalg.det(ms.Y))
    hadamard = product - det_x
    robertson = det_x - det_y
    binding = min(hadamard, robertson)
    return _report("robertson-det-chain", product, det_y, ms, margin=binding,
                   details={"product_of_variances": product, "det_x": det_x, "det_y": det_y,
                            "margin_hadamard": hadamard, "margin_robertson": robertson,
                            "chain_span": product - det_y})


def lambda_pfaffian_identity(ms: MomentSet) -> Tuple[float, float]:
    """(det Y, Lambda^2); equal for every antisymmetric 4x4 Y."""
    _require_n(ms, 4, "lambda_pfaffian_identity")
    return float(np.linalg.det(ms.Y)), _lambda_signed(ms.Y) ** 2


# --- Suites ---

def evaluate_all(ms: MomentSet, alphas: Sequence[float] = (1.0, 1.0, 1.0),
                 xis: Sequence[float] = (1.0, 1.0, 1.0, 1.0),
                 n_exp: float = 1.0) -> List[InequalityReport]:
    """Every inequality that applies to the tuple size, in catalog order."""
    reports: List[InequalityReport] = []
    pairs = [(j, k) for j in range(ms.n) for k in range(j + 1, ms.n)]
    reports.extend(eval_robertson_pair(ms, j, k) for j, k in pairs)
    reports.extend(eval_schrodinger_pair(ms, j, k) for j, k in pairs)
    reports.append(eval_detF(ms))

    if ms.n == 3:
        reports.append(eval_n3_det(ms))
        reports.append(eval_false5(ms))
        reports.append(eval_gen3(ms, alphas))
        reports.append(eval_sum3(ms))
        reports.append(eval_sum3_robertson(ms))
        reports.append(eval_sum3_power(ms, n_exp))
        reports.append(eval_prod3(ms))
        if ms.X[2, 2] > 0.0:
            reports.append(eval_pair_bound13(ms))
            reports.append(eval_zero_comm(ms))
        elif settings.verbose:
            print(f"{YELLOW}[Inequalities] X33 = 0, skipping bounds that divide by it{RESET}",
                  file=sys.stderr)
    elif ms.n == 4:
        reports.append(eval_main4(ms, xis))
        reports.append(eval_sum4(ms))
        reports.append(eval_prod4(ms))
        reports.append(eval_prod4_star(ms))
        reports.append(eval_prod4_quadratic(ms))

    reports.append(eval_robertson_det(ms))
    return reports


def evaluate(inequality_id: str, ms: MomentSet, params: Sequence[float] = (),
             warn: bool = True) -> InequalityReport:
    """Evaluate one inequality by id. Pair ids take 0-based (j, k) in params, default (0, 1)."""
    params = list(params)
    if inequality_id in ("robertson-pair", "schrodinger-pair"):
        j, k = (int(params[0]), int(params[1])) if len(params) >= 2 else (0, 1)
        fn = eval_robertson_pair if inequality_id == "robertson-pair" else eval_schrodinger_pair
        return fn(ms, j, k)
    if inequality_id == "triple-weighted-sum":
        return eval_gen3(ms, params or (1.0, 1.0, 1.0))
    if inequality_id == "triple-sum-power":
        return eval_sum3_power(ms, params[0] if params else 1.0)
    if inequality_id == "quad-determinant":
        return eval_main4(ms, params or (1.0, 1.0, 1.0, 1.0))
    if inequality_id == "zero-commutator-pair":
        return eval_zero_comm(ms, warn=warn)
    simple = {
        "det-f": eval_detF,
        "triple-det": eval_n3_det,
        "triple-product-naive-INCORRECT": eval_false5,
        "triple-sum": eval_sum3,
        "triple-sum-robertson": eval_sum3_robertson,
        "triple-product": eval_prod3,
        "triple-pair-bound": eval_pair_bound13,
        "quad-sum": eval_sum4,
        "quad-product": eval_prod4,
        "quad-product-star": eval_prod4_star,
        "quad-product-quadratic": eval_prod4_quadratic,
        "robertson-det-chain": eval_robertson_det,
    }
    try:
        fn = simple[inequality_id]
    except KeyError:
        raise KeyError(f"unknown inequality id '{inequality_id}'") from None
    return fn(ms)
