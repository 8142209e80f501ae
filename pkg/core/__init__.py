# core package
from core.errors import UncertaintyError
from core.operators import Operator, QuantumState, expectation, commutator, psd_check
from core.moments import MomentSet, moment_set, schrodinger_bound
from core.inequalities import InequalityReport, catalog, evaluate, evaluate_all
from core.gaussian import GaussianState, wick_fourth, quad_triple_moments, fock_realization
from core.states import (
    fock_pair, ccs_state, ccs_moments, spin_operators, spin_superposition, gaussian2d_moments
)
from core.search import SearchProblem, SearchResult, minimize, sweep

__all__ = [
    "UncertaintyError",
    "Operator", "QuantumState", "expectation", "commutator", "psd_check",
    "MomentSet", "moment_set", "schrodinger_bound",
    "InequalityReport", "catalog", "evaluate", "evaluate_all",
    "GaussianState", "wick_fourth", "quad_triple_moments", "fock_realization",
    "fock_pair", "ccs_state", "ccs_moments", "spin_operators", "spin_superposition", "gaussian2d_moments",
    "SearchProblem", "SearchResult", "minimize", "sweep",
]
