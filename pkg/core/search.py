"""
Tightness searches: minimize an inequality's margin or lhs/rhs ratio over a
parametrized state family, or sweep the parameters on a grid.

minimize evaluates a scrambled Sobol grid, then runs bounded Nelder-Mead
descents from the best grid points. Everything is seeded, so a problem
reproduces bit for bit on the same platform.
"""

import itertools
import math
import sys
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import optimize
from scipy.stats import qmc

from config import (
    CYAN, GRAY, GREEN, RESET, SEARCH_MIN_STARTS, SEARCH_RATIO_FLOOR, SWEEP_MAX_POINTS
)
from core.errors import DegenerateDenominatorError, SearchError, SpecError, UncertaintyError
from core.inequalities import InequalityReport, catalog_entry, evaluate
from core.settings_store import settings
from core.specs import resolve_moments, with_parameters

OBJECTIVES = ("margin", "ratio")

# stand-in for +inf inside the simplex, keeps vertex comparisons finite
_PENALTY = 1e300


@dataclass(frozen=True)
class SearchProblem:
    inequality_id: str
    state: Dict[str, Any]
    tuple_spec: Dict[str, Any]
    bounds: Tuple[Tuple[str, float, float], ...]
    objective: str = "margin"
    seed: int = 0
    inequality_params: Tuple[float, ...] = ()
    grid: Tuple[int, ...] = ()
    hbar: Optional[float] = None
    fock_dim: Optional[int] = None

    def __post_init__(self):
        try:
            catalog_entry(self.inequality_id)
        except KeyError as e:
            raise SpecError(str(e.args[0]), field="inequality") from None
        if self.objective not in OBJECTIVES:
            raise SpecError(f"objective must be one of {OBJECTIVES}, got {self.objective!r}", field="objective")
        if not self.bounds:
            raise SpecError("at least one parameter bound is required", field="bounds")
        for name, lo, hi in self.bounds:
            if not (math.isfinite(lo) and math.isfinite(hi)) or lo > hi:
                raise SpecError(f"bound [{lo}, {hi}] must be finite with lo <= hi", field=f"bounds.{name}")

    @property
    def param_names(self) -> List[str]:
        return [name for name, _, _ in self.bounds]

    @property
    def lower(self) -> np.ndarray:
        return np.array([lo for _, lo, _ in self.bounds])

    @property
    def upper(self) -> np.ndarray:
        return np.array([hi for _, _, hi in self.bounds])

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SearchProblem":
        if not isinstance(data, dict):
            raise SpecError("search problem must be a JSON object", field="problem")
        for key in ("inequality", "state", "bounds"):
            if key not in data:
                raise SpecError("missing key", field=key)
        raw_bounds = data["bounds"]
        if not isinstance(raw_bounds, dict):
            raise SpecError("bounds must map parameter paths to [lo, hi]", field="bounds")
        bounds = []
        for name, pair in raw_bounds.items():
            if not isinstance(pair, (list, tuple)) or len(pair) != 2:
                raise SpecError("expected [lo, hi]", field=f"bounds.{name}")
            bounds.append((str(name), float(pair[0]), float(pair[1])))
        return cls(
            inequality_id=data["inequality"],
            state=data["state"],
            tuple_spec=data.get("tuple", {}),
            bounds=tuple(bounds),
            objective=data.get("objective", "margin"),
            seed=int(data.get("seed", 0)),
            inequality_params=tuple(float(v) for v in data.get("inequality_params", ())),
            grid=tuple(int(v) for v in data.get("grid", ())),
            hbar=data.get("hbar"),
            fock_dim=data.get("fock_dim"),
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "inequality": self.inequality_id,
            "objective": self.objective,
            "state": self.state,
            "tuple": self.tuple_spec,
            "bounds": {name: [lo, hi] for name, lo, hi in self.bounds},
            "seed": self.seed,
            "inequality_params": list(self.inequality_params),
            "grid": list(self.grid),
            "hbar": self.hbar,
            "fock_dim": self.fock_dim,
        }


@dataclass
class SearchResult:
    best_params: List[float]
    best_objective: float
    evaluations: int
    converged: bool
    param_names: List[str] = field(default_factory=list)
    grid_best_objective: float = math.inf
    best_report: Optional[InequalityReport] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "best_params": dict(zip(self.param_names, self.best_params)),
            "best_objective": self.best_objective,
            "grid_best_objective": self.grid_best_objective,
            "evaluations": self.evaluations,
            "converged": self.converged,
            "best_report": self.best_report.to_dict() if self.best_report else None,
        }


def evaluate_point(problem: SearchProblem, params: Sequence[float]) -> InequalityReport:
    """The inequality report for the state family at one parameter point."""
    assignments = dict(zip(problem.param_names, params))
    try:
        spec = with_parameters(problem.state, assignments)
        ms = resolve_moments(spec, problem.tuple_spec, hbar=problem.hbar, fock_dim=problem.fock_dim)
        return evaluate(problem.inequality_id, ms, problem.inequality_params, warn=False)
    except DegenerateDenominatorError:
        raise
    except UncertaintyError as e:
        raise SearchError(f"objective evaluation failed: {e}", params) from e


def objective_value(problem: SearchProblem, report: InequalityReport) -> float:
    if problem.objective == "margin":
        return report.margin
    if report.rhs < SEARCH_RATIO_FLOOR:
        return math.inf
    return report.lhs / report.rhs


class _Tracker:
    """Counts evaluations and keeps the best point, ties broken by lexicographic params."""

    def __init__(self, problem: SearchProblem, budget: int):
        self.problem = problem
        self.budget = budget
        self.evaluations = 0
        self.best_value = math.inf
        self.best_params: Optional[Tuple[float, ...]] = None
        self.best_report: Optional[InequalityReport] = None

    @property
    def remaining(self) -> int:
        return self.budget - self.evaluations

    def __call__(self, params: np.ndarray) -> float:
        point = tuple(float(v) for v in params)
        self.evaluations += 1
        try:
            report = evaluate_point(self.problem, point)
            value = objective_value(self.problem, report)
        except DegenerateDenominatorError:
            report, value = None, math.inf
        if math.isfinite(value) and (value < self.best_value or (
                value == self.best_value and (self.best_params is None or point < self.best_params))):
            self.best_value, self.best_params, self.best_report = value, point, report
        return min(value, _PENALTY)


def _start_points(problem: SearchProblem, n_starts: int) -> np.ndarray:
    d = len(problem.bounds)
    sampler = qmc.Sobol(d=d, scramble=True, seed=problem.seed)
    unit = sampler.random_base2(m=int(math.ceil(math.log2(n_starts))))
    lo, hi = problem.lower, problem.upper
    return lo + unit * (hi - lo)


def minimize(problem: SearchProblem, starts: Optional[int] = None, restarts: Optional[int] = None,
             max_evaluations: Optional[int] = None, simplex_tol: Optional[float] = None) -> SearchResult:
    n_starts = max(SEARCH_MIN_STARTS, int(starts or settings.get("search.starts")))
    n_restarts = int(restarts or settings.get("search.restarts"))
    budget = int(max_evaluations or settings.get("search.max_evaluations"))
    xtol = float(simplex_tol or settings.get("search.simplex_tol"))
    verbose = settings.verbose

    tracker = _Tracker(problem, budget)
    points = _start_points(problem, n_starts)
    if verbose:
        print(f"{GRAY}[Search] {problem.inequality_id}/{problem.objective}: "
              f"{len(points)} Sobol points in {len(problem.bounds)} dimensions{RESET}", file=sys.stderr)

    scored = []
    for point in points:
        if tracker.remaining <= 0:
            break
        scored.append((tracker(point), tuple(point)))
    grid_best = tracker.best_value
    scored.sort()

    # converged reflects the descent that produced the final best point
    converged = False
    bounds = list(zip(problem.lower, problem.upper))
    for k, (value, start) in enumerate(scored[:n_restarts]):
        if tracker.remaining <= 0 or value >= _PENALTY:
            break
        before = tracker.best_value
        res = optimize.minimize(
            tracker, x0=np.array(start), method="Nelder-Mead", bounds=bounds,
            options={"maxfev": tracker.remaining, "maxiter": tracker.remaining,
                     "xatol": xtol, "fatol": math.inf},
        )
        if k == 0 or tracker.best_value < before:
            converged = bool(res.success)
        if verbose:
            print(f"{CYAN}[Search] restart {k + 1}/{n_restarts}: {res.fun:.12g} "
                  f"after {res.nfev} evaluations{RESET}", file=sys.stderr)

    if tracker.best_params is None:
        bounds_text = ", ".join(f"{name} in [{lo:g}, {hi:g}]" for name, lo, hi in problem.bounds)
        raise SearchError(f"{problem.objective} of {problem.inequality_id} is infinite at every "
                          f"evaluated point ({bounds_text})")
    if verbose:
        print(f"{GREEN}[Search] best {problem.objective} {tracker.best_value:.12g} "
              f"in {tracker.evaluations} evaluations{RESET}", file=sys.stderr)
    return SearchResult(
        best_params=list(tracker.best_params),
        best_objective=tracker.best_value,
        evaluations=tracker.evaluations,
        converged=converged,
        param_names=problem.param_names,
        grid_best_objective=grid_best,
        best_report=tracker.best_report,
    )


@dataclass(frozen=True)
class SweepRow:
    params: Tuple[float, ...]
    report: InequalityReport


@dataclass
class SweepTable:
    param_names: List[str]
    rows: List[SweepRow]

    REPORT_FIELDS = ("lhs", "rhs", "margin", "relative_margin", "satisfied")

    def header(self) -> List[str]:
        return list(self.param_names) + list(self.REPORT_FIELDS)

    def records(self) -> List[List[Any]]:
        return [list(row.params) + [getattr(row.report, f) for f in self.REPORT_FIELDS] for row in self.rows]


def grid_axes(problem: SearchProblem, grid: Sequence[int]) -> List[np.ndarray]:
    if len(grid) != len(problem.bounds):
        raise SearchError(f"grid has {len(grid)} counts for {len(problem.bounds)} parameters")
    axes = []
    for count, (_, lo, hi) in zip(grid, problem.bounds):
        if count < 1:
            raise SearchError(f"grid counts must be positive, got {count}")
        # a single point sits on the lower bound
        axes.append(np.linspace(lo, hi, count) if count > 1 else np.array([lo]))
    return axes


def sweep(problem: SearchProblem, grid: Optional[Sequence[int]] = None) -> SweepTable:
    """Full factorial evaluation, row-major with the last parameter varying fastest."""
    grid = tuple(grid if grid is not None else problem.grid)
    if not grid:
        raise SearchError("sweep needs a grid")
    total = math.prod(grid)
    if total > SWEEP_MAX_POINTS:
        raise SearchError(f"grid of {total} points exceeds the {SWEEP_MAX_POINTS} point limit")
    axes = grid_axes(problem, grid)
    if settings.verbose:
        print(f"{GRAY}[Search] sweeping {total} points{RESET}", file=sys.stderr)

    rows = []
    for point in itertools.product(*axes):
        params = tuple(float(v) for v in point)
        try:
            report = evaluate_point(problem, params)
        except DegenerateDenominatorError as e:
            raise SearchError(str(e), params) from e
        rows.append(SweepRow(params, report))
    return SweepTable(problem.param_names, rows)
