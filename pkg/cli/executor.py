"""
Command Executor - runs CLI commands against the core library.
"""

import dataclasses
import json
import math
import sys
from typing import Any, Dict

from config import (
    COUNTEREXAMPLE_FOCK_TOL, COUNTEREXAMPLE_R, COUNTEREXAMPLE_RATIO, COUNTEREXAMPLE_SIGMA,
    COUNTEREXAMPLE_TOL, CYAN, EXIT_INPUT_ERROR, EXIT_OK, EXIT_SELF_TEST_FAILED, EXIT_VIOLATION, RESET,
)
from core.settings_store import settings
from cli.output import format_number, write_csv, write_json
from cli.run_config import RunConfig

REPORT_COLUMNS = ("id", "indices", "lhs", "rhs", "margin", "relative_margin", "satisfied", "correct")


def _result(exit_code: int, message: str, data: Any = None) -> Dict[str, Any]:
    return {"success": exit_code == EXIT_OK, "exit_code": exit_code, "message": message, "data": data}


class CommandExecutor:
    """Central executor for the CLI commands."""

    def execute(self, config: RunConfig) -> Dict[str, Any]:
        """
        Execute a command and return a structured result.

        Returns:
            {
                "success": bool,
                "exit_code": int,   # 0 ok / 1 input / 2 violation / 3 self-test failure
                "message": str,     # Human-readable result
                "data": Any         # Payload that was written, if any
            }
        """
        handlers = {
            "verify": self._verify,
            "counterexample": self._counterexample,
            "scan": self._scan,
            "optimize": self._optimize,
            "catalog": self._catalog,
        }
        handler = handlers.get(config.command)
        if handler is None:
            return _result(EXIT_INPUT_ERROR, f"Unknown command: {config.command}")
        try:
            return handler(config)
        except Exception as e:
            return _result(EXIT_INPUT_ERROR, f"Error: {e}")

    # === Commands ===

    def _verify(self, config: RunConfig) -> Dict[str, Any]:
        from core.inequalities import evaluate_all
        from core.specs import load_json, resolve_moments

        if config.state is None:
            return _result(EXIT_INPUT_ERROR, "verify needs --state")
        state_spec = load_json(config.state)
        tuple_spec = load_json(config.tuple) if config.tuple else None
        self._echo(config, always=False)

        ms = resolve_moments(state_spec, tuple_spec, hbar=config.hbar, fock_dim=config.fock_dim)
        reports = evaluate_all(ms)
        violated = [r.id for r in reports if r.correct and not r.satisfied]

        if config.output_format() == "csv":
            rows = [[getattr(r, column) for column in REPORT_COLUMNS] for r in reports]
            write_csv(REPORT_COLUMNS, rows, config.out)
        else:
            write_json([r.to_dict() for r in reports], config.out)

        if violated:
            return _result(EXIT_VIOLATION, f"correct inequalities violated: {', '.join(violated)}",
                           [r.to_dict() for r in reports])
        return _result(EXIT_OK, f"{len(reports)} inequalities checked on a {ms.n}-tuple, all correct ones hold",
                       [r.to_dict() for r in reports])

    def _counterexample(self, config: RunConfig) -> Dict[str, Any]:
        """The correlated coherent state that breaks the naive triple product bound."""
        from core.gaussian import linear_moments
        from core.inequalities import eval_false5, eval_prod3
        from core.moments import moment_set
        from core.states import XPXI_ROWS, CcsParams, ccs_moments, ccs_state, xpxi_operators

        hbar = config.hbar or float(settings.get("physics.hbar"))
        params = CcsParams(COUNTEREXAMPLE_SIGMA, COUNTEREXAMPLE_R)
        if config.fock_dim:
            ms = moment_set(ccs_state(params, config.fock_dim, hbar), xpxi_operators(config.fock_dim, hbar))
            tol, path = COUNTEREXAMPLE_FOCK_TOL, f"fock dim={config.fock_dim}"
        else:
            ms = linear_moments(ccs_moments(params, hbar), XPXI_ROWS, ("x", "p", "xi"))
            tol, path = COUNTEREXAMPLE_TOL, "analytic"

        naive = eval_false5(ms)
        product = eval_prod3(ms)
        L, R = naive.lhs, naive.rhs
        ratio = R / L
        expected_L = hbar ** 3 / (3.0 * math.sqrt(3.0))

        ratio_ok = abs(ratio - COUNTEREXAMPLE_RATIO) <= tol * COUNTEREXAMPLE_RATIO
        lhs_ok = abs(L - expected_L) <= tol * expected_L
        saturated = abs(product.margin) <= tol * max(abs(product.lhs), expected_L)

        print(f"Correlated coherent state sigma = hbar/sqrt(3), r = {COUNTEREXAMPLE_R}, hbar = {hbar:g} ({path})")
        print(f"  L   = {format_number(L)}")
        print(f"  R   = {format_number(R)}")
        print(f"  R/L = {format_number(ratio)}")
        print(f"  triple-product margin = {format_number(product.margin)}")

        data = {
            "path": path,
            "hbar": hbar,
            "L": L,
            "R": R,
            "ratio": ratio,
            "expected_ratio": COUNTEREXAMPLE_RATIO,
            "reports": [naive.to_dict(), product.to_dict()],
        }
        if config.out:
            write_json(data, config.out)
        if not (ratio_ok and lhs_ok and saturated):
            return _result(EXIT_SELF_TEST_FAILED,
                           f"reproduction failed: R/L = {format_number(ratio)}, L = {format_number(L)}, "
                           f"triple-product margin = {format_number(product.margin)}", data)
        return _result(EXIT_OK, "naive triple product bound violated with R/L = 9/4", data)

    def _scan(self, config: RunConfig) -> Dict[str, Any]:
        from core.search import sweep

        problem = self._load_problem(config)
        table = sweep(problem, config.grid)
        if config.output_format("csv") == "csv":
            write_csv(table.header(), table.records(), config.out)
        else:
            write_json({"config": config.to_dict(), "problem": problem.to_dict(),
                        "header": table.header(), "rows": table.records()}, config.out)
        return _result(EXIT_OK, f"swept {len(table.rows)} points of {problem.inequality_id}", None)

    def _optimize(self, config: RunConfig) -> Dict[str, Any]:
        from core.search import minimize

        problem = self._load_problem(config)
        result = minimize(problem)
        payload = {"config": config.to_dict(), "problem": problem.to_dict(), "result": result.to_dict()}
        if config.output_format() == "csv":
            header = result.param_names + ["best_objective", "evaluations", "converged"]
            write_csv(header, [result.best_params + [result.best_objective, result.evaluations, result.converged]],
                      config.out)
        else:
            write_json(payload, config.out)
        return _result(EXIT_OK, f"best {problem.objective} {format_number(result.best_objective)} "
                                f"after {result.evaluations} evaluations (converged: {result.converged})", payload)

    def _catalog(self, config: RunConfig) -> Dict[str, Any]:
        from core.inequalities import catalog

        entries = [dataclasses.asdict(entry) for entry in catalog()]
        if config.output_format() == "csv":
            header = ["id", "n_required", "correct", "summary", "reference"]
            write_csv(header, [[e[h] for h in header] for e in entries], config.out)
        else:
            write_json(entries, config.out)
        return _result(EXIT_OK, f"{len(entries)} inequalities in the catalog", entries)

    # === Helpers ===

    def _load_problem(self, config: RunConfig):
        from core.search import SearchProblem
        from core.specs import load_json

        if config.problem is None:
            raise ValueError(f"{config.command} needs --problem")
        problem = SearchProblem.from_dict(load_json(config.problem))
        overrides = {}
        if config.seed is not None:
            overrides["seed"] = config.seed
        if config.hbar is not None:
            overrides["hbar"] = config.hbar
        if config.fock_dim is not None:
            overrides["fock_dim"] = config.fock_dim
        if overrides:
            problem = dataclasses.replace(problem, **overrides)
        self._echo(config, always=True, problem=problem.to_dict())
        return problem

    def _echo(self, config: RunConfig, always: bool, **extra):
        if not (always or settings.verbose):
            return
        resolved = dict(config.to_dict(), **extra)
        resolved["tolerances"] = settings.get("tolerances")
        print(f"{CYAN}[CLI] resolved config: {json.dumps(resolved, sort_keys=True)}{RESET}", file=sys.stderr)


# Global executor instance
executor = CommandExecutor()
