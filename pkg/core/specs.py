"""
JSON state and tuple specs resolved into MomentSets.

Gaussian families (ccs, gaussian, gaussian2d) use analytic moments unless a
Fock dimension is requested; the other families are always matrix states.
"""

import copy
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np

from core.errors import SpecError, UncertaintyError
from core.gaussian import GaussianState, fock_realization, linear_moments, quad_triple_moments
from core.moments import MomentSet, moment_set
from core.operators import Operator, QuantumState
from core.settings_store import settings
from core.states import (
    PHASE_SPACE_LABELS, XPXI_ROWS, CcsParams, Gaussian2dParams,
    ccs_moments, ccs_state, fock_vacuum, gaussian2d_gaussian_state, gaussian2d_state,
    mode_operators, quad_triple_operators, spin_coefficients, spin_operators,
    spin_superposition, xp_operators, xpxi_operators,
)

FAMILIES = ("ccs", "fock_vacuum", "spin", "gaussian2d", "gaussian", "raw")
TUPLES = ("xp", "xpxi", "spin_xyz", "quad_triple", "xy_phase_space", "linear", "raw")

# two-mode Fock spaces default smaller
_DEFAULT_TWO_MODE_DIM = 20


def load_json(path: Union[str, Path]) -> Dict[str, Any]:
    path = Path(path)
    try:
        with open(path, 'r', encoding='utf-8') as f:
            return json.load(f)
    except FileNotFoundError:
        raise SpecError("file not found", field=str(path)) from None
    except json.JSONDecodeError as e:
        raise SpecError(f"invalid JSON at line {e.lineno} column {e.colno}: {e.msg}", field=str(path)) from None


def parse_complex(value: Any, field: str) -> complex:
    """A real number or a [re, im] pair."""
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(float(value), 0.0)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        try:
            return complex(float(value[0]), float(value[1]))
        except (TypeError, ValueError):
            pass
    raise SpecError(f"expected a number or [re, im], got {value!r}", field=field)


def parse_complex_array(value: Any, field: str, ndim: int) -> np.ndarray:
    if ndim == 1:
        if not isinstance(value, list):
            raise SpecError("expected a list", field=field)
        return np.array([parse_complex(v, f"{field}[{k}]") for k, v in enumerate(value)])
    if not isinstance(value, list) or not all(isinstance(row, list) for row in value):
        raise SpecError("expected a list of rows", field=field)
    return np.array([[parse_complex(v, f"{field}[{r}][{c}]") for c, v in enumerate(row)]
                     for r, row in enumerate(value)])


def _number(params: Dict[str, Any], key: str, field: str, default: Optional[float] = None) -> float:
    if key not in params:
        if default is None:
            raise SpecError("missing value", field=f"{field}.{key}")
        return default
    try:
        value = float(params[key])
    except (TypeError, ValueError):
        raise SpecError(f"expected a number, got {params[key]!r}", field=f"{field}.{key}") from None
    if not math.isfinite(value):
        raise SpecError("value is not finite", field=f"{field}.{key}")
    return value


def set_path(spec: Dict[str, Any], path: str, value: Any):
    """Assign into nested dicts/lists by dotted path, e.g. 'params.theta.0'."""
    keys = path.split('.')
    target: Any = spec
    try:
        for key in keys[:-1]:
            target = target[int(key)] if isinstance(target, list) else target[key]
        last = keys[-1]
        if isinstance(target, list):
            target[int(last)] = value
        else:
            target[last] = value
    except (KeyError, IndexError, ValueError, TypeError):
        raise SpecError("path does not exist in the state spec", field=path) from None


def with_parameters(spec: Dict[str, Any], assignments: Dict[str, float]) -> Dict[str, Any]:
    out = copy.deepcopy(spec)
    for path, value in assignments.items():
        set_path(out, path, float(value))
    return out


@dataclass(frozen=True)
class ResolvedState:
    family: str
    hbar: float
    gaussian: Optional[GaussianState] = None
    quantum: Optional[QuantumState] = None
    modes: int = 1


def resolve_state(spec: Dict[str, Any], hbar: Optional[float] = None,
                  fock_dim: Optional[int] = None) -> ResolvedState:
    """Build the state named by a state spec. `hbar` and `fock_dim` override the spec."""
    if not isinstance(spec, dict):
        raise SpecError("state spec must be a JSON object", field="state")
    family = spec.get("family")
    if family not in FAMILIES:
        raise SpecError(f"unknown family {family!r}, expected one of {FAMILIES}", field="family")
    params = spec.get("params", {})
    if not isinstance(params, dict):
        raise SpecError("params must be a JSON object", field="params")
    if hbar is None:
        hbar = _number(spec, "hbar", "state", settings.get("physics.hbar"))
    dim = fock_dim if fock_dim is not None else spec.get("dim")

    try:
        if family == "ccs":
            alpha = complex(_number(params, "alpha_re", "params", 0.0), _number(params, "alpha_im", "params", 0.0))
            ccs = CcsParams(_number(params, "sigma", "params"), _number(params, "r", "params"), alpha)
            quantum = ccs_state(ccs, int(fock_dim), hbar) if fock_dim is not None else None
            return ResolvedState(family, hbar, gaussian=ccs_moments(ccs, hbar), quantum=quantum)

        if family == "gaussian":
            gs = GaussianState.from_dict(params, hbar=hbar)
            quantum = fock_realization(gs, int(fock_dim)) if fock_dim is not None else None
            return ResolvedState(family, hbar, gaussian=gs, quantum=quantum)

        if family == "gaussian2d":
            g2 = Gaussian2dParams(_number(params, "a", "params"), _number(params, "b", "params"),
                                  _number(params, "c", "params"))
            quantum = gaussian2d_state(g2, int(fock_dim), hbar) if fock_dim is not None else None
            return ResolvedState(family, hbar, gaussian=gaussian2d_gaussian_state(g2, hbar), quantum=quantum)

        if family == "fock_vacuum":
            modes = int(_number(params, "modes", "params", 1.0))
            default_dim = int(settings.get("physics.fock_dim")) if modes == 1 else _DEFAULT_TWO_MODE_DIM
            return ResolvedState(family, hbar, quantum=fock_vacuum(int(dim or default_dim), modes, hbar),
                                 modes=modes)

        if family == "spin":
            two_j = int(_number(params, "two_j", "params"))
            if "coeffs" in params:
                coeffs = parse_complex_array(params["coeffs"], "params.coeffs", 1)
            elif "theta" in params and "phi" in params:
                coeffs = spin_coefficients(params["theta"], params["phi"])
            else:
                raise SpecError("spin states need coeffs or theta/phi", field="params")
            if coeffs.size != two_j + 1:
                raise SpecError(f"spin-{two_j}/2 needs {two_j + 1} coefficients, got {coeffs.size}",
                                field="params.coeffs")
            return ResolvedState(family, hbar, quantum=spin_superposition(coeffs, hbar))

        # raw
        if "vector" in params:
            state = QuantumState.pure(parse_complex_array(params["vector"], "params.vector", 1), hbar=hbar)
        elif "rho" in params:
            state = QuantumState.mixed(parse_complex_array(params["rho"], "params.rho", 2), hbar=hbar)
        else:
            raise SpecError("raw states need a vector or rho", field="params")
        return ResolvedState(family, hbar, quantum=state)
    except UncertaintyError:
        raise
    except (TypeError, ValueError) as e:
        raise SpecError(str(e), field="params") from None


def _raw_operators(tuple_spec: Dict[str, Any]) -> List[Operator]:
    entries = tuple_spec.get("operators")
    if not isinstance(entries, list) or not entries:
        raise SpecError("raw tuples need a non-empty operators list", field="operators")
    ops = []
    for k, entry in enumerate(entries):
        if not isinstance(entry, dict) or "matrix" not in entry:
            raise SpecError("each operator needs a matrix", field=f"operators[{k}]")
        matrix = parse_complex_array(entry["matrix"], f"operators[{k}].matrix", 2)
        ops.append(Operator(matrix, str(entry.get("label", f"z{k + 1}"))))
    return ops


def tuple_operators(name: str, tuple_spec: Dict[str, Any], state: QuantumState) -> List[Operator]:
    """Operator tuple on the state's Hilbert space."""
    dim = state.dim
    if name == "xp":
        return xp_operators(dim, state.hbar)
    if name == "xpxi":
        return xpxi_operators(dim, state.hbar)
    if name == "quad_triple":
        return quad_triple_operators(state)
    if name == "spin_xyz":
        return list(spin_operators(dim - 1, state.hbar))
    if name == "xy_phase_space":
        per_mode = int(round(math.sqrt(dim)))
        if per_mode ** 2 != dim:
            raise SpecError(f"state dimension {dim} is not a two-mode Fock space", field="tuple")
        return mode_operators(per_mode, 2, state.hbar)
    if name == "raw":
        return _raw_operators(tuple_spec)
    raise SpecError(f"tuple '{name}' needs Gaussian moments, not a matrix state", field="tuple")


def gaussian_tuple_moments(name: str, tuple_spec: Dict[str, Any], gs: GaussianState) -> MomentSet:
    """Analytic moments of a tuple on a Gaussian state."""
    if name in ("xp", "xpxi", "quad_triple") and gs.n_modes != 1:
        raise SpecError(f"tuple '{name}' is single-mode, state has {gs.n_modes} modes", field="tuple")
    if name == "xp":
        return linear_moments(gs, np.eye(2), ("x", "p"))
    if name == "xpxi":
        return linear_moments(gs, XPXI_ROWS, ("x", "p", "xi"))
    if name == "quad_triple":
        return quad_triple_moments(gs)
    if name == "xy_phase_space":
        if gs.n_modes != 2:
            raise SpecError(f"phase-space tuple needs two modes, state has {gs.n_modes}", field="tuple")
        return linear_moments(gs, np.eye(4), PHASE_SPACE_LABELS)
    if name == "linear":
        rows = tuple_spec.get("rows")
        if not isinstance(rows, list) or not rows:
            raise SpecError("linear tuples need rows", field="rows")
        labels = tuple(tuple_spec.get("labels", ()))
        return linear_moments(gs, rows, labels)
    raise SpecError(f"tuple '{name}' needs a matrix state", field="tuple")


def default_tuple(resolved: ResolvedState) -> str:
    if resolved.family == "spin":
        return "spin_xyz"
    if resolved.family == "gaussian2d":
        return "xy_phase_space"
    if resolved.gaussian is not None:
        return "xpxi" if resolved.gaussian.n_modes == 1 else "xy_phase_space"
    if resolved.family == "fock_vacuum":
        return "xpxi" if resolved.modes == 1 else "xy_phase_space"
    raise SpecError("raw states need an explicit tuple spec", field="tuple")


def resolve_moments(state_spec: Dict[str, Any], tuple_spec: Optional[Dict[str, Any]] = None,
                    hbar: Optional[float] = None, fock_dim: Optional[int] = None) -> MomentSet:
    resolved = resolve_state(state_spec, hbar=hbar, fock_dim=fock_dim)
    tuple_spec = tuple_spec or {}
    if not isinstance(tuple_spec, dict):
        raise SpecError("tuple spec must be a JSON object", field="tuple")
    name = tuple_spec.get("tuple") or default_tuple(resolved)
    if name not in TUPLES:
        raise SpecError(f"unknown tuple {name!r}, expected one of {TUPLES}", field="tuple")

    if resolved.quantum is not None:
        if name == "linear":
            raise SpecError("linear tuples are evaluated on Gaussian moments only", field="tuple")
        return moment_set(resolved.quantum, tuple_operators(name, tuple_spec, resolved.quantum))
    return gaussian_tuple_moments(name, tuple_spec, resolved.gaussian)
