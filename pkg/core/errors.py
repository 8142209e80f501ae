"""
Exception hierarchy. Library code raises these; the CLI maps them to exit codes.
"""

from typing import Optional, Sequence


class UncertaintyError(Exception):
    """Base class for every error raised by the toolkit."""


class DimensionMismatchError(UncertaintyError, ValueError):
    pass


class NonHermitianError(UncertaintyError, ValueError):
    pass


class ImaginaryResidueError(UncertaintyError, ArithmeticError):
    """A quantity that must be real came back with a sizeable imaginary part."""


class InvalidStateError(UncertaintyError, ValueError):
    pass


class TupleSizeError(UncertaintyError, ValueError):
    pass


class InvalidIndexError(UncertaintyError, IndexError):
    pass


class DegenerateDenominatorError(UncertaintyError, ZeroDivisionError):
    pass


class NonFiniteError(UncertaintyError, ArithmeticError):
    pass


class ConfigError(UncertaintyError, ValueError):
    pass


class TruncationError(UncertaintyError):
    """Fock truncation leaves too much weight in the top levels."""

    def __init__(self, message: str, tail_weight: float, suggested_dim: int):
        super().__init__(f"{message} (tail weight {tail_weight:.3e}, try dim >= {suggested_dim})")
        self.tail_weight = tail_weight
        self.suggested_dim = suggested_dim


class SpecError(UncertaintyError, ValueError):
    """Malformed state/tuple/problem spec. `field` names the offending entry."""

    def __init__(self, message: str, field: Optional[str] = None):
        prefix = f"{field}: " if field else ""
        super().__init__(f"{prefix}{message}")
        self.field = field


class SearchError(UncertaintyError):
    def __init__(self, message: str, params: Optional[Sequence[float]] = None):
        if params is not None:
            message = f"{message} at params {list(params)}"
        super().__init__(message)
        self.params = None if params is None else [float(v) for v in params]
