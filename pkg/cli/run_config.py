"""
Resolved command-line configuration.
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

from core.errors import ConfigError, SpecError

COMMANDS = ("verify", "scan", "optimize", "counterexample", "catalog")
FORMATS = ("json", "csv")


@dataclass(frozen=True)
class RunConfig:
    command: str
    state: Optional[Path] = None
    tuple: Optional[Path] = None
    problem: Optional[Path] = None
    out: Optional[Path] = None
    format: Optional[str] = None
    hbar: Optional[float] = None
    tol: Optional[float] = None
    seed: Optional[int] = None
    fock_dim: Optional[int] = None
    grid: Optional[Tuple[int, ...]] = None
    verbose: bool = False

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command '{self.command}'")
        for flag, path in (("--state", self.state), ("--tuple", self.tuple), ("--problem", self.problem)):
            if path is not None and not Path(path).is_file():
                raise SpecError(f"file not found: {path}", field=flag)
        if self.format is not None and self.format not in FORMATS:
            raise ConfigError(f"--format must be one of {FORMATS}, got '{self.format}'")
        if self.tol is not None and not self.tol > 0:
            raise ConfigError(f"--tol must be positive, got {self.tol}")
        if self.hbar is not None and not self.hbar > 0:
            raise ConfigError(f"--hbar must be positive, got {self.hbar}")
        if self.fock_dim is not None and self.fock_dim < 2:
            raise ConfigError(f"--fock-oracle dim must be at least 2, got {self.fock_dim}")

    def output_format(self, default: str = "json") -> str:
        return self.format or default

    def to_dict(self) -> Dict[str, Any]:
        """Echoed with every run so it can be reproduced."""
        return {
            "command": self.command,
            "state": str(self.state) if self.state else None,
            "tuple": str(self.tuple) if self.tuple else None,
            "problem": str(self.problem) if self.problem else None,
            "out": str(self.out) if self.out else None,
            "format": self.format,
            "hbar": self.hbar,
            "tol": self.tol,
            "seed": self.seed,
            "fock_dim": self.fock_dim,
            "grid": list(self.grid) if self.grid else None,
        }
