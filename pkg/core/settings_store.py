"""
Centralized settings storage.
Defaults come from config.py; an optional user file at
~/.uncertainty_lab/settings.json is deep-merged on top.
"""

import copy
import json
import sys
import threading
from pathlib import Path
from typing import Any, Dict, Optional

import config
from core.errors import ConfigError


# Default settings - used when no settings file exists
DEFAULT_SETTINGS = {
    "tolerances": {
        "herm": config.TOL_HERM,
        "psd": config.TOL_PSD,
        "ineq": config.TOL_INEQ,
        "imag": config.TOL_IMAG,
        "norm": config.TOL_NORM,
        "mixed_eig": config.TOL_MIXED_EIG,
        "sym": config.TOL_SYM,
        "tail": config.TOL_TAIL,
    },
    "physics": {
        "hbar": config.DEFAULT_HBAR,
        "fock_dim": config.DEFAULT_FOCK_DIM,
    },
    "search": {
        "starts": config.SEARCH_STARTS,
        "restarts": config.SEARCH_RESTARTS,
        "max_evaluations": config.SEARCH_MAX_EVALUATIONS,
        "simplex_tol": config.SEARCH_SIMPLEX_TOL,
    },
    "output": {
        "digits": config.SIGNIFICANT_DIGITS,
        "verbose": config.VERBOSE,
    },
}


class SettingsStore:
    """
    Thread-safe settings manager.
    `set` persists to the user file, `override` only lasts for the session.
    """

    def __init__(self, settings_file: Optional[Path] = None):
        self._lock = threading.RLock()
        self._settings: Dict[str, Any] = {}
        self._settings_file = settings_file or Path.home() / ".uncertainty_lab" / "settings.json"

        self._load()

    def _load(self):
        """Load settings from disk, or fall back to defaults."""
        with self._lock:
            self._settings = copy.deepcopy(DEFAULT_SETTINGS)
            if not self._settings_file.exists():
                return
            try:
                with open(self._settings_file, 'r', encoding='utf-8') as f:
                    loaded = json.load(f)
                # Merge with defaults to handle new settings in updates
                self._settings = self._deep_merge(self._settings, loaded)
            except (json.JSONDecodeError, IOError) as e:
                print(f"{config.YELLOW}[Settings] Error loading settings: {e}. Using defaults.{config.RESET}",
                      file=sys.stderr)
                return
            self._drop_invalid_tolerances()

    def _drop_invalid_tolerances(self):
        tolerances = self._settings.get("tolerances")
        if not isinstance(tolerances, dict):
            print(f"{config.YELLOW}[Settings] 'tolerances' must be an object. Using defaults.{config.RESET}",
                  file=sys.stderr)
            self._settings["tolerances"] = copy.deepcopy(DEFAULT_SETTINGS["tolerances"])
            return
        for name, value in list(tolerances.items()):
            try:
                self._validate(f"tolerances.{name}", value)
            except ConfigError as e:
                print(f"{config.YELLOW}[Settings] {e}. Using the default.{config.RESET}", file=sys.stderr)
                if name in DEFAULT_SETTINGS["tolerances"]:
                    tolerances[name] = DEFAULT_SETTINGS["tolerances"][name]
                else:
                    del tolerances[name]

    def _save(self):
        """Persist settings to disk."""
        with self._lock:
            try:
                self._settings_file.parent.mkdir(parents=True, exist_ok=True)
                with open(self._settings_file, 'w', encoding='utf-8') as f:
                    json.dump(self._settings, f, indent=2)
            except IOError as e:
                print(f"{config.YELLOW}[Settings] Error saving settings: {e}{config.RESET}", file=sys.stderr)

    def _deep_merge(self, base: dict, override: dict) -> dict:
        """Recursively merge override into base."""
        result = base.copy()
        for key, value in override.items():
            if key in result and isinstance(result[key], dict) and isinstance(value, dict):
                result[key] = self._deep_merge(result[key], value)
            else:
                result[key] = value
        return result

    def _validate(self, key_path: str, value: Any):
        if key_path.startswith("tolerances."):
            try:
                ok = float(value) > 0
            except (TypeError, ValueError):
                ok = False
            if not ok:
                raise ConfigError(f"tolerance '{key_path}' must be a positive number, got {value!r}")

    def get(self, key_path: str, default: Any = None) -> Any:
        """
        Get a setting by dot-notation path.
        Example: get("tolerances.psd") returns the PSD slack.
        """
        with self._lock:
            keys = key_path.split('.')
            value = self._settings
            try:
                for k in keys:
                    value = value[k]
                return value
            except (KeyError, TypeError):
                return default

    def override(self, key_path: str, value: Any):
        """Set a setting by dot-notation path for this session only."""
        self._validate(key_path, value)
        with self._lock:
            keys = key_path.split('.')
            target = self._settings
            for k in keys[:-1]:
                if k not in target:
                    target[k] = {}
                target = target[k]
            target[keys[-1]] = value

    def set(self, key_path: str, value: Any):
        """Set a setting by dot-notation path and save."""
        with self._lock:
            self.override(key_path, value)
            self._save()

    def tolerance(self, name: str) -> float:
        return float(self.get(f"tolerances.{name}"))

    @property
    def verbose(self) -> bool:
        return bool(self.get("output.verbose", False))

    def get_all(self) -> Dict[str, Any]:
        """Return a copy of all settings."""
        with self._lock:
            return copy.deepcopy(self._settings)

    def reset_to_defaults(self):
        """Drop session overrides and reload defaults plus the user file."""
        self._load()


# Global singleton instance
settings = SettingsStore()
