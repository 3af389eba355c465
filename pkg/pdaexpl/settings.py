from __future__ import annotations

import os
from typing import Any, Callable, Dict, Mapping, Optional

from .utils import read_optional_document, save_document, workbench_home


SETTINGS_FILENAME = "settings.json"

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")

DEFAULT_SETTINGS: Dict[str, Any] = {
    "eps_budget": 64,
    "max_nonterminals": 20000,
    "jobs": 1,
    "strict_checkpoint": False,
    "log_level": "WARNING",
}

_ENV_KEYS = {
    "eps_budget": "PDAEXPL_EPS_BUDGET",
    "max_nonterminals": "PDAEXPL_MAX_NONTERMINALS",
    "jobs": "PDAEXPL_JOBS",
    "strict_checkpoint": "PDAEXPL_STRICT_CHECKPOINT",
    "log_level": "PDAEXPL_LOG_LEVEL",
}

_TRUE_WORDS = ("1", "true", "yes", "y", "on")
_FALSE_WORDS = ("0", "false", "no", "n", "off")


class ConfigError(Exception):
    pass


def settings_path(home_dir: Optional[str] = None) -> str:
    return os.path.join(home_dir or workbench_home(), SETTINGS_FILENAME)


def parse_flag(value: Any) -> Optional[bool]:
    """Read an on/off setting such as strict_checkpoint from JSON or an environment string."""
    if isinstance(value, bool):
        return value
    if isinstance(value, (int, float)):
        return bool(value)
    if isinstance(value, str):
        word = value.strip().lower()
        if word in _TRUE_WORDS:
            return True
        if word in _FALSE_WORDS:
            return False
    return None


def coerce_natural(value: Any, minimum: int = 0) -> Optional[int]:
    if isinstance(value, bool):
        return None
    if isinstance(value, int):
        return value if value >= minimum else None
    if isinstance(value, float) and value.is_integer():
        return coerce_natural(int(value), minimum)
    if isinstance(value, str):
        try:
            return coerce_natural(int(value.strip()), minimum)
        except ValueError:
            return None
    return None


def _log_level(value: Any) -> Optional[str]:
    if isinstance(value, str) and value.strip().upper() in LOG_LEVELS:
        return value.strip().upper()
    return None


_COERCE: Dict[str, Callable[[Any], Any]] = {
    "eps_budget": coerce_natural,
    "max_nonterminals": lambda v: coerce_natural(v, 1),
    "jobs": lambda v: coerce_natural(v, 1),
    "strict_checkpoint": parse_flag,
    "log_level": _log_level,
}


def _sanitize_settings(raw: Any, base: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    out = dict(base or DEFAULT_SETTINGS)
    if not isinstance(raw, dict):
        return out
    for key, coerce in _COERCE.items():
        value = coerce(raw.get(key))
        if value is not None:
            out[key] = value
    return out


def _env_overrides() -> Dict[str, Any]:
    raw: Dict[str, Any] = {}
    for key, env in _ENV_KEYS.items():
        value = os.getenv(env)
        if value is not None and value.strip():
            raw[key] = value
    return raw


def stored_settings(home_dir: Optional[str] = None) -> Dict[str, Any]:
    return _sanitize_settings(read_optional_document(settings_path(home_dir)) or {})


def load_settings(home_dir: Optional[str] = None) -> Dict[str, Any]:
    merged = stored_settings(home_dir)
    overrides = _env_overrides()
    if overrides:
        merged = _sanitize_settings(overrides, base=merged)
    return merged


def save_settings(settings: Dict[str, Any], home_dir: Optional[str] = None) -> bool:
    payload = {**DEFAULT_SETTINGS, **_sanitize_settings(settings)}
    return save_document(settings_path(home_dir), payload)


def update_settings(changes: Mapping[str, str], home_dir: Optional[str] = None) -> Dict[str, Any]:
    """Apply KEY=VALUE edits on top of the stored file and save the result.

    Environment overrides are not written back.
    """
    updated = stored_settings(home_dir)
    for key, text in changes.items():
        if key not in _COERCE:
            raise ConfigError(f"unknown setting {key!r}; expected one of {', '.join(DEFAULT_SETTINGS)}")
        value = _COERCE[key](text)
        if value is None:
            raise ConfigError(f"invalid value {text!r} for {key}")
        updated[key] = value
    if not save_settings(updated, home_dir):
        raise ConfigError(f"unable to save {settings_path(home_dir)}")
    return updated
