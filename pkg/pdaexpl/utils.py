from __future__ import annotations

import contextlib
import json
import logging
import os
import sys
import tempfile
from typing import Any, Dict, Optional

logger = logging.getLogger(__name__)

HOME_ENV = ("PDAEXPL_HOME", "PDAEXPL_DATA_DIR")
DEFAULT_HOME = "~/.pdaexpl"


class DocumentError(Exception):
    """A JSON document (automaton, machine, transcript, sweep) that cannot be read or parsed."""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None) -> None:
        super().__init__(message)
        self.line = line
        self.column = column

    def __str__(self) -> str:
        base = super().__str__()
        if self.line is None:
            return base
        return f"{base} (line {self.line}, column {self.column})"


def print_error(message: str) -> None:
    print(f"error: {message}", file=sys.stderr)


def workbench_home() -> str:
    """Directory holding settings.json: the first of PDAEXPL_HOME, PDAEXPL_DATA_DIR, ~/.pdaexpl."""
    for env in HOME_ENV:
        value = os.getenv(env)
        if value:
            return value
    return os.path.expanduser(DEFAULT_HOME)


def parse_json_document(text: str) -> Dict[str, Any]:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(exc.msg, exc.lineno, exc.colno) from exc
    if not isinstance(data, dict):
        raise DocumentError("top-level value must be an object", 1, 1)
    return data


def read_json_document(path: str) -> Dict[str, Any]:
    try:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
    except OSError as exc:
        raise DocumentError(f"unable to read {path}: {exc}") from exc
    return parse_json_document(text)


def read_optional_document(path: str) -> Optional[Dict[str, Any]]:
    """Like read_json_document, but a missing or broken file reads as None."""
    try:
        return read_json_document(path)
    except DocumentError as exc:
        if os.path.exists(path):
            logger.warning("ignoring %s: %s", path, exc)
        return None


def dump_json(data: Any) -> str:
    return json.dumps(data, indent=2, ensure_ascii=False) + "\n"


def save_document(path: str, data: Any) -> bool:
    """Write a document through a sibling temp file so readers never see half a document.

    Returns False, after reporting on stderr, when the folder or file cannot be written.
    """
    folder = os.path.dirname(path) or "."
    tmp_path = None
    try:
        os.makedirs(folder, exist_ok=True)
        with tempfile.NamedTemporaryFile(
            "w",
            encoding="utf-8",
            dir=folder,
            prefix=os.path.basename(path) + ".",
            suffix=".tmp",
            delete=False,
        ) as fp:
            tmp_path = fp.name
            fp.write(dump_json(data))
        os.replace(tmp_path, path)
    except OSError as exc:
        print_error(f"unable to write {path}: {exc}")
        if tmp_path is not None:
            with contextlib.suppress(OSError):
                os.unlink(tmp_path)
        return False
    logger.debug("wrote %s", path)
    return True
