"""Reading and writing JSON artifacts with precise error locations."""

from __future__ import annotations

import json
from pathlib import Path

from .errors import SchemaError, SchemaVersionError

SCHEMA_VERSION = 1


def load_json(path) -> dict:
    """Parse ``path``; malformed text raises :class:`SchemaError` with line and column.

    A document may carry ``"schema_version"``; any value other than the
    supported one is rejected.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise SchemaError(f"{path}: cannot read ({exc.strerror})") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if isinstance(doc, dict) and "schema_version" in doc and doc["schema_version"] != SCHEMA_VERSION:
        raise SchemaVersionError(
            f"{path}: schema_version {doc['schema_version']!r} is not supported (expected {SCHEMA_VERSION})"
        )
    return doc


def dump_json(doc, path) -> None:
    Path(path).write_text(json.dumps(doc, indent=1) + "\n")
