"""Serialization helpers: atomic writes, metadata headers, canonical text.

File conventions shared by every writer in the package: UTF-8, LF line
endings, '#'-prefixed "key: value" metadata lines sorted by key, then a CSV
header row, then data rows.  Floats are formatted with repr(), the shortest
text that round-trips exactly, so read -> write reproduces files byte for
byte.
"""

from __future__ import annotations

import json
import os
import tempfile


def format_value(value) -> str:
    """Canonical text for metadata entries and CSV cells."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if hasattr(value, "item") and not isinstance(value, str):
        return format_value(value.item())
    return str(value)


def atomic_write_bytes(path, data: bytes) -> None:
    """Write through a temp file in the target directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(data)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def write_table(path, metadata: dict, header, rows) -> None:
    """Write a metadata block, header row, and pre-formatted data rows."""
    lines = [f"# {key}: {format_value(metadata[key])}" for key in sorted(metadata)]
    lines.append(",".join(header))
    lines.extend(rows)
    atomic_write_bytes(path, ("\n".join(lines) + "\n").encode("utf-8"))


def read_table(path):
    """Parse a table written by write_table.

    Returns (metadata, header, rows); every entry stays a string so that
    re-serializing reproduces the file exactly.
    """
    with open(path, "rb") as handle:
        text = handle.read().decode("utf-8")
    meta: dict[str, str] = {}
    header = None
    rows = []
    for line in text.splitlines():
        if line.startswith("# "):
            key, _, value = line[2:].partition(": ")
            meta[key] = value
        elif header is None:
            header = line.split(",")
        elif line:
            rows.append(line.split(","))
    return meta, header or [], rows


def dump_json(obj) -> str:
    """Single JSON object with stable key order."""
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def write_json(path, obj) -> None:
    atomic_write_bytes(path, dump_json(obj).encode("utf-8"))
