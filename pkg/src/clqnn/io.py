"""Byte-stable output writers.

Floats serialize with repr (shortest round-trip form), JSON keys are
sorted, newlines are always "\n", and nothing here emits timestamps or
machine identifiers, so rerunning a command with the same config produces
byte-identical files.
"""

from __future__ import annotations

import json
import os


def fmt(value):
    """Shortest exact decimal form of a float; empty string for None."""
    if value is None:
        return ""
    return repr(float(value))


def csv_text(columns, rows):
    """rows hold str/float/int/None cells; floats go through fmt."""
    lines = [",".join(columns)]
    for row in rows:
        cells = []
        for v in row:
            if v is None:
                cells.append("")
            elif isinstance(v, str):
                cells.append(v)
            elif isinstance(v, (int,)) and not isinstance(v, bool):
                cells.append(str(v))
            else:
                cells.append(fmt(v))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def json_text(obj):
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def write_text(path, text):
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def write_json(path, obj):
    write_text(path, json_text(obj))
