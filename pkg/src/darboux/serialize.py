"""Deterministic text output: shortest round-trip floats, stable CSV/JSON."""

from __future__ import annotations

import hashlib
import json


def format_float(x) -> str:
    """Shortest decimal string that round-trips to the same float."""
    x = float(x)
    if x == 0.0:
        return "0"
    return repr(x)


def write_csv(path, columns: dict) -> None:
    """Write named columns (equal-length sequences) as CSV with a header row."""
    names = list(columns)
    arrays = [columns[n] for n in names]
    n = len(arrays[0])
    with open(path, "w") as f:
        f.write(",".join(names) + "\n")
        for i in range(n):
            f.write(",".join(format_float(col[i]) for col in arrays) + "\n")


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def write_json(path, obj) -> None:
    with open(path, "w") as f:
        f.write(canonical_json(obj))


def config_hash(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()[:16]
