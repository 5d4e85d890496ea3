"""Edge-list files and small serialization helpers.

Edge-list format: a header line ``k N h`` followed by h lines of k
space-separated vertex indices.
"""

from __future__ import annotations

import json
import os
import tempfile
from fractions import Fraction
from pathlib import Path
from typing import IO

from ._exact import InvalidInput
from .hypergraph import Hypergraph

__all__ = [
    "write_edge_list",
    "read_edge_list",
    "format_edge_list",
    "read_matrix",
    "atomic_write",
    "fmt_float",
    "to_jsonable",
]


def format_edge_list(H: Hypergraph) -> str:
    lines = [f"{H.k} {H.N} {H.h}"]
    lines.extend(" ".join(str(v) for v in e) for e in H.iter_edges())
    return "\n".join(lines) + "\n"


def write_edge_list(H: Hypergraph, dest: str | os.PathLike | IO[str]) -> None:
    text = format_edge_list(H)
    if hasattr(dest, "write"):
        dest.write(text)
    else:
        atomic_write(dest, text)


def read_edge_list(src: str | os.PathLike | IO[str]) -> Hypergraph:
    """Parse an edge list, checking the header against the body."""
    if hasattr(src, "read"):
        text = src.read()
    else:
        text = Path(src).read_text()
    rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not rows:
        raise InvalidInput("empty edge-list file")
    if len(rows[0]) != 3:
        raise InvalidInput(f"header must be 'k N h', got {' '.join(rows[0])!r}")
    try:
        k, N, h = (int(t) for t in rows[0])
        edges = [tuple(int(t) for t in r) for r in rows[1:]]
    except ValueError as exc:
        raise InvalidInput(f"non-integer token in edge list: {exc}") from None
    if len(edges) != h:
        raise InvalidInput(f"header says h={h} but file has {len(edges)} edges")
    for lineno, e in enumerate(edges, start=2):
        if len(e) != k:
            raise InvalidInput(f"line {lineno}: expected {k} vertices, got {len(e)}")
    try:
        return Hypergraph(N, edges, k)
    except ValueError as exc:
        raise InvalidInput(str(exc)) from None


def read_matrix(src: str | os.PathLike) -> list[list[int]]:
    """Integer matrix, one row per line, whitespace or comma separated."""
    rows = []
    for ln in Path(src).read_text().splitlines():
        ln = ln.replace(",", " ").strip()
        if not ln or ln.startswith("#"):
            continue
        rows.append([int(t) for t in ln.split()])
    if not rows or len({len(r) for r in rows}) != 1:
        raise InvalidInput("matrix rows must be nonempty and of equal length")
    return rows


def atomic_write(path: str | os.PathLike, text: str) -> None:
    """Write via a temp file in the same directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def fmt_float(x) -> str:
    """17 significant digits, so the value round-trips."""
    return format(float(x), ".17g")


def to_jsonable(obj):
    """Recursively convert Fractions, numpy scalars and tuples for json."""
    import numpy as np

    if isinstance(obj, Fraction):
        return str(obj) if obj.denominator != 1 else obj.numerator
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if hasattr(obj, "as_dict"):
        return to_jsonable(obj.as_dict())
    return obj


def dump_json(obj) -> str:
    return json.dumps(to_jsonable(obj), indent=2, sort_keys=True) + "\n"
