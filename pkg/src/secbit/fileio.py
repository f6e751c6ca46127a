"""JSON file formats for distributions and filtrations.

Distribution files::

    { "dims": {"a": 2, "b": 2, "e": 2},
      "entries": [ {"a": 0, "b": 0, "e": 0, "p": 0.25}, ... ] }

Omitted cells are zero.  Bipartite files omit the ``e`` key in both
``dims`` and ``entries``.  Parsing rejects negative probabilities,
duplicate cells and out-of-range indices.

Filtration files::

    { "rows": 2, "cols": 3, "entries": [[...], [...]] }   # row-major
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .distributions import (
    BipartiteDistribution,
    TripartiteDistribution,
    bipartite_from_entries,
    from_entries,
)
from .errors import FileFormatError, IndexOutOfRangeError, NegativeEntryError
from .filtration import Filtration


def _load_json(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FileFormatError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(doc, dict):
        raise FileFormatError(f"{path}: top level must be an object")
    return doc


def _int_field(obj: dict, key: str, where: str) -> int:
    value = obj.get(key)
    if isinstance(value, bool) or not isinstance(value, int):
        raise FileFormatError(f"{where}: field {key!r} must be an integer")
    return value


def _prob_field(obj: dict, where: str) -> float:
    value = obj.get("p")
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise FileFormatError(f"{where}: field 'p' must be a number")
    if value < 0:
        raise NegativeEntryError(f"{where}: negative probability {value}")
    return float(value)


def _read_cells(doc: dict, path, keys: tuple[str, ...]) -> tuple[tuple, dict]:
    dims_obj = doc.get("dims")
    if not isinstance(dims_obj, dict):
        raise FileFormatError(f"{path}: missing 'dims' object")
    unexpected = set(dims_obj) - set(keys)
    if unexpected:
        raise FileFormatError(f"{path}: unexpected dims keys {sorted(unexpected)}")
    dims = tuple(_int_field(dims_obj, key, f"{path} dims") for key in keys)
    entries = doc.get("entries")
    if not isinstance(entries, list):
        raise FileFormatError(f"{path}: missing 'entries' list")
    cells: dict[tuple, float] = {}
    for pos, entry in enumerate(entries):
        where = f"{path} entry {pos}"
        if not isinstance(entry, dict):
            raise FileFormatError(f"{where}: must be an object")
        index = tuple(_int_field(entry, key, where) for key in keys)
        for idx, bound, key in zip(index, dims, keys):
            if not (0 <= idx < bound):
                raise IndexOutOfRangeError(f"{where}: {key}={idx} outside [0, {bound})")
        if index in cells:
            raise FileFormatError(f"{where}: duplicate cell {index}")
        cells[index] = _prob_field(entry, where)
    return dims, cells


def read_tripartite(path) -> TripartiteDistribution:
    dims, cells = _read_cells(_load_json(path), path, ("a", "b", "e"))
    return from_entries(dims, cells)


def read_bipartite(path) -> BipartiteDistribution:
    dims, cells = _read_cells(_load_json(path), path, ("a", "b"))
    return bipartite_from_entries(dims, cells)


def read_distribution(path) -> TripartiteDistribution | BipartiteDistribution:
    """Dispatch on the presence of the ``e`` dimension."""
    doc = _load_json(path)
    dims_obj = doc.get("dims")
    if not isinstance(dims_obj, dict):
        raise FileFormatError(f"{path}: missing 'dims' object")
    if "e" in dims_obj:
        dims, cells = _read_cells(doc, path, ("a", "b", "e"))
        return from_entries(dims, cells)
    dims, cells = _read_cells(doc, path, ("a", "b"))
    return bipartite_from_entries(dims, cells)


def write_tripartite(p: TripartiteDistribution, path) -> None:
    d_a, d_b, d_e = p.dims
    entries = [
        {"a": a, "b": b, "e": e, "p": float(p.table[a, b, e])}
        for a in range(d_a)
        for b in range(d_b)
        for e in range(d_e)
        if p.table[a, b, e] != 0.0
    ]
    doc = {"dims": {"a": d_a, "b": d_b, "e": d_e}, "entries": entries}
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def write_bipartite(p: BipartiteDistribution, path) -> None:
    d_a, d_b = p.dims
    entries = [
        {"a": a, "b": b, "p": float(p.table[a, b])}
        for a in range(d_a)
        for b in range(d_b)
        if p.table[a, b] != 0.0
    ]
    doc = {"dims": {"a": d_a, "b": d_b}, "entries": entries}
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def read_filtration(path) -> Filtration:
    doc = _load_json(path)
    rows = _int_field(doc, "rows", str(path))
    cols = _int_field(doc, "cols", str(path))
    entries = doc.get("entries")
    if not isinstance(entries, list) or len(entries) != rows:
        raise FileFormatError(f"{path}: 'entries' must be a list of {rows} rows")
    matrix = np.empty((rows, cols))
    for i, row in enumerate(entries):
        if not isinstance(row, list) or len(row) != cols:
            raise FileFormatError(f"{path}: row {i} must be a list of {cols} numbers")
        for j, value in enumerate(row):
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise FileFormatError(f"{path}: entry ({i},{j}) must be a number")
            if value < 0:
                raise NegativeEntryError(f"{path}: entry ({i},{j}) is negative")
            matrix[i, j] = float(value)
    return Filtration(matrix)


def write_filtration(f: Filtration, path) -> None:
    doc = {"rows": f.rows, "cols": f.cols, "entries": f.matrix.tolist()}
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
