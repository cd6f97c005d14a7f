"""File formats: dataset CSV, coreset CSV, score/center CSV, family JSON.

Dataset CSV is one row per point with d numeric columns; "?" or an empty
cell marks a missing coordinate.  A header row is detected automatically.
Output files start with "#" provenance comment lines (version, seed,
config hash) which every loader here skips.
"""

from __future__ import annotations

import csv
import hashlib
import json
from pathlib import Path

import numpy as np

from .core import Dataset, InputError, WeightedCoreset

VERSION = "0.1.0"
MISSING_TOKENS = {"?", ""}


def provenance_lines(command: str, seed=None, config: dict | None = None) -> list[str]:
    digest = hashlib.sha256(
        json.dumps(config or {}, sort_keys=True).encode()
    ).hexdigest()[:16]
    return [
        f"# mvcoreset v{VERSION}",
        f"# command={command} seed={seed} config_sha256={digest}",
    ]


def _parse_cell(cell: str, row: int, col: int) -> float:
    token = cell.strip()
    if token in MISSING_TOKENS:
        return np.nan
    try:
        return float(token)
    except ValueError:
        raise InputError(f"row {row}, column {col}: invalid numeric cell {cell!r}")


def _read_rows(path, delimiter: str):
    """Yield (file_line_number, cells) skipping comment lines."""
    with open(path, newline="") as fh:
        for lineno, cells in enumerate(csv.reader(fh, delimiter=delimiter), start=1):
            if not cells or (cells[0].lstrip().startswith("#")):
                continue
            yield lineno, cells


def _looks_like_header(cells: list[str]) -> bool:
    for cell in cells:
        token = cell.strip()
        if token in MISSING_TOKENS:
            continue
        try:
            float(token)
        except ValueError:
            return True
    return False


def load_dataset(path, delimiter: str = ",") -> Dataset:
    rows = []
    width = None
    first = True
    for lineno, cells in _read_rows(path, delimiter):
        if first:
            first = False
            if _looks_like_header(cells):
                continue
        if width is None:
            width = len(cells)
        elif len(cells) != width:
            raise InputError(
                f"row {lineno}: expected {width} columns, got {len(cells)}"
            )
        parsed = [_parse_cell(c, lineno, col + 1) for col, c in enumerate(cells)]
        if all(np.isnan(v) for v in parsed):
            raise InputError(f"row {lineno}: all coordinates missing")
        rows.append(parsed)
    if not rows:
        raise InputError(f"{path}: no data rows")
    return Dataset(np.array(rows, dtype=np.float64))


def _fmt(v: float) -> str:
    if np.isnan(v):
        return "?"
    return repr(float(v))


def save_dataset(dataset: Dataset, path, header_lines: list[str] = ()):
    with open(path, "w", newline="") as fh:
        for line in header_lines:
            fh.write(line + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([f"x{i}" for i in range(dataset.d)])
        for row in dataset.values:
            writer.writerow([_fmt(v) for v in row])


def save_coreset(coreset: WeightedCoreset, path, header_lines: list[str] = ()):
    """Columns: id, weight, then the d coordinates with "?" preserved."""
    with open(path, "w", newline="") as fh:
        for line in header_lines:
            fh.write(line + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["id", "weight"] + [f"x{i}" for i in range(coreset.source.d)])
        for pid, w, row in zip(coreset.ids, coreset.weights, coreset.points):
            writer.writerow([int(pid), repr(float(w))] + [_fmt(v) for v in row])


def load_coreset(path, source: Dataset, delimiter: str = ",") -> WeightedCoreset:
    ids, weights = [], []
    first = True
    for lineno, cells in _read_rows(path, delimiter):
        if first:
            first = False
            if _looks_like_header(cells):
                continue
        if len(cells) < 2:
            raise InputError(f"row {lineno}: expected at least id and weight columns")
        try:
            ids.append(int(float(cells[0])))
        except ValueError:
            raise InputError(f"row {lineno}, column 1: invalid id {cells[0]!r}")
        weights.append(_parse_cell(cells[1], lineno, 2))
    return WeightedCoreset(np.array(ids, dtype=np.int64), np.array(weights), source)


def save_scores(sigma: np.ndarray, path, header_lines: list[str] = ()):
    with open(path, "w", newline="") as fh:
        for line in header_lines:
            fh.write(line + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["id", "sigma"])
        for pid, s in enumerate(sigma):
            writer.writerow([pid, repr(float(s))])


def save_centers(centers: np.ndarray, path, header_lines: list[str] = ()):
    with open(path, "w", newline="") as fh:
        for line in header_lines:
            fh.write(line + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([f"x{i}" for i in range(centers.shape[1])])
        for row in centers:
            writer.writerow([repr(float(v)) for v in row])


def save_assignment(labels: np.ndarray, path, header_lines: list[str] = ()):
    with open(path, "w", newline="") as fh:
        for line in header_lines:
            fh.write(line + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["id", "cluster"])
        for pid, lab in enumerate(labels):
            writer.writerow([pid, int(lab)])


def save_json(obj, path, command: str, seed=None, config: dict | None = None):
    digest = hashlib.sha256(
        json.dumps(config or {}, sort_keys=True).encode()
    ).hexdigest()[:16]
    payload = {
        "mvcoreset_version": VERSION,
        "command": command,
        "seed": seed,
        "config_sha256": digest,
        **obj,
    }
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def load_json(path) -> dict:
    return json.loads(Path(path).read_text())
