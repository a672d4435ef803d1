"""CSV ingestion, duplicate removal, min-max scaling, and embedding output."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np


class ParseError(ValueError):
    """A CSV cell could not be parsed as a finite number."""

    def __init__(self, row, col, message=None):
        self.row = row
        self.col = col
        super().__init__(message or f"bad cell at data row {row}, column {col}")


class EmptyDatasetError(ValueError):
    """The input file contains no data rows (or no feature columns)."""


@dataclass
class Dataset:
    """Row-major numeric matrix with optional per-row integer class labels.

    ``row_ids`` tracks each row's index in the originally loaded file so
    that rows removed by :func:`deduplicate` can be re-expanded on output.
    """

    points: np.ndarray
    labels: np.ndarray | None = None
    row_ids: np.ndarray | None = None

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=np.float64)
        if self.points.ndim != 2:
            raise ValueError("points must be a 2-D matrix")
        if self.labels is not None:
            self.labels = np.asarray(self.labels, dtype=np.int64)
            if self.labels.shape != (self.n,):
                raise ValueError("labels length must match row count")
        if self.row_ids is None:
            self.row_ids = np.arange(self.n, dtype=np.int64)
        else:
            self.row_ids = np.asarray(self.row_ids, dtype=np.int64)
            if self.row_ids.shape != (self.n,):
                raise ValueError("row_ids length must match row count")

    @property
    def n(self):
        return self.points.shape[0]

    @property
    def dim(self):
        return self.points.shape[1]


@dataclass
class DedupMap:
    """Maps each removed duplicate row index to its retained representative."""

    representative: dict[int, int] = field(default_factory=dict)

    def __post_init__(self):
        removed = set(self.representative)
        for rep in self.representative.values():
            if rep in removed:
                raise ValueError(f"representative {rep} is itself removed")

    def __len__(self):
        return len(self.representative)

    def expand_rows(self, n_kept):
        """Per-original-row index into the kept-row array (length n_kept + len(self))."""
        n_total = n_kept + len(self.representative)
        removed = self.representative.keys()
        kept = [r for r in range(n_total) if r not in removed]
        if len(kept) != n_kept:
            raise ValueError("dedup map inconsistent with kept row count")
        position = {orig: i for i, orig in enumerate(kept)}
        out = np.empty(n_total, dtype=np.int64)
        for r in range(n_total):
            out[r] = position[self.representative.get(r, r)]
        return out


def _parse_cell(cell):
    value = float(cell)
    if not math.isfinite(value):
        raise ValueError("non-finite value")
    return value


def load_dataset(path, label_column=None):
    """Read a CSV file into a Dataset.

    A first row containing any non-numeric cell is treated as a header.
    ``label_column`` selects one column (by index in the file) as integer
    class labels; the remaining columns become features.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [row for row in csv.reader(fh) if row]
    if not rows:
        raise EmptyDatasetError(f"{path}: no rows")

    # only a first row followed by data can be a header; a single-row file is
    # data, so its malformed cells surface as ParseError rather than vanishing
    start = 0
    if len(rows) > 1:
        try:
            for cell in rows[0]:
                _parse_cell(cell)
        except ValueError:
            start = 1
    data_rows = rows[start:]

    width = len(data_rows[0])
    if label_column is not None and not (0 <= label_column < width):
        raise ValueError(f"label_column {label_column} out of range for {width} columns")

    values = np.empty((len(data_rows), width), dtype=np.float64)
    for r, row in enumerate(data_rows):
        if len(row) != width:
            raise ParseError(r, min(len(row), width),
                             f"row {r} has {len(row)} cells, expected {width}")
        for c, cell in enumerate(row):
            try:
                values[r, c] = _parse_cell(cell)
            except ValueError:
                raise ParseError(r, c) from None

    if label_column is None:
        points, labels = values, None
    else:
        labels = np.rint(values[:, label_column]).astype(np.int64)
        points = np.delete(values, label_column, axis=1)
    if points.shape[1] == 0:
        raise EmptyDatasetError(f"{path}: no feature columns")
    return Dataset(points, labels)


def deduplicate(d):
    """Remove exact-duplicate feature rows, keeping first occurrences in order.

    Returns the reduced dataset and a DedupMap from each removed row index
    to its representative (indices refer to rows of ``d``).
    """
    _, first_idx, inverse = np.unique(d.points, axis=0,
                                      return_index=True, return_inverse=True)
    kept = np.sort(first_idx)
    kept_set = set(kept.tolist())
    mapping = {r: int(first_idx[inverse[r]])
               for r in range(d.n) if r not in kept_set}
    reduced = Dataset(d.points[kept],
                      None if d.labels is None else d.labels[kept],
                      d.row_ids[kept])
    return reduced, DedupMap(mapping)


def minmax_normalize(d):
    """Rescale every feature column into [0, 1]; constant columns map to 0."""
    lo = d.points.min(axis=0)
    hi = d.points.max(axis=0)
    span = hi - lo
    safe = np.where(span > 0, span, 1.0)
    scaled = (d.points - lo) / safe
    scaled[:, span == 0] = 0.0
    return Dataset(scaled, d.labels, d.row_ids)


def write_embedding(path, coords, labels=None, dedup=None):
    """Write coordinates as CSV, one row per original input row.

    Rows removed as duplicates receive their representative's coordinates.
    Labels, when given (one per original row), are appended as a last column.
    Coordinates are printed with 12 significant digits.
    """
    coords = np.asarray(coords, dtype=np.float64)
    dedup = dedup or DedupMap()
    rows = dedup.expand_rows(coords.shape[0])
    if labels is not None and len(labels) != len(rows):
        raise ValueError("labels length must equal the original row count")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        for r, src in enumerate(rows):
            cells = [format(v, ".12g") for v in coords[src]]
            if labels is not None:
                cells.append(str(int(labels[r])))
            fh.write(",".join(cells) + "\n")
