"""Nonnegative labeled tables and their elementwise/structural transforms.

Every function here is pure: inputs are never mutated and the returned
tables hold read-only arrays.
"""
from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, field
from typing import IO, Sequence

import numpy as np
from scipy import sparse

logger = logging.getLogger(__name__)

__all__ = [
    "TableError",
    "CountTable",
    "CorrespondenceTable",
    "WeightPair",
    "MergeResult",
    "ingest_csv",
    "to_correspondence",
    "power_transform",
    "sign_transform",
    "sparse_sign",
    "row_closure",
    "merge_equivalent",
    "table_to_csv",
    "table_to_json",
]


class TableError(ValueError):
    """Raised when a table fails validation."""


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.flags.writeable = False
    return a


def _default_labels(prefix: str, n: int) -> tuple[str, ...]:
    return tuple(f"{prefix}{k + 1}" for k in range(n))


@dataclass(frozen=True)
class CountTable:
    """Labeled nonnegative I x J matrix N = (n_ij).

    Construct with :meth:`from_array` to get all-zero rows and columns
    dropped (with a warning); the plain constructor rejects them.
    """

    values: np.ndarray
    row_labels: tuple[str, ...] = ()
    col_labels: tuple[str, ...] = ()
    warnings: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        v = _frozen(self.values)
        if v.ndim != 2 or v.shape[0] < 1 or v.shape[1] < 1:
            raise TableError(f"expected a non-empty 2-D table, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            i, j = np.argwhere(~np.isfinite(v))[0]
            raise TableError(f"non-finite value at cell ({i}, {j})")
        if np.any(v < 0):
            i, j = np.argwhere(v < 0)[0]
            raise TableError(f"negative value {v[i, j]} at cell ({i}, {j})")
        rows = tuple(self.row_labels) or _default_labels("r", v.shape[0])
        cols = tuple(self.col_labels) or _default_labels("c", v.shape[1])
        if len(rows) != v.shape[0] or len(cols) != v.shape[1]:
            raise TableError("label counts do not match the table shape")
        if np.any(v.sum(axis=1) == 0):
            raise TableError(f"all-zero row {rows[int(np.argmin(v.sum(axis=1)))]!r}")
        if np.any(v.sum(axis=0) == 0):
            raise TableError(f"all-zero column {cols[int(np.argmin(v.sum(axis=0)))]!r}")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "row_labels", tuple(map(str, rows)))
        object.__setattr__(self, "col_labels", tuple(map(str, cols)))
        object.__setattr__(self, "warnings", tuple(self.warnings))

    @classmethod
    def from_array(cls, values, row_labels=None, col_labels=None) -> "CountTable":
        """Validate `values` and drop all-zero rows/columns, recording each drop."""
        v = np.asarray(values, dtype=float)
        if v.ndim != 2:
            raise TableError(f"expected a 2-D table, got {v.ndim} dimensions")
        rows = list(row_labels) if row_labels is not None else list(_default_labels("r", v.shape[0]))
        cols = list(col_labels) if col_labels is not None else list(_default_labels("c", v.shape[1]))
        if len(rows) != v.shape[0] or len(cols) != v.shape[1]:
            raise TableError("label counts do not match the table shape")
        if np.any(v < 0):
            i, j = np.argwhere(v < 0)[0]
            raise TableError(f"negative value {v[i, j]} at cell ({i}, {j})")
        notes = []
        # dropping a row can empty a column and vice versa
        while v.size:
            zr = np.flatnonzero(v.sum(axis=1) == 0)
            zc = np.flatnonzero(v.sum(axis=0) == 0)
            if not len(zr) and not len(zc):
                break
            for i in zr:
                notes.append(f"dropped all-zero row {rows[i]!r}")
            for j in zc:
                notes.append(f"dropped all-zero column {cols[j]!r}")
            keep_r = np.setdiff1d(np.arange(v.shape[0]), zr)
            keep_c = np.setdiff1d(np.arange(v.shape[1]), zc)
            v = v[np.ix_(keep_r, keep_c)]
            rows = [rows[i] for i in keep_r]
            cols = [cols[j] for j in keep_c]
        for note in notes:
            logger.warning(note)
        return cls(v, tuple(rows), tuple(cols), tuple(notes))

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    @property
    def total(self) -> float:
        return float(self.values.sum())

    def replace(self, values) -> "CountTable":
        """Same labels, new values."""
        return CountTable(values, self.row_labels, self.col_labels, self.warnings)


@dataclass(frozen=True)
class CorrespondenceTable:
    """Probability table P = N/n with its row and column masses."""

    probs: np.ndarray
    row_masses: np.ndarray
    col_masses: np.ndarray
    grand_total: float = 1.0
    row_labels: tuple[str, ...] = ()
    col_labels: tuple[str, ...] = ()

    def __post_init__(self):
        for name in ("probs", "row_masses", "col_masses"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))
        if np.any(self.row_masses <= 0) or np.any(self.col_masses <= 0):
            raise TableError("all row and column masses must be strictly positive")
        I, J = self.probs.shape
        if not self.row_labels:
            object.__setattr__(self, "row_labels", _default_labels("r", I))
        if not self.col_labels:
            object.__setattr__(self, "col_labels", _default_labels("c", J))

    @classmethod
    def from_array(cls, values, row_labels=(), col_labels=()) -> "CorrespondenceTable":
        return to_correspondence(CountTable(values, tuple(row_labels), tuple(col_labels)))

    @property
    def shape(self) -> tuple[int, int]:
        return self.probs.shape


@dataclass(frozen=True)
class WeightPair:
    """Positive row and column weights, each summing to one."""

    row_weights: np.ndarray
    col_weights: np.ndarray

    def __post_init__(self):
        r = _frozen(self.row_weights)
        c = _frozen(self.col_weights)
        if np.any(r <= 0) or np.any(c <= 0):
            raise TableError("weights must be strictly positive")
        if abs(r.sum() - 1) > 1e-12 or abs(c.sum() - 1) > 1e-12:
            raise TableError("each weight vector must sum to 1")
        object.__setattr__(self, "row_weights", r)
        object.__setattr__(self, "col_weights", c)

    @classmethod
    def uniform(cls, n_rows: int, n_cols: int) -> "WeightPair":
        return cls(np.full(n_rows, 1.0 / n_rows), np.full(n_cols, 1.0 / n_cols))

    @classmethod
    def masses(cls, p: CorrespondenceTable) -> "WeightPair":
        r = p.row_masses / p.row_masses.sum()
        c = p.col_masses / p.col_masses.sum()
        return cls(r, c)

    @property
    def is_uniform(self) -> bool:
        return bool(np.ptp(self.row_weights) == 0 and np.ptp(self.col_weights) == 0)


# ---------------------------------------------------------------------------
# ingestion


def _is_number(s: str) -> bool:
    try:
        float(s)
    except ValueError:
        return False
    return True


def ingest_csv(
    source: IO | str | bytes,
    delimiter: str = ",",
    has_header: bool | None = None,
    has_row_labels: bool | None = None,
) -> CountTable:
    """Read a nonnegative table from CSV.

    Parameters
    ----------
    source : file object, path-free text, or bytes
        UTF-8 CSV content. Text and binary streams are both accepted.
    delimiter : str
        Field separator.
    has_header, has_row_labels : bool or None
        ``None`` auto-detects: a header is assumed when any first-row cell is
        non-numeric, row labels when any first-column data cell is non-numeric.

    Returns
    -------
    CountTable
        All-zero rows and columns are dropped and listed in ``warnings``.
    """
    if isinstance(source, bytes):
        text = source.decode("utf-8")
    elif isinstance(source, str):
        text = source
    else:
        text = source.read()
        if isinstance(text, bytes):
            text = text.decode("utf-8")
    text = text.lstrip("﻿")
    rows = [r for r in csv.reader(io.StringIO(text), delimiter=delimiter) if any(c.strip() for c in r)]
    if not rows:
        raise TableError("empty input")

    if has_header is None:
        has_header = any(not _is_number(c.strip()) for c in rows[0])
    header = [c.strip() for c in rows[0]] if has_header else None
    body = rows[1:] if has_header else rows
    if not body:
        raise TableError("no data rows")
    if has_row_labels is None:
        has_row_labels = any(not _is_number(r[0].strip()) for r in body)

    width = len(body[0])
    row_labels, data = [], []
    for k, r in enumerate(body):
        if len(r) != width:
            raise TableError(f"ragged row {k + 1}: expected {width} fields, found {len(r)}")
        cells = r[1:] if has_row_labels else r
        if has_row_labels:
            row_labels.append(r[0].strip())
        vals = []
        for j, c in enumerate(cells):
            c = c.strip()
            try:
                x = float(c) if c else 0.0
            except ValueError:
                raise TableError(f"non-numeric cell {c!r} at ({k}, {j})") from None
            if x < 0:
                raise TableError(f"negative value {x} at cell ({k}, {j})")
            vals.append(x)
        data.append(vals)

    n_cols = width - (1 if has_row_labels else 0)
    col_labels = None
    if header is not None:
        col_labels = header[1:] if has_row_labels and len(header) == width else header
        if len(col_labels) != n_cols:
            raise TableError(f"header has {len(col_labels)} column names for {n_cols} columns")
    return CountTable.from_array(
        np.array(data, dtype=float).reshape(len(data), n_cols),
        row_labels if has_row_labels else None,
        col_labels,
    )


# ---------------------------------------------------------------------------
# transforms


def to_correspondence(t: CountTable) -> CorrespondenceTable:
    n = t.values.sum()
    if n <= 0:
        raise TableError("grand total must be positive")
    p = t.values / n
    return CorrespondenceTable(p, p.sum(axis=1), p.sum(axis=0), float(n), t.row_labels, t.col_labels)


def power_transform(t: CountTable, alpha: float) -> CountTable:
    """Elementwise power n_ij**alpha, with 0**alpha = 0.

    A warning is logged when zeros are present and alpha < 1, since the
    alpha -> 0 limit towards log-ratio analysis needs strictly positive cells.
    """
    if not alpha > 0:
        raise TableError(f"alpha must be positive, got {alpha}")
    if alpha < 1 and np.any(t.values == 0):
        logger.warning("power transform of a table with zero cells: the alpha -> 0 limit needs n_ij > 0")
    return t.replace(np.power(t.values, alpha))


def sign_transform(t: CountTable) -> CountTable:
    return t.replace((t.values > 0).astype(float))


def sparse_sign(values) -> sparse.csr_array:
    """Presence/absence pattern of a dense or sparse matrix, stored sparse.

    This is the storage path for extremely sparse inputs (thousands of
    columns, >99% zeros); see :func:`sica.ca.ca_decompose_sparse`.
    """
    m = sparse.csr_array(values, dtype=float)
    if m.nnz and m.data.min() < 0:
        raise TableError("negative value in table")
    m.eliminate_zeros()
    m.data[:] = 1.0
    return m


def row_closure(t: CountTable) -> CountTable:
    """Divide each row by its sum (row-stochastic form)."""
    s = t.values.sum(axis=1, keepdims=True)
    if np.any(s <= 0):
        raise TableError("closure needs every row sum positive")
    return t.replace(t.values / s)


@dataclass(frozen=True)
class MergeResult:
    merged: CountTable
    row_groups: tuple[tuple[int, ...], ...]
    col_groups: tuple[tuple[int, ...], ...]


def _proportional_groups(v: np.ndarray, tol: float) -> list[list[int]]:
    # rows with equal profiles (row / row sum) are proportional
    prof = v / v.sum(axis=1, keepdims=True)
    key = np.round(prof / tol) if tol > 0 else prof
    _, first, inverse = np.unique(key, axis=0, return_index=True, return_inverse=True)
    inverse = inverse.ravel()
    groups = [np.flatnonzero(inverse == g).tolist() for g in range(len(first))]
    groups.sort(key=lambda g: g[0])
    return groups


def merge_equivalent(t: CountTable, tol: float = 1e-9) -> MergeResult:
    """Sum proportional rows, then proportional columns, until nothing changes.

    Lines are proportional when their profiles agree on a grid of spacing
    `tol`. Group members are indices into the original table; merged labels
    join member labels with ``+``.
    """
    if tol < 0:
        raise TableError("tol must be nonnegative")
    v = t.values
    row_groups = [[i] for i in range(v.shape[0])]
    col_groups = [[j] for j in range(v.shape[1])]
    changed = True
    while changed:
        changed = False
        rg = _proportional_groups(v, tol)
        if len(rg) < v.shape[0]:
            v = np.array([v[g].sum(axis=0) for g in rg])
            row_groups = [sorted(sum((row_groups[i] for i in g), [])) for g in rg]
            changed = True
        cg = _proportional_groups(v.T, tol)
        if len(cg) < v.shape[1]:
            v = np.array([v[:, g].sum(axis=1) for g in cg]).T
            col_groups = [sorted(sum((col_groups[j] for j in g), [])) for g in cg]
            changed = True
    merged = CountTable(
        v,
        tuple("+".join(t.row_labels[i] for i in g) for g in row_groups),
        tuple("+".join(t.col_labels[j] for j in g) for g in col_groups),
    )
    return MergeResult(merged, tuple(map(tuple, row_groups)), tuple(map(tuple, col_groups)))


# ---------------------------------------------------------------------------
# output


def table_to_csv(values, row_labels: Sequence[str], col_labels: Sequence[str], fmt: str = "{:.17g}",
                 corner: str = "", header_lines: Sequence[str] = ()) -> str:
    """Render a labeled matrix as CSV text; `header_lines` become ``#`` comments."""
    buf = io.StringIO()
    for line in header_lines:
        buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([corner, *col_labels])
    for lab, row in zip(row_labels, np.asarray(values)):
        w.writerow([lab, *(fmt.format(float(x)) for x in row)])
    return buf.getvalue()


def table_to_json(t: CountTable) -> dict:
    return {
        "row_labels": list(t.row_labels),
        "col_labels": list(t.col_labels),
        "values": t.values.tolist(),
        "warnings": list(t.warnings),
    }
