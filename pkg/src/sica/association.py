"""Association (interaction) indices and weighted double centering.

Indices are returned as :class:`AssociationMatrix` objects carrying the
weights and the centering scheme that produced them.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .table import (
    CorrespondenceTable,
    CountTable,
    TableError,
    WeightPair,
    power_transform,
    to_correspondence,
)

__all__ = [
    "AssociationMatrix",
    "ca_index",
    "lra_index",
    "double_center",
    "first_order_approx",
    "power_index_ratio",
    "log_odds_tetra",
    "mf_index",
    "block_mf_index",
    "is_double_centered",
]

KINDS = ("ca", "lra", "first_order", "mf", "block_mf", "power_ratio", "centered")
CENTERINGS = ("additive", "multiplicative", "both", "none")


@dataclass(frozen=True)
class AssociationMatrix:
    values: np.ndarray
    weights: WeightPair
    kind: str
    centering: str
    row_labels: tuple[str, ...] = ()
    col_labels: tuple[str, ...] = ()

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        v.flags.writeable = False
        object.__setattr__(self, "values", v)
        if self.kind not in KINDS:
            raise ValueError(f"unknown kind {self.kind!r}")
        if self.centering not in CENTERINGS:
            raise ValueError(f"unknown centering {self.centering!r}")

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "centering": self.centering,
            "row_weights": self.weights.row_weights.tolist(),
            "col_weights": self.weights.col_weights.tolist(),
            "row_labels": list(self.row_labels),
            "col_labels": list(self.col_labels),
            "values": self.values.tolist(),
        }


def is_double_centered(values, w: WeightPair, atol: float = 1e-10) -> bool:
    """Weighted row and column means both vanish."""
    v = np.asarray(values)
    return bool(
        np.all(np.abs(w.row_weights @ v) <= atol) and np.all(np.abs(v @ w.col_weights) <= atol)
    )


def ca_index(p: CorrespondenceTable) -> AssociationMatrix:
    """Density ratio p_ij / (p_i+ p_+j) minus one."""
    r, c = p.row_masses, p.col_masses
    tau = p.probs / np.outer(r, c) - 1.0
    return AssociationMatrix(tau, WeightPair.masses(p), "ca", "both", p.row_labels, p.col_labels)


def lra_index(
    p: CorrespondenceTable, w: WeightPair | None = None, epsilon: float | None = None
) -> AssociationMatrix:
    """Weighted log-linear association: additive double centering of log p.

    Zero cells raise :class:`TableError` unless `epsilon` is given, in which
    case zeros are replaced by `epsilon` (in probability units) and the table
    renormalized.
    """
    probs = np.asarray(p.probs)
    if w is None:
        w = WeightPair.uniform(*probs.shape)
    if np.any(probs <= 0):
        if epsilon is None:
            i, j = np.argwhere(probs <= 0)[0]
            raise TableError(
                f"LRA requires strictly positive data; cell ({i}, {j}) "
                f"[{p.row_labels[i]}, {p.col_labels[j]}] is zero"
            )
        probs = np.where(probs > 0, probs, epsilon)
        probs = probs / probs.sum()
    lam = _center(np.log(probs), w, "additive")
    return AssociationMatrix(lam, w, "lra", "additive", p.row_labels, p.col_labels)


def _center(y: np.ndarray, w: WeightPair, mode: str) -> np.ndarray:
    yi = y @ w.col_weights
    yj = w.row_weights @ y
    yy = w.row_weights @ y @ w.col_weights
    if mode == "additive":
        return y + yy - (yi[:, None] + yj[None, :])
    if mode == "multiplicative":
        if yy == 0:
            raise TableError("multiplicative centering needs a nonzero weighted grand mean")
        return y - np.outer(yi, yj) / yy
    raise ValueError(f"mode must be 'additive' or 'multiplicative', got {mode!r}")


def double_center(y, w: WeightPair, mode: str = "additive") -> AssociationMatrix:
    """Row-plus-column (``additive``) or row-times-column (``multiplicative``) centering.

    With weighted means ``Y_i+ = sum_j y_ij w_j``, ``Y_+j = sum_i y_ij w_i``
    and ``Y_++``::

        additive:        y_ij + Y_++ - Y_i+ - Y_+j
        multiplicative:  y_ij - Y_i+ Y_+j / Y_++
    """
    y = np.asarray(y, dtype=float)
    if y.shape != (len(w.row_weights), len(w.col_weights)):
        raise TableError("weights do not match the matrix shape")
    return AssociationMatrix(_center(y, w, mode), w, "centered", mode)


def first_order_approx(p: CorrespondenceTable, w: WeightPair | None = None) -> AssociationMatrix:
    """Linearization of :func:`lra_index` around the product of the weights."""
    if w is None:
        w = WeightPair.uniform(*p.shape)
    a, b = w.row_weights, w.col_weights
    tau = (
        p.probs / np.outer(a, b)
        - (p.row_masses / a)[:, None]
        - (p.col_masses / b)[None, :]
        + 1.0
    )
    return AssociationMatrix(tau, w, "first_order", "additive", p.row_labels, p.col_labels)


def power_index_ratio(t: CountTable, alpha: float) -> AssociationMatrix:
    """CA index of the power-transformed table divided by alpha.

    Tends to the uniformly weighted LRA index as alpha -> 0, with error of
    order alpha. Not double centered for finite alpha (the masses depend on
    alpha), so the result is reported uncentered.
    """
    if not alpha > 0:
        raise TableError(f"alpha must be positive, got {alpha}")
    if np.any(t.values <= 0):
        raise TableError("the power limit needs strictly positive cells")
    pa = to_correspondence(power_transform(t, alpha))
    tau = (pa.probs / np.outer(pa.row_masses, pa.col_masses) - 1.0) / alpha
    return AssociationMatrix(tau, WeightPair.uniform(*t.shape), "power_ratio", "none", t.row_labels, t.col_labels)


def log_odds_tetra(p: CorrespondenceTable, i: int, i1: int, j: int, j1: int) -> float:
    """log(p_ij p_i1j1 / (p_ij1 p_i1j)) with zero-based indices."""
    cells = [p.probs[i, j], p.probs[i1, j1], p.probs[i, j1], p.probs[i1, j]]
    if min(cells) <= 0:
        raise TableError("log odds ratio needs four positive cells")
    return float(np.log(cells[0]) + np.log(cells[1]) - np.log(cells[2]) - np.log(cells[3]))


def mf_index(q: CorrespondenceTable, tol: float = 1e-6) -> AssociationMatrix:
    """Marginal-free index I*J*q_ij - 1 of a table with uniform marginals."""
    I, J = q.shape
    dev = max(np.abs(q.row_masses - 1.0 / I).max(), np.abs(q.col_masses - 1.0 / J).max())
    if dev > tol:
        raise TableError(f"table is not bistochastic: marginal deviation {dev:.3g} > {tol:g}")
    return AssociationMatrix(I * J * q.probs - 1.0, WeightPair.uniform(I, J), "mf", "both", q.row_labels, q.col_labels)


def block_mf_index(p: CorrespondenceTable, partition, scaled, zero_tol: float | None = None) -> AssociationMatrix:
    """Block-wise marginal-free index of a block-diagonally scaled table.

    `scaled` is the scaled matrix a*_i p_ij b*_j (e.g. ``ScalingResult.d``).
    Inside block b with row/column sums r_b, c_b and mass m_b of the scaled
    table, the index is ``m_b * q_ij / (r_b c_b) - 1``: the marginal-free
    index of the block taken as its own probability table. Cells outside
    every block get -1.
    """
    s = np.asarray(scaled, dtype=float)
    if s.shape != p.shape:
        raise TableError("scaled matrix does not match the table shape")
    if np.any((p.probs == 0) & (s != 0)):
        raise TableError("scaled matrix is nonzero where the table is zero")
    if zero_tol is None:
        zero_tol = 1e-2 * s.mean()
    q = s / s.sum()
    tau = np.full(s.shape, -1.0)
    inside = np.zeros(s.shape, dtype=bool)
    for blk in partition.blocks:
        ix = np.ix_(blk.rows, blk.cols)
        sub = q[ix]
        m = sub.sum()
        r = sub.sum(axis=1)[:, None]
        c = sub.sum(axis=0)[None, :]
        # block is bistochastic, so r and c are constant within it
        tau[ix] = m * sub / (r * c) - 1.0
        inside[ix] = True
    if np.any((~inside) & (s > zero_tol)):
        i, j = np.argwhere((~inside) & (s > zero_tol))[0]
        raise TableError(f"cell ({i}, {j}) has positive scaled mass outside every block")
    return AssociationMatrix(tau, WeightPair.uniform(*p.shape), "block_mf", "both", p.row_labels, p.col_labels)
