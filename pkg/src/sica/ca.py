"""Spectral decompositions: CA, marginal-free CA and uniformly weighted LRA."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import LinearOperator, svds

from . import sinkhorn
from .association import lra_index
from .table import CorrespondenceTable, CountTable, TableError, WeightPair, to_correspondence

__all__ = [
    "Decomposition",
    "MfcaResult",
    "ca_decompose",
    "ca_decompose_sparse",
    "mfca",
    "lra_decompose",
    "principal_map",
    "PrincipalMap",
]

SV_CUTOFF = 1e-12


@dataclass(frozen=True)
class Decomposition:
    """Singular values with standard (``row_scores``) and principal coordinates.

    The centered index matrix is reconstructed by
    ``sum_m sigmas[m] * outer(row_scores[:, m], col_scores[:, m])``.
    """

    method: str
    sigmas: np.ndarray
    row_scores: np.ndarray
    col_scores: np.ndarray
    weights: WeightPair
    row_labels: tuple[str, ...] = ()
    col_labels: tuple[str, ...] = ()

    def __post_init__(self):
        for name in ("sigmas", "row_scores", "col_scores"):
            a = np.array(getattr(self, name), dtype=float)
            a.flags.writeable = False
            object.__setattr__(self, name, a)

    @property
    def n_dims(self) -> int:
        return len(self.sigmas)

    @property
    def row_principal(self) -> np.ndarray:
        return self.row_scores * self.sigmas

    @property
    def col_principal(self) -> np.ndarray:
        return self.col_scores * self.sigmas

    @property
    def inertia(self) -> np.ndarray:
        return self.sigmas**2

    @property
    def shares(self) -> np.ndarray:
        total = self.inertia.sum()
        return self.inertia / total if total > 0 else self.inertia

    def reconstruct(self) -> np.ndarray:
        return (self.row_scores * self.sigmas) @ self.col_scores.T

    def to_json(self) -> dict:
        return {
            "method": self.method,
            "sigmas": self.sigmas.tolist(),
            "inertia": self.inertia.tolist(),
            "shares": self.shares.tolist(),
            "row_labels": list(self.row_labels),
            "col_labels": list(self.col_labels),
            "row_weights": self.weights.row_weights.tolist(),
            "col_weights": self.weights.col_weights.tolist(),
            "row_scores": self.row_scores.tolist(),
            "col_scores": self.col_scores.tolist(),
            "row_principal": self.row_principal.tolist(),
            "col_principal": self.col_principal.tolist(),
        }


def _orient(u: np.ndarray, v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # largest-magnitude entry of each row-score column is made positive
    if u.shape[1] == 0:
        return u, v
    a = np.abs(u)
    # near-ties go to the first row so the convention survives rounding
    idx = np.argmax(a >= a.max(axis=0) * (1 - 1e-9), axis=0)
    flip = np.sign(u[idx, np.arange(u.shape[1])])
    flip[flip == 0] = 1.0
    return u * flip, v * flip


def _empty(method, w, p) -> Decomposition:
    I, J = len(w.row_weights), len(w.col_weights)
    return Decomposition(method, np.zeros(0), np.zeros((I, 0)), np.zeros((J, 0)), w, p.row_labels, p.col_labels)


def ca_decompose(p: CorrespondenceTable, method: str = "ca") -> Decomposition:
    """Correspondence analysis via the SVD of the standardized residuals.

    ``S = (P - r c') / sqrt(r c')``; singular values are the CA singular
    values (canonical correlations), standard coordinates are
    ``u / sqrt(r)`` and ``v / sqrt(c)``. Dimensions with singular value below
    1e-12 are dropped.
    """
    r, c = p.row_masses, p.col_masses
    w = WeightPair.masses(p)
    if min(p.shape) < 2:
        return _empty(method, w, p)
    sr, sc = np.sqrt(r), np.sqrt(c)
    S = (p.probs - np.outer(r, c)) / np.outer(sr, sc)
    u, s, vt = np.linalg.svd(S, full_matrices=False)
    keep = s > SV_CUTOFF
    u, s, v = u[:, keep], s[keep], vt[keep].T
    f, g = _orient(u / sr[:, None], v / sc[:, None])
    return Decomposition(method, s, f, g, w, p.row_labels, p.col_labels)


def ca_decompose_sparse(x, k: int = 2, row_labels=(), col_labels=()) -> Decomposition:
    """Leading `k` CA dimensions of a large sparse table (e.g. :func:`sparse_sign` output).

    The centered standardized matrix is never formed; a Lanczos solver works
    on it as a linear operator.
    """
    x = sparse.csr_array(x, dtype=float)
    n = x.sum()
    if n <= 0:
        raise TableError("grand total must be positive")
    P = x / n
    r = np.asarray(P.sum(axis=1)).ravel()
    c = np.asarray(P.sum(axis=0)).ravel()
    if np.any(r <= 0) or np.any(c <= 0):
        raise TableError("all row and column masses must be strictly positive")
    sr, sc = np.sqrt(r), np.sqrt(c)
    Ps = sparse.diags_array(1 / sr) @ P @ sparse.diags_array(1 / sc)
    I, J = P.shape
    if not 0 < k < min(I, J):
        raise ValueError(f"k must be in [1, {min(I, J) - 1}]")

    def mv(y):
        y = np.asarray(y).ravel()
        return Ps @ y - sr * (sc @ y)

    def rmv(y):
        y = np.asarray(y).ravel()
        return Ps.T @ y - sc * (sr @ y)

    op = LinearOperator((I, J), matvec=mv, rmatvec=rmv, dtype=float)
    u, s, vt = svds(op, k=k, random_state=0, tol=1e-12)
    order = np.argsort(s)[::-1]
    u, s, v = u[:, order], s[order], vt[order].T
    f, g = _orient(u / sr[:, None], v / sc[:, None])
    w = WeightPair(r / r.sum(), c / c.sum())
    return Decomposition("ca", s, f, g, w, tuple(row_labels), tuple(col_labels))


@dataclass(frozen=True)
class MfcaResult:
    scaling: sinkhorn.ScalingResult
    partition: sinkhorn.BlockPartition
    decomposition: Decomposition
    block_decompositions: tuple[Decomposition, ...]


def mfca(
    t: CountTable,
    iters: int = 500,
    tol: float = 1e-8,
    zero_tol: float | None = None,
    epsilon: float | None = None,
    which: int = -1,
) -> MfcaResult:
    """Marginal-free CA: Sinkhorn-scale `t`, then run CA on the scaled table.

    For a reducible zero pattern the scaled table is block diagonal; its
    global decomposition then has ``k - 1`` unit singular values, and each
    block is also analysed on its own (blocks ordered by first row).
    """
    s = sinkhorn.scale(t, iters=iters, tol=tol, epsilon=epsilon)
    part = sinkhorn.detect_blocks(s, zero_tol, which)
    d = s.snapshot(which)
    q = to_correspondence(CountTable(d, t.row_labels, t.col_labels))
    dec = ca_decompose(q, method="mfca")
    per_block = []
    for blk in part.blocks:
        sub = d[np.ix_(blk.rows, blk.cols)]
        sub_t = CountTable(sub, tuple(t.row_labels[i] for i in blk.rows), tuple(t.col_labels[j] for j in blk.cols))
        per_block.append(ca_decompose(to_correspondence(sub_t), method="mfca"))
    return MfcaResult(s, part, dec, tuple(per_block))


def lra_decompose(p: CorrespondenceTable) -> Decomposition:
    """Uniformly weighted log-ratio analysis.

    Singular triples of ``Lambda / sqrt(I J)`` with ``Lambda`` the uniform LRA
    index; scores are rescaled so that ``sum_i mu_im^2 / I = 1`` and
    ``sum_j nu_jm^2 / J = 1``, giving ``Lambda = sum_m rho_m mu_m nu_m'``.
    """
    lam = lra_index(p).values
    I, J = lam.shape
    w = WeightPair.uniform(I, J)
    u, s, vt = np.linalg.svd(lam / np.sqrt(I * J), full_matrices=False)
    keep = s > SV_CUTOFF * max(1.0, s[0] if len(s) else 0.0)
    u, s, v = u[:, keep], s[keep], vt[keep].T
    f, g = _orient(np.sqrt(I) * u, np.sqrt(J) * v)
    return Decomposition("lra_limit", s, f, g, w, p.row_labels, p.col_labels)


@dataclass(frozen=True)
class PrincipalMap:
    dims: tuple[int, int]
    shares: tuple[float, float]
    row_labels: tuple[str, ...]
    col_labels: tuple[str, ...]
    row_coords: np.ndarray
    col_coords: np.ndarray
    method: str = "ca"

    def axis_label(self, k: int) -> str:
        return f"Dim {self.dims[k]} ({100 * self.shares[k]:.2f}%)"

    def to_csv(self) -> str:
        lines = [f"kind,label,dim{self.dims[0]},dim{self.dims[1]}"]
        for kind, labels, xy in (("row", self.row_labels, self.row_coords), ("col", self.col_labels, self.col_coords)):
            for lab, (x, y) in zip(labels, xy):
                lines.append(f"{kind},{lab},{x:.10g},{y:.10g}")
        return "\n".join(lines) + "\n"


def principal_map(d: Decomposition, dims: tuple[int, int] = (1, 2)) -> PrincipalMap:
    """Principal coordinates of rows and columns on two (1-based) dimensions."""
    m1, m2 = dims
    if d.n_dims == 0:
        raise ValueError("decomposition has no dimensions")
    for m in dims:
        if not 1 <= m <= d.n_dims:
            raise ValueError(f"dimension {m} out of range 1..{d.n_dims}")
    idx = [m1 - 1, m2 - 1]
    return PrincipalMap(
        (m1, m2),
        (float(d.shares[idx[0]]), float(d.shares[idx[1]])),
        d.row_labels,
        d.col_labels,
        d.row_principal[:, idx],
        d.col_principal[:, idx],
        d.method,
    )


def first_non_unit_dims(d: Decomposition, tol: float = 1e-6) -> tuple[int, int]:
    """First two dimensions whose singular value is not 1 (block indicators skipped)."""
    free = [m + 1 for m, s in enumerate(d.sigmas) if abs(s - 1.0) > tol]
    if len(free) < 2:
        raise ValueError("fewer than two non-unit dimensions")
    return free[0], free[1]
