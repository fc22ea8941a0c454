"""Simultaneous-update Sinkhorn (RAS / ipf) scaling to bistochastic form.

Each iteration rescales rows and columns at once::

    d_ij = q_ij / (q_i+ q_+j)
    q    = d / sum(d)

and records two diagnostics of how far ``d`` is from bistochastic (all row
and column averages equal to one):

* ``c2dist = sum_ij |G_j + G_i - 2|`` with ``G_j`` the column averages and
  ``G_i`` the row averages of ``d``;
* ``ratio = sum(d) / (I J)``.

Zeros are absorbing: a zero cell stays exactly zero. When the zero pattern
splits into independent blocks the iteration can settle into a period-2
oscillation between two block-bistochastic matrices; both are kept.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components

from .table import CorrespondenceTable, CountTable, TableError, to_correspondence

__all__ = [
    "ScalingResult",
    "Block",
    "BlockPartition",
    "UnitSingularReport",
    "scale",
    "c2dist",
    "mass_ratio",
    "detect_blocks",
    "unit_singular_count",
    "trace_to_csv",
]

CONVERGED = "converged"
OSCILLATING = "oscillating_period_2"
MAX_ITERS = "max_iters"


def c2dist(d) -> float:
    d = np.asarray(d)
    return float(np.abs(d.mean(axis=0)[None, :] + d.mean(axis=1)[:, None] - 2.0).sum())


def mass_ratio(d) -> float:
    d = np.asarray(d)
    return float(d.sum() / d.size)


@dataclass(frozen=True)
class ScalingResult:
    """Output of :func:`scale`.

    ``d`` is the final scaled matrix and ``q = d / (I J)``. ``snapshots``
    holds ``d`` from the last two iterations (oldest first), and
    ``row_probs``/``col_probs`` the marginals of the probability table fed
    into each of those two iterations.
    """

    d: np.ndarray
    q: np.ndarray
    iterations: np.ndarray
    c2dist: np.ndarray
    ratio: np.ndarray
    status: str
    snapshots: tuple[np.ndarray, ...]
    row_probs: tuple[np.ndarray, ...]
    col_probs: tuple[np.ndarray, ...]
    source: np.ndarray
    row_labels: tuple[str, ...] = ()
    col_labels: tuple[str, ...] = ()
    tol: float = 1e-8

    @property
    def n_iter(self) -> int:
        return int(self.iterations[-1])

    @property
    def shape(self) -> tuple[int, int]:
        return self.d.shape

    def snapshot(self, which: int = -1) -> np.ndarray:
        """Scaled matrix at the last (``-1``) or next-to-last (``-2``) iteration."""
        return self.snapshots[which]

    def correspondence(self, which: int = -1) -> CorrespondenceTable:
        d = self.snapshot(which)
        return to_correspondence(CountTable(d, self.row_labels, self.col_labels))

    def implied_scalings(self, zero_tol: float | None = None, which: int = -1):
        """Row and column factors with ``d_ij = a_i p_ij b_j`` on each block.

        Factors are read off a spanning tree of each block's support, with
        ``a = 1`` at the block's first row. Lines outside every block get NaN.
        Returns ``(a, b, residual)`` where `residual` is the largest
        ``|log(d_ij / p_ij) - log a_i - log b_j|`` over the block supports.
        """
        part = detect_blocks(self, zero_tol, which)
        d = self.snapshot(which)
        p = self.source / self.source.sum()
        I, J = d.shape
        la = np.full(I, np.nan)
        lb = np.full(J, np.nan)
        resid = 0.0
        for blk in part.blocks:
            rows, cols = list(blk.rows), list(blk.cols)
            sub_d = d[np.ix_(rows, cols)]
            sub_p = p[np.ix_(rows, cols)]
            alive = (sub_d > part.zero_tol) & (sub_p > 0)
            target = np.zeros(alive.shape)
            target[alive] = np.log(sub_d[alive]) - np.log(sub_p[alive])
            # breadth-first walk over the bipartite support graph
            seen_r = {0: 0.0}
            seen_c: dict[int, float] = {}
            todo = deque([("r", 0)])
            while todo:
                side, k = todo.popleft()
                if side == "r":
                    for jj in np.flatnonzero(alive[k]):
                        if jj not in seen_c:
                            seen_c[jj] = target[k, jj] - seen_r[k]
                            todo.append(("c", jj))
                else:
                    for ii in np.flatnonzero(alive[:, k]):
                        if ii not in seen_r:
                            seen_r[ii] = target[ii, k] - seen_c[k]
                            todo.append(("r", ii))
            a_loc = np.array([seen_r[i] for i in range(len(rows))])
            b_loc = np.array([seen_c[j] for j in range(len(cols))])
            fit = a_loc[:, None] + b_loc[None, :]
            resid = max(resid, float(np.abs(target - fit)[alive].max()))
            la[rows] = a_loc
            lb[cols] = b_loc
        return np.exp(la), np.exp(lb), resid


def scale(t: CountTable, iters: int = 500, tol: float = 1e-8, epsilon: float | None = None) -> ScalingResult:
    """Scale `t` towards a bistochastic matrix by simultaneous row/column updates.

    Parameters
    ----------
    t : CountTable
    iters : int
        Maximum number of iterations.
    tol : float
        Stop as soon as ``c2dist <= tol``.
    epsilon : float, optional
        Replace zero cells by this count before scaling (zeros otherwise
        stay zero).

    Returns
    -------
    ScalingResult
        ``status`` is ``"converged"``, ``"oscillating_period_2"`` (the last
        c2dist values repeat with period two) or ``"max_iters"``.
    """
    if iters < 1:
        raise ValueError("iters must be at least 1")
    v = np.array(t.values, dtype=float)
    if epsilon is not None:
        if not epsilon > 0:
            raise ValueError("epsilon must be positive")
        v = np.where(v > 0, v, epsilon)
    I, J = v.shape
    q = v / v.sum()
    hist_c2, hist_ratio = [], []
    snaps: deque = deque(maxlen=2)
    rprobs: deque = deque(maxlen=2)
    cprobs: deque = deque(maxlen=2)
    status = MAX_ITERS
    for _ in range(iters):
        r = q.sum(axis=1)
        c = q.sum(axis=0)
        if np.any(r <= 0) or np.any(c <= 0):
            raise TableError("scaling degenerated: a row or column lost all its mass")
        d = q / np.outer(r, c)
        q = d / d.sum()
        snaps.append(d)
        rprobs.append(r)
        cprobs.append(c)
        hist_c2.append(c2dist(d))
        hist_ratio.append(mass_ratio(d))
        if hist_c2[-1] <= tol:
            status = CONVERGED
            break
    else:
        status = _classify(hist_c2)
    d = snaps[-1]
    return ScalingResult(
        d=_ro(d),
        q=_ro(d / (I * J)),
        iterations=_ro(np.arange(1, len(hist_c2) + 1)),
        c2dist=_ro(hist_c2),
        ratio=_ro(hist_ratio),
        status=status,
        snapshots=tuple(_ro(s) for s in snaps),
        row_probs=tuple(_ro(s) for s in rprobs),
        col_probs=tuple(_ro(s) for s in cprobs),
        source=_ro(v),
        row_labels=t.row_labels,
        col_labels=t.col_labels,
        tol=tol,
    )


def _ro(a) -> np.ndarray:
    a = np.array(a)
    a.flags.writeable = False
    return a


def _classify(c2: list[float]) -> str:
    if len(c2) < 3:
        return MAX_ITERS
    thr = 1e-6 * max(1.0, c2[-1])
    if abs(c2[-1] - c2[-3]) <= thr and abs(c2[-1] - c2[-2]) > thr:
        return OSCILLATING
    return MAX_ITERS


def trace_to_csv(s: ScalingResult, last: int | None = None, header_lines=()) -> str:
    """Iteration trace as ``iteration,c2dist,ratio`` with 6-digit mantissas."""
    lines = [f"# {h}" for h in header_lines]
    lines.append("iteration,c2dist,ratio")
    start = 0 if last is None else max(0, len(s.iterations) - last)
    for k in range(start, len(s.iterations)):
        lines.append(f"{s.iterations[k]},{s.c2dist[k]:.6e},{s.ratio[k]:.6e}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# block structure


@dataclass(frozen=True)
class Block:
    rows: tuple[int, ...]
    cols: tuple[int, ...]
    row_marginal: float
    col_marginal: float

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), len(self.cols)


@dataclass(frozen=True)
class BlockPartition:
    """Connected components of the support of a scaled matrix.

    ``row_marginal``/``col_marginal`` of a block are the (common) row and
    column probabilities of its lines. Lines with no surviving cell are
    listed in ``uncovered_rows``/``uncovered_cols``.
    """

    blocks: tuple[Block, ...]
    zero_tol: float
    uncovered_rows: tuple[int, ...] = ()
    uncovered_cols: tuple[int, ...] = ()

    @property
    def k(self) -> int:
        return len(self.blocks)

    @property
    def kind(self) -> str:
        return "fully_indecomposable" if self.k == 1 else "reducible"

    def row_block(self) -> np.ndarray:
        """Block index of every row (-1 when uncovered)."""
        n = sum(len(b.rows) for b in self.blocks) + len(self.uncovered_rows)
        out = np.full(n, -1)
        for k, b in enumerate(self.blocks):
            out[list(b.rows)] = k
        return out

    def col_block(self) -> np.ndarray:
        n = sum(len(b.cols) for b in self.blocks) + len(self.uncovered_cols)
        out = np.full(n, -1)
        for k, b in enumerate(self.blocks):
            out[list(b.cols)] = k
        return out

    def to_json(self, row_labels=None, col_labels=None) -> dict:
        def lab(labels, idx):
            return [labels[i] for i in idx] if labels else list(idx)

        return {
            "kind": self.kind,
            "k": self.k,
            "zero_tol": self.zero_tol,
            "blocks": [
                {
                    "rows": lab(row_labels, b.rows),
                    "cols": lab(col_labels, b.cols),
                    "row_marginal": b.row_marginal,
                    "col_marginal": b.col_marginal,
                }
                for b in self.blocks
            ],
            "uncovered_rows": lab(row_labels, self.uncovered_rows),
            "uncovered_cols": lab(col_labels, self.uncovered_cols),
        }


def detect_blocks(s: ScalingResult, zero_tol: float | None = None, which: int = -1) -> BlockPartition:
    """Split the support of a scaled matrix into independent blocks.

    Cells of ``d`` at or below `zero_tol` are treated as zero (default: 1% of
    the mean entry of ``d``); rows and columns are then grouped into the
    connected components of the bipartite graph of surviving cells. Blocks
    are ordered by their smallest row index.

    The reported marginals are the row/column probabilities fed into the
    chosen iteration, averaged over each block's lines.
    """
    d = s.snapshot(which)
    if zero_tol is None:
        zero_tol = 1e-2 * float(d.mean())
    I, J = d.shape
    alive = sparse.csr_array(d > zero_tol)
    graph = sparse.block_array([[None, alive], [alive.T, None]], format="csr")
    _, labels = connected_components(graph, directed=False)
    row_lab, col_lab = labels[:I], labels[I:]
    has_r = alive.sum(axis=1) > 0
    has_c = alive.sum(axis=0) > 0
    rp, cp = s.row_probs[which], s.col_probs[which]
    blocks = []
    for comp in np.unique(row_lab[has_r]):
        rows = np.flatnonzero((row_lab == comp) & has_r)
        cols = np.flatnonzero((col_lab == comp) & has_c)
        blocks.append(Block(tuple(rows.tolist()), tuple(cols.tolist()), float(rp[rows].mean()), float(cp[cols].mean())))
    blocks.sort(key=lambda b: b.rows[0])
    ai, aj = alive.nonzero()
    assert np.all(row_lab[ai] == col_lab[aj]), "surviving cell bridges two components"
    return BlockPartition(
        tuple(blocks),
        float(zero_tol),
        tuple(np.flatnonzero(~has_r).tolist()),
        tuple(np.flatnonzero(~has_c).tolist()),
    )


@dataclass(frozen=True)
class UnitSingularReport:
    m: int
    blocks: int
    rho1: float
    advisory: bool


def unit_singular_count(p: CorrespondenceTable, tol: float = 1e-6) -> UnitSingularReport:
    """Count CA singular values within `tol` of one.

    ``m`` unit singular values indicate ``m + 1`` independent blocks.
    ``advisory`` flags a first singular value of at least 0.837 (squared
    value 0.7), a sign of quasi-block or band-diagonal structure.
    """
    from .ca import ca_decompose

    sv = ca_decompose(p).sigmas
    m = int(np.sum(np.abs(sv - 1.0) <= tol))
    rho1 = float(sv[0]) if len(sv) else 0.0
    return UnitSingularReport(m, m + 1, rho1, rho1 >= 0.837)
