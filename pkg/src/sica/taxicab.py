"""Taxicab correspondence analysis (TCA).

The L1 analogue of CA. Each axis maximizes ``u' A v`` over sign vectors
``u`` in {-1, 1}^I and ``v`` in {-1, 1}^J, where ``A`` is the current
residual of the centered table ``p_ij - p_i+ p_+j``. The maximum equals
``||A v||_1 = ||A' u||_1`` and is the taxicab singular value. Axes are
extracted one at a time with the rank-one deflation

    A <- A - (A v)(u' A) / lambda.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .ca import Decomposition
from .table import CorrespondenceTable, WeightPair

__all__ = ["TaxicabAxis", "TaxicabError", "best_axis", "tca_axes", "tca_decompose", "tca_oracle"]

REL_TIE = 1e-12
ORACLE_MAX_SIDE = 20


class TaxicabError(ValueError):
    pass


def _sign(x: np.ndarray) -> np.ndarray:
    # sign(0) = +1
    return np.where(x >= 0, 1.0, -1.0)


def _canonical(u: np.ndarray, v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    if u[0] < 0:
        return -u, -v
    return u, v


def _lex_less(a: np.ndarray, b: np.ndarray) -> bool:
    k = np.flatnonzero(a != b)
    return bool(len(k) and a[k[0]] < b[k[0]])


def _taxicab_value(A: np.ndarray, u: np.ndarray) -> float:
    return float(np.abs(A.T @ u).sum())


@dataclass(frozen=True)
class TaxicabAxis:
    u: np.ndarray
    v: np.ndarray
    lam: float
    f: np.ndarray
    g: np.ndarray
    steps: int = 0


def _better(lam, u, best_lam, best_u) -> bool:
    if best_u is None:
        return True
    scale = max(abs(lam), abs(best_lam), 1.0)
    if lam > best_lam + REL_TIE * scale:
        return True
    if lam >= best_lam - REL_TIE * scale:
        return _lex_less(u, best_u)
    return False


def _ascend(A: np.ndarray, u: np.ndarray) -> tuple[np.ndarray, np.ndarray, int, list[float]]:
    """Alternate v <- sign(A'u), u <- sign(A v) until u'Av stops increasing."""
    history = []
    v = _sign(A.T @ u)
    val = float(u @ A @ v)
    history.append(val)
    steps = 0
    while True:
        steps += 1
        u_new = _sign(A @ v)
        v_new = _sign(A.T @ u_new)
        new = float(u_new @ A @ v_new)
        if new <= val * (1 + REL_TIE) + 1e-300:
            break
        u, v, val = u_new, v_new, new
        history.append(val)
    return u, v, steps, history


def best_axis(A: np.ndarray) -> tuple[np.ndarray, np.ndarray, float, int]:
    """Best sign-vector pair for residual `A` over I + J deterministic restarts.

    Restarts are seeded from every column pattern ``sign(A e_j)`` and every
    row pattern ``sign(A' e_i)``. Ties in lambda go to the lexicographically
    smallest ``u`` with ``u[0] = +1``.
    """
    A = np.asarray(A, dtype=float)
    I, J = A.shape
    starts = [_sign(A[:, j]) for j in range(J)]
    starts += [_sign(A @ _sign(A[i, :])) for i in range(I)]
    best = (None, None, -np.inf, 0)
    for u0 in starts:
        u, v, steps, _ = _ascend(A, u0)
        u, v = _canonical(u, v)
        v = _sign(A.T @ u)
        lam = _taxicab_value(A, u)
        if _better(lam, u, best[2], best[0]):
            best = (u, v, lam, steps)
    return best


def tca_axes(p: CorrespondenceTable, k: int | None = None) -> list[TaxicabAxis]:
    """Successive taxicab axes of `p`, keeping each axis' sign vectors.

    At most `k` axes (default ``min(I, J) - 1``); stops early when the
    residual vanishes.
    """
    I, J = p.shape
    kmax = min(I, J) - 1
    if k is None:
        k = kmax
    if k > kmax:
        raise TaxicabError(f"k must be at most {kmax}")
    r, c = p.row_masses, p.col_masses
    A = p.probs - np.outer(r, c)
    floor = 1e-13 * np.abs(p.probs).sum()
    out = []
    for _ in range(k):
        if np.abs(A).sum() <= floor:
            break
        u, v, lam, steps = best_axis(A)
        if lam <= floor:
            break
        a, b = A @ v, A.T @ u
        out.append(TaxicabAxis(u, v, lam, a / r, b / c, steps))
        A = A - np.outer(a, b) / lam
    return out


def tca_decompose(p: CorrespondenceTable, k: int | None = None) -> Decomposition:
    """Taxicab CA with up to `k` axes (default ``min(I, J) - 1``).

    Factor scores are ``f = (A v) / r`` and ``g = (A' u) / c``; these are the
    principal coordinates, and the standard scores are ``f / lambda`` and
    ``g / lambda``.
    """
    axes = tca_axes(p, k)
    I, J = p.shape
    lam = np.array([ax.lam for ax in axes])
    F = np.column_stack([ax.f / ax.lam for ax in axes]) if axes else np.zeros((I, 0))
    G = np.column_stack([ax.g / ax.lam for ax in axes]) if axes else np.zeros((J, 0))
    return Decomposition("tca", lam, F, G, WeightPair.masses(p), p.row_labels, p.col_labels)


def tca_oracle(p: CorrespondenceTable | np.ndarray) -> TaxicabAxis:
    """First taxicab axis by exhaustive enumeration of sign vectors.

    Enumerates the smaller side (at most 20 entries). Accepts a
    correspondence table (centered internally) or an already centered matrix.
    """
    if isinstance(p, CorrespondenceTable):
        A = p.probs - np.outer(p.row_masses, p.col_masses)
        r, c = p.row_masses, p.col_masses
    else:
        A = np.asarray(p, dtype=float)
        r = np.ones(A.shape[0])
        c = np.ones(A.shape[1])
    I, J = A.shape
    if min(I, J) > ORACLE_MAX_SIDE:
        raise TaxicabError(f"oracle enumerates 2^{min(I, J)} patterns; side limit is {ORACLE_MAX_SIDE}")
    best_u, best_lam = None, -np.inf
    if I <= J:
        candidates = (np.array((1.0,) + s) for s in itertools.product((1.0, -1.0), repeat=I - 1))
    else:
        candidates = (
            _canonical(_sign(A @ np.array((1.0,) + s)), np.zeros(0))[0]
            for s in itertools.product((1.0, -1.0), repeat=J - 1)
        )
    for u in candidates:
        lam = _taxicab_value(A, u)
        if _better(lam, u, best_lam, best_u):
            best_u, best_lam = u, lam
    v = _sign(A.T @ best_u)
    return TaxicabAxis(best_u, v, best_lam, (A @ v) / r, (A.T @ best_u) / c)
