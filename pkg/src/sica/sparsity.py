"""Sparsity indices of nonnegative tables.

* apparent sparsity: share of zero cells;
* CA sparsity: share of zero cells after merging proportional rows/columns;
* adjusted sparsity: CA sparsity divided by the largest sparsity a
  bistochastic matrix of the merged size can have. That matrix has at least
  ``I1 + J1 - gcd(I1, J1)`` positive cells (Loukaki, 2023).

Indices are exact fractions; use ``float()`` for display.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .table import CountTable, merge_equivalent

__all__ = ["SparsityReport", "min_support", "sparsity_report"]


def min_support(i1: int, j1: int) -> int:
    """Smallest support of an ``i1 x j1`` bistochastic matrix."""
    if i1 < 1 or j1 < 1:
        raise ValueError("dimensions must be positive")
    return i1 + j1 - math.gcd(i1, j1)


@dataclass(frozen=True)
class SparsityReport:
    shape: tuple[int, int]
    zeros: int
    merged_dims: tuple[int, int]
    merged_zeros: int
    apparent: Fraction
    ca_sparsity: Fraction
    min_support: int
    max_bistochastic_sparsity: Fraction
    adjusted: Fraction

    def summary(self) -> str:
        return (
            f"apparent {100 * float(self.apparent):.2f}%, "
            f"CA {100 * float(self.ca_sparsity):.2f}%, "
            f"adjusted {100 * float(self.adjusted):.2f}%"
        )

    def to_json(self) -> dict:
        def frac(x: Fraction) -> dict:
            return {"value": float(x), "exact": f"{x.numerator}/{x.denominator}"}

        return {
            "shape": list(self.shape),
            "zeros": self.zeros,
            "merged_dims": list(self.merged_dims),
            "merged_zeros": self.merged_zeros,
            "apparent": frac(self.apparent),
            "ca_sparsity": frac(self.ca_sparsity),
            "min_support": self.min_support,
            "max_bistochastic_sparsity": frac(self.max_bistochastic_sparsity),
            "adjusted": frac(self.adjusted),
        }


def sparsity_report(t: CountTable, merge_tol: float = 1e-9) -> SparsityReport:
    I, J = t.shape
    zeros = int(np.count_nonzero(t.values == 0))
    merged = merge_equivalent(t, merge_tol).merged
    i1, j1 = merged.shape
    mzeros = int(np.count_nonzero(merged.values == 0))
    ca = Fraction(mzeros, i1 * j1)
    support = min_support(i1, j1)
    max_sp = Fraction(i1 * j1 - support, i1 * j1)
    # a 1 x J or I x 1 table has no room for zeros in a bistochastic form
    adjusted = ca / max_sp if max_sp else Fraction(0)
    return SparsityReport((I, J), zeros, (i1, j1), mzeros, Fraction(zeros, I * J), ca, support, max_sp, adjusted)
