"""Partition-quality metrics: Rand index and best-matching error rate."""

from __future__ import annotations

import numpy as np
from scipy.optimize import linear_sum_assignment

__all__ = ["rand_index", "misclassification_error"]


def _contingency(z1, z2):
    z1 = np.asarray(z1)
    z2 = np.asarray(z2)
    if z1.shape != z2.shape or z1.ndim != 1:
        raise ValueError(f"label vectors must be equal-length 1-d, got {z1.shape} vs {z2.shape}")
    _, a = np.unique(z1, return_inverse=True)
    _, b = np.unique(z2, return_inverse=True)
    table = np.zeros((a.max() + 1, b.max() + 1), dtype=np.int64)
    np.add.at(table, (a, b), 1)
    return table


def rand_index(z1, z2):
    """Fraction of point pairs on which the two partitions agree.

    A pair agrees when it is co-clustered in both partitions or separated in
    both.  Invariant under relabeling of either argument.
    """
    table = _contingency(z1, z2)
    n = table.sum()
    if n < 2:
        raise ValueError("rand index needs at least two points")

    def pairs(counts):
        return float(np.sum(counts * (counts - 1) // 2))

    together_both = pairs(table)
    together_1 = pairs(table.sum(axis=1))
    together_2 = pairs(table.sum(axis=0))
    total = n * (n - 1) // 2
    agree = together_both + (total - together_1 - together_2 + together_both)
    return agree / total


def misclassification_error(z_est, z_true):
    """Smallest mismatch fraction over all relabelings of the estimate.

    Only defined when both partitions have the same number of clusters
    (matching how error rates are reported alongside a correctly estimated
    cluster count); otherwise raises ``ValueError``.
    """
    table = _contingency(z_est, z_true)
    if table.shape[0] != table.shape[1]:
        raise ValueError(
            f"misclassification error needs equal cluster counts, got "
            f"{table.shape[0]} vs {table.shape[1]}"
        )
    rows, cols = linear_sum_assignment(-table)
    matched = table[rows, cols].sum()
    return 1.0 - matched / table.sum()
