"""Collective data-parallel building blocks used by the resamplers.

All operations are pure functions over one-dimensional real vectors and
preserve the input's floating-point precision (float32 or float64), since
the numerical-stability behaviour of the resamplers is precision dependent
and must be testable in both. Indexing is 0-based throughout.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "inclusive_prefix_sum",
    "exclusive_prefix_sum",
    "adjacent_difference",
    "vector_sum",
    "stable_sum",
    "lower_bound",
]


def _as_vector(w, name: str = "w") -> np.ndarray:
    arr = np.asarray(w)
    if arr.ndim != 1 or arr.size < 1:
        raise ValueError(f"{name} must be a one-dimensional vector with at least one element")
    if not np.issubdtype(arr.dtype, np.floating):
        arr = arr.astype(np.float64)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite (no NaN or infinity)")
    return arr


def inclusive_prefix_sum(w) -> np.ndarray:
    """Running sum: result[i] = w[0] + ... + w[i].

    Left-to-right accumulation in the input precision; this is the serial
    reference semantics against which reassociating implementations are
    measured.
    """
    w = _as_vector(w)
    return np.cumsum(w)


def exclusive_prefix_sum(w) -> np.ndarray:
    """Shifted running sum: result[0] = 0, result[i] = w[0] + ... + w[i-1]."""
    w = _as_vector(w)
    out = np.empty_like(w)
    out[0] = 0
    np.cumsum(w[:-1], out=out[1:])
    return out


def adjacent_difference(W) -> np.ndarray:
    """Inverse of the inclusive scan: result[0] = W[0], result[i] = W[i] - W[i-1]."""
    W = _as_vector(W, "W")
    return np.diff(W, prepend=W.dtype.type(0))


def vector_sum(w):
    """Total of w under the same left-to-right accumulation order as the scan.

    Bit-identical to ``inclusive_prefix_sum(w)[-1]`` by construction.
    """
    w = _as_vector(w)
    return np.cumsum(w)[-1]


def stable_sum(w):
    """Balanced binary-tree (pairwise) summation of w.

    Same mathematical value as :func:`vector_sum` with a much tighter
    rounding-error bound; useful when weights span many magnitudes or N is
    large. The vector is padded with zeros to a power of two so the tree is
    perfectly balanced; padding cannot change any partial sum.
    """
    w = _as_vector(w)
    n = w.size
    size = 1 << (n - 1).bit_length()
    if size != n:
        padded = np.zeros(size, dtype=w.dtype)
        padded[:n] = w
        w = padded
    else:
        w = w.copy()
    while w.size > 1:
        w = w[0::2] + w[1::2]
    return w[0]


def lower_bound(W, u):
    """Smallest index j with W[j] >= u, for W sorted ascending.

    Equivalently the lowest insertion position for u that preserves the
    sort order (ties resolve to the first equal element, which makes the
    prefix interval of a zero weight empty). Binary search, O(log N) per
    query; u may be a scalar or an array of queries.

    Callers guarantee u < W[-1]; out-of-range queries are clamped to N-1
    rather than aborting, because a hard failure inside a parallel loop is
    unrecoverable.
    """
    W = np.asarray(W)
    assert np.all(np.asarray(u) < W[-1]), "lower_bound precondition: u < W[N-1]"
    idx = np.searchsorted(W, u, side="left")
    return np.minimum(idx, W.size - 1)
