"""Conversions among ancestry, offspring, and cumulative-offspring vectors,
and permutation of ancestry vectors for conflict-free in-place propagation.

An ancestry vector ``a`` maps each output slot to the index of its parent.
When every parent that has at least one offspring sits in its own slot
(``o[i] > 0`` implies ``a[i] = i``), particles can be copied in place and
concurrently, because each slot is either read from or written to but never
both. ``permute_serial`` and ``permute_parallel`` rearrange an arbitrary
ancestry vector into one satisfying that predicate.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "ancestors_to_offspring",
    "cumulative_offspring_to_ancestors",
    "cumulative_to_offspring",
    "offspring_to_cumulative",
    "permute_serial",
    "prepermute",
    "permute_parallel",
    "satisfies_inplace_predicate",
]


def _check_ancestry(a) -> np.ndarray:
    a = np.asarray(a)
    if a.ndim != 1 or a.size < 1:
        raise ValueError("ancestry vector must be one-dimensional and non-empty")
    if not np.issubdtype(a.dtype, np.integer):
        if np.issubdtype(a.dtype, np.floating) and np.all(a == np.floor(a)):
            a = a.astype(np.int64)
        else:
            raise ValueError("ancestry vector must contain integers")
    a = a.astype(np.int64, copy=False)
    n = a.size
    if a.min() < 0 or a.max() >= n:
        raise ValueError(f"ancestry entries must lie in [0, {n})")
    return a


def _check_cumulative(O) -> np.ndarray:
    O = np.asarray(O)
    if O.ndim != 1 or O.size < 1:
        raise ValueError("cumulative offspring vector must be one-dimensional and non-empty")
    O = O.astype(np.int64, copy=False)
    n = O.size
    if O[0] < 0 or np.any(np.diff(O) < 0):
        raise ValueError("cumulative offspring vector must be non-negative and non-decreasing")
    if O[-1] != n:
        raise ValueError(f"cumulative offspring vector must end at N={n}, got {O[-1]}")
    return O


def _check_offspring(o) -> np.ndarray:
    o = np.asarray(o)
    if o.ndim != 1 or o.size < 1:
        raise ValueError("offspring vector must be one-dimensional and non-empty")
    o = o.astype(np.int64, copy=False)
    if o.min() < 0:
        raise ValueError("offspring counts must be non-negative")
    if o.sum() != o.size:
        raise ValueError(f"offspring counts must sum to N={o.size}, got {o.sum()}")
    return o


def cumulative_offspring_to_ancestors(O) -> np.ndarray:
    """Expand a cumulative offspring vector into a sorted ancestry vector.

    Parent i fills the output slots [O[i-1], O[i]).
    """
    O = _check_cumulative(O)
    counts = np.diff(O, prepend=np.int64(0))
    return np.repeat(np.arange(O.size, dtype=np.int64), counts)


def ancestors_to_offspring(a) -> np.ndarray:
    """Histogram of an ancestry vector: o[j] = number of slots with a[i] = j."""
    a = _check_ancestry(a)
    return np.bincount(a, minlength=a.size).astype(np.int64)


def offspring_to_cumulative(o) -> np.ndarray:
    """Inclusive prefix sum of offspring counts, integer exact."""
    o = _check_offspring(o)
    return np.cumsum(o)


def cumulative_to_offspring(O) -> np.ndarray:
    """Adjacent difference of a cumulative offspring vector, integer exact."""
    O = _check_cumulative(O)
    return np.diff(O, prepend=np.int64(0))


def satisfies_inplace_predicate(c) -> bool:
    """True when every parent with offspring occupies its own slot."""
    c = _check_ancestry(c)
    parents = np.flatnonzero(np.bincount(c, minlength=c.size) > 0)
    return bool(np.all(c[parents] == parents))


def permute_serial(a) -> np.ndarray:
    """Single-pass pairwise-swap permutation satisfying the in-place predicate.

    Works on a copy; the result is a rearrangement of ``a``. O(N): each swap
    pins one parent into its own slot, and pinned slots are never swapped
    again.
    """
    a = _check_ancestry(a)
    c = a.tolist()
    n = len(c)
    i = 0
    while i < n:
        ai = c[i]
        if ai != i and c[ai] != ai:
            c[i], c[ai] = c[ai], ai
            # re-examine slot i with its new value
        else:
            i += 1
    return np.asarray(c, dtype=np.int64)


def prepermute(a) -> np.ndarray:
    """Claim phase: d[v] = lowest slot index whose ancestor is v.

    Slots whose parent value is absent from ``a`` hold the sentinel N.
    The min rule makes the outcome independent of the order in which
    claims are applied, so any parallel schedule yields the same vector.
    """
    a = _check_ancestry(a)
    n = a.size
    d = np.full(n, n, dtype=np.int64)
    np.minimum.at(d, a, np.arange(n, dtype=np.int64))
    return d


def permute_parallel(a, return_max_steps: bool = False):
    """Claim-and-chase permutation satisfying the in-place predicate.

    Phase 1 (:func:`prepermute`) lets the lowest-indexed slot win each
    contested parent position. Phase 2 walks each losing slot i along the
    chain i, d[i], d[d[i]], ... until a sentinel slot is found and claims
    it; the chain can never revisit a slot because the non-sentinel entries
    of d are unique, so each walk takes at most N steps. The final claim is
    a compare-and-exchange in a concurrent setting; under this serial
    schedule (ascending i) it always succeeds. Finally c[i] = a[d[i]].

    With ``return_max_steps=True`` also returns the longest chain walk
    observed, for termination instrumentation.
    """
    a = _check_ancestry(a)
    n = a.size
    d = prepermute(a)
    losers = np.flatnonzero(d[a] != np.arange(n, dtype=np.int64))
    dl = d.tolist()
    max_steps = 0
    for i in losers.tolist():
        x = i
        steps = 0
        while dl[x] != n:
            x = dl[x]
            steps += 1
            if steps > n:
                raise RuntimeError("permutation chain walk failed to terminate")
        dl[x] = i
        if steps > max_steps:
            max_steps = steps
    d = np.asarray(dl, dtype=np.int64)
    c = a[d]
    if return_max_steps:
        return c, max_steps
    return c
