"""Weight diagnostics and the synthetic Gaussian weight-set generator.

The weight simulation mirrors a one-step filtering problem with prior
x ~ N(0,1) and likelihood y ~ N(x,1): for an observation y each particle
draws x[i] ~ N(0,1) and receives weight

    w[i] = exp(-(x[i] - y)^2 / 2) / sqrt(2*pi),

so the weight bound and the first two weight moments have closed forms that
the generator can be validated against, and that drive the Metropolis
step-count recipe in the benchmark harness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .rng import RngStream

__all__ = [
    "WeightSetSpec",
    "check_weights",
    "ess",
    "resampling_mse",
    "simulate_weight_set",
    "sup_weight",
    "expected_weight",
    "relative_weight_variance",
    "max_normalised_weight",
    "logweights_to_weights",
    "sort_weights",
]


def check_weights(w, require_positive_total: bool = True, name: str = "w") -> np.ndarray:
    """Validate a weight vector: finite, non-negative, not all zero."""
    arr = np.asarray(w)
    if arr.ndim != 1 or arr.size < 1:
        raise ValueError(f"{name} must be a one-dimensional vector with at least one element")
    if not np.issubdtype(arr.dtype, np.floating):
        arr = arr.astype(np.float64)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite (no NaN or infinity)")
    if arr.min() < 0:
        raise ValueError(f"{name} must be non-negative")
    if require_positive_total and not np.any(arr > 0):
        raise ValueError(f"{name} must contain at least one strictly positive weight")
    return arr


def ess(w) -> float:
    """Effective sample size Sum(w)^2 / (w . w), in [1, N].

    Equals N iff all weights are equal and 1 iff exactly one weight is
    nonzero; commonly compared against a fraction of N to decide whether
    to resample.
    """
    w = check_weights(w)
    total = w.sum(dtype=w.dtype)
    return float(total * total / np.dot(w, w))


def resampling_mse(o, w) -> float:
    """Mean-square deviation of realised offspring shares from weight shares.

    (1/N) * sum_i (o[i]/N - w[i]/Sum(w))^2; zero iff the offspring counts
    are exactly proportional to the normalised weights. Computed in float64
    regardless of the weight precision, since this is an analysis metric
    rather than part of any resampling algorithm.
    """
    o = np.asarray(o, dtype=np.float64)
    w = check_weights(w).astype(np.float64)
    if o.shape != w.shape:
        raise ValueError(f"offspring and weight vectors differ in length: {o.shape} vs {w.shape}")
    n = w.size
    diff = o / n - w / w.sum()
    return float(np.mean(diff * diff))


@dataclass(frozen=True)
class WeightSetSpec:
    """Recipe for one synthetic weight set: particle count, observation, seed."""

    n: int
    y: float
    seed: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("particle count must be at least 1")


_WEIGHT_STREAM_ID = 0x5EED


def simulate_weight_set(spec: WeightSetSpec, dtype=np.float64) -> np.ndarray:
    """Draw one synthetic Gaussian weight set, reproducibly from spec.seed.

    All weights lie in (0, 1/sqrt(2*pi)]; the arithmetic runs in the
    requested precision so single-precision behaviour is faithful.
    """
    dtype = np.dtype(dtype)
    g = RngStream(spec.seed, (_WEIGHT_STREAM_ID,)).generator()
    x = g.standard_normal(spec.n).astype(dtype)
    d = x - dtype.type(spec.y)
    return sup_weight(dtype) * np.exp(dtype.type(-0.5) * d * d)


def sup_weight(dtype=np.float64):
    """Upper bound on simulated weights: 1/sqrt(2*pi), in the given precision."""
    return np.dtype(dtype).type(1.0 / math.sqrt(2.0 * math.pi))


def expected_weight(y: float) -> float:
    """Mean simulated weight, exp(-y^2/4) / (2*sqrt(pi)); decreasing in |y|."""
    return math.exp(-0.25 * y * y) / (2.0 * math.sqrt(math.pi))


def relative_weight_variance(y: float) -> float:
    """Variance of w/E(w): (2/sqrt(3)) * exp(y^2/6) - 1; increasing in |y|."""
    return (2.0 / math.sqrt(3.0)) * math.exp(y * y / 6.0) - 1.0


def max_normalised_weight(y: float, n: int) -> float:
    """Analytic bound on the maximum normalised weight, sup w / (N E(w)).

    Clamped to (0, 1] since it is a probability bound; feeds the Metropolis
    step-count calculation in the benchmark harness.
    """
    if n < 1:
        raise ValueError("particle count must be at least 1")
    return min(1.0, float(sup_weight()) / (n * expected_weight(y)))


def logweights_to_weights(lw) -> np.ndarray:
    """Convert natural-log weights to linear weights without underflow.

    Rescales by the maximum before exponentiating, so the largest output is
    exactly 1 and weight ratios are preserved. Entries of -inf map to 0;
    an all-(-inf) vector is rejected.
    """
    lw = np.asarray(lw)
    if lw.ndim != 1 or lw.size < 1:
        raise ValueError("log-weight vector must be one-dimensional and non-empty")
    if not np.issubdtype(lw.dtype, np.floating):
        lw = lw.astype(np.float64)
    if np.any(np.isnan(lw)) or np.any(lw == np.inf):
        raise ValueError("log-weights may not contain NaN or +inf")
    m = lw.max()
    if m == -np.inf:
        raise ValueError("all log-weights are -inf: no positive weight")
    return np.exp(lw - m)


def sort_weights(w) -> np.ndarray:
    """Ascending sort of a weight vector (returns a copy).

    Pre-sorting improves prefix-sum stability for wide weight ranges; the
    benchmark harness times it for context, the resamplers never call it.
    """
    w = check_weights(w, require_positive_total=False)
    return np.sort(w)
