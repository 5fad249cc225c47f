"""The five resampling algorithms and the Metropolis step-count calculator.

Each resampler maps a vector of N non-negative, finite, not-all-zero weights
to either an ancestry vector (multinomial, Metropolis, rejection) or a
cumulative offspring vector (stratified, systematic), whichever the
algorithm delivers naturally. Conversions live in :mod:`pfresample.ancestry`.

Weight arithmetic runs in the precision of the input vector; random draws
come from a caller-supplied :class:`~pfresample.rng.RngStream` so results
are identical across runs, platforms, and worker counts. Multiplying all
weights by a power of two (and scaling any weight bound along with them)
leaves every resampler's output bit-identical under the same stream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .diagnostics import check_weights
from .primitives import exclusive_prefix_sum, inclusive_prefix_sum, lower_bound
from .rng import RngStream

__all__ = [
    "ResamplerConfig",
    "ResampleOutput",
    "ALGORITHMS",
    "multinomial_ancestors",
    "multinomial_ancestors_serial",
    "stratified_cumulative_offspring",
    "systematic_cumulative_offspring",
    "stratum_offset_kernel",
    "metropolis_num_steps",
    "metropolis_ancestors",
    "rejection_ancestors",
    "rejection_ancestors_capped",
    "resample_ancestors",
]

# Hard cap on consecutive all-reject rounds before the rejection sampler
# gives up; only reachable when the supplied weight bound is absurdly loose
# or the weights are effectively all zero.
_MAX_REJECTION_ROUNDS = 100_000


def _ancestry_ok(a: np.ndarray, n: int) -> bool:
    return a.shape == (n,) and bool((a >= 0).all()) and bool((a < n).all())


def _cumulative_ok(O: np.ndarray, n: int) -> bool:
    return O.shape == (n,) and O[0] >= 0 and bool((np.diff(O) >= 0).all()) and O[-1] == n


def multinomial_ancestors(w, rng: RngStream, *, uniforms=None) -> np.ndarray:
    """Parallel multinomial resampling: N independent categorical draws.

    Builds the inclusive prefix sum of the weights once, then binary-searches
    it with one uniform draw per output slot, so each a[i] is independent
    with P(a[i] = j) proportional to w[j]. O(N log N).

    ``uniforms`` injects pre-scaled draws in [0, Sum(w)) for testing.
    """
    w = check_weights(w)
    W = inclusive_prefix_sum(w)
    if uniforms is None:
        total = float(W[-1])
        u = rng.generator().random(w.size) * total
    else:
        u = np.asarray(uniforms, dtype=np.float64)
    a = np.asarray(lower_bound(W, u), dtype=np.int64)
    assert _ancestry_ok(a, w.size)
    return a


def multinomial_ancestors_serial(w, rng: RngStream) -> np.ndarray:
    """Single-pass O(N) multinomial resampling via sorted uniform variates.

    Generates the order statistics of N uniforms directly, largest first,
    by accumulating log-scaled spacings, and sweeps the exclusive prefix
    sum of the weights downward in step. Same marginal distribution as
    :func:`multinomial_ancestors`; the output is sorted non-decreasing as a
    structural consequence.
    """
    w = check_weights(w)
    n = w.size
    W = exclusive_prefix_sum(w).tolist()
    total = float(W[-1]) + float(w[-1])
    draws = rng.generator().random(n)
    a = np.empty(n, dtype=np.int64)
    ln_max = 0.0
    j = n - 1
    for idx, i in enumerate(range(n - 1, -1, -1)):
        d = draws[idx]
        ln_max += (math.log(d) if d > 0.0 else -math.inf) / (i + 1)
        u = total * math.exp(ln_max)
        while u < W[j]:
            j -= 1
        a[i] = j
    assert _ancestry_ok(a, n)
    return a


def stratified_cumulative_offspring(w, rng: RngStream, *, uniforms=None) -> np.ndarray:
    """Stratified resampling, delivered as a cumulative offspring vector.

    Slices the cumulative weight distribution into N equal strata and takes
    one draw per stratum with an independent offset u[k] in [0,1):

        r[i] = N * W[i] / W[N-1]
        O[i] = min(N, floor(r[i] + u[stratum(r[i])]))

    O(N). The additions run in the weight precision on purpose: in float32
    the offsets stop being significant against r[i] once N is large, which
    is exactly the instability this library lets you measure (see
    :func:`stratum_offset_kernel`).
    """
    w = check_weights(w)
    if uniforms is None:
        u = rng.generator().random(w.size)
    else:
        u = np.asarray(uniforms, dtype=np.float64)
    return _offspring_from_positions(w, u.astype(w.dtype, copy=False))


def systematic_cumulative_offspring(w, rng: RngStream, *, offset=None) -> np.ndarray:
    """Systematic resampling: stratified with a single shared offset.

    Deterministic given (w, offset). Same complexity and float32 caveats as
    :func:`stratified_cumulative_offspring`.
    """
    w = check_weights(w)
    u = rng.generator().random() if offset is None else float(offset)
    shared = np.full(w.size, u, dtype=w.dtype)
    return _offspring_from_positions(w, shared)


def _offspring_from_positions(w: np.ndarray, u: np.ndarray) -> np.ndarray:
    n = w.size
    dtype = w.dtype
    W = inclusive_prefix_sum(w)
    r = W * dtype.type(n) / W[-1]
    k = np.minimum(n, np.floor(r).astype(np.int64) + 1)  # 1-based stratum index
    O = np.floor(r + u[k - 1]).astype(np.int64)
    np.minimum(O, n, out=O)
    # Repair float edge cases so the result is a valid cumulative offspring
    # vector: rounding in r and in r+u can, within one ulp of a boundary,
    # break monotonicity or leave the final entry at N-1.
    np.maximum.accumulate(O, out=O)
    O[-1] = n
    assert _cumulative_ok(O, n)
    return O


def stratum_offset_kernel(r: float, u: float, n: int, dtype=np.float64) -> int:
    """Scalar stratified/systematic position update min(N, floor(r + u)).

    Exposed separately so the precision behaviour is testable: evaluate the
    sum in float32 versus float64 to see the offset u lose significance
    against large r, and set r near N to see why the min clamp is needed.
    """
    dtype = np.dtype(dtype)
    s = dtype.type(r) + dtype.type(u)
    return int(min(n, math.floor(float(s))))


def metropolis_num_steps(p_star: float, epsilon: float | None, n: int) -> int:
    """Smallest chain length B meeting a selection-bias tolerance.

    Models the chain's occupancy of a maximum-weight particle (normalised
    weight bound p_star) as a two-state process with transition rates
    alpha = (1-p_star)/(N p_star) away from it and beta = 1/N toward it.
    The transient term of the B-step transition matrix decays like
    lambda^B with lambda = 1 - alpha - beta, and the returned B is the
    smallest integer with

        lambda^B * max(alpha, beta) / (alpha + beta) < epsilon.

    ``epsilon=None`` applies the default tolerance p_star / 100. Raises
    when lambda <= 0 (i.e. N * p_star <= 1), where the two-state bound is
    meaningless: p_star is too small relative to N.
    """
    if not 0.0 < p_star <= 1.0:
        raise ValueError("p_star must lie in (0, 1]")
    if epsilon is None:
        epsilon = p_star * 1e-2
    if not 0.0 < epsilon < p_star:
        raise ValueError("epsilon must lie in (0, p_star)")
    if n < 2:
        raise ValueError("need at least 2 particles")
    alpha = (1.0 - p_star) / (n * p_star)
    beta = 1.0 / n
    lam = 1.0 - alpha - beta
    if lam <= 0.0:
        raise ValueError(
            f"bias bound invalid: 1 - alpha - beta = {lam} <= 0 "
            f"(p_star={p_star} too small relative to N={n})"
        )
    threshold = math.log(epsilon * (alpha + beta) / max(alpha, beta)) / math.log(lam)
    return max(1, math.floor(threshold) + 1)


def metropolis_ancestors(w, b: int, rng: RngStream) -> np.ndarray:
    """Metropolis resampling: N independent B-step chains over parent indices.

    Each chain starts at its own index and, per step, proposes a uniformly
    random particle j, accepting when u <= w[j]/w[k]. Only weight ratios
    are ever computed; there is no collective operation over the weights,
    which is what makes the algorithm stable in single precision and cheap
    on wide parallel hardware. O(N B), biased for finite B (see
    :func:`metropolis_num_steps`).

    A chain that starts on a zero weight treats the ratio as +inf (always
    accept) so it escapes immediately; a zero-weight particle is never
    re-entered since the acceptance ratio toward it is 0.
    """
    w = check_weights(w, require_positive_total=False)
    b = int(b)
    if b < 0:
        raise ValueError("number of chain steps must be non-negative")
    n = w.size
    g = rng.generator()
    k = np.arange(n, dtype=np.int64)
    for _ in range(b):
        u = g.random(n)
        j = g.integers(0, n, size=n)
        wk = w[k]
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = w[j] / wk
        accept = (wk == 0) | (u <= ratio)
        k = np.where(accept, j, k)
    assert _ancestry_ok(k, n)
    return k


def rejection_ancestors(w, sup_w: float, rng: RngStream, *, return_trips: bool = False):
    """Rejection resampling with a first deterministic self-proposal.

    Slot i first proposes its own particle, then draws uniformly random
    particles until one is accepted with probability w[j]/sup_w. Unbiased
    whenever sup_w really bounds the weights; acceptance ratios above 1
    (a too-small sup_w) are tolerated silently, since an approximate bound
    is explicitly useful. Expected trip count per slot is
    sup_w * N / Sum(w). The output is an unweighted sample: all implied
    weights are 1.

    ``return_trips=True`` additionally returns the per-slot proposal
    counts (first proposal included), which the benchmark harness records.
    """
    w = check_weights(w, require_positive_total=False)
    a, trips = _rejection_loop(w, sup_w, rng)
    if return_trips:
        return a, trips
    return a


def rejection_ancestors_capped(w, sup_v: float, rng: RngStream, *, return_trips: bool = False):
    """Rejection resampling against capped proposal weights min(w, sup_v).

    Useful when no hard weight bound exists or the true bound is loose:
    sample ancestors from the categorical proposal with weights
    v[i] = min(w[i], sup_v), then importance-weight each output slot by
    w[a[i]]/v[a[i]]. Every returned weight is 1 except where the cap was
    active (w[a[i]] > sup_v), and the weighted sample remains unbiased for
    the target distribution.

    Returns ``(ancestors, weights)``; with ``return_trips=True`` also the
    per-slot proposal counts.
    """
    w = check_weights(w, require_positive_total=False)
    v = np.minimum(w, w.dtype.type(sup_v))
    a, trips = _rejection_loop(v, sup_v, rng)
    with np.errstate(invalid="ignore"):
        out_w = w[a] / v[a]
    out_w = np.where(v[a] == 0, w.dtype.type(1), out_w).astype(w.dtype)
    if return_trips:
        return a, out_w, trips
    return a, out_w


def _rejection_loop(v: np.ndarray, bound: float, rng: RngStream):
    bound = float(bound)
    if not math.isfinite(bound) or bound <= 0:
        raise ValueError(f"weight bound must be finite and positive, got {bound}")
    n = v.size
    ratio = v / v.dtype.type(bound)
    if not np.all(np.isfinite(ratio)):
        raise ValueError("non-finite acceptance ratio: weight bound underflows the weights")
    g = rng.generator()
    a = np.arange(n, dtype=np.int64)
    trips = np.ones(n, dtype=np.int64)
    beta = g.random(n)
    pending = np.flatnonzero(beta > ratio[a])
    rounds = 0
    while pending.size:
        rounds += 1
        if rounds > _MAX_REJECTION_ROUNDS:
            raise RuntimeError(
                f"rejection resampling made no progress after {_MAX_REJECTION_ROUNDS} "
                f"rounds; weight bound {bound} is far above every weight"
            )
        j = g.integers(0, n, size=pending.size)
        beta = g.random(pending.size)
        accept = beta <= ratio[j]
        a[pending[accept]] = j[accept]
        trips[pending] += 1
        pending = pending[~accept]
    assert _ancestry_ok(a, n)
    return a, trips


_ANCESTRY_ALGORITHMS = ("multinomial", "multinomial-serial", "metropolis", "rejection", "rejection-capped")
_OFFSPRING_ALGORITHMS = ("stratified", "systematic")
ALGORITHMS = _ANCESTRY_ALGORITHMS[:2] + _OFFSPRING_ALGORITHMS + _ANCESTRY_ALGORITHMS[2:]


@dataclass(frozen=True)
class ResamplerConfig:
    """Algorithm selector plus the per-algorithm tuning parameters.

    Metropolis takes either an explicit chain length ``b`` or a
    (``p_star``, ``epsilon``) pair for :func:`metropolis_num_steps`; with
    neither given, p_star falls back to the observed maximum normalised
    weight. Rejection takes the weight bound ``sup_w``; the capped variant
    its proposal cap ``sup_v``.
    """

    algorithm: str = "systematic"
    b: int | None = None
    p_star: float | None = None
    epsilon: float | None = None
    sup_w: float | None = None
    sup_v: float | None = None

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}; choose from {ALGORITHMS}")


@dataclass(frozen=True)
class ResampleOutput:
    """Uniform resampling result: ancestry plus optional carried weights."""

    ancestors: np.ndarray
    weights: np.ndarray | None = None
    extras: dict | None = None


def resolve_metropolis_steps(w: np.ndarray, config: ResamplerConfig) -> int:
    if config.b is not None:
        return int(config.b)
    p_star = config.p_star
    if p_star is None:
        total = float(np.sum(w, dtype=np.float64))
        if total <= 0:
            raise ValueError("cannot derive p_star from an all-zero weight vector")
        p_star = min(1.0, float(np.max(w)) / total)
    return metropolis_num_steps(p_star, config.epsilon, w.size)


def resample_ancestors(w, config: ResamplerConfig, rng: RngStream) -> ResampleOutput:
    """Run the configured resampler and return an ancestry vector.

    Cumulative-offspring algorithms are expanded through
    :func:`~pfresample.ancestry.cumulative_offspring_to_ancestors`. The
    ancestry is returned as produced, i.e. not yet permuted for the
    in-place predicate. ``extras`` carries per-algorithm metadata (B for
    Metropolis, mean trip count for rejection).
    """
    from .ancestry import cumulative_offspring_to_ancestors

    w = check_weights(w)
    alg = config.algorithm
    if alg == "multinomial":
        return ResampleOutput(multinomial_ancestors(w, rng), extras={})
    if alg == "multinomial-serial":
        return ResampleOutput(multinomial_ancestors_serial(w, rng), extras={})
    if alg == "stratified":
        O = stratified_cumulative_offspring(w, rng)
        return ResampleOutput(cumulative_offspring_to_ancestors(O), extras={})
    if alg == "systematic":
        O = systematic_cumulative_offspring(w, rng)
        return ResampleOutput(cumulative_offspring_to_ancestors(O), extras={})
    if alg == "metropolis":
        b = resolve_metropolis_steps(w, config)
        return ResampleOutput(metropolis_ancestors(w, b, rng), extras={"B": b})
    if alg == "rejection":
        sup = config.sup_w if config.sup_w is not None else float(np.max(w))
        a, trips = rejection_ancestors(w, sup, rng, return_trips=True)
        return ResampleOutput(a, extras={"mean_trips": float(trips.mean())})
    if alg == "rejection-capped":
        if config.sup_v is None:
            raise ValueError("rejection-capped requires sup_v")
        a, out_w, trips = rejection_ancestors_capped(w, config.sup_v, rng, return_trips=True)
        return ResampleOutput(a, weights=out_w, extras={"mean_trips": float(trips.mean())})
    raise ValueError(f"unknown algorithm {alg!r}")
