"""Bootstrap particle filter on a scalar linear-Gaussian state-space model.

This is the integration vehicle for the resampling layer: resampling is
triggered by effective sample size, the ancestry is permuted to satisfy the
in-place predicate, and particles are then copied in place (each slot is
either read from or written to, never both) before propagation. Because the
model is linear-Gaussian, the exact filtering distribution is available in
closed form (:func:`exact_filter`) and every resampler can be validated
end to end against it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import ancestry as anc
from .diagnostics import ess as compute_ess
from .resamplers import ResamplerConfig, resample_ancestors
from .rng import RngStream

__all__ = [
    "LinearGaussianModel",
    "FilterResult",
    "ExactFilterResult",
    "pf_copy_step",
    "pf_run",
    "exact_filter",
    "simulate_observations",
]

# substream namespaces within a filter run
_NS_INIT = 1
_NS_PROP = 2
_NS_RESAMPLE = 3
_NS_SIMULATE = 4


@dataclass(frozen=True)
class LinearGaussianModel:
    """x_t = coeff * x_{t-1} + trans_std * xi_t,  y_t = x_t + obs_std * eta_t.

    xi and eta are independent standard normals; x_0 ~ N(initial_mean,
    initial_std^2). Scalar state only: the resampling layer under test is
    dimension-agnostic.
    """

    coeff: float = 0.0
    trans_std: float = 1.0
    obs_std: float = 1.0
    initial_mean: float = 0.0
    initial_std: float = 1.0

    def __post_init__(self):
        for name in ("trans_std", "obs_std", "initial_std"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")

    def likelihood(self, y: float, x: np.ndarray) -> np.ndarray:
        """Observation density p(y | x), elementwise over particles."""
        z = (y - x) / self.obs_std
        return np.exp(-0.5 * z * z) / (self.obs_std * math.sqrt(2.0 * math.pi))


@dataclass
class FilterResult:
    """Per-step particle filter output."""

    filtered_means: np.ndarray
    log_likelihood: float
    ess: np.ndarray | None = field(repr=False, default=None)
    resampled: np.ndarray | None = field(repr=False, default=None)


@dataclass
class ExactFilterResult:
    """Closed-form filtering recursion output."""

    means: np.ndarray
    variances: np.ndarray
    log_likelihood: float


def pf_copy_step(particles: np.ndarray, a: np.ndarray) -> np.ndarray:
    """In-place gather restricted to slots with a[i] != i.

    Requires an ancestry satisfying the in-place predicate: any slot that
    is read from keeps its own index, so no slot is both read and written
    and the copies could run concurrently without conflicts.
    """
    a = np.asarray(a)
    assert anc.satisfies_inplace_predicate(a), "ancestry violates the in-place predicate"
    move = a != np.arange(a.size)
    particles[move] = particles[a[move]]
    return particles


def simulate_observations(model: LinearGaussianModel, steps: int, seed: int) -> np.ndarray:
    """Draw a synthetic observation sequence y_1..y_T from the model."""
    g = RngStream(seed, (_NS_SIMULATE,)).generator()
    x = model.initial_mean + model.initial_std * g.standard_normal()
    ys = np.empty(steps)
    for t in range(steps):
        x = model.coeff * x + model.trans_std * g.standard_normal()
        ys[t] = x + model.obs_std * g.standard_normal()
    return ys


def pf_run(
    model: LinearGaussianModel,
    observations,
    n_particles: int,
    resampler: ResamplerConfig | str = "systematic",
    ess_threshold: float = 0.5,
    seed: int = 0,
) -> FilterResult:
    """Run the bootstrap particle filter and estimate the log-likelihood.

    Per step: resample (when ESS/N falls below ``ess_threshold``) through
    an in-place-safe permuted ancestry, propagate through the transition
    prior, weight by the observation density. The log-likelihood
    accumulates the log of the weighted mean observation density per step,
    which telescopes to the standard unbiased evidence estimator whether or
    not resampling fires. ``ess_threshold`` 0 never resamples (sequential
    importance sampling); 1 resamples whenever weights are not uniform.

    After resampling, weights reset to uniform, except for
    rejection-capped, whose returned importance weights are carried.

    The rejection variants need an upper bound on the carried (normalized)
    weights. Rather than a collective max, the filter tracks one: the bound
    is 1/N right after a reset and multiplies by sup(density)/total at each
    weighting step, quantities the filter computes anyway. ``sup_w`` in the
    config is read as a bound on the raw observation density (defaulting to
    the model's own density bound), and ``sup_v`` as a cap on the same
    scale, converted to the carried-weight scale via the tracked bound.
    """
    observations = np.asarray(observations, dtype=np.float64)
    if observations.ndim != 1 or observations.size == 0:
        raise ValueError("observations must be a non-empty 1-d sequence")
    if n_particles < 2:
        raise ValueError("need at least 2 particles")
    if not 0.0 <= ess_threshold <= 1.0:
        raise ValueError("ess_threshold must lie in [0, 1]")
    if isinstance(resampler, str):
        resampler = ResamplerConfig(algorithm=resampler)

    n = n_particles
    steps = observations.size
    rng = RngStream(seed)
    density_sup = 1.0 / (model.obs_std * math.sqrt(2.0 * math.pi))
    raw_sup = resampler.sup_w if resampler.sup_w is not None else density_sup
    cap_fraction = resampler.sup_v / raw_sup if resampler.sup_v is not None else 0.5

    x = model.initial_mean + model.initial_std * rng.substream(_NS_INIT).generator().standard_normal(n)
    weights = np.full(n, 1.0 / n)
    weight_bound = 1.0 / n

    means = np.empty(steps)
    ess_trace = np.empty(steps)
    resampled = np.zeros(steps, dtype=bool)
    loglik = 0.0

    for t in range(steps):
        current_ess = compute_ess(weights)
        ess_trace[t] = current_ess
        if current_ess / n < ess_threshold:
            config_t = resampler
            if resampler.algorithm == "rejection":
                config_t = replace(resampler, sup_w=weight_bound)
            elif resampler.algorithm == "rejection-capped":
                config_t = replace(resampler, sup_v=cap_fraction * weight_bound)
            out = resample_ancestors(weights, config_t, rng.substream(_NS_RESAMPLE, t))
            c = anc.permute_parallel(out.ancestors)
            x = pf_copy_step(x, c)
            if out.weights is not None:
                # importance weights are w[a]/min(w[a], cap): at most
                # max(1, 1/cap_fraction), and never below 1
                weights = out.weights.astype(np.float64) / n
                weight_bound = max(1.0, 1.0 / cap_fraction) / n
            else:
                weights = np.full(n, 1.0 / n)
                weight_bound = 1.0 / n
            resampled[t] = True

        g = rng.substream(_NS_PROP, t).generator()
        x = model.coeff * x + model.trans_std * g.standard_normal(n)
        dens = model.likelihood(observations[t], x)

        unnorm = weights * dens
        total = unnorm.sum()
        if total <= 0.0 or not math.isfinite(total):
            raise RuntimeError(
                f"weight collapse at step {t}: all particle weights vanished "
                f"(observation {observations[t]!r})"
            )
        loglik += math.log(total)
        weights = unnorm / total
        weight_bound *= min(raw_sup, density_sup) / total
        means[t] = float(np.dot(weights, x))

    return FilterResult(means, loglik, ess_trace, resampled)


def exact_filter(model: LinearGaussianModel, observations) -> ExactFilterResult:
    """Closed-form Gaussian filtering recursion for the same model.

    Independent of the particle implementation: propagates the exact
    posterior mean and variance step by step and accumulates the exact
    log-likelihood from the one-step predictive densities.
    """
    observations = np.asarray(observations, dtype=np.float64)
    m, p = model.initial_mean, model.initial_std**2
    means = np.empty(observations.size)
    variances = np.empty(observations.size)
    loglik = 0.0
    for t, y in enumerate(observations):
        m_pred = model.coeff * m
        p_pred = model.coeff**2 * p + model.trans_std**2
        s = p_pred + model.obs_std**2
        loglik += -0.5 * (math.log(2.0 * math.pi * s) + (y - m_pred) ** 2 / s)
        gain = p_pred / s
        m = m_pred + gain * (y - m_pred)
        p = (1.0 - gain) * p_pred
        means[t] = m
        variances[t] = p
    return ExactFilterResult(means, variances, loglik)
