"""Command-line interface: benchmark harness and particle filter demo."""

from __future__ import annotations

import sys

import click
import numpy as np

from . import bench as bench_mod
from . import pf as pf_mod
from .resamplers import ALGORITHMS, ResamplerConfig


def _parse_int_list(text: str) -> tuple[int, ...]:
    """Comma list of ints; items may be '2^k', and '2^a..2^b' expands powers of two."""
    values: list[int] = []
    for item in text.split(","):
        item = item.strip()
        if ".." in item:
            lo, hi = item.split("..", 1)
            lo, hi = _parse_int(lo), _parse_int(hi)
            k = lo
            while k <= hi:
                values.append(k)
                k *= 2
        else:
            values.append(_parse_int(item))
    return tuple(values)


def _parse_int(item: str) -> int:
    item = item.strip()
    if "^" in item:
        base, exp = item.split("^", 1)
        return int(base) ** int(exp)
    return int(item)


def _parse_float_list(text: str) -> tuple[float, ...]:
    """Comma list of floats; 'a..b:step' expands an inclusive range."""
    values: list[float] = []
    for item in text.split(","):
        item = item.strip()
        if ".." in item:
            span, _, step = item.partition(":")
            lo, hi = (float(v) for v in span.split("..", 1))
            step = float(step) if step else 1.0
            n = int(round((hi - lo) / step))
            values.extend(lo + i * step for i in range(n + 1))
        else:
            values.append(float(item))
    return tuple(values)


@click.group()
def main():
    """Particle filter resampling toolkit."""


@main.group()
def bench():
    """Resampler benchmark harness."""


@bench.command("run")
@click.option("--algorithms", default=",".join(ALGORITHMS), show_default=True,
              help="Comma-separated subset of: " + ", ".join(ALGORITHMS))
@click.option("--n", "n_values", default="2^4..2^20", show_default=True,
              help="Particle counts: comma list of ints/2^k, or '2^a..2^b' powers of two.")
@click.option("--y", "y_values", default="0..4:0.5", show_default=True,
              help="Observations: comma list of floats, or 'a..b:step'.")
@click.option("--reps", default=500, show_default=True, help="Replicates per cell.")
@click.option("--precision", type=click.Choice(["f32", "f64"]), default="f64", show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--out", required=True, type=click.Path(dir_okay=False, writable=True))
@click.option("--workers", default=1, show_default=True, help="Concurrent grid cells.")
@click.option("--epsilon-scale", default=1e-2, show_default=True,
              help="Metropolis bias tolerance as a fraction of p*.")
@click.option("--context-timings", is_flag=True,
              help="Also time the collective sort and ESS procedures for scale.")
def bench_run(algorithms, n_values, y_values, reps, precision, seed, out, workers,
              epsilon_scale, context_timings):
    """Run the measurement grid and write one CSV record per cell."""
    config = bench_mod.BenchConfig(
        algorithms=tuple(a.strip() for a in algorithms.split(",") if a.strip()),
        n_values=_parse_int_list(n_values),
        y_values=_parse_float_list(y_values),
        replicates=reps,
        precision=precision,
        seed=seed,
        epsilon_scale=epsilon_scale,
        workers=workers,
        context_timings=context_timings,
    )
    records, errors = bench_mod.run_grid(config)
    bench_mod.write_records_csv(records, out)
    click.echo(f"wrote {len(records)} records to {out}" + (f" ({errors} errored)" if errors else ""))
    if errors:
        sys.exit(1)


@bench.command("aggregate")
@click.option("--in", "in_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", required=True, type=click.Path(dir_okay=False, writable=True))
def bench_aggregate(in_path, out):
    """Aggregate a record CSV into a per-(algorithm, N, y) RMSE table."""
    records = bench_mod.read_records_csv(in_path)
    rows = bench_mod.aggregate_rmse(records)
    bench_mod.write_rmse_csv(rows, out)
    click.echo(f"wrote {len(rows)} aggregate rows to {out}")


@main.group()
def pf():
    """Bootstrap particle filter demo."""


@pf.command("demo")
@click.option("--resampler", type=click.Choice(ALGORITHMS), default="systematic", show_default=True)
@click.option("--n", default=1000, show_default=True, help="Number of particles.")
@click.option("--steps", default=50, show_default=True, help="Number of time steps.")
@click.option("--seed", default=0, show_default=True)
@click.option("--out", required=True, type=click.Path(dir_okay=False, writable=True))
@click.option("--ess-threshold", default=0.5, show_default=True)
def pf_demo(resampler, n, steps, seed, out, ess_threshold):
    """Filter a synthetic observation sequence and compare with the exact filter.

    Uses the reference model x_t = noise, y_t = x_t + noise (all unit
    variances, standard normal prior) and writes per-step results next to
    the closed-form Gaussian filter oracle.
    """
    import csv

    from .rng import derive_seed

    model = pf_mod.LinearGaussianModel()
    observations = pf_mod.simulate_observations(model, steps, derive_seed(seed, 0xDA7A))
    config = _demo_resampler_config(resampler, model)
    result = pf_mod.pf_run(model, observations, n, config, ess_threshold, seed)
    oracle = pf_mod.exact_filter(model, observations)

    with open(out, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("time", "filtered_mean", "ess", "resampled", "oracle_mean"))
        for t in range(steps):
            writer.writerow([
                t + 1,
                repr(float(result.filtered_means[t])),
                repr(float(result.ess[t])),
                int(result.resampled[t]),
                repr(float(oracle.means[t])),
            ])
    click.echo(
        f"wrote {steps} steps to {out} "
        f"(log-likelihood {result.log_likelihood:.4f}, exact {oracle.log_likelihood:.4f})"
    )


def _demo_resampler_config(name: str, model: pf_mod.LinearGaussianModel) -> ResamplerConfig:
    sup = float(1.0 / (model.obs_std * np.sqrt(2.0 * np.pi)))
    if name == "rejection":
        return ResamplerConfig(algorithm=name, sup_w=sup)
    if name == "rejection-capped":
        return ResamplerConfig(algorithm=name, sup_v=0.5 * sup)
    return ResamplerConfig(algorithm=name)


if __name__ == "__main__":
    main()
