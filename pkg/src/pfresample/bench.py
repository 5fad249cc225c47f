"""Benchmark harness: timing and accuracy of the resamplers over a grid of
synthetic weight sets.

For every (algorithm, N, y, replicate) cell the harness generates a Gaussian
weight set, then times the resampler together with whatever conversions and
permutation are needed to deliver an ancestry vector satisfying the in-place
predicate; the permutation is applied to every algorithm's output so all
algorithms are timed to the same delivery contract. Weight generation and
the mean-square-error computation sit outside the timed region. Records are
written as CSV in a canonical order so identical configurations produce
byte-identical files (apart from the elapsed-time column) for any worker
count.
"""

from __future__ import annotations

import csv
import struct
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import ancestry as anc
from .diagnostics import (
    WeightSetSpec,
    ess,
    max_normalised_weight,
    resampling_mse,
    simulate_weight_set,
    sort_weights,
    sup_weight,
    expected_weight,
)
from .resamplers import ALGORITHMS, ResamplerConfig, metropolis_num_steps, resample_ancestors
from .rng import RngStream, derive_seed

__all__ = [
    "BenchConfig",
    "BenchRecord",
    "BenchCellError",
    "run_cell",
    "run_grid",
    "aggregate_rmse",
    "write_records_csv",
    "read_records_csv",
    "write_rmse_csv",
    "CSV_COLUMNS",
]

CSV_COLUMNS = ("algorithm", "N", "y", "replicate", "elapsed_ns", "mse", "extras")

DEFAULT_N_VALUES = tuple(2**k for k in range(4, 21))
DEFAULT_Y_VALUES = tuple(k / 2 for k in range(9))

# context-timing pseudo-algorithms (collective procedures timed for scale)
_CONTEXT_PROCEDURES = ("ess", "sort")

# id namespaces for per-cell stream derivation
_NS_WEIGHTS = 101
_NS_RESAMPLE = 102
_NS_WARMUP = 103

_ALGORITHM_IDS = {name: i for i, name in enumerate(ALGORITHMS)}
_ALGORITHM_IDS.update({name: 64 + i for i, name in enumerate(_CONTEXT_PROCEDURES)})


def _y_bits(y: float) -> int:
    """Stable integer encoding of an observation value for stream ids."""
    return struct.unpack("<Q", struct.pack("<d", float(y)))[0]


@dataclass(frozen=True)
class BenchConfig:
    """Benchmark grid: algorithms x particle counts x observations x replicates."""

    algorithms: tuple[str, ...] = ALGORITHMS
    n_values: tuple[int, ...] = DEFAULT_N_VALUES
    y_values: tuple[float, ...] = DEFAULT_Y_VALUES
    replicates: int = 500
    precision: str = "f64"
    seed: int = 0
    epsilon_scale: float = 1e-2
    workers: int = 1
    context_timings: bool = False

    def __post_init__(self):
        unknown = [a for a in self.algorithms if a not in _ALGORITHM_IDS or a in _CONTEXT_PROCEDURES]
        if unknown:
            raise ValueError(f"unknown algorithms {unknown}; choose from {ALGORITHMS}")
        if self.replicates < 1:
            raise ValueError("need at least one replicate")
        if any(n < 2 for n in self.n_values):
            raise ValueError("all particle counts must be at least 2")
        if self.precision not in ("f32", "f64"):
            raise ValueError("precision must be 'f32' or 'f64'")
        if self.workers < 1:
            raise ValueError("need at least one worker")

    @property
    def dtype(self):
        return np.float32 if self.precision == "f32" else np.float64

    def cells(self):
        algorithms = tuple(self.algorithms)
        if self.context_timings:
            algorithms = algorithms + _CONTEXT_PROCEDURES
        for alg in algorithms:
            for n in self.n_values:
                for y in self.y_values:
                    for rep in range(self.replicates):
                        yield alg, int(n), float(y), rep


@dataclass(frozen=True)
class BenchRecord:
    """One measurement cell."""

    algorithm: str
    n: int
    y: float
    replicate: int
    elapsed_ns: int
    mse: float | None
    extras: dict = field(default_factory=dict)

    def sort_key(self):
        return (self.algorithm, self.n, self.y, self.replicate)


class BenchCellError(RuntimeError):
    """A resampler failure, tagged with the cell that produced it."""

    def __init__(self, algorithm, n, y, replicate, cause):
        super().__init__(f"cell ({algorithm}, N={n}, y={y}, rep={replicate}) failed: {cause}")
        self.cell = (algorithm, n, y, replicate)
        self.cause = cause


def _cell_config(algorithm: str, n: int, y: float, epsilon_scale: float) -> ResamplerConfig:
    if algorithm == "metropolis":
        p_star = max_normalised_weight(y, n)
        b = metropolis_num_steps(p_star, p_star * epsilon_scale, n)
        return ResamplerConfig(algorithm="metropolis", b=b)
    if algorithm == "rejection":
        return ResamplerConfig(algorithm="rejection", sup_w=float(sup_weight()))
    if algorithm == "rejection-capped":
        # cap at the analytic mean weight: keeps the proposal flat over the
        # bulk while importance weights absorb the capped tail
        return ResamplerConfig(algorithm="rejection-capped", sup_v=expected_weight(y))
    return ResamplerConfig(algorithm=algorithm)


def _timed_delivery(w, config: ResamplerConfig, rng: RngStream):
    """Resample and permute to in-place-safe ancestry, timing the whole path."""
    start = time.perf_counter_ns()
    out = resample_ancestors(w, config, rng)
    c = anc.permute_parallel(out.ancestors)
    elapsed = time.perf_counter_ns() - start
    return c, elapsed, out.extras


def _timed_context(procedure: str, w):
    start = time.perf_counter_ns()
    if procedure == "ess":
        ess(w)
    else:
        sort_weights(w)
    return time.perf_counter_ns() - start


def run_cell(algorithm: str, n: int, y: float, replicate: int, precision: str = "f64",
             seed: int = 0, epsilon_scale: float = 1e-2) -> BenchRecord:
    """Measure one grid cell.

    The timed region spans the resampler call, any offspring-to-ancestry
    conversion, and the permutation that establishes the in-place
    predicate; weight generation, configuration (including the Metropolis
    B computation), and the error metric are excluded. One warm-up
    execution with a dedicated random substream runs first and is
    discarded.
    """
    dtype = np.float32 if precision == "f32" else np.float64
    yb = _y_bits(y)
    alg_id = _ALGORITHM_IDS[algorithm]
    weight_seed = derive_seed(seed, _NS_WEIGHTS, n, yb, replicate)
    w = simulate_weight_set(WeightSetSpec(n, y, weight_seed), dtype=dtype)

    if algorithm in _CONTEXT_PROCEDURES:
        _timed_context(algorithm, w)  # warm-up
        elapsed = _timed_context(algorithm, w)
        return BenchRecord(algorithm, n, y, replicate, elapsed, 0.0, {})

    config = _cell_config(algorithm, n, y, epsilon_scale)
    cell_stream = RngStream(seed, (_NS_RESAMPLE, alg_id, n, yb, replicate))
    try:
        _timed_delivery(w, config, RngStream(seed, (_NS_WARMUP, alg_id, n, yb, replicate)))
        c, elapsed, extras = _timed_delivery(w, config, cell_stream)
    except Exception as exc:
        raise BenchCellError(algorithm, n, y, replicate, exc) from exc
    if __debug__ and not anc.satisfies_inplace_predicate(c):
        raise BenchCellError(algorithm, n, y, replicate, "delivered ancestry violates the in-place predicate")
    o = anc.ancestors_to_offspring(c)
    return BenchRecord(algorithm, n, y, replicate, elapsed, resampling_mse(o, w), extras)


def run_grid(config: BenchConfig):
    """Run every cell of the grid, possibly concurrently, in canonical order.

    Returns ``(records, error_count)``. A failing cell becomes an error
    marker record (empty mse, the message under the ``error`` extras key)
    and the remaining cells proceed. Record order is sorted by (algorithm,
    N, y, replicate) regardless of scheduling, and all record content
    except elapsed_ns is a pure function of the configuration and seed.
    """
    cells = list(config.cells())

    def one(cell):
        alg, n, y, rep = cell
        try:
            return run_cell(alg, n, y, rep, config.precision, config.seed, config.epsilon_scale)
        except BenchCellError as exc:
            return BenchRecord(alg, n, y, rep, 0, None, {"error": str(exc.cause)})

    if config.workers == 1:
        records = [one(cell) for cell in cells]
    else:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            records = list(pool.map(one, cells))
    records.sort(key=BenchRecord.sort_key)
    errors = sum(1 for r in records if r.mse is None)
    return records, errors


def aggregate_rmse(records) -> list[tuple[str, int, float, int, float]]:
    """Root-mean-square error per (algorithm, N, y) group.

    rmse = sqrt(mean of per-replicate mse). Error marker records are
    excluded; a group consisting solely of error records is rejected.
    Returns rows (algorithm, N, y, replicates, rmse) in canonical order.
    """
    groups: dict[tuple, list[float]] = {}
    seen: dict[tuple, int] = {}
    for r in records:
        key = (r.algorithm, r.n, r.y)
        seen[key] = seen.get(key, 0) + 1
        if r.mse is not None:
            groups.setdefault(key, []).append(r.mse)
    rows = []
    for key in sorted(seen):
        if key not in groups:
            raise ValueError(f"group {key} has no successful replicates")
        vals = groups[key]
        rows.append((*key, len(vals), float(np.sqrt(np.mean(vals)))))
    return rows


def _format_extras(extras: dict) -> str:
    parts = []
    for k, v in sorted(extras.items()):
        if isinstance(v, float):
            parts.append(f"{k}={v!r}")
        else:
            parts.append(f"{k}={v}")
    return ";".join(parts)


def write_records_csv(records, path) -> None:
    """Write measurement records as UTF-8 CSV with LF line endings.

    Floats use repr so values round-trip exactly.
    """
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for r in records:
            writer.writerow([
                r.algorithm,
                r.n,
                repr(r.y),
                r.replicate,
                r.elapsed_ns,
                "" if r.mse is None else repr(r.mse),
                _format_extras(r.extras),
            ])


def read_records_csv(path) -> list[BenchRecord]:
    """Read records written by :func:`write_records_csv`."""
    records = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != CSV_COLUMNS:
            raise ValueError(f"unexpected CSV header {header}; expected {list(CSV_COLUMNS)}")
        for row in reader:
            alg, n, y, rep, elapsed, mse, extras_str = row
            extras = {}
            if extras_str:
                for item in extras_str.split(";"):
                    k, _, v = item.partition("=")
                    extras[k] = v
            records.append(
                BenchRecord(alg, int(n), float(y), int(rep), int(elapsed),
                            None if mse == "" else float(mse), extras)
            )
    return records


def write_rmse_csv(rows, path) -> None:
    """Write the aggregated RMSE table as CSV."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("algorithm", "N", "y", "replicates", "rmse"))
        for alg, n, y, count, rmse in rows:
            writer.writerow([alg, n, repr(y), count, repr(rmse)])
