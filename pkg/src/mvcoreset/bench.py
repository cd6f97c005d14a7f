"""Experiment harness: instance generators, empirical error, sweeps.

The synthetic recipe puts most points in a unit box and a small far
cluster at >= 10 box side-lengths, then deletes each attribute
independently (re-rolling rows that would lose every coordinate).  The
hard-instance generator enumerates all j-missing indicator points whose
coresets provably need every point; its adversarial centers certify
empirical error 1 for any coreset that skips a point.

All trial randomness derives from the master seed through per-trial
substreams, so sweep outputs are reproducible bit-for-bit regardless of
the worker count.
"""

from __future__ import annotations

import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .core import ClusteringParams, Dataset, InputError, WeightedCoreset, cost
from .coreset import build_coreset, imputation_coreset, uniform_coreset
from .lloyd import draw_init_centers, lloyd
from .rng import substream
from .sensitivity import estimate_sensitivities


def gen_synthetic(
    n: int,
    frac_far: float = 0.03,
    delete_frac: float = 0.25,
    seed: int = 0,
) -> Dataset:
    """n points in R^3: (1-frac_far) uniform in [0,1]^3, the rest far away.

    Far points scatter in random directions at 10 to 12 box side-lengths
    from the box center, so no single center can cover them all.
    """
    if n < 1:
        raise InputError(f"n must be >= 1, got {n}")
    rng = substream(seed, "synthetic")
    n_far = int(round(frac_far * n))
    n_near = n - n_far
    near = rng.random((n_near, 3))
    dirs = rng.normal(size=(n_far, 3))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    radii = 10.0 + 2.0 * rng.random((n_far, 1))
    far = 0.5 + dirs * radii
    values = np.vstack([near, far])
    if delete_frac > 0:
        drop = rng.random((n, 3)) < delete_frac
        # re-roll rows that would become fully missing
        while True:
            full = np.flatnonzero(drop.all(axis=1))
            if full.size == 0:
                break
            drop[full] = rng.random((full.size, 3)) < delete_frac
        values[drop] = np.nan
    return Dataset(values)


def gen_lower_bound(j: int) -> Dataset:
    """All C(2j, j) indicator points with exactly j available coordinates.

    Coordinate i of point p(I) is 1 when i is in I and missing otherwise;
    with k=j adversarial centers any strict subset has cost 0 while the
    full set has cost 1.
    """
    if j < 1:
        raise InputError(f"j must be >= 1, got {j}")
    d = 2 * j
    rows = []
    for subset in combinations(range(d), j):
        row = np.full(d, np.nan)
        row[list(subset)] = 1.0
        rows.append(row)
    return Dataset(np.array(rows))


def adversarial_centers(dataset: Dataset, pid: int) -> np.ndarray:
    """The center set that isolates point `pid` of a lower-bound instance.

    One center per available coordinate i of the point: zero at i, one
    elsewhere.  The point is at distance 1 from every center; any other
    point of the instance touches some center exactly.
    """
    avail = np.flatnonzero(dataset.mask[pid])
    d = dataset.d
    centers = np.ones((avail.size, d))
    for row, i in enumerate(avail):
        centers[row, i] = 0.0
    return centers


def random_centers(dataset: Dataset, k: int, count: int, seed: int = 0) -> list[np.ndarray]:
    """`count` center sets, uniform over the observed coordinate-wise box."""
    rng = substream(seed, "centers")
    observed = dataset.mask
    lo = np.where(observed.any(axis=0), np.nanmin(dataset.values, axis=0), 0.0)
    hi = np.where(observed.any(axis=0), np.nanmax(dataset.values, axis=0), 0.0)
    return [lo + rng.random((k, dataset.d)) * (hi - lo) for _ in range(count)]


def empirical_error(
    dataset: Dataset,
    coreset: WeightedCoreset,
    center_sets,
    z: float = 2.0,
    full_costs=None,
) -> float:
    """Max relative cost deviation of the coreset over the center sets.

    Center sets with zero full-data cost are rejected with a warning.
    `full_costs` may carry precomputed cost(X, C) values in the same order.
    """
    if full_costs is None:
        full_costs = [cost(dataset, c, z) for c in center_sets]
    worst = -1.0
    for c, full in zip(center_sets, full_costs):
        if full <= 0.0:
            warnings.warn("center set with zero dataset cost rejected", stacklevel=2)
            continue
        worst = max(worst, abs(cost(coreset, c, z) - full) / full)
    if worst < 0.0:
        raise InputError("no usable center sets (all have zero cost)")
    return worst


@dataclass
class ExperimentConfig:
    k: int = 3
    z: float = 2.0
    sizes: tuple[int, ...] = (200, 700, 1200, 2000)
    trials: int = 10
    n_center_sets: int = 100
    family_size: int | None = 20
    c_l: float = 2.0
    seed: int = 0
    methods: tuple[str, ...] = ("ours", "uniform", "imputation")
    lloyd_iters: int = 500
    lloyd_tol: float = 0.0  # fixed iteration count, as in the speedup protocol
    threads: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise InputError("trials must be >= 1")
        if any(b <= a for a, b in zip(self.sizes, self.sizes[1:])):
            raise InputError("sizes must be strictly increasing")

    def params(self) -> ClusteringParams:
        return ClusteringParams(k=self.k, z=self.z)


def trial_seed(master_seed: int, trial: int) -> int:
    """Independent integer seed for one trial, derived from the master."""
    return int(substream(master_seed, "trials", trial).integers(2**62))


def _size_error_trial(args):
    dataset, cfg, t = args
    seed = trial_seed(cfg.seed, t)
    params = cfg.params()
    centers = random_centers(dataset, cfg.k, cfg.n_center_sets, seed=seed)
    full_costs = [cost(dataset, c, cfg.z) for c in centers]
    rows = []
    scores = None
    for method in cfg.methods:
        if method == "ours":
            # scores do not depend on the sample count; reuse across sizes
            scores = estimate_sensitivities(
                dataset, params, family_size=cfg.family_size, seed=seed, c_l=cfg.c_l
            )
        for size in cfg.sizes:
            if method == "ours":
                cs = build_coreset(dataset, params, size, seed=seed, scores=scores)
            elif method == "uniform":
                cs = uniform_coreset(dataset, size, seed=seed)
            elif method == "imputation":
                cs = imputation_coreset(
                    dataset, params, size, family_size=cfg.family_size, seed=seed
                )
            else:
                raise InputError(f"unknown method {method!r}")
            err = empirical_error(dataset, cs, centers, cfg.z, full_costs=full_costs)
            rows.append(
                {"method": method, "size": size, "trial": t, "error": err}
            )
    return rows


def _run_trials(fn, items, threads: int):
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))
    return [fn(item) for item in items]


@dataclass
class SweepResult:
    rows: list[dict] = field(default_factory=list)
    summary: list[dict] = field(default_factory=list)


def _summarize(rows, keys, value_fields):
    groups: dict[tuple, list[dict]] = {}
    for row in rows:
        groups.setdefault(tuple(row[k] for k in keys), []).append(row)
    out = []
    for group_key in sorted(groups):
        bucket = groups[group_key]
        entry = dict(zip(keys, group_key))
        entry["n"] = len(bucket)
        for fld in value_fields:
            vals = np.array([r[fld] for r in bucket])
            entry[f"mean_{fld}"] = float(vals.mean())
            entry[f"std_{fld}"] = float(vals.std(ddof=1)) if vals.size > 1 else 0.0
        out.append(entry)
    return out


def run_size_error_sweep(dataset: Dataset, cfg: ExperimentConfig) -> SweepResult:
    """Empirical error per (method, size, trial), plus mean/std aggregates."""
    trial_rows = _run_trials(
        _size_error_trial, [(dataset, cfg, t) for t in range(cfg.trials)], cfg.threads
    )
    rows = [row for per_trial in trial_rows for row in per_trial]
    return SweepResult(rows, _summarize(rows, ("method", "size"), ("error",)))


def run_lloyd_speedup(dataset: Dataset, cfg: ExperimentConfig, sizes=None) -> SweepResult:
    """Reference Lloyd on the full data vs Lloyd on coresets.

    Construction time (family, sensitivity estimation, sampling) counts
    toward the treatment; I/O does not.  Both runs start from the same
    initial centers so the comparison isolates coreset fidelity from
    initialization luck; relative objective error compares full-data
    cost of the found centers against the reference run's.  Runs
    sequentially regardless of cfg.threads so the timings stay honest.
    """
    sizes = tuple(sizes) if sizes is not None else cfg.sizes
    params = cfg.params()
    rows = []
    for t in range(cfg.trials):
        seed = trial_seed(cfg.seed, t)
        init = draw_init_centers(dataset, cfg.k, seed=seed)
        t0 = time.perf_counter()
        ref = lloyd(
            dataset, cfg.k, iters=cfg.lloyd_iters, tol=cfg.lloyd_tol, init=init
        )
        t_ref = time.perf_counter() - t0
        for method in ("ours", "uniform"):
            for size in sizes:
                t0 = time.perf_counter()
                if method == "ours":
                    cs = build_coreset(
                        dataset,
                        params,
                        size,
                        family_size=cfg.family_size,
                        seed=seed,
                        c_l=cfg.c_l,
                    )
                else:
                    cs = uniform_coreset(dataset, size, seed=seed)
                t_build = time.perf_counter() - t0
                t0 = time.perf_counter()
                run = lloyd(cs, cfg.k, iters=cfg.lloyd_iters, tol=cfg.lloyd_tol, init=init)
                t_lloyd = time.perf_counter() - t0
                objective = cost(dataset, run.centers, cfg.z)
                rows.append(
                    {
                        "method": method,
                        "size": size,
                        "trial": t,
                        "rel_error": abs(objective - ref.cost) / ref.cost,
                        "objective": objective,
                        "reference_objective": ref.cost,
                        "t_build": t_build,
                        "t_lloyd": t_lloyd,
                        "t_reference": t_ref,
                        "speedup": t_ref / (t_build + t_lloyd),
                    }
                )
    summary = _summarize(
        rows, ("method", "size"), ("rel_error", "t_build", "t_lloyd", "speedup")
    )
    return SweepResult(rows, summary)
