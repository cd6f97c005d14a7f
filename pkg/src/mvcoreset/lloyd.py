"""Lloyd's heuristic for k-means adapted to missing values.

Assignment uses the missing-aware distance; the update step takes, per
cluster and per coordinate, the weighted mean over the members that
have that coordinate (the exact 1-mean of the cluster under this
distance).  A coordinate no member has keeps the center's previous
value, so centers always stay fully specified.

Initialization and the empty-cluster rule are our own choices (the
k-means++ seeding rule is not even well defined here because the
distance has no triangle inequality): initial centers are k distinct
points drawn by seed, completed with column means of observed values;
an empty cluster is re-seeded at the point furthest from its assigned
center, completed from the previous center.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Dataset, InputError, WeightedCoreset, nearest_sq_dists
from .rng import substream


@dataclass
class LloydResult:
    centers: np.ndarray
    labels: np.ndarray
    cost: float
    iterations: int
    converged: bool
    history: list[float]  # objective after each assignment step


def _data_arrays(data):
    if isinstance(data, Dataset):
        return data.values, np.ones(data.n)
    if isinstance(data, WeightedCoreset):
        return data.points, data.weights
    raise InputError(f"expected Dataset or WeightedCoreset, got {type(data).__name__}")


def _column_means(values: np.ndarray) -> np.ndarray:
    observed = ~np.isnan(values)
    with np.errstate(invalid="ignore"):
        means = np.where(observed.any(axis=0), np.nanmean(values, axis=0), 0.0)
    return means


def _initial_centers(values, k, init, seed):
    n = values.shape[0]
    if init is not None:
        init = np.asarray(init)
        if init.ndim == 2:
            # explicit complete centers
            if init.shape != (k, values.shape[1]) or np.any(np.isnan(init)):
                raise InputError(f"init centers must be a complete (k={k}, d) array")
            return init.astype(np.float64).copy()
        ids = init.astype(np.int64)
        if ids.shape != (k,):
            raise InputError(f"init must list exactly k={k} point ids")
    else:
        if k > n:
            raise InputError(f"k={k} exceeds the number of points n={n}")
        rng = substream(seed, "lloyd")
        ids = np.sort(rng.choice(n, size=k, replace=False))
    centers = values[ids].copy()
    fill = _column_means(values)
    nanmask = np.isnan(centers)
    centers[nanmask] = np.broadcast_to(fill, centers.shape)[nanmask]
    return centers


def draw_init_centers(data, k: int, seed: int = 0) -> np.ndarray:
    """k distinct points drawn by seed, completed with column means.

    Useful to start several Lloyd runs (e.g. full data vs coreset) from
    the same complete centers.
    """
    values, _ = _data_arrays(data)
    return _initial_centers(values, k, None, seed)


def lloyd(
    data,
    k: int,
    iters: int = 100,
    init=None,
    tol: float = 1e-7,
    seed: int = 0,
) -> LloydResult:
    """Alternate assignment and per-coordinate weighted means.

    Stops after `iters` update rounds or when one round improves the
    objective by less than tol*cost.  The objective is nonincreasing
    across iterations.
    """
    if k < 1:
        raise InputError(f"k must be >= 1, got {k}")
    if iters < 1:
        raise InputError(f"iters must be >= 1, got {iters}")
    values, weights = _data_arrays(data)
    centers = _initial_centers(values, k, init, seed)
    observed = (~np.isnan(values)).astype(np.float64)
    filled = np.nan_to_num(values)
    w_col = weights[:, None]

    prev_cost = np.inf
    converged = False
    iterations = 0
    history = []
    for _ in range(iters):
        d2, labels = nearest_sq_dists(values, centers)
        cost_now = float(np.sum(weights * d2))
        history.append(cost_now)
        if prev_cost - cost_now < tol * prev_cost:
            converged = True
            break
        iterations += 1
        # re-seed empty clusters at the point furthest from its center
        present = np.bincount(labels, minlength=k) > 0
        if not present.all():
            d2_repair = d2.copy()
            for c in np.flatnonzero(~present):
                far = int(np.argmax(d2_repair))
                row = values[far]
                centers[c] = np.where(np.isnan(row), centers[c], row)
                d2_repair[far] = -1.0
                labels[far] = c
        for c in range(k):
            sel = labels == c
            den = (observed[sel] * w_col[sel]).sum(axis=0)
            num = (filled[sel] * w_col[sel]).sum(axis=0)
            with np.errstate(invalid="ignore"):
                centers[c] = np.where(den > 0, num / den, centers[c])
        prev_cost = cost_now
    d2, labels = nearest_sq_dists(values, centers)
    cost_now = float(np.sum(weights * d2))
    history.append(cost_now)
    return LloydResult(
        centers=centers,
        labels=labels,
        cost=cost_now,
        iterations=iterations,
        converged=converged,
        history=history,
    )
