"""Importance scores by peeling k-center coresets.

Round i extracts a k-center coreset of the remaining points, gives each
extracted point the score c_sigma * alpha^z / i, removes them, and
repeats until nothing is left; alpha is the k-center coreset quality
factor of the dynamic structure.  Every point is inserted and deleted
exactly once, so the update budget is q = 2n.

Points covered by no family subset cannot appear in any restriction's
coreset; they are peeled from a dedicated orphan pool, k+1 per round at
the same score, with a warning (this only happens with user-overridden
tiny families).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .core import ClusteringParams, Dataset, InputError
from .dyngonz import DynKCenterCoreset, draw_family_projections, required_projections
from .engine import FastPeelStructure
from .family import CoordinateFamily, build_family
from .rng import substream


@dataclass
class SensitivityScores:
    """Per-point scores plus the constants that produced them."""

    sigma: np.ndarray
    alpha: float
    peel_rounds: int
    max_round_removal: int
    orphan_count: int = 0

    @property
    def sum_sigma(self) -> float:
        return float(self.sigma.sum())


def alpha_factor(params: ClusteringParams, d: int, n: int, c_alpha: float = 1.0) -> float:
    """k-center coreset quality factor alpha = c_alpha * k * sqrt(d ln(n+2))."""
    return c_alpha * params.k * math.sqrt(d * math.log(n + 2))


def coverage_mask(dataset: Dataset, family: CoordinateFamily) -> np.ndarray:
    covered = np.zeros(dataset.n, dtype=bool)
    for subset in family.subsets:
        idx = np.asarray(subset, dtype=np.int64)
        covered |= dataset.mask[:, idx].all(axis=1)
    return covered


def estimate_sensitivities(
    dataset: Dataset,
    params: ClusteringParams,
    family_size: int | None = None,
    seed: int = 0,
    c_sigma: float = 1.0,
    c_alpha: float = 1.0,
    c_l: float = 2.0,
    family: CoordinateFamily | None = None,
    engine: str = "auto",
) -> SensitivityScores:
    """Run the peel over a dynamic k-center structure; every point scores.

    engine="fast" uses the compiled deletion-only structure, "tree" the
    balanced-tree structure; both return identical scores under the same
    seed ("auto" picks fast when available).
    """
    n, d = dataset.n, dataset.d
    if n < 1:
        raise InputError("need at least one point")
    k, z = params.k, params.z
    if family is None:
        family = build_family(
            d, dataset.j, k, size_override=family_size, rng=substream(seed, "family")
        )
    delta = 1.0 / (4.0 * len(family))
    q_hint = 2 * n
    l = required_projections(k, q_hint, delta, c_l)
    projections = draw_family_projections(family, l, seed)

    if engine == "auto":
        engine = "fast" if FastPeelStructure.supported else "tree"
    if engine == "fast":
        structure = FastPeelStructure(dataset, family, projections, k)
    elif engine == "tree":
        structure = DynKCenterCoreset(
            d,
            dataset.j,
            k,
            q_hint=q_hint,
            family=family,
            seed=seed,
            c_l=c_l,
            delta=delta,
            projections=projections,
        )
    else:
        raise InputError(f"unknown engine {engine!r}")

    covered = coverage_mask(dataset, family)
    orphans = np.flatnonzero(~covered)
    if orphans.size:
        warnings.warn(
            f"{orphans.size} points belong to no restriction of the family;"
            " peeling them from the orphan pool",
            stacklevel=2,
        )
    if engine == "tree":
        for pid in np.flatnonzero(covered):
            structure.insert(dataset.point(int(pid)))

    alpha = alpha_factor(params, d, n, c_alpha)
    base = c_sigma * alpha**z
    sigma = np.zeros(n)
    removed = np.zeros(n, dtype=bool)
    covered_ids = np.flatnonzero(covered)
    scan = 0  # pointer for the defensive lowest-id fallback
    remaining = int(covered_ids.size)
    orphan_pos = 0
    i = 0
    max_removal = 0
    while remaining > 0 or orphan_pos < orphans.size:
        i += 1
        batch = []
        if remaining > 0:
            peeled = structure.get_coreset()
            if peeled.size == 0:
                # cannot occur when every point is covered; keep termination
                while removed[covered_ids[scan]]:
                    scan += 1
                peeled = covered_ids[scan : scan + 1]
            structure.delete_ids(peeled)
            removed[peeled] = True
            remaining -= int(peeled.size)
            batch.append(peeled)
        if orphan_pos < orphans.size:
            take = orphans[orphan_pos : orphan_pos + k + 1]
            orphan_pos += take.size
            batch.append(take)
        ids = np.concatenate(batch)
        sigma[ids] = base / i
        max_removal = max(max_removal, int(ids.size))
    return SensitivityScores(
        sigma=sigma,
        alpha=alpha,
        peel_rounds=i,
        max_round_removal=max_removal,
        orphan_count=int(orphans.size),
    )


def true_sensitivity_lower_bound(
    dataset: Dataset,
    params: ClusteringParams,
    trials: int = 1000,
    seed: int = 0,
    point: int | None = None,
):
    """Certified lower bound on the true sensitivity via random center sets.

    Each trial draws k centers, half from an inflated coordinate-wise
    bounding box and half anchored at data points (missing coordinates
    filled from the box), and takes each point's share of the trial
    cost.  The running maximum is a lower bound on the supremum over
    all center sets.  The box margin keeps the search meaningful on
    degenerate instances (a lone point must reach bound 1).  Returns
    the bound for `point`, or all n bounds when omitted.
    """
    if trials < 1:
        raise InputError("trials must be >= 1")
    values = dataset.values
    n, d = dataset.n, dataset.d
    k, z = params.k, params.z
    rng = substream(seed, "centers")
    observed = dataset.mask
    lo = np.where(observed.any(axis=0), np.nanmin(values, axis=0), 0.0)
    hi = np.where(observed.any(axis=0), np.nanmax(values, axis=0), 0.0)
    margin = 0.5 * (hi - lo) + 1.0
    lo = lo - margin
    hi = hi + margin
    best = np.zeros(n)
    from .core import nearest_sq_dists

    for _ in range(trials):
        centers = lo + rng.random((k, d)) * (hi - lo)
        anchor = rng.random(k) < 0.5
        for c_i in np.flatnonzero(anchor):
            row = values[int(rng.integers(n))]
            fill = np.isnan(row)
            centers[c_i] = np.where(fill, centers[c_i], row)
        d2, _ = nearest_sq_dists(values, centers)
        powered = d2 if z == 2.0 else d2 ** (z / 2.0)
        total = powered.sum()
        if total <= 0.0:
            continue
        np.maximum(best, powered / total, out=best)
    if point is None:
        return best
    return float(best[point])
