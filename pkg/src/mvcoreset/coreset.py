"""Coreset constructions: importance sampling plus the two baselines.

The main construction samples N points i.i.d. with probability
proportional to their importance scores and weights each draw by
1/(p*N), which keeps every fixed center set's cost unbiased.  The
uniform baseline ignores scores; the imputation baseline fills missing
entries with random values first and scores the completed data, but the
returned coreset always references the original points.
"""

from __future__ import annotations

import logging
import math
import warnings

import numpy as np

from .core import ClusteringParams, Dataset, InputError, WeightedCoreset
from .rng import substream
from .sensitivity import SensitivityScores, estimate_sensitivities

logger = logging.getLogger(__name__)


def theoretical_sample_count(params: ClusteringParams, d: int, sum_sigma: float) -> int:
    """Reference-only sample count eps^-2 * k * z^z * dim * sum(sigma).

    Logged for comparison; the actual coreset size is always the
    caller's `n_samples`.
    """
    return math.ceil(
        params.epsilon**-2 * params.k * params.z**params.z * d * sum_sigma
    )


def _sample(sigma: np.ndarray, n_samples: int, rng: np.random.Generator):
    p = sigma / sigma.sum()
    draws = rng.choice(sigma.shape[0], size=n_samples, replace=True, p=p)
    weights = 1.0 / (p[draws] * n_samples)
    return draws.astype(np.int64), weights


def build_coreset(
    dataset: Dataset,
    params: ClusteringParams,
    n_samples: int,
    family_size: int | None = None,
    seed: int = 0,
    merge_duplicates: bool = True,
    scores: SensitivityScores | None = None,
    c_sigma: float = 1.0,
    c_alpha: float = 1.0,
    c_l: float = 2.0,
    engine: str = "auto",
) -> WeightedCoreset:
    """Importance-sampling coreset of `n_samples` draws (with replacement).

    `scores` short-circuits the sensitivity estimation when the caller
    already holds scores for this dataset (they do not depend on the
    sample count).
    """
    if n_samples < 1:
        raise InputError(f"n_samples must be >= 1, got {n_samples}")
    if scores is None:
        scores = estimate_sensitivities(
            dataset,
            params,
            family_size=family_size,
            seed=seed,
            c_sigma=c_sigma,
            c_alpha=c_alpha,
            c_l=c_l,
            engine=engine,
        )
    logger.info(
        "sum_sigma=%.4g; reference sample count for eps=%.3g would be %d (using %d)",
        scores.sum_sigma,
        params.epsilon,
        theoretical_sample_count(params, dataset.d, scores.sum_sigma),
        n_samples,
    )
    ids, weights = _sample(scores.sigma, n_samples, substream(seed, "sampling"))
    out = WeightedCoreset(ids, weights, dataset)
    return out.merged() if merge_duplicates else out


def uniform_coreset(
    dataset: Dataset,
    n_samples: int,
    seed: int = 0,
    merge_duplicates: bool = True,
) -> WeightedCoreset:
    """N uniform draws with replacement, each of weight n/N."""
    if n_samples < 1:
        raise InputError(f"n_samples must be >= 1, got {n_samples}")
    rng = substream(seed, "sampling")
    ids = rng.integers(dataset.n, size=n_samples).astype(np.int64)
    weights = np.full(n_samples, dataset.n / n_samples)
    out = WeightedCoreset(ids, weights, dataset)
    return out.merged() if merge_duplicates else out


def impute_dataset(dataset: Dataset, seed: int = 0) -> Dataset:
    """Fill each missing entry uniformly within its column's observed range.

    A column with no observed value is filled with 0 (with a warning);
    a constant column is filled with that constant.
    """
    values = dataset.values.copy()
    rng = substream(seed, "impute")
    observed = dataset.mask
    for col in range(dataset.d):
        missing = ~observed[:, col]
        if not missing.any():
            continue
        col_obs = values[observed[:, col], col]
        if col_obs.size == 0:
            warnings.warn(f"column {col} has no observed values; imputing 0", stacklevel=2)
            lo = hi = 0.0
        else:
            lo, hi = float(col_obs.min()), float(col_obs.max())
        values[missing, col] = lo + rng.random(int(missing.sum())) * (hi - lo)
    return Dataset(values)


def imputation_coreset(
    dataset: Dataset,
    params: ClusteringParams,
    n_samples: int,
    family_size: int | None = None,
    seed: int = 0,
    merge_duplicates: bool = True,
    engine: str = "auto",
) -> WeightedCoreset:
    """Baseline: impute, run the standard construction, keep original ids.

    Imputed values are used only for scoring and sampling; the returned
    coreset references the original (missing-valued) points.
    """
    completed = impute_dataset(dataset, seed=seed)
    sampled = build_coreset(
        completed,
        params,
        n_samples,
        family_size=family_size,
        seed=seed,
        merge_duplicates=merge_duplicates,
        engine=engine,
    )
    return WeightedCoreset(sampled.ids, sampled.weights, dataset)
