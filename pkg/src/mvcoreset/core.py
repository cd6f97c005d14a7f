"""Domain types and missing-aware geometry.

Points live in R^d with some coordinates unknown.  Internally a missing
coordinate is NaN (a non-numeric sentinel, never a magic real value);
all distances are evaluated on the available coordinates only.  Note
that this distance does NOT satisfy the triangle inequality across
points with different availability patterns, so nothing here (or in the
tests) may rely on it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class InputError(ValueError):
    """Malformed caller input: bad dimensions, bad cells, bad parameters."""


def _as_row(x) -> np.ndarray:
    a = np.asarray(x, dtype=np.float64)
    if a.ndim != 1:
        raise InputError(f"expected a 1-d point, got shape {a.shape}")
    return a


@dataclass(frozen=True)
class MissingPoint:
    """A point in R^d whose missing coordinates are NaN.

    `pid` is the stable index of the point in its parent dataset.
    """

    coords: np.ndarray
    pid: int = 0

    def __post_init__(self):
        coords = _as_row(self.coords)
        object.__setattr__(self, "coords", coords)
        if not np.any(~np.isnan(coords)):
            raise InputError(f"point {self.pid}: all coordinates missing")

    @property
    def d(self) -> int:
        return self.coords.shape[0]

    @property
    def available(self) -> np.ndarray:
        """Boolean mask of non-missing coordinates."""
        return ~np.isnan(self.coords)

    @property
    def available_indices(self) -> tuple[int, ...]:
        return tuple(int(i) for i in np.flatnonzero(self.available))

    @property
    def n_missing(self) -> int:
        return int(np.isnan(self.coords).sum())


class Dataset:
    """An indexed set of points with missing values.

    `values` is an (n, d) float64 array with NaN at missing entries.
    `j` is the maximum number of missing coordinates over all points,
    always computed from the data rather than trusted from the caller.
    """

    def __init__(self, values: np.ndarray):
        values = np.asarray(values, dtype=np.float64)
        if values.ndim != 2:
            raise InputError(f"expected an (n, d) array, got shape {values.shape}")
        missing = np.isnan(values)
        fully_missing = np.flatnonzero(missing.all(axis=1))
        if fully_missing.size:
            raise InputError(
                f"row {int(fully_missing[0])}: all coordinates missing"
            )
        self.values = values
        self.mask = ~missing

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def d(self) -> int:
        return self.values.shape[1]

    @property
    def j(self) -> int:
        """Max missing coordinates per point, computed from the data."""
        return int((~self.mask).sum(axis=1).max(initial=0))

    def point(self, pid: int) -> MissingPoint:
        return MissingPoint(self.values[pid], pid)

    def __len__(self) -> int:
        return self.n

    def __iter__(self):
        for i in range(self.n):
            yield self.point(i)


class CenterSet:
    """k fully-specified centers in R^d; missing values are rejected."""

    def __init__(self, centers: np.ndarray):
        centers = np.asarray(centers, dtype=np.float64)
        if centers.ndim == 1:
            centers = centers[None, :]
        if centers.ndim != 2 or centers.shape[0] == 0:
            raise InputError(f"expected a nonempty (k, d) array, got shape {centers.shape}")
        if not np.all(np.isfinite(centers)):
            raise InputError("centers must be fully specified (no missing/non-finite values)")
        self.centers = centers

    @property
    def k(self) -> int:
        return self.centers.shape[0]

    @property
    def d(self) -> int:
        return self.centers.shape[1]


@dataclass(frozen=True)
class ClusteringParams:
    """(k, z)-clustering parameters; z=1 is k-median, z=2 is k-means.

    `epsilon` is informational only: the actual coreset size is chosen
    by the caller, epsilon merely feeds the logged reference sample count.
    """

    k: int
    z: float = 2.0
    epsilon: float = 0.25

    def __post_init__(self):
        if self.k < 1:
            raise InputError(f"k must be >= 1, got {self.k}")
        if self.z < 1:
            raise InputError(f"z must be >= 1, got {self.z}")
        if not (0.0 < self.epsilon < 0.5):
            raise InputError(f"epsilon must be in (0, 1/2), got {self.epsilon}")


@dataclass
class WeightedCoreset:
    """A weighted subset of dataset points, the pipeline's output.

    Ids may repeat (multiset sampling) unless merged; weights are
    strictly positive.
    """

    ids: np.ndarray
    weights: np.ndarray
    source: Dataset = field(repr=False)

    def __post_init__(self):
        self.ids = np.asarray(self.ids, dtype=np.int64)
        self.weights = np.asarray(self.weights, dtype=np.float64)
        if self.ids.shape != self.weights.shape or self.ids.ndim != 1:
            raise InputError("ids and weights must be 1-d arrays of equal length")
        if np.any(self.weights <= 0):
            raise InputError("all coreset weights must be strictly positive")
        if self.ids.size and (self.ids.min() < 0 or self.ids.max() >= self.source.n):
            raise InputError("coreset ids must index into the source dataset")

    @property
    def size(self) -> int:
        return self.ids.shape[0]

    @property
    def points(self) -> np.ndarray:
        """Coordinate rows (with NaN) of the coreset entries."""
        return self.source.values[self.ids]

    def total_weight(self) -> float:
        return float(self.weights.sum())

    def merged(self) -> "WeightedCoreset":
        """Sum weights of duplicate ids; each id appears at most once."""
        ids, inverse = np.unique(self.ids, return_inverse=True)
        weights = np.zeros(ids.shape[0])
        np.add.at(weights, inverse, self.weights)
        return WeightedCoreset(ids, weights, self.source)


def _check_dims(dx: int, dc: int):
    if dx != dc:
        raise InputError(f"dimension mismatch: point has d={dx}, center has d={dc}")


def dist(x, c) -> float:
    """Euclidean distance over the coordinates available in both arguments."""
    xa = x.coords if isinstance(x, MissingPoint) else _as_row(x)
    ca = c.coords if isinstance(c, MissingPoint) else _as_row(c)
    _check_dims(xa.shape[0], ca.shape[0])
    diff = xa - ca
    return float(np.sqrt(np.nansum(diff * diff)))


def dist_restricted(x, c, index_set) -> float:
    """Distance induced by the coordinate subset `index_set`.

    Requires every index to be available in both arguments.
    """
    xa = x.coords if isinstance(x, MissingPoint) else _as_row(x)
    ca = c.coords if isinstance(c, MissingPoint) else _as_row(c)
    _check_dims(xa.shape[0], ca.shape[0])
    idx = np.fromiter(index_set, dtype=np.int64)
    sub = xa[idx] - ca[idx]
    if np.any(np.isnan(sub)):
        raise InputError("index set touches a missing coordinate")
    return float(np.sqrt(np.sum(sub * sub)))


_CHUNK_ELEMS = 4_000_000  # cap on n*k*d elements materialized at once


def nearest_sq_dists(values: np.ndarray, centers: np.ndarray):
    """Min squared distance to the centers (available coordinates only).

    Returns `(d2, labels)`; ties go to the lowest center index.
    Chunked so the (n, k, d) broadcast never exceeds a fixed footprint.
    """
    values = np.atleast_2d(np.asarray(values, dtype=np.float64))
    centers = np.atleast_2d(np.asarray(centers, dtype=np.float64))
    _check_dims(values.shape[1], centers.shape[1])
    n = values.shape[0]
    k, d = centers.shape
    out = np.empty(n)
    labels = np.empty(n, dtype=np.int64)
    step = max(1, _CHUNK_ELEMS // max(1, k * d))
    for lo in range(0, n, step):
        hi = min(n, lo + step)
        diff = values[lo:hi, None, :] - centers[None, :, :]
        d2 = np.nansum(diff * diff, axis=2)
        labels[lo:hi] = np.argmin(d2, axis=1)
        out[lo:hi] = d2[np.arange(hi - lo), labels[lo:hi]]
    return out, labels


def _as_values_weights(data):
    if isinstance(data, Dataset):
        return data.values, None
    if isinstance(data, WeightedCoreset):
        return data.points, data.weights
    raise InputError(f"expected Dataset or WeightedCoreset, got {type(data).__name__}")


def cost(data, centers, z: float = 2.0) -> float:
    """(k, z)-clustering cost: sum of (weighted) z-th power distances.

    Summation is numpy's pairwise scheme, adequate for n up to 10^6
    sums of squares in float64.
    """
    if isinstance(centers, CenterSet):
        centers = centers.centers
    centers = np.atleast_2d(np.asarray(centers, dtype=np.float64))
    if centers.shape[0] == 0:
        raise InputError("empty center set")
    values, weights = _as_values_weights(data)
    d2, _ = nearest_sq_dists(values, centers)
    if z == 2.0:
        powered = d2
    elif z == 1.0:
        powered = np.sqrt(d2)
    else:
        powered = d2 ** (z / 2.0)
    if weights is not None:
        powered = powered * weights
    return float(np.sum(powered))
