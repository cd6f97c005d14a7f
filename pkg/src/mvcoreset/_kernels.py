"""Scalar kernels with a pinned summation order.

Projections and restricted distances accumulate left-to-right in
float64 both here and in the compiled engine (built with
fastmath=False, so LLVM neither reassociates nor fuses into FMA).
The tree-backed and compiled structures therefore select identical
coreset points, and the engine-equivalence tests assert exact equality.
"""

from __future__ import annotations

import math

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f


def seq_dot(row, vec) -> float:
    acc = 0.0
    for t in range(len(row)):
        acc = acc + row[t] * vec[t]
    return acc


def seq_sqdist(a, b) -> float:
    acc = 0.0
    for t in range(len(a)):
        diff = a[t] - b[t]
        acc = acc + diff * diff
    return acc


def seq_dist(a, b) -> float:
    return math.sqrt(seq_sqdist(a, b))


@njit(cache=True)
def _project_block(coords, vectors, out):
    m, d = coords.shape
    l = vectors.shape[0]
    for i in range(m):
        for v in range(l):
            acc = 0.0
            for t in range(d):
                acc = acc + coords[i, t] * vectors[v, t]
            out[i, v] = acc


def project_rows(coords: np.ndarray, vectors: np.ndarray) -> np.ndarray:
    """Project rows onto direction vectors: out[i, v] = <coords[i], vectors[v]>."""
    coords = np.ascontiguousarray(coords, dtype=np.float64)
    vectors = np.ascontiguousarray(vectors, dtype=np.float64)
    out = np.empty((coords.shape[0], vectors.shape[0]))
    if HAVE_NUMBA and coords.size:
        _project_block(coords, vectors, out)
    else:
        for i in range(coords.shape[0]):
            for v in range(vectors.shape[0]):
                out[i, v] = seq_dot(coords[i], vectors[v])
    return out
