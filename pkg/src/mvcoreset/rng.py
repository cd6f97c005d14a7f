"""Named, reproducible random substreams.

Every random choice in the package flows from a single user seed through
a named substream, so that e.g. changing the number of sampled centers
never perturbs the coreset sample.  Substreams are derived with
``numpy.random.SeedSequence`` which is stable across runs and platforms.
"""

from __future__ import annotations

import numpy as np

# Fixed ids per stream name; never renumber, only append.
_STREAMS = {
    "family": 1,
    "projections": 2,
    "sampling": 3,
    "centers": 4,
    "trials": 5,
    "synthetic": 6,
    "impute": 7,
    "lloyd": 8,
    "instances": 9,
}


def substream(seed: int, name: str, index: int | None = None) -> np.random.Generator:
    """Return the generator for substream `name` (optionally sub-indexed)."""
    try:
        stream_id = _STREAMS[name]
    except KeyError:
        raise ValueError(f"unknown substream {name!r}; known: {sorted(_STREAMS)}")
    entropy = [int(seed), stream_id]
    if index is not None:
        entropy.append(int(index))
    return np.random.default_rng(np.random.SeedSequence(entropy))
