"""Coordinate-subset families used to restrict a dataset.

A family covers a pair of disjoint index sets (J, K) with |J|=j, |K|=k
when some member contains all of K and avoids all of J.  A family that
covers every such pair lets per-subset k-center coresets union into a
coreset for the full missing-value dataset.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from itertools import combinations

import numpy as np

from .core import InputError
from .rng import substream

DEFAULT_SIZE_CAP = 512
DEFAULT_PAIR_BUDGET = 10_000_000


def theoretical_size(d: int, j: int, k: int) -> int:
    """Subset count sufficient for coverage w.p. >= 1 - d^-(j+k)."""
    if j == 0:
        return 1
    ratio = (j + k) ** (j + k + 1) / (j**j * k**k)
    return max(1, math.ceil(ratio * 2.0 * math.log(d)))


@dataclass(frozen=True)
class CoordinateFamily:
    subsets: tuple[tuple[int, ...], ...]
    d: int
    j: int
    k: int
    verified: bool = False

    def __post_init__(self):
        seen = set()
        for sub in self.subsets:
            if not all(0 <= i < self.d for i in sub):
                raise InputError(f"subset {sub} out of range for d={self.d}")
            if sub in seen:
                raise InputError(f"duplicate subset {sub}")
            seen.add(sub)

    def __len__(self) -> int:
        return len(self.subsets)

    def masks(self) -> list[int]:
        return [sum(1 << i for i in sub) for sub in self.subsets]

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "j": self.j,
            "k": self.k,
            "verified": self.verified,
            "subsets": [list(sub) for sub in self.subsets],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CoordinateFamily":
        return cls(
            subsets=tuple(tuple(int(i) for i in sub) for sub in data["subsets"]),
            d=int(data["d"]),
            j=int(data["j"]),
            k=int(data["k"]),
            verified=bool(data.get("verified", False)),
        )


def build_family(
    d: int,
    j: int,
    k: int,
    size_override: int | None = None,
    seed: int = 0,
    size_cap: int = DEFAULT_SIZE_CAP,
    rng: np.random.Generator | None = None,
) -> CoordinateFamily:
    """Randomized construction: each subset keeps a coordinate w.p. k/(j+k).

    Duplicates are dropped without regeneration (they add no coverage)
    and empty subsets are discarded, so the result may hold fewer than
    the requested number of subsets.  j=0 degenerates to the single full
    subset (complete data needs no restriction).
    """
    if d < 1:
        raise InputError(f"d must be >= 1, got {d}")
    if j < 0 or k < 1:
        raise InputError(f"need j >= 0 and k >= 1, got j={j}, k={k}")
    if size_override is not None and size_override < 1:
        raise InputError(f"size_override must be positive, got {size_override}")
    if j == 0:
        full = tuple(range(d))
        return CoordinateFamily((full,), d=d, j=j, k=k)
    t = size_override if size_override is not None else min(theoretical_size(d, j, k), size_cap)
    if rng is None:
        rng = substream(seed, "family")
    p = k / (j + k)
    subsets = []
    seen = set()
    for _ in range(t):
        keep = rng.random(d) < p
        sub = tuple(int(i) for i in np.flatnonzero(keep))
        if sub and sub not in seen:
            seen.add(sub)
            subsets.append(sub)
    if not subsets:
        raise InputError(
            f"all {t} drawn subsets were empty; increase size_override"
        )
    return CoordinateFamily(tuple(subsets), d=d, j=j, k=k)


@dataclass(frozen=True)
class VerifyResult:
    ok: bool
    counterexample: tuple[tuple[int, ...], tuple[int, ...]] | None
    pairs_checked: int
    mode: str

    def __bool__(self) -> bool:
        return self.ok


def _covered(masks: list[int], j_mask: int, k_mask: int) -> bool:
    for m in masks:
        if (m & j_mask) == 0 and (m & k_mask) == k_mask:
            return True
    return False


def verify_family(
    fam: CoordinateFamily,
    mode: str = "exhaustive",
    trials: int = 10_000,
    seed: int = 0,
    pair_budget: int = DEFAULT_PAIR_BUDGET,
) -> VerifyResult:
    """Check the covering property over all (exhaustive) or `trials`
    random (sampled) disjoint pairs (J, K).

    Pairs that cannot exist (j + k > d) are vacuously covered and
    skipped.  Returns the first counterexample found, in lexicographic
    order for the exhaustive mode.
    """
    d, j, k = fam.d, fam.j, fam.k
    if j == 0:
        # J is empty; K only needs some superset in the family.
        masks = fam.masks()
        for K in combinations(range(d), k):
            if not _covered(masks, 0, sum(1 << i for i in K)):
                return VerifyResult(False, ((), K), 0, mode)
        return VerifyResult(True, None, math.comb(d, k), mode)
    if j + k > d:
        return VerifyResult(True, None, 0, mode)
    masks = fam.masks()
    if mode == "exhaustive":
        n_pairs = math.comb(d, j) * math.comb(d - j, k)
        if n_pairs > pair_budget:
            raise InputError(
                f"exhaustive verification needs {n_pairs} pairs (budget"
                f" {pair_budget}); use mode='sampled'"
            )
        checked = 0
        for J in combinations(range(d), j):
            j_mask = sum(1 << i for i in J)
            rest = [i for i in range(d) if i not in J]
            for K in combinations(rest, k):
                checked += 1
                if not _covered(masks, j_mask, sum(1 << i for i in K)):
                    return VerifyResult(False, (J, K), checked, mode)
        return VerifyResult(True, None, checked, mode)
    if mode == "sampled":
        rng = substream(seed, "family")
        for t in range(trials):
            perm = rng.permutation(d)
            J = tuple(sorted(int(i) for i in perm[:j]))
            K = tuple(sorted(int(i) for i in perm[j : j + k]))
            j_mask = sum(1 << i for i in J)
            if not _covered(masks, j_mask, sum(1 << i for i in K)):
                return VerifyResult(False, (J, K), t + 1, mode)
        return VerifyResult(True, None, trials, mode)
    raise InputError(f"unknown verification mode {mode!r}")


def verified(fam: CoordinateFamily, **kwargs) -> CoordinateFamily:
    """Return a copy with the `verified` flag set from an actual check."""
    result = verify_family(fam, **kwargs)
    return replace(fam, verified=result.ok)
