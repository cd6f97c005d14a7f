"""Dynamic k-center coresets for points with missing values.

Per coordinate subset I of a family, the dataset restricted to I is a
complete point set; a Gonzalez-style farthest-first pass over it yields
k+1 points whose union over the family is a k-center coreset for the
original data.  To answer farthest-point queries under insertions and
deletions, each restriction projects its points onto l random unit-free
normal directions and keeps one ordered multiset per direction; a
farthest query asks every tree for its 1-d furthest candidate and keeps
the candidate whose true restricted distance is largest.

All tie-breaking is toward the smallest point id so rebuilding a
structure from scratch reproduces the same output.
"""

from __future__ import annotations

import math

import numpy as np

from ._kernels import project_rows, seq_sqdist
from .core import Dataset, InputError, MissingPoint
from .family import CoordinateFamily, build_family
from .ordered1d import Ordered1D
from .rng import substream


def required_projections(k: int, q_hint: int, delta: float, c_l: float = 2.0) -> int:
    """Projection count l = ceil(c_l * (k ln(q+2) + ln(1/delta)))."""
    if q_hint < 0 or not (0 < delta < 1):
        raise InputError(f"bad q_hint={q_hint} or delta={delta}")
    return max(1, math.ceil(c_l * (k * math.log(q_hint + 2) + math.log(1.0 / delta))))


class ProjectionSet:
    """l i.i.d. standard-normal direction vectors in R^m."""

    def __init__(self, vectors: np.ndarray):
        vectors = np.asarray(vectors, dtype=np.float64)
        if vectors.ndim != 2 or vectors.shape[0] < 1:
            raise InputError("need an (l, m) array with l >= 1")
        self.vectors = vectors

    @classmethod
    def draw(cls, m: int, l: int, rng: np.random.Generator) -> "ProjectionSet":
        return cls(rng.standard_normal((l, m)))

    @property
    def l(self) -> int:
        return self.vectors.shape[0]

    @property
    def m(self) -> int:
        return self.vectors.shape[1]


def static_gonzalez(points, k: int, c: float = 1.0, furthest_oracle=None) -> np.ndarray:
    """Farthest-first traversal truncated at k+1 points; returns indices.

    `furthest_oracle(points, chosen, min_sq_dists)` may return any index
    whose distance to the chosen set is within factor c of the maximum;
    the default oracle is exact (c=1), yielding classic Gonzalez.
    """
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    m = points.shape[0]
    if m == 0:
        raise InputError("static_gonzalez needs at least one point")
    if np.any(np.isnan(points)):
        raise InputError("static_gonzalez requires complete points")
    if m <= k + 1:
        return np.arange(m, dtype=np.int64)
    chosen = [0]
    diff = points - points[0]
    min_d2 = np.einsum("ij,ij->i", diff, diff)
    for _ in range(k):
        if furthest_oracle is None:
            cand = int(np.argmax(min_d2))  # first max = smallest index tie-break
        else:
            cand = int(furthest_oracle(points, list(chosen), min_d2))
        chosen.append(cand)
        diff = points - points[cand]
        min_d2 = np.minimum(min_d2, np.einsum("ij,ij->i", diff, diff))
    return np.asarray(chosen, dtype=np.int64)


def draw_family_projections(family: CoordinateFamily, l: int, seed: int) -> list[ProjectionSet]:
    """One ProjectionSet per family subset, from per-restriction substreams."""
    out = []
    for r, subset in enumerate(family.subsets):
        rng = substream(seed, "projections", r)
        out.append(ProjectionSet.draw(len(subset), l, rng))
    return out


class DynGonzalezRestriction:
    """One coordinate restriction: members, projections, per-vector trees."""

    def __init__(self, index_set, projections: ProjectionSet | None, exact_furthest: bool = False):
        self.index = np.asarray(sorted(int(i) for i in index_set), dtype=np.int64)
        if self.index.size == 0:
            raise InputError("empty restriction index set")
        self.exact = exact_furthest
        self.projections = projections
        if not exact_furthest:
            if projections is None or projections.m != self.index.size:
                raise InputError("projection dimension must match the index set")
            self.trees = [Ordered1D() for _ in range(projections.l)]
        else:
            self.trees = []
        self.members: dict[int, tuple[np.ndarray, np.ndarray]] = {}

    def covers(self, point: MissingPoint) -> bool:
        return bool(np.all(point.available[self.index]))

    def insert(self, point: MissingPoint):
        if not self.covers(point):
            raise InputError(f"point {point.pid} has missing coordinates inside the restriction")
        if point.pid in self.members:
            raise InputError(f"point {point.pid} already a member")
        coords = point.coords[self.index].copy()
        if self.exact:
            self.members[point.pid] = (coords, None)
            return
        z = project_rows(coords[None, :], self.projections.vectors)[0]
        for tree, zv in zip(self.trees, z):
            tree.add(float(zv), point.pid)
        self.members[point.pid] = (coords, z)

    def delete(self, pid: int):
        coords_z = self.members.pop(pid, None)
        if coords_z is None:
            raise InputError(f"point {pid} is not a member")
        if not self.exact:
            for tree, zv in zip(self.trees, coords_z[1]):
                tree.remove(float(zv), pid)

    def _min_sq_dist_to(self, coords: np.ndarray, chosen: list[int]) -> float:
        return min(seq_sqdist(coords, self.members[q][0]) for q in chosen)

    def furthest_from(self, chosen) -> tuple[int, float]:
        """Approximate furthest member from the chosen member ids.

        Each tree proposes its 1-d furthest entry; candidates are lifted
        back to R^I and the largest true restricted distance wins
        (squared), ties toward the smaller id.
        """
        chosen = list(chosen)
        best_pid, best_d2 = -1, -1.0
        for v, tree in enumerate(self.trees):
            centers = sorted(float(self.members[q][1][v]) for q in chosen)
            cand = tree.furthest(centers)
            pid = cand[1]
            d2 = self._min_sq_dist_to(self.members[pid][0], chosen)
            if d2 > best_d2 or (d2 == best_d2 and pid < best_pid):
                best_pid, best_d2 = pid, d2
        return best_pid, best_d2

    def _get_coreset_exact(self, k: int) -> list[int]:
        ids = sorted(self.members)
        chosen = [ids[0]]
        rest = set(ids[1:])
        for _ in range(k):
            best_pid, best_d2 = -1, -1.0
            for pid in rest:
                d2 = self._min_sq_dist_to(self.members[pid][0], chosen)
                if d2 > best_d2 or (d2 == best_d2 and pid < best_pid):
                    best_pid, best_d2 = pid, d2
            chosen.append(best_pid)
            rest.discard(best_pid)
        return chosen

    def get_coreset(self, k: int) -> list[int]:
        """Simulated Gonzalez over the current members; at most k+1 ids.

        Candidate furthest points come from each tree's 1-d query; the
        winner is lifted back to R^I where its true restricted distance
        decides.  With <= k+1 members all of them are returned.
        """
        m = len(self.members)
        if m == 0:
            return []
        if m <= k + 1:
            return sorted(self.members)
        if self.exact:
            return self._get_coreset_exact(k)
        first = self.trees[0].furthest(())
        chosen = [first[1]]
        in_q = {first[1]}
        for _ in range(k):
            best_pid, _ = self.furthest_from(chosen)
            if best_pid in in_q:
                break
            chosen.append(best_pid)
            in_q.add(best_pid)
        return chosen


class DynKCenterCoreset:
    """Union of per-restriction dynamic Gonzalez structures over a family."""

    def __init__(
        self,
        d: int,
        j: int,
        k: int,
        q_hint: int,
        family: CoordinateFamily | None = None,
        family_size: int | None = None,
        seed: int = 0,
        c_l: float = 2.0,
        delta: float | None = None,
        exact_furthest: bool = False,
        projections: list[ProjectionSet] | None = None,
    ):
        if family is None:
            family = build_family(d, j, k, size_override=family_size, seed=seed)
        if len(family) == 0:
            raise InputError("empty coordinate family")
        self.family = family
        self.k = k
        self.delta = delta if delta is not None else 1.0 / (4.0 * len(family))
        self.l = required_projections(k, q_hint, self.delta, c_l)
        if projections is None and not exact_furthest:
            projections = draw_family_projections(family, self.l, seed)
        self.restrictions = []
        for r, subset in enumerate(family.subsets):
            proj = None if exact_furthest else projections[r]
            self.restrictions.append(
                DynGonzalezRestriction(subset, proj, exact_furthest=exact_furthest)
            )
        self.live: set[int] = set()

    def covering(self, point: MissingPoint):
        return [r for r in self.restrictions if r.covers(point)]

    def insert(self, point: MissingPoint):
        if point.pid in self.live:
            raise InputError(f"point {point.pid} already inserted")
        for r in self.covering(point):
            r.insert(point)
        self.live.add(point.pid)

    def insert_all(self, dataset: Dataset):
        for point in dataset:
            self.insert(point)

    def delete(self, pid: int):
        """Remove from every restriction holding the id; unknown id errors."""
        if pid not in self.live:
            raise InputError(f"delete of unknown id {pid}")
        for r in self.restrictions:
            if pid in r.members:
                r.delete(pid)
        self.live.discard(pid)

    def delete_ids(self, pids):
        for pid in pids:
            self.delete(int(pid))

    @property
    def alive(self) -> int:
        return len(self.live)

    def get_coreset(self) -> np.ndarray:
        """Sorted union of the per-restriction coresets (original ids)."""
        out: set[int] = set()
        for r in self.restrictions:
            out.update(r.get_coreset(self.k))
        return np.array(sorted(out), dtype=np.int64)
