import math

import numpy as np
import pytest

from mvcoreset.core import Dataset, InputError, MissingPoint, dist
from mvcoreset.dyngonz import (
    DynGonzalezRestriction,
    DynKCenterCoreset,
    ProjectionSet,
    required_projections,
    static_gonzalez,
)
from mvcoreset.family import CoordinateFamily, build_family, verify_family
from tests.conftest import make_missing_instance

NAN = float("nan")


def max_dist_to(values, centers):
    """Brute-force max over rows of missing-aware distance to the center set."""
    out = 0.0
    for row in values:
        out = max(out, min(dist(MissingPoint(row), c) for c in centers))
    return out


# -- static Gonzalez ---------------------------------------------------


def test_static_gonzalez_line():
    idx = static_gonzalez(np.array([[0.0], [1.0], [10.0]]), k=1)
    assert idx.tolist() == [0, 2]


def test_static_gonzalez_single_point():
    assert static_gonzalez(np.array([[3.0, 4.0]]), k=5).tolist() == [0]


def test_static_gonzalez_square_corners():
    corners = np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]])
    idx = static_gonzalez(corners, k=3)
    assert sorted(idx.tolist()) == [0, 1, 2, 3]  # |A| <= k+1 returns A


def test_static_gonzalez_greedy_order():
    points = np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0], [0.5, 0.5]])
    idx = static_gonzalez(points, k=3)
    assert idx.tolist() == [0, 3, 1, 2]  # start, diagonal, then ties by index


def test_static_gonzalez_rejects_empty_and_missing():
    with pytest.raises(InputError):
        static_gonzalez(np.empty((0, 2)), k=1)
    with pytest.raises(InputError):
        static_gonzalez(np.array([[1.0, NAN]]), k=1)


def test_static_gonzalez_approximate_oracle(rng):
    # any oracle within factor c yields a (1 + 2c)-coreset
    c = 2.0

    def oracle(points, chosen, min_d2):
        return int(np.flatnonzero(min_d2 >= min_d2.max() / c**2)[0])

    for _ in range(10):
        points = rng.normal(size=(30, 2))
        k = int(rng.integers(1, 4))
        idx = static_gonzalez(points, k, c=c, furthest_oracle=oracle)
        coreset = points[idx]
        for _ in range(30):
            centers = rng.normal(size=(k, 2)) * 2
            full = max_dist_to(points, centers)
            kept = max_dist_to(coreset, centers)
            assert full <= (1 + 2 * c) * kept + 1e-9


def test_approximate_gonzalez_is_3_coreset(rng):
    # exact oracle => factor 1 + 2c = 3, never violated
    for _ in range(30):
        n = int(rng.integers(5, 60))
        k = int(rng.integers(1, 5))
        points = rng.normal(size=(n, 3)) * rng.uniform(0.5, 10)
        idx = static_gonzalez(points, k)
        coreset = points[idx]
        for _ in range(25):
            centers = rng.normal(size=(k, 3)) * 5
            full = max_dist_to(points, centers)
            kept = max_dist_to(coreset, centers)
            assert full <= 3.0 * kept + 1e-9


# -- restrictions ------------------------------------------------------


def proj(m, l=6, seed=0):
    return ProjectionSet.draw(m, l, np.random.default_rng(seed))


def test_restriction_rejects_uncovered_insert():
    r = DynGonzalezRestriction((0, 1), proj(2))
    with pytest.raises(InputError):
        r.insert(MissingPoint([1.0, NAN, 2.0], 0))


def test_restriction_insert_delete_round_trip():
    r = DynGonzalezRestriction((0, 2), proj(2))
    before = [tree.items() for tree in r.trees]
    r.insert(MissingPoint([1.0, NAN, 2.0], 0))
    r.delete(0)
    assert [tree.items() for tree in r.trees] == before
    with pytest.raises(InputError):
        r.delete(0)


def test_equal_projections_coexist():
    r = DynGonzalezRestriction((0, 1), proj(2))
    r.insert(MissingPoint([1.0, 2.0], 0))
    r.insert(MissingPoint([1.0, 2.0], 1))  # identical restricted coords
    assert len(r.members) == 2
    assert all(len(tree) == 2 for tree in r.trees)


def test_restriction_coreset_small_membership():
    r = DynGonzalezRestriction((0,), proj(1))
    assert r.get_coreset(2) == []
    r.insert(MissingPoint([5.0], 3))
    assert r.get_coreset(2) == [3]
    r.insert(MissingPoint([7.0], 1))
    assert r.get_coreset(2) == [1, 3]  # k+1 >= members -> all, ascending ids


def test_restriction_coreset_line_extremes():
    r = DynGonzalezRestriction((0,), proj(1, l=16, seed=2))
    for pid, x in enumerate([0.0, 1.0, 10.0]):
        r.insert(MissingPoint([x], pid))
    assert sorted(r.get_coreset(1)) == [0, 2]


def test_restriction_exact_mode_matches_static():
    rng = np.random.default_rng(5)
    points = rng.normal(size=(20, 2))
    r = DynGonzalezRestriction((0, 1), None, exact_furthest=True)
    for pid, row in enumerate(points):
        r.insert(MissingPoint(row, pid))
    got = r.get_coreset(3)
    want = static_gonzalez(points, 3).tolist()
    assert got == want


# -- the union structure -----------------------------------------------


def test_kcenter_single_point():
    s = DynKCenterCoreset(d=3, j=1, k=2, q_hint=10, seed=0)
    s.insert(MissingPoint([1.0, 2.0, NAN], 0))
    assert s.get_coreset().tolist() == [0]


def test_kcenter_delete_all_empties_coreset():
    s = DynKCenterCoreset(d=2, j=1, k=1, q_hint=10, seed=0)
    for pid in range(4):
        s.insert(MissingPoint([float(pid), 1.0], pid))
    for pid in range(4):
        s.delete(pid)
    assert s.get_coreset().size == 0
    assert s.alive == 0


def test_kcenter_unknown_delete_errors():
    s = DynKCenterCoreset(d=2, j=1, k=1, q_hint=10, seed=0)
    with pytest.raises(InputError):
        s.delete(7)


def test_kcenter_uncovered_point_is_coreset_level_noop():
    family = CoordinateFamily(((0, 1),), d=3, j=1, k=1)
    s = DynKCenterCoreset(d=3, j=1, k=1, q_hint=10, family=family, seed=0)
    s.insert(MissingPoint([NAN, 1.0, 2.0], 0))  # not covered by (0, 1)
    s.insert(MissingPoint([1.0, 1.0, 2.0], 1))
    assert s.get_coreset().tolist() == [1]


def test_kcenter_output_size_bounded_by_family():
    rng = np.random.default_rng(3)
    ds = make_missing_instance(rng, 50, 4, 1)
    s = DynKCenterCoreset(d=4, j=1, k=2, q_hint=100, seed=1)
    s.insert_all(ds)
    coreset = s.get_coreset()
    assert 0 < coreset.size <= (s.k + 1) * len(s.family)


def test_kcenter_small_instance_alpha_hat_finite(rng):
    ds = make_missing_instance(rng, 30, 4, 1, scale=5.0)
    s = DynKCenterCoreset(d=4, j=1, k=2, q_hint=60, seed=2)
    s.insert_all(ds)
    coreset_ids = s.get_coreset()
    assert coreset_ids.size > 0  # validity: never empty while X nonempty
    alpha_hat = 0.0
    for _ in range(200):
        centers = rng.normal(0.0, 5.0, size=(2, 4))
        full = max_dist_to(ds.values, centers)
        kept = max_dist_to(ds.values[coreset_ids], centers)
        if kept > 0:
            alpha_hat = max(alpha_hat, full / kept)
        else:
            assert full == 0.0
    assert math.isfinite(alpha_hat) and alpha_hat >= 1.0


def test_dynamic_equals_batch_rebuild(rng):
    ds = make_missing_instance(rng, 40, 3, 1)
    dyn = DynKCenterCoreset(d=3, j=1, k=2, q_hint=100, seed=4)
    for pid in range(40):
        dyn.insert(ds.point(pid))
    for pid in rng.choice(40, size=15, replace=False):
        dyn.delete(int(pid))
    survivors = sorted(dyn.live)

    batch = DynKCenterCoreset(d=3, j=1, k=2, q_hint=100, seed=4)
    for pid in survivors:
        batch.insert(ds.point(pid))

    for rd, rb in zip(dyn.restrictions, batch.restrictions):
        assert sorted(rd.members) == sorted(rb.members)
        for td, tb in zip(rd.trees, rb.trees):
            assert td.items() == tb.items()
    assert dyn.get_coreset().tolist() == batch.get_coreset().tolist()


# -- statistical guarantees --------------------------------------------


def test_projection_guarantee_statistical():
    # lifted furthest within c1 * k * sqrt(log q) of the true furthest
    # in at least 95% of trials; calibration constant c1 = 2.
    rng = np.random.default_rng(77)
    c1 = 2.0
    hits = 0
    trials = 1000
    for _ in range(trials):
        n = int(rng.integers(5, 50))
        k = int(rng.integers(1, 4))
        d = int(rng.integers(2, 5))
        points = rng.normal(size=(n, d))
        l = required_projections(k, n, 0.05)
        r = DynGonzalezRestriction(
            range(d), ProjectionSet.draw(d, l, np.random.default_rng(rng.integers(2**32)))
        )
        for pid, row in enumerate(points):
            r.insert(MissingPoint(row, pid))
        chosen = rng.choice(n, size=k, replace=False)
        _, got_d2 = r.furthest_from(int(c) for c in chosen)
        true_d2 = max(
            min(((points[i] - points[c]) ** 2).sum() for c in chosen) for i in range(n)
        )
        if true_d2 == 0.0 or got_d2 >= true_d2 / (c1 * k * math.sqrt(math.log(n))) ** 2:
            hits += 1
    assert hits >= 0.95 * trials


def test_union_over_verified_family_is_3sqrtd_coreset(rng):
    # exact-furthest mode: every tested center set obeys the bound
    for _ in range(15):
        n = int(rng.integers(10, 50))
        d = int(rng.integers(3, 5))
        j = int(rng.integers(1, 3))
        k = int(rng.integers(1, 3))
        ds = make_missing_instance(rng, n, d, j, scale=4.0)
        family = build_family(d, j, k, seed=int(rng.integers(2**32)))
        assert verify_family(family).ok
        s = DynKCenterCoreset(
            d=d, j=j, k=k, q_hint=n, family=family, exact_furthest=True
        )
        s.insert_all(ds)
        ids = s.get_coreset()
        for _ in range(30):
            centers = rng.normal(0.0, 4.0, size=(k, d))
            full = max_dist_to(ds.values, centers)
            kept = max_dist_to(ds.values[ids], centers)
            assert full <= 3.0 * math.sqrt(d) * kept + 1e-9
