import math

import numpy as np
import pytest

from mvcoreset.core import InputError
from mvcoreset.ordered1d import Ordered1D


def build(entries):
    tree = Ordered1D()
    for value, pid in entries:
        tree.add(value, pid)
    return tree


def brute_force_furthest(entries, centers):
    """Linear-scan oracle for the achieved distance."""
    best = max(min(abs(v - c) for c in centers) for v, _ in entries)
    return best


def test_add_multiset_semantics():
    tree = Ordered1D()
    tree.add(1.0, 7)
    assert len(tree) == 1
    tree.add(1.0, 8)
    assert len(tree) == 2
    with pytest.raises(InputError):
        tree.add(1.0, 7)


def test_remove_round_trip():
    tree = build([(1.0, 1), (2.0, 2)])
    tree.remove(1.0, 1)
    assert len(tree) == 1
    tree.add(1.0, 1)
    assert tree.items() == [(1.0, 1), (2.0, 2)]
    with pytest.raises(InputError):
        Ordered1D().remove(3.0, 0)


def test_bounds_examples():
    tree = build([(1.0, 0), (4.0, 1), (9.0, 2)])
    assert tree.upper_bound(5.0) == (4.0, 1)
    assert tree.upper_bound(0.5) is None
    assert tree.upper_bound(9.0) == (9.0, 2)
    assert tree.lower_bound(5.0) == (9.0, 2)
    assert tree.lower_bound(10.0) is None
    assert tree.lower_bound(1.0) == (1.0, 0)


def test_bounds_respect_id_ties():
    tree = build([(2.0, 3), (2.0, 8), (2.0, 5)])
    assert tree.upper_bound(2.0) == (2.0, 8)
    assert tree.lower_bound(2.0) == (2.0, 3)


def test_furthest_examples():
    tree = build([(1.0, 0), (4.0, 1), (9.0, 2)])
    value, pid, d = tree.furthest([5.0])
    assert (value, pid, d) == (1.0, 0, 4.0)  # ties toward the smaller value
    value, pid, d = tree.furthest([0.0, 10.0])
    assert (value, pid, d) == (4.0, 1, 4.0)
    tree = build([(3.0, 0)])
    assert tree.furthest([])[:2] == (3.0, 0)
    assert Ordered1D().furthest([1.0]) is None


def test_furthest_matches_brute_force(rng):
    for _ in range(300):
        n = int(rng.integers(1, 60))
        entries = [(float(rng.normal()), i) for i in range(n)]
        tree = build(entries)
        n_centers = int(rng.integers(1, 8))
        centers = sorted(float(rng.normal()) for _ in range(n_centers))
        value, pid, achieved = tree.furthest(centers)
        expected = brute_force_furthest(entries, centers)
        assert achieved == expected
        assert min(abs(value - c) for c in centers) == expected


def test_round_trip_restores_query_answers(rng):
    entries = [(float(rng.normal()), i) for i in range(40)]
    tree = build(entries)
    probes = [float(rng.normal()) for _ in range(10)]
    before = [(tree.upper_bound(x), tree.lower_bound(x)) for x in probes]
    extra = [(float(rng.normal()), 100 + i) for i in range(10)]
    for v, pid in extra:
        tree.add(v, pid)
    for v, pid in extra:
        tree.remove(v, pid)
    after = [(tree.upper_bound(x), tree.lower_bound(x)) for x in probes]
    assert before == after


def test_operation_counts_logarithmic(rng):
    # operation-count instrumentation, not wall-clock
    tree = Ordered1D()
    sizes = (100, 1000, 10000)
    worst = {}
    entries = [(float(rng.random()), i) for i in range(max(sizes))]
    for target in sizes:
        while len(tree) < target:
            v, pid = entries[len(tree)]
            tree.add(v, pid)
            worst[target] = max(worst.get(target, 0), tree.last_visits)
        for x in (0.1, 0.5, 0.9):
            tree.upper_bound(x)
            worst[target] = max(worst[target], tree.last_visits)
            tree.lower_bound(x)
            worst[target] = max(worst[target], tree.last_visits)
    for target in sizes:
        assert worst[target] <= 3 * math.log2(target + 2) + 6
    # furthest costs O(|C|) bound queries
    centers = sorted(float(rng.random()) for _ in range(8))
    tree.furthest(centers)
    assert tree.last_visits <= 2 * len(centers) * (3 * math.log2(len(tree) + 2) + 6)
