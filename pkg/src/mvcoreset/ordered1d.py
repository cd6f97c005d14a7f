"""Balanced ordered multiset of (value, point-id) pairs.

An AVL tree keyed lexicographically by (value, id): equal values with
distinct ids coexist and every tie breaks deterministically.  Each
public operation records the number of nodes it touched in
`last_visits`, which the tests use to assert the O(log n) behaviour by
operation count rather than wall clock.

The furthest-from-centers query walks only upper/lower bound probes at
the midpoints between adjacent centers (plus the two extremes), so it
costs O(|C|) bound queries -- it never scans the whole structure.
"""

from __future__ import annotations

import math

from .core import InputError


class _Node:
    __slots__ = ("value", "pid", "left", "right", "height")

    def __init__(self, value: float, pid: int):
        self.value = value
        self.pid = pid
        self.left = None
        self.right = None
        self.height = 1


def _h(node) -> int:
    return node.height if node is not None else 0


def _update(node):
    node.height = 1 + max(_h(node.left), _h(node.right))


class Ordered1D:
    def __init__(self):
        self.root = None
        self._size = 0
        self.last_visits = 0
        self._visits = 0

    def __len__(self) -> int:
        return self._size

    # -- internal helpers ------------------------------------------------

    def _less(self, value, pid, node) -> bool:
        self._visits += 1
        return value < node.value or (value == node.value and pid < node.pid)

    def _rot_right(self, y):
        x = y.left
        y.left = x.right
        x.right = y
        _update(y)
        _update(x)
        return x

    def _rot_left(self, x):
        y = x.right
        x.right = y.left
        y.left = x
        _update(x)
        _update(y)
        return y

    def _rebalance(self, node):
        _update(node)
        bal = _h(node.left) - _h(node.right)
        if bal > 1:
            if _h(node.left.left) < _h(node.left.right):
                node.left = self._rot_left(node.left)
            return self._rot_right(node)
        if bal < -1:
            if _h(node.right.right) < _h(node.right.left):
                node.right = self._rot_right(node.right)
            return self._rot_left(node)
        return node

    def _insert(self, node, value, pid):
        if node is None:
            return _Node(value, pid)
        if self._less(value, pid, node):
            node.left = self._insert(node.left, value, pid)
        elif value == node.value and pid == node.pid:
            raise InputError(f"duplicate entry ({value}, {pid})")
        else:
            node.right = self._insert(node.right, value, pid)
        return self._rebalance(node)

    def _delete(self, node, value, pid):
        if node is None:
            raise InputError(f"entry ({value}, {pid}) not present")
        if value == node.value and pid == node.pid:
            self._visits += 1
            if node.left is None:
                return node.right
            if node.right is None:
                return node.left
            succ = node.right
            while succ.left is not None:
                self._visits += 1
                succ = succ.left
            node.value, node.pid = succ.value, succ.pid
            node.right = self._delete(node.right, succ.value, succ.pid)
        elif self._less(value, pid, node):
            node.left = self._delete(node.left, value, pid)
        else:
            node.right = self._delete(node.right, value, pid)
        return self._rebalance(node)

    def _finish(self):
        self.last_visits = self._visits
        self._visits = 0

    # -- the four primitives ---------------------------------------------

    def add(self, value: float, pid: int):
        self.root = self._insert(self.root, float(value), int(pid))
        self._size += 1
        self._finish()

    def remove(self, value: float, pid: int):
        self.root = self._delete(self.root, float(value), int(pid))
        self._size -= 1
        self._finish()

    def upper_bound(self, x: float):
        """Largest (value, id) with value <= x, or None."""
        best = None
        node = self.root
        while node is not None:
            self._visits += 1
            if node.value <= x:
                best = (node.value, node.pid)
                node = node.right
            else:
                node = node.left
        self._finish()
        return best

    def lower_bound(self, x: float):
        """Smallest (value, id) with value >= x, or None."""
        best = None
        node = self.root
        while node is not None:
            self._visits += 1
            if node.value >= x:
                best = (node.value, node.pid)
                node = node.left
            else:
                node = node.right
        self._finish()
        return best

    # -- derived queries ---------------------------------------------------

    def min_entry(self):
        node = self.root
        if node is None:
            return None
        while node.left is not None:
            self._visits += 1
            node = node.left
        self._finish()
        return (node.value, node.pid)

    def max_entry(self):
        node = self.root
        if node is None:
            return None
        while node.right is not None:
            self._visits += 1
            node = node.right
        self._finish()
        return (node.value, node.pid)

    def furthest(self, centers):
        """Entry maximizing min distance to `centers`, with that distance.

        Ties break toward the smaller (value, id).  An empty center list
        returns the minimum entry (with infinite distance); an empty
        structure returns None.
        """
        if self.root is None:
            return None
        centers = sorted(float(c) for c in centers)
        if not centers:
            value, pid = self.min_entry()
            return (value, pid, math.inf)
        candidates = [self.min_entry()]
        visits = self.last_visits
        candidates.append(self.max_entry())
        visits += self.last_visits
        for i in range(len(centers) - 1):
            mid = 0.5 * (centers[i] + centers[i + 1])
            candidates.append(self.upper_bound(mid))
            visits += self.last_visits
            candidates.append(self.lower_bound(mid))
            visits += self.last_visits
        best = None
        best_dist = -1.0
        for cand in candidates:
            if cand is None:
                continue
            value, pid = cand
            dist = min(abs(value - c) for c in centers)
            if dist > best_dist or (
                dist == best_dist and (value, pid) < (best[0], best[1])
            ):
                best = cand
                best_dist = dist
        self.last_visits = visits
        self._visits = 0
        return (best[0], best[1], best_dist)

    def items(self):
        """In-order (value, id) pairs; used for content-equality checks."""
        out = []
        stack = []
        node = self.root
        while stack or node is not None:
            while node is not None:
                stack.append(node)
                node = node.left
            node = stack.pop()
            out.append((node.value, node.pid))
            node = node.right
        return out
