"""Compiled structure for the bulk-load-then-peel workload.

The sensitivity peel inserts every point once up front and then only
deletes, which matches the model where the points ever added are fixed
in advance.  That lets each (restriction, direction) tree be a static
array sorted by (projection, id) with an alive mask; predecessor and
successor among alive entries use union-find skip pointers with path
halving, so the whole peel runs in compiled code.

Selection logic (candidate probes at center midpoints, lifting the
per-tree winner, smallest-id tie-breaking) mirrors DynGonzalezRestriction
step for step, and all float accumulation is sequential with
fastmath=False, so the two structures return identical coresets; the
equivalence tests assert exact equality.
"""

from __future__ import annotations

import numpy as np

from ._kernels import HAVE_NUMBA, njit, project_rows
from .core import Dataset, InputError
from .family import CoordinateFamily


@njit(cache=True)
def _find_right(par, base, p):
    # First alive position >= p (sentinel m when none); path halving.
    x = p
    while par[base + x] != x:
        par[base + x] = par[base + par[base + x]]
        x = par[base + x]
    return x


@njit(cache=True)
def _find_left(par, base, p):
    # Largest alive position <= p, as shifted index (0 means none).
    x = p + 1
    while par[base + x] != x:
        par[base + x] = par[base + par[base + x]]
        x = par[base + x]
    return x - 1


@njit(cache=True)
def _bisect_right(vals, base, m, x):
    lo, hi = 0, m
    while lo < hi:
        mid = (lo + hi) // 2
        if vals[base + mid] <= x:
            lo = mid + 1
        else:
            hi = mid
    return lo


@njit(cache=True)
def _bisect_left(vals, base, m, x):
    lo, hi = 0, m
    while lo < hi:
        mid = (lo + hi) // 2
        if vals[base + mid] < x:
            lo = mid + 1
        else:
            hi = mid
    return lo


@njit(cache=True)
def _tree_furthest(svals, pr, pl, tb, prb, m, cz, nq):
    # Best alive position maximizing min |value - c|; ties toward the
    # smaller position, which is the smaller (value, id).
    best_pos = -1
    best_d1 = -1.0
    # extremes
    for probe in range(2):
        if probe == 0:
            p = _find_right(pr, prb, 0)
            if p >= m:
                continue
        else:
            p = _find_left(pl, prb, m - 1)
            if p < 0:
                continue
        d1 = np.inf
        for qi in range(nq):
            a = abs(svals[tb + p] - cz[qi])
            if a < d1:
                d1 = a
        if d1 > best_d1 or (d1 == best_d1 and p < best_pos):
            best_pos = p
            best_d1 = d1
    # midpoint probes
    for i in range(nq - 1):
        mid = 0.5 * (cz[i] + cz[i + 1])
        ub = _bisect_right(svals, tb, m, mid) - 1
        lb = _bisect_left(svals, tb, m, mid)
        for probe in range(2):
            if probe == 0:
                if ub < 0:
                    continue
                p = _find_left(pl, prb, ub)
                if p < 0:
                    continue
            else:
                if lb >= m:
                    continue
                p = _find_right(pr, prb, lb)
                if p >= m:
                    continue
            d1 = np.inf
            for qi in range(nq):
                a = abs(svals[tb + p] - cz[qi])
                if a < d1:
                    d1 = a
            if d1 > best_d1 or (d1 == best_d1 and p < best_pos):
                best_pos = p
                best_d1 = d1
    return best_pos


@njit(cache=True)
def _sqdist(coords, abase, bbase, d):
    acc = 0.0
    for t in range(d):
        diff = coords[abase + t] - coords[bbase + t]
        acc = acc + diff * diff
    return acc


@njit(cache=True)
def _get_all(
    k,
    n_res,
    l,
    mem_off,
    mem_ids,
    dims,
    coff,
    coords,
    zoff,
    zvals,
    toff,
    svals,
    sidx,
    proff,
    pr,
    pl,
    psoff,
    ps,
    alive_cnt,
    out,
    out_cnt,
):
    cz = np.empty(k + 1)
    chosen = np.empty(k + 1, dtype=np.int64)
    for r in range(n_res):
        m = mem_off[r + 1] - mem_off[r]
        cnt = alive_cnt[r]
        base = (k + 1) * r
        if cnt == 0:
            out_cnt[r] = 0
            continue
        d = dims[r]
        cb = coff[r]
        zb = zoff[r]
        if cnt <= k + 1:
            # all alive members, ascending id
            nq = 0
            p = _find_right(ps, psoff[r], 0)
            while p < m:
                out[base + nq] = mem_ids[mem_off[r] + p]
                nq += 1
                if p + 1 >= m:
                    break
                p = _find_right(ps, psoff[r], p + 1)
            out_cnt[r] = nq
            continue
        # first pick: minimum alive entry of tree 0
        tb0 = toff[r]
        prb0 = proff[r]
        p0 = _find_right(pr, prb0, 0)
        chosen[0] = sidx[tb0 + p0]
        nq = 1
        for _step in range(k):
            best_local = -1
            best_d2 = -1.0
            for v in range(l):
                tb = toff[r] + v * m
                prb = proff[r] + v * (m + 1)
                for qi in range(nq):
                    cz[qi] = zvals[zb + chosen[qi] * l + v]
                # insertion sort of cz[:nq]
                for a in range(1, nq):
                    key = cz[a]
                    b = a - 1
                    while b >= 0 and cz[b] > key:
                        cz[b + 1] = cz[b]
                        b -= 1
                    cz[b + 1] = key
                pos = _tree_furthest(svals, pr, pl, tb, prb, m, cz, nq)
                local = sidx[tb + pos]
                d2 = np.inf
                for qi in range(nq):
                    s = _sqdist(coords, cb + local * d, cb + chosen[qi] * d, d)
                    if s < d2:
                        d2 = s
                if d2 > best_d2 or (d2 == best_d2 and local < best_local):
                    best_local = local
                    best_d2 = d2
            dup = False
            for qi in range(nq):
                if chosen[qi] == best_local:
                    dup = True
            if dup:
                break
            chosen[nq] = best_local
            nq += 1
        for qi in range(nq):
            out[base + qi] = mem_ids[mem_off[r] + chosen[qi]]
        out_cnt[r] = nq


@njit(cache=True)
def _delete_batch(
    pids,
    n_res,
    l,
    mem_off,
    mem_ids,
    toff,
    rank,
    proff,
    pr,
    pl,
    psoff,
    ps,
    alive,
    alive_cnt,
):
    for i in range(pids.shape[0]):
        pid = pids[i]
        for r in range(n_res):
            lo = mem_off[r]
            m = mem_off[r + 1] - lo
            if m == 0:
                continue
            a, b = 0, m
            while a < b:
                mid = (a + b) // 2
                if mem_ids[lo + mid] < pid:
                    a = mid + 1
                else:
                    b = mid
            if a >= m or mem_ids[lo + a] != pid:
                continue
            if not alive[lo + a]:
                continue
            alive[lo + a] = False
            alive_cnt[r] -= 1
            ps[psoff[r] + a] = a + 1
            for v in range(l):
                pos = rank[toff[r] + v * m + a]
                prb = proff[r] + v * (m + 1)
                pr[prb + pos] = pos + 1
                pl[prb + pos + 1] = pos


class FastPeelStructure:
    """Drop-in peel backend: get_coreset / delete_ids / alive.

    Built once from the full dataset; supports deletions only (the
    sensitivity peel never re-inserts).
    """

    supported = HAVE_NUMBA

    def __init__(self, dataset: Dataset, family: CoordinateFamily, projections, k: int):
        if not HAVE_NUMBA:
            raise InputError("compiled engine requires numba")
        self.k = int(k)
        n = dataset.n
        subsets = family.subsets
        n_res = len(subsets)
        self.n_res = n_res
        self.l = int(projections[0].vectors.shape[0]) if n_res else 0

        mem_lists = []
        mem_off = np.zeros(n_res + 1, dtype=np.int64)
        dims = np.zeros(n_res, dtype=np.int64)
        for r, subset in enumerate(subsets):
            idx = np.asarray(subset, dtype=np.int64)
            covered = dataset.mask[:, idx].all(axis=1)
            mids = np.flatnonzero(covered).astype(np.int64)
            mem_lists.append((idx, mids))
            mem_off[r + 1] = mem_off[r] + mids.shape[0]
            dims[r] = idx.shape[0]
        total = int(mem_off[-1])
        mem_ids = np.empty(total, dtype=np.int64)
        coff = np.zeros(n_res + 1, dtype=np.int64)
        zoff = np.zeros(n_res + 1, dtype=np.int64)
        toff = np.zeros(n_res + 1, dtype=np.int64)
        proff = np.zeros(n_res + 1, dtype=np.int64)
        psoff = np.zeros(n_res + 1, dtype=np.int64)
        for r in range(n_res):
            m = mem_off[r + 1] - mem_off[r]
            coff[r + 1] = coff[r] + m * dims[r]
            zoff[r + 1] = zoff[r] + m * self.l
            toff[r + 1] = toff[r] + m * self.l
            proff[r + 1] = proff[r] + (m + 1) * self.l
            psoff[r + 1] = psoff[r] + m + 1
        coords = np.empty(int(coff[-1]))
        zvals = np.empty(int(zoff[-1]))
        svals = np.empty(int(toff[-1]))
        sidx = np.empty(int(toff[-1]), dtype=np.int32)
        rank = np.empty(int(toff[-1]), dtype=np.int32)
        pr = np.empty(int(proff[-1]), dtype=np.int32)
        pl = np.empty(int(proff[-1]), dtype=np.int32)
        ps = np.empty(int(psoff[-1]), dtype=np.int32)
        for r, (idx, mids) in enumerate(mem_lists):
            m = mids.shape[0]
            mem_ids[mem_off[r] : mem_off[r + 1]] = mids
            if m == 0:
                ps[psoff[r]] = 0
                continue
            block = np.ascontiguousarray(dataset.values[mids][:, idx])
            coords[coff[r] : coff[r + 1]] = block.ravel()
            z = project_rows(block, projections[r].vectors)  # (m, l)
            zvals[zoff[r] : zoff[r + 1]] = z.ravel()
            locals_ = np.arange(m)
            for v in range(self.l):
                order = np.lexsort((locals_, z[:, v]))
                tb = int(toff[r] + v * m)
                svals[tb : tb + m] = z[order, v]
                sidx[tb : tb + m] = order
                inv = np.empty(m, dtype=np.int32)
                inv[order] = np.arange(m, dtype=np.int32)
                rank[tb : tb + m] = inv
                prb = int(proff[r] + v * (m + 1))
                pr[prb : prb + m + 1] = np.arange(m + 1, dtype=np.int32)
                pl[prb : prb + m + 1] = np.arange(m + 1, dtype=np.int32)
            ps[psoff[r] : psoff[r + 1]] = np.arange(m + 1, dtype=np.int32)
        self._arrays = dict(
            mem_off=mem_off,
            mem_ids=mem_ids,
            dims=dims,
            coff=coff,
            coords=coords,
            zoff=zoff,
            zvals=zvals,
            toff=toff,
            svals=svals,
            sidx=sidx,
            rank=rank,
            proff=proff,
            pr=pr,
            pl=pl,
            psoff=psoff,
            ps=ps,
        )
        self.alive_mask = np.ones(total, dtype=np.bool_)
        self.alive_cnt = np.array(
            [mem_off[r + 1] - mem_off[r] for r in range(n_res)], dtype=np.int64
        )
        covered_any = np.zeros(n, dtype=np.bool_)
        for _, mids in mem_lists:
            covered_any[mids] = True
        self._point_alive = covered_any
        self._n_alive = int(covered_any.sum())

    @property
    def alive(self) -> int:
        return self._n_alive

    def get_coreset(self) -> np.ndarray:
        a = self._arrays
        out = np.full(self.n_res * (self.k + 1), -1, dtype=np.int64)
        out_cnt = np.zeros(self.n_res, dtype=np.int64)
        if self.n_res:
            _get_all(
                self.k,
                self.n_res,
                self.l,
                a["mem_off"],
                a["mem_ids"],
                a["dims"],
                a["coff"],
                a["coords"],
                a["zoff"],
                a["zvals"],
                a["toff"],
                a["svals"],
                a["sidx"],
                a["proff"],
                a["pr"],
                a["pl"],
                a["psoff"],
                a["ps"],
                self.alive_cnt,
                out,
                out_cnt,
            )
        keep = out[out >= 0]
        return np.unique(keep)

    def delete_ids(self, pids):
        pids = np.asarray(pids, dtype=np.int64)
        if pids.size == 0:
            return
        a = self._arrays
        _delete_batch(
            pids,
            self.n_res,
            self.l,
            a["mem_off"],
            a["mem_ids"],
            a["toff"],
            a["rank"],
            a["proff"],
            a["pr"],
            a["pl"],
            a["psoff"],
            a["ps"],
            self.alive_mask,
            self.alive_cnt,
        )
        for pid in pids:
            if self._point_alive[pid]:
                self._point_alive[pid] = False
                self._n_alive -= 1
