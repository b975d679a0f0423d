"""Implicit configuration games for qualitative decisions on larger arenas.

Distributions are stored as sorted multisets of `budget` symbols, where symbol
`m` (one past the last key) stands for the undistributed reserve. Moving one
unit is replacing one symbol, so the redistribution graph is symmetric and can
be built with array operations. States are (vertex, distribution) pairs packed
as ``vertex * D + d``; the fixpoints run in compiled loops.
"""
from __future__ import annotations

import itertools
import math

import numba
import numpy as np

from .core import CapExceeded, Qsg

DEFAULT_CAP = 20_000_000  # vertex-distribution pairs


def _rank_table(symbols: int, budget: int) -> np.ndarray:
    t = np.zeros((symbols + budget + 1, budget + 1), dtype=np.int64)
    for x in range(symbols + budget + 1):
        for j in range(budget + 1):
            t[x, j] = math.comb(x, j)
    return t


def _ranks(rows: np.ndarray, table: np.ndarray) -> np.ndarray:
    r = np.zeros(rows.shape[:-1], dtype=np.int64)
    for i in range(rows.shape[-1]):
        r += table[rows[..., i] + i, i + 1]
    return r


@numba.njit(cache=True)
def _swap_ranks(rows, m, table):
    """Ranks of every multiset obtained by replacing one symbol of each sorted row."""
    n, B = rows.shape
    out = np.empty((n, B * (m + 1)), dtype=np.int64)
    buf = np.empty(B, dtype=np.int64)
    for r in range(n):
        k = 0
        for p in range(B):
            for sym in range(m + 1):
                # drop position p, insert sym, keep the row sorted
                j = 0
                placed = False
                for i in range(B):
                    if i == p:
                        continue
                    if not placed and sym <= rows[r, i]:
                        buf[j] = sym
                        j += 1
                        placed = True
                    buf[j] = rows[r, i]
                    j += 1
                if not placed:
                    buf[j] = sym
                rank = 0
                for i in range(B):
                    rank += table[buf[i] + i, i + 1]
                out[r, k] = rank
                k += 1
    return out


class MultisetSpace:
    """All distributions of `budget` unit-moves over `m` keys, plus neighbour lists."""

    def __init__(self, m: int, budget: int):
        self.m, self.budget = m, budget
        B = budget
        if B == 0:
            self.rows = np.zeros((1, 0), dtype=np.int16)
        else:
            self.rows = np.array(list(itertools.combinations_with_replacement(range(m + 1), B)), dtype=np.int16)
        D = len(self.rows)
        self.D = D
        counts = np.zeros((D, m + 1), dtype=np.int16)
        for p in range(B):
            np.add.at(counts, (np.arange(D), self.rows[:, p].astype(np.int64)), 1)
        self.counts = counts[:, :m]
        if B == 0:
            self.r_ptr = np.arange(2, dtype=np.int64)
            self.r_idx = np.zeros(1, dtype=np.int32)
            return
        table = _rank_table(m + 1, B)
        rank = _ranks(self.rows.astype(np.int64), table)
        where = np.empty(int(rank.max()) + 1, dtype=np.int64)
        where[rank] = np.arange(D)
        ptr = [0]
        chunks = []
        step = max(1, 2_000_000 // max(1, B * B * (m + 1)))
        for lo in range(0, D, step):
            rows = self.rows[lo:lo + step]
            n = len(rows)
            idx = where[_swap_ranks(rows.astype(np.int64), m, table)]
            idx.sort(axis=1)
            keep = np.ones_like(idx, dtype=bool)
            keep[:, 1:] = idx[:, 1:] != idx[:, :-1]
            lens = keep.sum(axis=1)
            chunks.append(idx[keep].astype(np.int32))
            ptr.extend((ptr[-1] + np.cumsum(lens)).tolist())
        self.r_ptr = np.array(ptr, dtype=np.int64)
        self.r_idx = np.concatenate(chunks)

    def index_of(self, vec) -> int:
        """Row index of a distribution given as a per-key unit vector."""
        syms = []
        for i, n in enumerate(vec):
            syms += [i] * n
        syms += [self.m] * (self.budget - len(syms))
        if self.budget == 0:
            return 0
        table = _rank_table(self.m + 1, self.budget)
        target = _ranks(np.array(syms, dtype=np.int64), table)
        # rows are in lexicographic order; search on ranks
        ranks = _ranks(self.rows.astype(np.int64), table)
        hit = np.nonzero(ranks == target)[0]
        return int(hit[0])

    def vector(self, d: int) -> tuple:
        return tuple(int(x) for x in self.counts[d])


@numba.njit(cache=True)
def _attractor(P, nV, D, out_ptr, out_dst, in_ptr, in_src, in_eid, is_final,
               r_ptr, r_idx, flag, alive_min, alive_max, tgt_min, tgt_max):
    """Attractor of player P (0 Runner, 1 Saboteur) to flagged crossings or target states.

    Runner states (v,d), Saboteur nodes (v',d) keyed by arrival vertex. Flags live
    on (edge, d). Final vertices are absorbing: their node only loops to itself.
    Returns in_min, in_max and, for Saboteur nodes, the witness successor.
    """
    N = nV * D
    in_min = np.zeros(N, dtype=np.bool_)
    in_max = np.zeros(N, dtype=np.bool_)
    cnt_min = np.zeros(N, dtype=np.int32)
    cnt_max = np.zeros(N, dtype=np.int32)
    wit = np.full(N, -1, dtype=np.int64)
    queue = np.empty(2 * N, dtype=np.int64)  # encoded: id*2 + (0 min / 1 max)
    qh = 0
    qt = 0
    for v in range(nV):
        for d in range(D):
            s = v * D + d
            if alive_min[s]:
                if tgt_min[s]:
                    in_min[s] = True
                    queue[qt] = s * 2
                    qt += 1
                    continue
                nopt = 0
                nflag = 0
                if is_final[v]:
                    if alive_max[s]:
                        nopt = 1
                else:
                    for k in range(out_ptr[v], out_ptr[v + 1]):
                        t = out_dst[k] * D + d
                        if alive_max[t]:
                            nopt += 1
                            if flag[k, d]:
                                nflag += 1
                if P == 0:
                    if nflag > 0:
                        in_min[s] = True
                        queue[qt] = s * 2
                        qt += 1
                else:
                    cnt_min[s] = nopt - nflag
                    if nopt - nflag == 0:
                        in_min[s] = True
                        queue[qt] = s * 2
                        qt += 1
            if alive_max[s]:
                if tgt_max[s]:
                    in_max[s] = True
                    queue[qt] = s * 2 + 1
                    qt += 1
                    continue
                if P == 0:
                    c = 0
                    if is_final[v]:
                        if alive_min[s]:
                            c = 1
                    else:
                        for j in range(r_ptr[d], r_ptr[d + 1]):
                            if alive_min[v * D + r_idx[j]]:
                                c += 1
                    cnt_max[s] = c
    while qh < qt:
        code = queue[qh]
        qh += 1
        s = code // 2
        v = s // D
        d = s - v * D
        if code % 2 == 0:
            # Runner state entered: update Saboteur nodes leading to it
            if is_final[v]:
                lo = 0
                hi = 1
            else:
                lo = r_ptr[d]
                hi = r_ptr[d + 1]
            for j in range(lo, hi):
                d0 = d if is_final[v] else r_idx[j]
                t = v * D + d0
                if not alive_max[t] or in_max[t]:
                    continue
                if P == 1:
                    in_max[t] = True
                    wit[t] = s
                    queue[qt] = t * 2 + 1
                    qt += 1
                else:
                    cnt_max[t] -= 1
                    if cnt_max[t] == 0:
                        in_max[t] = True
                        queue[qt] = t * 2 + 1
                        qt += 1
        else:
            # Saboteur node entered: update the Runner states that reach it
            if is_final[v]:
                u = s
                if alive_min[u] and not in_min[u]:
                    if P == 0:
                        in_min[u] = True
                        queue[qt] = u * 2
                        qt += 1
                    else:
                        cnt_min[u] -= 1
                        if cnt_min[u] == 0:
                            in_min[u] = True
                            queue[qt] = u * 2
                            qt += 1
            for k in range(in_ptr[v], in_ptr[v + 1]):
                u = in_src[k] * D + d
                if not alive_min[u] or in_min[u]:
                    continue
                if flag[in_eid[k], d]:
                    continue
                if P == 0:
                    in_min[u] = True
                    queue[qt] = u * 2
                    qt += 1
                else:
                    cnt_min[u] -= 1
                    if cnt_min[u] == 0:
                        in_min[u] = True
                        queue[qt] = u * 2
                        qt += 1
    return in_min, in_max, wit


class ProductGame:
    """A QSG (optionally extended) whose configuration game is kept implicit."""

    def __init__(self, game: Qsg, cap: int = DEFAULT_CAP):
        if game.move_granularity != 1:
            raise ValueError("the implicit product needs move granularity 1")
        self.game = game
        self.vertices = list(game.vertices)
        vid = {v: i for i, v in enumerate(self.vertices)}
        self.vid = vid
        self.edges = list(game.edges)
        self.keys = list(game.domain())
        kpos = {k: i for i, k in enumerate(self.keys)}
        nV = len(self.vertices)
        D = math.comb(len(self.keys) + game.budget, game.budget)
        if D * nV > cap:
            raise CapExceeded("vertex-distribution pair", D * nV, cap)
        self.space = MultisetSpace(len(self.keys), game.budget)
        self.D = self.space.D
        self.nV = nV
        order = sorted(range(len(self.edges)), key=lambda i: (vid[self.edges[i][0]], vid[self.edges[i][1]]))
        self.edges = [self.edges[i] for i in order]
        src = np.array([vid[a] for a, _ in self.edges], dtype=np.int64)
        dst = np.array([vid[b] for _, b in self.edges], dtype=np.int64)
        self.out_ptr = np.searchsorted(src, np.arange(nV + 1)).astype(np.int64)
        self.out_dst = dst
        by_dst = np.argsort(dst, kind="stable")
        self.in_ptr = np.searchsorted(dst[by_dst], np.arange(nV + 1)).astype(np.int64)
        self.in_src = src[by_dst]
        self.in_eid = by_dst.astype(np.int64)
        finals = set(game.final_vertices) if game.extended else set()
        self.is_final = np.array([v in finals for v in self.vertices], dtype=np.bool_)
        counts = self.space.counts
        E = len(self.edges)
        self.weight = np.zeros((E, self.D), dtype=np.int16)
        for i, e in enumerate(self.edges):
            if e in kpos:
                self.weight[i] = counts[:, kpos[e]]
        # units on the arrival vertex, if it is final
        self.marked = np.zeros((E, self.D), dtype=np.bool_)
        for i, (_, b) in enumerate(self.edges):
            if b in finals:
                self.marked[i] = counts[:, kpos[b]] > 0
        vec = [game.initial_distribution[k] for k in self.keys]
        self.init_d = self.space.index_of(vec)
        self.init_v = vid[game.initial_vertex]

    @property
    def size(self) -> int:
        return self.nV * self.D

    def _all(self):
        return np.ones(self.size, dtype=np.bool_)

    def _none(self):
        return np.zeros(self.size, dtype=np.bool_)

    def attractor(self, player, flag, alive_min=None, alive_max=None, tgt_min=None, tgt_max=None):
        a_min = self._all() if alive_min is None else alive_min
        a_max = self._all() if alive_max is None else alive_max
        t_min = self._none() if tgt_min is None else tgt_min
        t_max = self._none() if tgt_max is None else tgt_max
        return _attractor(player, self.nV, self.D, self.out_ptr, self.out_dst, self.in_ptr,
                          self.in_src, self.in_eid, self.is_final, self.space.r_ptr,
                          self.space.r_idx, flag, a_min, a_max, t_min, t_max)

    def buchi(self, player, flag):
        """Region where `player` forces infinitely many flagged crossings."""
        a_min, a_max = self._all(), self._all()
        while True:
            f_min, f_max, _ = self.attractor(player, flag, a_min, a_max)
            tr_min = a_min & ~f_min
            tr_max = a_max & ~f_max
            if not tr_min.any() and not tr_max.any():
                return a_min, a_max
            noflag = np.zeros_like(flag)
            o_min, o_max, _ = self.attractor(1 - player, noflag, a_min, a_max, tr_min, tr_max)
            a_min = a_min & ~o_min
            a_max = a_max & ~o_max

    def initial_index(self) -> int:
        return self.init_v * self.D + self.init_d

    # flag builders
    # weights are integers, so comparing with floor(T) avoids elementwise Fraction arithmetic
    def above(self, T) -> np.ndarray:
        return self.weight > math.floor(T)

    def at_most(self, T) -> np.ndarray:
        return self.weight <= math.floor(T)

    def unsafe(self) -> np.ndarray:
        return (self.weight > 0) | self.marked
