"""Configuration-space encoding of a QSG as a two-player weighted game."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .core import (
    CapExceeded,
    CostKind,
    DistributionSpace,
    Qsg,
    require_valid,
)

DUPLICATED = "per-half-step-duplicated"
ROUNDS = "discounted-rounds"
DEFAULT_CAP = 5_000_000
BAD = "bad-sink"


class WeightedGame:
    """Finite bipartite-ish arena; states are integers internally, labels externally."""

    def __init__(self, labels, is_max, succ, initial, discount_mode=DUPLICATED):
        self.labels = list(labels)
        self.index = {lab: i for i, lab in enumerate(self.labels)}
        self.is_max = list(is_max)
        self.succ = [list(s) for s in succ]  # per state: list of (target id, weight)
        self.initial = initial
        self.discount_mode = discount_mode

    @classmethod
    def from_edges(cls, min_states, max_states, transitions, initial, discount_mode=DUPLICATED):
        labels = list(min_states) + list(max_states)
        is_max = [False] * len(min_states) + [True] * len(max_states)
        idx = {lab: i for i, lab in enumerate(labels)}
        if len(idx) != len(labels):
            raise ValueError("state sets must be disjoint")
        succ = [[] for _ in labels]
        for s, t, w in transitions:
            succ[idx[s]].append((idx[t], w))
        for i, out in enumerate(succ):
            if not out:
                raise ValueError(f"state {labels[i]!r} has no outgoing transition")
        return cls(labels, is_max, succ, idx[initial], discount_mode)

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def min_states(self) -> frozenset:
        return frozenset(l for l, m in zip(self.labels, self.is_max) if not m)

    @property
    def max_states(self) -> frozenset:
        return frozenset(l for l, m in zip(self.labels, self.is_max) if m)

    @property
    def transitions(self) -> set:
        L = self.labels
        return {(L[s], L[t], w) for s, out in enumerate(self.succ) for t, w in out}

    @property
    def initial_state(self):
        return self.labels[self.initial]

    @property
    def max_weight(self) -> int:
        return max((w for out in self.succ for _, w in out), default=0)

    def transition_count(self) -> int:
        return sum(len(out) for out in self.succ)

    def predecessors(self):
        pred = [[] for _ in range(self.n)]
        for s, out in enumerate(self.succ):
            for t, w in out:
                pred[t].append((s, w))
        return pred


def encode(game: Qsg, cap: int = DEFAULT_CAP) -> WeightedGame:
    """Reachable part of the configuration game, discovered breadth-first."""
    require_valid(game)
    if game.extended:
        raise ValueError("encode expects a plain QSG; use encode_safety for extended games")
    disc = game.cost.kind is CostKind.DISC
    space = DistributionSpace(game.domain(), game.budget, game.move_granularity)
    out_edges = {v: [] for v in game.vertices}
    for e in game.edges:
        out_edges[e[0]].append(e)
    epos = space.pos

    labels, is_max, succ = [], [], []
    ids = {}

    def state(node, mx):
        i = ids.get(node)
        if i is None:
            i = len(labels)
            if i >= cap:
                raise CapExceeded("reachable state", i + 1, cap)
            ids[node] = i
            labels.append(node)
            is_max.append(mx)
            succ.append(None)
            queue.append(i)
        return i

    queue = deque()
    start = (game.initial_vertex, space.vector(game.initial_distribution))
    init = state(start, False)
    while queue:
        i = queue.popleft()
        node = labels[i]
        if not is_max[i]:
            v, d = node
            succ[i] = [(state((e, d), True), d[epos[e]]) for e in out_edges[v]]
        else:
            e, d = node
            w = 0 if disc else d[epos[e]]
            succ[i] = [(state((e[1], d2), False), w) for d2 in space.neighbours(d)]
    labels = [(a, space.dist(d)) for a, d in labels]
    return WeightedGame(labels, is_max, succ, init, ROUNDS if disc else DUPLICATED)


@dataclass
class SafetyGame:
    game: WeightedGame
    bad: frozenset  # state ids
    win: frozenset

    @property
    def bad_states(self):
        return frozenset(self.game.labels[i] for i in self.bad)

    @property
    def win_states(self):
        return frozenset(self.game.labels[i] for i in self.win)


def encode_safety(game: Qsg, cap: int = DEFAULT_CAP) -> SafetyGame:
    """Explicit safety game: Runner must never cross budget nor reach a marked final vertex."""
    require_valid(game)
    finals = set(game.final_vertices) if game.extended else set()
    space = DistributionSpace(game.domain(), game.budget, game.move_granularity)
    epos = space.pos
    fpos = {f: epos[f] for f in finals}
    out_edges = {v: [] for v in game.vertices}
    for e in game.edges:
        out_edges[e[0]].append(e)

    labels, is_max, succ = [], [], []
    ids = {}
    queue = deque()
    bad, win = set(), set()

    def state(node, mx):
        i = ids.get(node)
        if i is None:
            i = len(labels)
            if i >= cap:
                raise CapExceeded("reachable state", i + 1, cap)
            ids[node] = i
            labels.append(node)
            is_max.append(mx)
            succ.append(None)
            queue.append(i)
        return i

    sink = state(BAD, True)
    bad.add(sink)
    start = (game.initial_vertex, space.vector(game.initial_distribution))
    init = state(start, False)
    while queue:
        i = queue.popleft()
        node = labels[i]
        if node == BAD:
            succ[i] = [(i, 0)]
        elif not is_max[i]:
            v, d = node
            if v in finals:  # only reachable as the initial state
                succ[i] = [(i, 0)]
                (bad if d[fpos[v]] else win).add(i)
                continue
            out = []
            for e in out_edges[v]:
                w = d[epos[e]] if e in epos else 0
                out.append((sink, w) if w else (state((e, d), True), 0))
            succ[i] = out
            if all(t == sink for t, _ in out):
                bad.add(i)
        else:
            e, d = node
            if e[1] in finals:
                succ[i] = [(i, 0)]
                (bad if d[fpos[e[1]]] else win).add(i)
            else:
                succ[i] = [(state((e[1], d2), False), 0) for d2 in space.neighbours(d)]
    labs = [lab if lab == BAD else (lab[0], space.dist(lab[1])) for lab in labels]
    return SafetyGame(WeightedGame(labs, is_max, succ, init), frozenset(bad), frozenset(win))
