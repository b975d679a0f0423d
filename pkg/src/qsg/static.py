"""Static sabotage: Saboteur fixes one distribution before the play starts."""
from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

import networkx as nx
import numpy as np
from numba import njit

from .core import (
    CapExceeded,
    CostKind,
    CostSpec,
    Distribution,
    ExtendedQsg,
    Lasso,
    Qsg,
    as_fraction,
    evaluate_lasso,
    require_valid,
)

DEFAULT_CAP = 1_000_000
SOURCE = "v_I"


@dataclass(frozen=True)
class StaticResult:
    value: Fraction
    witness_distribution: Distribution
    runner_witness: Lasso


def _graph(game: Qsg) -> nx.DiGraph:
    g = nx.DiGraph()
    g.add_nodes_from(game.vertices)
    g.add_edges_from(game.edges)
    return g


def _reachable_vertices(game: Qsg) -> set:
    return nx.descendants(_graph(game), game.initial_vertex) | {game.initial_vertex}


def reachable_edges(game: Qsg) -> frozenset:
    require_valid(game)
    seen = _reachable_vertices(game)
    return frozenset(e for e in game.edges if e[0] in seen)


def scc_cycle_edges(game: Qsg) -> frozenset:
    require_valid(game)
    comp = {}
    for i, c in enumerate(nx.strongly_connected_components(_graph(game))):
        for v in c:
            comp[v] = i
    return frozenset(e for e in reachable_edges(game) if comp[e[0]] == comp[e[1]])


def _check_static(game: Qsg):
    require_valid(game)
    if game.extended and game.final_vertices:
        raise ValueError("static games have no final vertices")


def _weightable(game: Qsg) -> tuple:
    return tuple(game.domain())


# ------------------------------------------------------------ one-player values

def _weights(game: Qsg, delta) -> dict:
    w = dict.fromkeys(game.edges, 0)
    for e in _weightable(game):
        w[e] = delta[e]
    return w


def _path(adj, src, goal_ok):
    """Shortest vertex path from src to a vertex satisfying goal_ok, over adj."""
    parent = {src: None}
    frontier = [src]
    while frontier:
        nxt = []
        for u in frontier:
            if goal_ok(u):
                out = [u]
                while parent[out[-1]] is not None:
                    out.append(parent[out[-1]])
                return out[::-1]
            for v in adj[u]:
                if v not in parent:
                    parent[v] = u
                    nxt.append(v)
        frontier = nxt
    return None


def _lasso(w, walk, loop_at):
    """Weights of a vertex walk whose last vertex steps back to walk[loop_at]."""
    seq = [w[(walk[i], walk[i + 1])] for i in range(len(walk) - 1)]
    seq.append(w[(walk[-1], walk[loop_at])])
    return Lasso(tuple(seq[:loop_at]), tuple(seq[loop_at:]))


def _cycle_in(sub: nx.DiGraph):
    """Some strongly connected vertex set of sub that carries a cycle, or None."""
    for c in nx.strongly_connected_components(sub):
        v = next(iter(c))
        if len(c) > 1 or sub.has_edge(v, v):
            return c
    return None


def _join(game, w, adj_full, cycle_vertices):
    """Walk from the initial vertex to a given cycle, then around it."""
    cyc = cycle_vertices
    head = _path(adj_full, game.initial_vertex, lambda u: u == cyc[0])
    walk = head + cyc[1:]
    return _lasso(w, walk, len(head) - 1)


def _walk_on(sub: nx.DiGraph, comp):
    """A simple cycle inside a strongly connected vertex set of sub."""
    v = next(iter(sorted(comp)))
    if sub.has_edge(v, v):
        return [v]
    inner = sub.subgraph(comp)
    for u in inner.successors(v):
        back = nx.shortest_path(inner, u, v)
        return [v] + back[:-1]
    raise AssertionError("component has no cycle")


def _bottleneck(game, w, kind):
    """Least T leaving an admissible infinite play inside the edges of weight <= T."""
    g = _graph(game)
    seen = _reachable_vertices(game)
    for T in sorted({w[e] for e in game.edges if e[0] in seen}):
        sub = nx.DiGraph([e for e in game.edges if w[e] <= T and e[0] in seen])
        if kind is CostKind.SUP:
            # the whole play, not only its tail, must stay below T
            if game.initial_vertex not in sub:
                continue
            sub = sub.subgraph(nx.descendants(sub, game.initial_vertex) | {game.initial_vertex})
        comp = _cycle_in(sub)
        if comp is None:
            continue
        via = sub if kind is CostKind.SUP else g
        adj = {v: list(via.successors(v)) if v in via else [] for v in g}
        return T, _join(game, w, adj, _walk_on(sub, comp))
    raise AssertionError("deadlock-free arena without a cycle")


def _mean(game, w):
    """Minimum reachable cycle mean and a cycle achieving it (Karp, then tight edges)."""
    g = _graph(game).subgraph(_reachable_vertices(game))
    best, best_comp = None, None
    for comp in nx.strongly_connected_components(g):
        nodes = sorted(comp)
        first = nodes[0]
        if len(nodes) == 1 and not g.has_edge(first, first):
            continue
        inner = [(a, b) for a, b in g.subgraph(nodes).edges]
        n = len(nodes)
        D = [dict.fromkeys(nodes) for _ in range(n + 1)]
        D[0][first] = 0
        for k in range(1, n + 1):
            for a, b in inner:
                if D[k - 1][a] is not None:
                    c = D[k - 1][a] + w[(a, b)]
                    if D[k][b] is None or c < D[k][b]:
                        D[k][b] = c
        mu = None
        for v in nodes:
            if D[n][v] is None:
                continue
            worst = max(Fraction(D[n][v] - D[k][v], n - k) for k in range(n) if D[k][v] is not None)
            if mu is None or worst < mu:
                mu = worst
        if best is None or mu < best:
            best, best_comp = mu, (nodes, inner)
    nodes, inner = best_comp
    # shortest distances under reduced weights; a cycle of tight edges has mean exactly best
    dist = dict.fromkeys(nodes, Fraction(0))
    for _ in range(len(nodes)):
        for a, b in inner:
            c = dist[a] + w[(a, b)] - best
            if c < dist[b]:
                dist[b] = c
    tight = nx.DiGraph([(a, b) for a, b in inner if dist[a] + w[(a, b)] - best == dist[b]])
    comp = _cycle_in(tight)
    cyc = _walk_on(tight, comp)
    adj = {v: list(_graph(game).successors(v)) for v in game.vertices}
    return best, _join(game, w, adj, cyc)


def _discounted(game, w, lam):
    """Policy iteration with exact lasso evaluation."""
    seen = sorted(_reachable_vertices(game))
    succ = {v: sorted(b for a, b in game.edges if a == v) for v in seen}
    policy = {v: succ[v][0] for v in seen}

    def evaluate():
        vals, walks = {}, {}
        for v in seen:
            walk, where = [v], {v: 0}
            while policy[walk[-1]] not in where:
                where[policy[walk[-1]]] = len(walk)
                walk.append(policy[walk[-1]])
            at = where[policy[walk[-1]]]
            walks[v] = (walk, at)
            vals[v] = evaluate_lasso(CostSpec(CostKind.DISC, lam), _lasso(w, walk, at))
        return vals, walks

    while True:
        vals, walks = evaluate()
        changed = False
        for v in seen:
            cur = w[(v, policy[v])] + lam * vals[policy[v]]
            for u in succ[v]:
                if w[(v, u)] + lam * vals[u] < cur:
                    policy[v], cur, changed = u, w[(v, u)] + lam * vals[u], True
        if not changed:
            walk, at = walks[game.initial_vertex]
            return vals[game.initial_vertex], _lasso(w, walk, at)


def _one_player(game: Qsg, delta, cost: CostSpec):
    w = _weights(game, delta)
    kind = cost.kind
    g = _graph(game)
    adj = {v: list(g.successors(v)) for v in g}
    if kind in (CostKind.INF, CostKind.LIMINF):
        pool = reachable_edges(game) if kind is CostKind.INF else scc_cycle_edges(game)
        e = min(sorted(pool), key=lambda x: w[x])
        if kind is CostKind.INF:
            # reach e, cross it, then keep walking until a vertex repeats
            walk = _path(adj, game.initial_vertex, lambda u: u == e[0])
            nxt = e[1]
            while nxt not in walk:
                walk.append(nxt)
                nxt = adj[nxt][0]
            return Fraction(w[e]), _lasso(w, walk, walk.index(nxt))
        back = nx.shortest_path(g, e[1], e[0]) if e[0] != e[1] else [e[0]]
        cyc = [e[0]] + back[:-1] if e[0] != e[1] else [e[0]]
        return Fraction(w[e]), _join(game, w, adj, cyc)
    if kind in (CostKind.SUP, CostKind.LIMSUP):
        T, lasso = _bottleneck(game, w, kind)
        return Fraction(T), lasso
    if kind is CostKind.AVG:
        return _mean(game, w)
    return _discounted(game, w, cost.lam)


def one_player_value(game: Qsg, delta, cost=None) -> Fraction:
    """Runner's optimal cost when the distribution never changes."""
    _check_static(game)
    cost = game.cost if cost is None else CostSpec.parse(cost)
    return _one_player(game, Distribution(delta), cost)[0]


# ------------------------------------------------------------ closed forms

def static_value_closed_form(game: Qsg, kind=None) -> StaticResult:
    """Inf and LimInf: spread the budget evenly over the edges Runner can use."""
    _check_static(game)
    kind = game.cost.kind if kind is None else CostKind(kind)
    if kind not in (CostKind.INF, CostKind.LIMINF):
        raise ValueError("closed form exists for Inf and LimInf only")
    pool = sorted(reachable_edges(game) if kind is CostKind.INF else scc_cycle_edges(game))
    safe = set(game.safe_edges) if game.extended else set()
    B = game.budget
    if any(e in safe for e in pool):
        value, delta = 0, Distribution()
    else:
        value, extra = divmod(B, len(pool))
        delta = Distribution({e: value + (i < extra) for i, e in enumerate(pool) if value + (i < extra)})
    cost = CostSpec(kind)
    got, lasso = _one_player(game, delta, cost)
    assert got == value
    return StaticResult(Fraction(value), delta, lasso)


# ------------------------------------------------------------ enumeration

def _vectors(m: int, B: int) -> np.ndarray:
    """All vectors of length m with sum <= B, in lexicographic order."""
    if B == 0:
        return np.zeros((1, m), dtype=np.int64)
    rows = np.array(list(itertools.combinations_with_replacement(range(m + 1), B)), dtype=np.int64)
    counts = np.zeros((len(rows), m + 1), dtype=np.int64)
    for j in range(B):
        np.add.at(counts, (np.arange(len(rows)), rows[:, j]), 1)
    counts = counts[:, :m]
    order = np.lexsort(counts.T[::-1])
    return counts[order]


@njit(cache=True)
def _bottleneck_batch(vecs, src, dst, wcol, n, start, reach, sup):
    # per distribution: least threshold whose sub-arena keeps an infinite play
    out = np.empty(vecs.shape[0], dtype=np.int64)
    E = src.size
    for r in range(vecs.shape[0]):
        w = np.zeros(E, dtype=np.int64)
        for j in range(E):
            if wcol[j] >= 0:
                w[j] = vecs[r, wcol[j]]
        top = 0
        for j in range(E):
            if reach[src[j]] and w[j] > top:
                top = w[j]
        out[r] = top
        for T in range(top + 1):
            alive = reach.copy()
            deg = np.zeros(n, dtype=np.int64)
            for j in range(E):
                if w[j] <= T and alive[src[j]] and alive[dst[j]]:
                    deg[src[j]] += 1
            # peel vertices without a surviving successor
            stack = np.empty(n, dtype=np.int64)
            top_ = 0
            for v in range(n):
                if alive[v] and deg[v] == 0:
                    alive[v] = False
                    stack[top_] = v
                    top_ += 1
            while top_:
                top_ -= 1
                v = stack[top_]
                for j in range(E):
                    if dst[j] == v and w[j] <= T and alive[src[j]]:
                        deg[src[j]] -= 1
                        if deg[src[j]] == 0:
                            alive[src[j]] = False
                            stack[top_] = src[j]
                            top_ += 1
            ok = False
            if sup:
                ok = alive[start]
            else:
                for v in range(n):
                    if alive[v]:
                        ok = True
                        break
            if ok:
                out[r] = T
                break
    return out


def static_value(game: Qsg, cap: int = DEFAULT_CAP) -> StaticResult:
    """Val_stat by enumerating distributions; ties keep the lexicographically first."""
    _check_static(game)
    cost = game.cost
    kind = cost.kind
    if kind in (CostKind.INF, CostKind.LIMINF):
        return static_value_closed_form(game, kind)
    keys = _weightable(game)
    count = math.comb(len(keys) + game.budget, game.budget)
    if count > cap:
        raise CapExceeded("distribution", count, cap)
    vecs = _vectors(len(keys), game.budget)
    if kind in (CostKind.SUP, CostKind.LIMSUP):
        idx = {v: i for i, v in enumerate(game.vertices)}
        col = {e: i for i, e in enumerate(keys)}
        src = np.array([idx[a] for a, _ in game.edges], dtype=np.int64)
        dst = np.array([idx[b] for _, b in game.edges], dtype=np.int64)
        wcol = np.array([col.get(e, -1) for e in game.edges], dtype=np.int64)
        seen = _reachable_vertices(game)
        reach = np.array([v in seen for v in game.vertices], dtype=np.bool_)
        vals = _bottleneck_batch(vecs, src, dst, wcol, len(game.vertices), idx[game.initial_vertex],
                                 reach, kind is CostKind.SUP)
        r = int(np.argmax(vals))
        delta = Distribution({keys[j]: int(x) for j, x in enumerate(vecs[r]) if x})
        value, lasso = _one_player(game, delta, cost)
        assert value == vals[r]
        return StaticResult(value, delta, lasso)
    best = None
    for vec in vecs:
        delta = Distribution({keys[j]: int(x) for j, x in enumerate(vec) if x})
        value, lasso = _one_player(game, delta, cost)
        if best is None or value > best.value:
            best = StaticResult(value, delta, lasso)
    return best


def static_threshold(game: Qsg, T, cap: int = DEFAULT_CAP) -> bool:
    T = as_fraction(T)
    if T < 0:
        raise ValueError("threshold must be non-negative")
    return static_value(game, cap).value <= T


# ------------------------------------------------------------ feedback arc sets

def _fresh(name, taken):
    while name in taken:
        name += "'"
    return name


def fas_to_qsg(graph, k: int, kind="LimSup", lam=None, *, repair_sinks: bool = False):
    """Static game whose value is positive exactly when graph has a feedback arc set of size k.

    graph: a networkx DiGraph, or a (vertices, edges) pair, or an edge list.
    Sinks make the arena deadlock; with repair_sinks they get self-loops,
    which every feedback arc set then has to contain.
    """
    if isinstance(graph, nx.DiGraph):
        vertices, edges = list(graph.nodes), list(graph.edges)
    elif isinstance(graph, tuple) and len(graph) == 2 and not isinstance(graph[0], str):
        vertices, edges = list(graph[0]), list(graph[1])
    else:
        edges = list(graph)
        vertices = sorted({x for e in edges for x in e})
    vertices = [str(v) for v in vertices]
    edges = sorted({(str(a), str(b)) for a, b in edges})
    if not 0 <= k <= len(edges):
        raise ValueError("k must lie between 0 and the number of edges")
    sinks = sorted(set(vertices) - {a for a, _ in edges})
    if sinks:
        if not repair_sinks:
            raise ValueError(f"graph has sinks {sinks}; pass repair_sinks=True to add self-loops")
        warnings.warn(f"adding self-loops to sinks {sinks}; feedback sets must now cover them")
        edges = sorted(set(edges) | {(v, v) for v in sinks})
    cost = CostSpec.parse(kind, lam)
    src = _fresh(SOURCE, set(vertices))
    links = [(src, v) for v in vertices]
    common = dict(vertices=tuple(vertices) + (src,), edges=tuple(edges + links), budget=k,
                  initial_vertex=src, cost=cost)
    if cost.kind in (CostKind.SUP, CostKind.DISC):
        return ExtendedQsg(**common, safe_edges=tuple(links))
    if cost.kind not in (CostKind.LIMSUP, CostKind.AVG):
        raise ValueError("the reduction targets LimSup, Avg, Sup or Disc")
    return Qsg(**common)
