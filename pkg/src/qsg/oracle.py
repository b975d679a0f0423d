"""Brute-force ground truth, written independently of the solver code paths.

Only the lasso evaluator is shared with the solvers. Graph traversals, SCCs and
cycle means are re-implemented here in plain Python.

Positional strategies are assumed sufficient for both players on the five
undiscounted costs. When enumerating every strategy pair is out of reach, the
oracle enumerates one side against exact one-player best responses, or, given
candidate strategies, certifies them: the best response to a Max strategy
bounds the value from below, the best response to a Min strategy from above.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .core import (
    CapExceeded,
    CostKind,
    CostSpec,
    Lasso,
    Qsg,
    as_fraction,
    evaluate_lasso,
    redistributions,
    Distribution,
)

DEFAULT_CAP = 20_000
ONE_SIDED_SHARE = 100  # one-sided enumeration when the smaller side is at most cap // this


@dataclass
class OracleReport:
    value_maxmin: Fraction
    value_minmax: Fraction
    agree: bool
    witness: tuple = field(repr=False)  # (Min strategy, Max strategy) as label maps
    method: str = "pairs"  # pairs | one-sided | certificate
    exact: bool = True

    @property
    def value(self) -> Fraction:
        if not self.agree:
            raise ValueError("oracle bounds do not meet")
        return self.value_maxmin


@dataclass(frozen=True)
class Interval:
    lo: Fraction
    hi: Fraction
    estimate: Fraction

    def __contains__(self, x) -> bool:
        return self.lo <= x <= self.hi


# ------------------------------------------------------------------ graph helpers

def _scc(nodes, adj):
    """Iterative Tarjan; returns a list of components (lists of nodes)."""
    index, low, on, stack, comps = {}, {}, set(), [], []
    counter = 0
    for root in nodes:
        if root in index:
            continue
        work = [(root, iter(adj.get(root, ())))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on.add(w)
                    work.append((w, iter(adj.get(w, ()))))
                    advanced = True
                    break
                if w in on:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                comps.append(comp)
    return comps


def _reach(start, adj):
    seen = {start}
    todo = [start]
    while todo:
        v = todo.pop()
        for w in adj.get(v, ()):
            if w not in seen:
                seen.add(w)
                todo.append(w)
    return seen


def _cycle_edges(start, edges):
    """Edges lying on some cycle reachable from start."""
    adj = {}
    for u, v, _ in edges:
        adj.setdefault(u, []).append(v)
    live = _reach(start, adj)
    sub = {u: [v for v in adj.get(u, ()) if v in live] for u in live}
    comp_of = {}
    for i, c in enumerate(_scc(sorted(live, key=repr), sub)):
        for v in c:
            comp_of[v] = i
    return [(u, v, w) for u, v, w in edges if u in live and comp_of[u] == comp_of[v]]


def _has_infinite_path(start, edges):
    """Is there an infinite walk from start using only the given edges?"""
    if not edges:
        return False
    return bool(_cycle_edges(start, edges))


def _karp(nodes, edges):
    """Minimum cycle mean of a strongly connected graph, exact."""
    pos = {v: i for i, v in enumerate(nodes)}
    m = len(nodes)
    inf = None
    D = [[inf] * m for _ in range(m + 1)]
    D[0][0] = 0
    for k in range(1, m + 1):
        prev, cur = D[k - 1], D[k]
        for u, v, w in edges:
            a = prev[pos[u]]
            if a is None:
                continue
            b = a + w
            j = pos[v]
            if cur[j] is None or b < cur[j]:
                cur[j] = b
    best = None
    for j in range(m):
        if D[m][j] is None:
            continue
        worst = None
        for k in range(m):
            if D[k][j] is None:
                continue
            r = Fraction(D[m][j] - D[k][j], m - k)
            if worst is None or r > worst:
                worst = r
        if best is None or worst < best:
            best = worst
    return best


def _best_response(kind, start, edges, minimize):
    """Optimal value of a one-player graph (edges: (u, v, weight)) for the controller."""
    sgn = 1 if minimize else -1
    adj = {}
    for u, v, _ in edges:
        adj.setdefault(u, []).append(v)
    live = _reach(start, adj)
    edges = [e for e in edges if e[0] in live]
    weights = sorted({w for _, _, w in edges}, reverse=not minimize)

    def within(T):
        return [e for e in edges if sgn * e[2] <= sgn * T]

    if kind is CostKind.AVG:
        sub = {u: [v for v in adj.get(u, ()) if v in live] for u in live}
        best = None
        for comp in _scc(sorted(live, key=repr), sub):
            cs = set(comp)
            inner = [(u, v, sgn * w) for u, v, w in edges if u in cs and v in cs]
            if not inner:
                continue
            val = _karp(comp, inner)
            best = val if best is None or val < best else best
        return sgn * best
    if (kind is CostKind.INF and minimize) or (kind is CostKind.SUP and not minimize):
        return Fraction(weights[0])
    if kind in (CostKind.SUP, CostKind.INF):
        # bottleneck over infinite walks from start
        for T in weights:
            if _has_infinite_path(start, within(T)):
                return Fraction(T)
    cyc = _cycle_edges(start, edges)
    if (kind is CostKind.LIMINF and minimize) or (kind is CostKind.LIMSUP and not minimize):
        return Fraction(min(sgn * w for _, _, w in cyc) * sgn)
    for T in weights:
        if _has_cycle(live, within(T)):
            return Fraction(T)
    raise AssertionError("no cycle found")


def _has_cycle(nodes, edges):
    """Does the subgraph on `nodes` with these edges contain a cycle?"""
    adj = {}
    for u, v, _ in edges:
        adj.setdefault(u, []).append(v)
    for comp in _scc(sorted(nodes, key=repr), adj):
        cs = set(comp)
        if len(comp) > 1 or any(v in cs for v in adj.get(comp[0], ())):
            return True
    return False


# ------------------------------------------------------------------ game oracle

def _choices(game):
    return [sorted({t for t, _ in out}) for out in game.succ]


def _weight(game, s, t, maximize):
    ws = [w for u, w in game.succ[s] if u == t]
    return max(ws) if maximize else min(ws)


def _play(game, strat):
    s = game.initial
    seen, ws = {}, []
    while s not in seen:
        seen[s] = len(ws)
        t = strat[s]
        ws.append(_weight(game, s, t, game.is_max[s]))
        s = t
    i = seen[s]
    return Lasso(ws[:i], ws[i:])


def _fixed_graph(game, strat, free_max):
    """One-player graph: states of the free player keep all moves, the others follow strat."""
    edges = []
    for s, out in enumerate(game.succ):
        if game.is_max[s] == free_max:
            edges.extend((s, t, w) for t, w in out)
        else:
            t = strat[s]
            edges.append((s, t, _weight(game, s, t, game.is_max[s])))
    return edges


def _strategies(game, owner_max, choices):
    own = [s for s in range(game.n) if game.is_max[s] == owner_max]
    for pick in itertools.product(*(choices[s] for s in own)):
        yield dict(zip(own, pick))


def _count(game, owner_max, choices):
    return math.prod(len(choices[s]) for s in range(game.n) if game.is_max[s] == owner_max)


def _to_ids(game, strat, owner_max):
    out = {}
    for s in range(game.n):
        if game.is_max[s] != owner_max:
            continue
        lab = game.labels[s]
        if strat is not None and lab in strat:
            out[s] = game.index[strat[lab]]
        else:
            out[s] = game.succ[s][0][0]
    return out


def _labels(game, strat):
    return {game.labels[s]: game.labels[t] for s, t in strat.items()}


def oracle_value(game, cost, cap: int = DEFAULT_CAP, hints=None) -> OracleReport:
    """Max-min and min-max values over positional strategies of a weighted game.

    hints: optional (min strategy, max strategy) label maps used when full
    enumeration exceeds the cap.
    """
    if not isinstance(cost, CostSpec):
        cost = CostSpec(CostKind(cost))
    kind = cost.kind
    if kind is CostKind.DISC:
        raise ValueError("use oracle_discounted for discounted costs")
    choices = _choices(game)
    n_min = _count(game, False, choices)
    n_max = _count(game, True, choices)
    if n_min * n_max <= cap:
        return _by_pairs(game, cost, choices)
    if min(n_min, n_max) <= cap // ONE_SIDED_SHARE:
        return _one_sided(game, kind, choices, n_min <= n_max, hints)
    if hints is None:
        raise CapExceeded("positional strategy", min(n_min, n_max), cap)
    sigma = _to_ids(game, hints[0], False)
    tau = _to_ids(game, hints[1], True)
    lower = _best_response(kind, game.initial, _fixed_graph(game, tau, False), True)
    upper = _best_response(kind, game.initial, _fixed_graph(game, sigma, True), False)
    return OracleReport(lower, upper, lower == upper, (_labels(game, sigma), _labels(game, tau)),
                        "certificate", lower == upper)


def _by_pairs(game, cost, choices):
    taus = list(_strategies(game, True, choices))
    sigmas = list(_strategies(game, False, choices))
    table = []
    for tau in taus:
        row = []
        for sigma in sigmas:
            row.append(evaluate_lasso(cost, _play(game, {**sigma, **tau})))
        table.append(row)
    mins = [min(r) for r in table]
    maxmin = max(mins)
    best_tau = mins.index(maxmin)
    cols = [max(table[i][j] for i in range(len(taus))) for j in range(len(sigmas))]
    minmax = min(cols)
    best_sigma = cols.index(minmax)
    wit = (_labels(game, sigmas[best_sigma]), _labels(game, taus[best_tau]))
    return OracleReport(maxmin, minmax, maxmin == minmax, wit, "pairs")


def _one_sided(game, kind, choices, enumerate_min, hints):
    """Enumerate the smaller side exactly; bound the other by best responses."""
    best, best_s = None, None
    if enumerate_min:
        for sigma in _strategies(game, False, choices):
            v = _best_response(kind, game.initial, _fixed_graph(game, sigma, True), False)
            if best is None or v < best:
                best, best_s = v, sigma
        minmax, sigma = best, best_s
        tau = _to_ids(game, hints[1] if hints else None, True)
        maxmin = _best_response(kind, game.initial, _fixed_graph(game, tau, False), True)
    else:
        for tau in _strategies(game, True, choices):
            v = _best_response(kind, game.initial, _fixed_graph(game, tau, False), True)
            if best is None or v > best:
                best, best_s = v, tau
        maxmin, tau = best, best_s
        sigma = _to_ids(game, hints[0] if hints else None, False)
        minmax = _best_response(kind, game.initial, _fixed_graph(game, sigma, True), False)
    # the bound from the other side is exact once it meets the enumerated value
    agree = maxmin == minmax
    return OracleReport(maxmin, minmax, agree, (_labels(game, sigma), _labels(game, tau)),
                        "one-sided", agree)


# ------------------------------------------------------------------ discounted

def _configs(game: Qsg):
    keys = list(game.edges)
    m, B = len(keys), game.budget
    out = []
    for combo in itertools.combinations_with_replacement(range(m + 1), B):
        units = {}
        for i in combo:
            if i < m:
                units[keys[i]] = units.get(keys[i], 0) + 1
        out.append(Distribution(units))
    return out


def oracle_discounted(game: Qsg, lam, horizon: int) -> Interval:
    """Exact minimax over `horizon` rounds, widened by the largest possible tail."""
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    lam = as_fraction(lam)
    if not 0 < lam < 1:
        raise ValueError("discount factor must lie strictly between 0 and 1")
    if game.extended:
        raise ValueError("discounted oracle expects a plain QSG")
    p, q = lam.numerator, lam.denominator
    dists = _configs(game)
    ids = {d: i for i, d in enumerate(dists)}
    moves = [[ids[x] for x in redistributions(d, game) if x in ids] for d in dists]
    out = {v: [e for e in game.edges if e[0] == v] for v in game.vertices}
    # scaled[i][(v, d)] = q**i * (value of the i-round truncation)
    scaled = {(v, i): 0 for v in game.vertices for i in range(len(dists))}
    for i in range(horizon):
        best_reply = {(v, d): max(scaled[(v, x)] for x in moves[d])
                      for v in game.vertices for d in range(len(dists))}
        scale = q ** (i + 1)
        scaled = {(v, d): min(scale * dists[d][e] + p * best_reply[(e[1], d)] for e in out[v])
                  for v in game.vertices for d in range(len(dists))}
    start = (game.initial_vertex, ids[game.initial_distribution])
    est = Fraction(scaled[start], q ** horizon)
    tail = lam ** horizon * game.budget / (1 - lam)
    return Interval(est - tail, est + tail, est)


# ------------------------------------------------------------------ static

def _lassos(start, adj):
    """Every walk from start that is simple until it closes a loop."""
    out = []
    path, where = [start], {start: 0}

    def rec():
        u = path[-1]
        for v in adj[u]:
            if v in where:
                out.append((list(path), where[v], v))
            else:
                where[v] = len(path)
                path.append(v)
                rec()
                path.pop()
                del where[v]

    rec()
    return out


def oracle_static(game: Qsg, cap: int = 1_000_000) -> Fraction:
    """max over fixed distributions of Runner's best lasso, by direct enumeration."""
    if game.extended and game.final_vertices:
        raise ValueError("static games have no final vertices")
    edges = list(game.domain())
    m, B = len(edges), game.budget
    count = math.comb(m + B, B)
    if count > cap:
        raise CapExceeded("distribution", count, cap)
    adj = {v: [] for v in game.vertices}
    for a, b in game.edges:
        adj[a].append(b)
    shapes = _lassos(game.initial_vertex, adj)
    best = None
    for combo in itertools.combinations_with_replacement(range(m + 1), B):
        units = [0] * (m + 1)
        for i in combo:
            units[i] += 1
        w = dict.fromkeys(game.edges, 0)
        w.update((e, units[i]) for i, e in enumerate(edges))
        runner = None
        for path, loop, back in shapes:
            seq = [w[(path[i], path[i + 1])] for i in range(len(path) - 1)] + [w[(path[-1], back)]]
            val = evaluate_lasso(game.cost, Lasso(seq[:loop], seq[loop:]))
            if runner is None or val < runner:
                runner = val
        if best is None or runner > best:
            best = runner
    return best


def has_feedback_arc_set(edges, k: int) -> bool:
    """Brute force: can removing k edges leave the graph acyclic?"""
    edges = sorted(set(edges))
    for size in range(min(k, len(edges)) + 1):
        for drop in itertools.combinations(range(len(edges)), size):
            kept = [(a, b, 0) for i, (a, b) in enumerate(edges) if i not in drop]
            if not _has_cycle({x for e in kept for x in e[:2]}, kept):
                return True
    return False
