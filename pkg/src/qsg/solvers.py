"""Values and threshold decisions for configuration games and QSGs."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

import networkx as nx
import numpy as np
from numba import njit

from .core import (
    CostKind,
    CostSpec,
    Lasso,
    Qsg,
    as_fraction,
    evaluate_lasso,
    require_valid,
)
from .encoder import DEFAULT_CAP, ROUNDS, WeightedGame, encode, encode_safety
from .product import ProductGame

MIN, MAX = "Min", "Max"
RUNNER, SABOTEUR = "Runner", "Saboteur"

# explicit encoding is used for qualitative thresholds up to this many product pairs
EXPLICIT_LIMIT = 200_000


def _owner_is_max(player) -> bool:
    if player in (MAX, SABOTEUR, True, 1):
        return True
    if player in (MIN, RUNNER, False, 0):
        return False
    raise ValueError(f"unknown player {player!r}")


@dataclass
class SolveResult:
    initial_value: Fraction
    cost: CostSpec
    witness: Lasso
    min_strategy: dict = field(repr=False)
    max_strategy: dict = field(repr=False)
    per_state_values: dict | None = field(default=None, repr=False)
    witness_path: tuple = field(default=((), ()), repr=False)  # (prefix states, cycle states)
    engine: str = "explicit"


@dataclass
class WinningRegion:
    region: frozenset
    strategy: dict = field(repr=False)
    opponent_strategy: dict = field(repr=False)


@dataclass
class SafetyResult:
    winner: str
    strategy: object = field(repr=False)  # callable: state label -> successor label
    engine: str = "explicit"

    @property
    def runner_wins(self) -> bool:
        return self.winner == RUNNER


# ---------------------------------------------------------------- fixpoints

def _preds(g: WeightedGame):
    pred = [[] for _ in range(g.n)]
    for s, out in enumerate(g.succ):
        for k, (t, _) in enumerate(out):
            pred[t].append((s, k))
    return pred


def _attr(g, pmax, tstates, tflag, alive, pred):
    """Attractor for the player owning `is_max == pmax`, inside `alive`.

    tstates: per-state booleans; tflag: per-transition booleans (parallel to succ) or None.
    """
    n = g.n
    inside = [False] * n
    strat = {}
    cnt = [0] * n
    q = deque()
    for s in range(n):
        if not alive[s]:
            continue
        if tstates is not None and tstates[s]:
            inside[s] = True
            q.append(s)
            continue
        fl = tflag[s] if tflag is not None else None
        if g.is_max[s] == pmax:
            if fl is not None:
                for k, (t, _) in enumerate(g.succ[s]):
                    if fl[k] and alive[t]:
                        inside[s] = True
                        strat[s] = t
                        q.append(s)
                        break
        else:
            c = sum(1 for k, (t, _) in enumerate(g.succ[s]) if alive[t] and not (fl and fl[k]))
            cnt[s] = c
            if c == 0:
                inside[s] = True
                q.append(s)
    while q:
        t = q.popleft()
        for s, k in pred[t]:
            if not alive[s] or inside[s]:
                continue
            if tflag is not None and tflag[s][k]:
                continue
            if g.is_max[s] == pmax:
                inside[s] = True
                strat[s] = t
                q.append(s)
            else:
                cnt[s] -= 1
                if cnt[s] == 0:
                    inside[s] = True
                    q.append(s)
    return inside, strat


def _stay(g, s, alive, avoid, tflag):
    """A successor of s inside `alive`, outside `avoid`, over an unflagged transition."""
    for k, (t, _) in enumerate(g.succ[s]):
        if alive[t] and not avoid[t] and not (tflag is not None and tflag[s][k]):
            return t
    return None


def _buchi(g, pmax, fstates, fflag, pred):
    """Büchi fixpoint: states where the player visits targets infinitely often."""
    n = g.n
    alive = [True] * n
    opp = {}
    while True:
        tst = [alive[s] and fstates is not None and fstates[s] for s in range(n)]
        a, strat = _attr(g, pmax, tst, fflag, alive, pred)
        trap = [alive[s] and not a[s] for s in range(n)]
        if not any(trap):
            break
        for s in range(n):
            if trap[s] and g.is_max[s] != pmax:
                opp[s] = _stay(g, s, alive, a, fflag)
        o, ostrat = _attr(g, not pmax, trap, None, alive, pred)
        for s, t in ostrat.items():
            opp.setdefault(s, t)
        alive = [alive[s] and not o[s] for s in range(n)]
    for s in range(n):
        if alive[s] and g.is_max[s] == pmax and s not in strat:
            strat[s] = next(t for t, _ in g.succ[s] if alive[t])
    return alive, strat, opp


def _complete(g, strat, pmax):
    out = dict(strat)
    for s in range(g.n):
        if g.is_max[s] == pmax and s not in out:
            out[s] = g.succ[s][0][0]
    return out


def _split_target(g, target):
    """Separate a mixed target into a state mask and a transition flag table."""
    tstates = [False] * g.n
    pairs = set()
    for x in target:
        if x in g.index:
            tstates[g.index[x]] = True
        elif isinstance(x, tuple) and len(x) == 2 and x[0] in g.index and x[1] in g.index:
            pairs.add((g.index[x[0]], g.index[x[1]]))
        else:
            raise ValueError(f"{x!r} is neither a state nor a transition")
    tflag = None
    if pairs:
        tflag = [[(s, t) in pairs for t, _ in g.succ[s]] for s in range(g.n)]
    return tstates, tflag


def _labelled(g, strat):
    return {g.labels[s]: g.labels[t] for s, t in strat.items() if t is not None}


def attractor(game: WeightedGame, player, target) -> frozenset:
    """States from which `player` forces a visit to a target state or transition."""
    pmax = _owner_is_max(player)
    tstates, tflag = _split_target(game, target)
    inside, _ = _attr(game, pmax, tstates, tflag, [True] * game.n, _preds(game))
    return frozenset(game.labels[s] for s in range(game.n) if inside[s])


def solve_buchi(game: WeightedGame, player, target) -> WinningRegion:
    pmax = _owner_is_max(player)
    tstates, tflag = _split_target(game, target)
    win, strat, opp = _buchi(game, pmax, tstates, tflag, _preds(game))
    region = frozenset(game.labels[s] for s in range(game.n) if win[s])
    return WinningRegion(region, _labelled(game, strat), _labelled(game, opp))


def solve_cobuchi(game: WeightedGame, player, target) -> WinningRegion:
    """States where `player` visits the target only finitely often."""
    pmax = _owner_is_max(player)
    tstates, tflag = _split_target(game, target)
    win, strat, opp = _buchi(game, not pmax, tstates, tflag, _preds(game))
    region = frozenset(game.labels[s] for s in range(game.n) if not win[s])
    return WinningRegion(region, _labelled(game, opp), _labelled(game, strat))


# ---------------------------------------------------------------- plays

def _step_weight(g, s, t, pmax_owner):
    ws = [w for u, w in g.succ[s] if u == t]
    return max(ws) if pmax_owner else min(ws)


def _follow(g, sigma, tau):
    """Play of a positional pair from the initial state: (states, weights, loop start)."""
    s = g.initial
    seen = {}
    states, weights = [], []
    while s not in seen:
        seen[s] = len(states)
        t = tau[s] if g.is_max[s] else sigma[s]
        states.append(s)
        weights.append(_step_weight(g, s, t, g.is_max[s]))
        s = t
    return states, weights, seen[s]


def _state_witness(g, sigma, tau):
    states, weights, ls = _follow(g, sigma, tau)
    L = g.labels
    path = (tuple(L[s] for s in states[:ls]), tuple(L[s] for s in states[ls:]))
    return Lasso(weights[:ls], weights[ls:]), path


def _round_witness(g, sigma, tau):
    """Round-level lasso for alternating games.

    A round is a Min step and the Max reply. Duplicated weights count once; in
    discounted-rounds mode the two half-step weights add up.
    """
    states, weights, ls = _follow(g, sigma, tau)
    add = g.discount_mode == ROUNDS
    if g.is_max[states[ls]]:
        states = states + [states[ls]]
        weights = weights + [weights[ls]]
        ls += 1
    rounds, starts = [], []
    for i, s in enumerate(states):
        if not g.is_max[s]:
            starts.append(i)
            rounds.append(weights[i])
        elif add:
            rounds[-1] += weights[i]
    cut = starts.index(ls)
    L = g.labels
    mins = [L[states[i]] for i in starts]
    return Lasso(rounds[:cut], rounds[cut:]), (tuple(mins[:cut]), tuple(mins[cut:]))


# ---------------------------------------------------------------- qualitative values

def _flags(g, pred_fn):
    return [[pred_fn(w) for _, w in out] for out in g.succ]


def _decide(g, kind, T, pred):
    """Does Min win cost <= T?  Returns (win, sigma, tau) with sigma/tau winning where they can."""
    n = g.n
    everyone = [True] * n
    if kind is CostKind.INF:
        good = _flags(g, lambda w: w <= T)
        a, strat = _attr(g, False, None, good, everyone, pred)
        tau = {s: _stay(g, s, everyone, a, good) for s in range(n) if g.is_max[s] and not a[s]}
        return a[g.initial], strat, tau
    if kind is CostKind.SUP:
        bad = _flags(g, lambda w: w > T)
        a, strat = _attr(g, True, None, bad, everyone, pred)
        sigma = {s: _stay(g, s, everyone, a, bad) for s in range(n) if not g.is_max[s] and not a[s]}
        return not a[g.initial], sigma, strat
    if kind is CostKind.LIMINF:
        good = _flags(g, lambda w: w <= T)
        win, strat, opp = _buchi(g, False, None, good, pred)
        return win[g.initial], strat, opp
    if kind is CostKind.LIMSUP:
        bad = _flags(g, lambda w: w > T)
        win, strat, opp = _buchi(g, True, None, bad, pred)
        return not win[g.initial], opp, strat
    raise ValueError(f"{kind} is not a qualitative cost")


def _clean(strat):
    return {s: t for s, t in strat.items() if t is not None}


def value_qualitative(game: WeightedGame, kind, *, rounds: bool = False) -> SolveResult:
    """Least weight T such that Min wins the matching reach/safety/Büchi/coBüchi game."""
    kind = CostKind(kind)
    pred = _preds(game)
    cands = sorted({w for out in game.succ for _, w in out})
    lo, hi = 0, len(cands) - 1
    best = None
    while lo <= hi:
        mid = (lo + hi) // 2
        win, sigma, tau = _decide(game, kind, cands[mid], pred)
        if win:
            best = (mid, sigma)
            hi = mid - 1
        else:
            lo = mid + 1
    i, sigma = best
    tau = {}
    if i > 0:
        _, _, tau = _decide(game, kind, cands[i - 1], pred)
    sigma = _complete(game, _clean(sigma), False)
    tau = _complete(game, _clean(tau), True)
    cost = CostSpec(kind)
    witness, path = (_round_witness if rounds else _state_witness)(game, sigma, tau)
    value = Fraction(cands[i])
    if evaluate_lasso(cost, witness) != value:
        raise AssertionError("qualitative witness disagrees with the computed value")
    return SolveResult(value, cost, witness, _labelled(game, sigma), _labelled(game, tau),
                       witness_path=path)


# ---------------------------------------------------------------- mean payoff

def _csr(g):
    ptr = np.zeros(g.n + 1, dtype=np.int64)
    ptr[1:] = np.cumsum([len(out) for out in g.succ])
    tgt = np.array([t for out in g.succ for t, _ in out], dtype=np.int64)
    w = np.array([w for out in g.succ for _, w in out], dtype=np.int64)
    row = np.repeat(np.arange(g.n), np.diff(ptr))
    return ptr, tgt, w, row


def _greedy(vals, ptr, row, is_max, n):
    lo = np.minimum.reduceat(vals, ptr[:-1])
    hi = np.maximum.reduceat(vals, ptr[:-1])
    best = np.where(is_max, hi, lo)
    hit = np.flatnonzero(vals == best[row])
    _, first = np.unique(row[hit], return_index=True)
    return best, hit[first]  # chosen transition index per state


def _min_mean_scc(nodes, edges):
    """Minimum cycle mean of a strongly connected integer-weighted graph (Karp)."""
    m = len(nodes)
    pos = {v: i for i, v in enumerate(nodes)}
    src = np.array([pos[u] for u, _, _ in edges], dtype=np.int64)
    dst = np.array([pos[v] for _, v, _ in edges], dtype=np.int64)
    w = np.array([x for _, _, x in edges], dtype=np.float64)
    D = np.full((m + 1, m), np.inf)
    D[0, 0] = 0.0
    for k in range(1, m + 1):
        np.minimum.at(D[k], dst, D[k - 1][src] + w)
    last = D[m]
    ok = np.isfinite(last)
    ks = np.arange(m)[:, None]
    with np.errstate(invalid="ignore"):
        ratio = (last[None, :] - D[:m]) / (m - ks)
    ratio[~np.isfinite(D[:m])] = -np.inf
    worst_k = np.argmax(ratio, axis=0)
    worst = ratio[worst_k, np.arange(m)]
    worst[~ok] = np.inf
    v = int(np.argmin(worst))
    k = int(worst_k[v])
    return Fraction(int(D[m, v] - D[k, v]), m - k)


def _one_player_mean(n, succ_of, start, maximize):
    """Best reachable cycle mean for a single controller over an integer-weighted graph."""
    G = nx.DiGraph()
    seen = {start}
    stack = [start]
    edges = {}
    while stack:
        s = stack.pop()
        G.add_node(s)
        for t, w in succ_of(s):
            w = -w if maximize else w
            key = (s, t)
            if key not in edges or w < edges[key]:
                edges[key] = w
            if t not in seen:
                seen.add(t)
                stack.append(t)
    G.add_weighted_edges_from((s, t, w) for (s, t), w in edges.items())
    best = None
    for comp in nx.strongly_connected_components(G):
        nodes = sorted(comp)
        inner = [(s, t, w) for (s, t), w in edges.items() if s in comp and t in comp]
        if not inner:
            continue
        val = _min_mean_scc(nodes, inner)
        best = val if best is None else min(best, val)
    return -best if maximize else best


def _upper_of(g, sigma):
    """Best cycle mean Max reaches against a fixed Min strategy."""
    return _one_player_mean(g.n, lambda s: [(sigma[s], _step_weight(g, s, sigma[s], False))]
                            if s in sigma else g.succ[s], g.initial, True)


def _lower_of(g, tau):
    return _one_player_mean(g.n, lambda s: [(tau[s], _step_weight(g, s, tau[s], True))]
                            if s in tau else g.succ[s], g.initial, False)


@njit(cache=True)
def _lift(ptr, tgt, gain, is_energy, top):
    # in-place lifting to the least fixpoint; values above top mean "infinite"
    n = ptr.size - 1
    inf = top + 1
    f = np.zeros(n, dtype=np.int64)
    changed = True
    while changed:
        changed = False
        for s in range(n):
            best = inf if is_energy[s] else 0
            for j in range(ptr[s], ptr[s + 1]):
                t = tgt[j]
                c = inf if f[t] >= inf else max(f[t] - gain[j], 0)
                if c > top:
                    c = inf
                if is_energy[s]:
                    best = min(best, c)
                else:
                    best = max(best, c)
            if best != f[s]:
                f[s] = best
                changed = True
    return f


def _energy(g, csr, energy_max: bool, p: int, q: int):
    """Least initial credits for the energy player, against mean-payoff threshold p/q.

    The energy player (Max if energy_max) keeps the running sum of q*w - p
    (or p - q*w for Min) bounded below; finite credit at a state means it can
    hold the mean on its side of p/q from there. Returns (finite mask, strategy).
    """
    ptr, tgt, w, row = csr
    gain = (q * w - p if energy_max else p - q * w).astype(np.int64)
    is_energy = np.array(g.is_max, dtype=bool) == energy_max
    top = g.n * max(1, int(max(0, -gain.min())))
    f = _lift(ptr, tgt, gain, is_energy, top)
    inf = top + 1
    cand = np.where(f[tgt] >= inf, inf, np.maximum(f[tgt] - gain, 0))
    cand = np.where(cand > top, inf, cand)
    lo = np.minimum.reduceat(cand, ptr[:-1])
    hit = np.flatnonzero(cand == lo[row])
    _, first = np.unique(row[hit], return_index=True)
    choice = tgt[hit[first]]
    strat = {s: int(choice[s]) for s in range(g.n) if is_energy[s]}
    return f < inf, strat


def _candidates(lower, upper, n):
    out = set()
    for b in range(1, n + 1):
        lo = -((-lower.numerator * b) // lower.denominator)
        hi = (upper.numerator * b) // upper.denominator
        out.update(Fraction(a, b) for a in range(lo, hi + 1))
    return sorted(out)


def value_mean_payoff(game: WeightedGame, *, rounds: bool = False, max_iter: int | None = None) -> SolveResult:
    """Exact mean-payoff value with certified positional strategies.

    Value iteration runs first; at doubling horizons the greedy strategies are
    read off the iterates. Fixing a Min strategy leaves a one-player graph whose
    best reachable cycle mean bounds the value from above, and symmetrically
    for Max. Equal bounds certify the value. When the greedy strategies do not
    meet, the gap is closed by binary search over fractions with denominator at
    most the state count, deciding each candidate with energy-game credits.
    """
    g = game
    n = g.n
    csr = _csr(g)
    ptr, tgt, w, row = csr
    is_max = np.array(g.is_max, dtype=bool)
    budget = max_iter or max(64, 8 * n)
    nu = np.zeros(n, dtype=np.int64)
    upper = lower = None
    sigma_best = tau_best = None
    k, check = 0, 1
    while k < budget:
        vals = w + nu[tgt]
        nu, choice = _greedy(vals, ptr, row, is_max, n)
        k += 1
        if k < check:
            continue
        check *= 2
        chosen = tgt[choice]
        sigma = {s: int(chosen[s]) for s in range(n) if not g.is_max[s]}
        tau = {s: int(chosen[s]) for s in range(n) if g.is_max[s]}
        up, low = _upper_of(g, sigma), _lower_of(g, tau)
        if upper is None or up < upper:
            upper, sigma_best = up, sigma
        if lower is None or low > lower:
            lower, tau_best = low, tau
        if upper == lower:
            break
    if upper != lower:
        cands = _candidates(lower, upper, n)
        lo, hi = 0, len(cands) - 1  # Max can hold cands[lo]; cannot hold anything above cands[hi]
        while lo < hi:
            mid = (lo + hi + 1) // 2
            c = cands[mid]
            ok, tau = _energy(g, csr, True, c.numerator, c.denominator)
            if ok[g.initial]:
                lo = mid
            else:
                hi = mid - 1
        c = cands[lo]
        ok_max, tau = _energy(g, csr, True, c.numerator, c.denominator)
        ok_min, sigma = _energy(g, csr, False, c.numerator, c.denominator)
        up, low = _upper_of(g, sigma), _lower_of(g, tau)
        if not (ok_max[g.initial] and ok_min[g.initial] and up == low == c):
            raise RuntimeError("mean-payoff strategies could not be certified")
        upper, sigma_best, tau_best = c, sigma, tau
    cost = CostSpec(CostKind.AVG)
    witness, path = (_round_witness if rounds else _state_witness)(g, sigma_best, tau_best)
    if evaluate_lasso(cost, witness) != upper:
        raise AssertionError("mean-payoff witness disagrees with the certified value")
    return SolveResult(upper, cost, witness, _labelled(g, sigma_best), _labelled(g, tau_best),
                       witness_path=path)


# ---------------------------------------------------------------- discounted

def _check_alternating(g):
    if g.is_max[g.initial]:
        raise ValueError("discounted rounds must start at a Min state")
    for s, out in enumerate(g.succ):
        for t, _ in out:
            if g.is_max[s] == g.is_max[t]:
                raise ValueError("discounted rounds need strictly alternating Min/Max states")


def _exact_policy_values(g, nxt, wt, lam):
    """Exact discounted values of the functional graph s -> nxt[s]; discount applied after Max steps."""
    n = g.n
    fac = [lam if g.is_max[s] else Fraction(1) for s in range(n)]
    val = [None] * n
    for s0 in range(n):
        if val[s0] is not None:
            continue
        path, where = [], {}
        s = s0
        while val[s] is None and s not in where:
            where[s] = len(path)
            path.append(s)
            s = nxt[s]
        if val[s] is None:
            cyc = path[where[s]:]
            acc, mult = Fraction(0), Fraction(1)
            for u in cyc:
                acc += mult * wt[u]
                mult *= fac[u]
            val[cyc[0]] = acc / (1 - mult)
            for u in reversed(cyc[1:]):
                val[u] = wt[u] + fac[u] * val[nxt[u]]
            path = path[:where[s]]
        for u in reversed(path):
            val[u] = wt[u] + fac[u] * val[nxt[u]]
    return val, fac


def value_discounted(game: WeightedGame, lam, *, max_iter: int = 100_000) -> SolveResult:
    """Exact discounted value: float iteration proposes strategies, exact Bellman check accepts them."""
    lam = as_fraction(lam)
    if not 0 < lam < 1:
        raise ValueError("discount factor must lie strictly between 0 and 1")
    g = game
    if g.discount_mode != ROUNDS:
        raise ValueError("value_discounted expects a game encoded in discounted-rounds mode")
    _check_alternating(g)
    n = g.n
    ptr, tgt, w, row = _csr(g)
    is_max = np.array(g.is_max, dtype=bool)
    fac_row = np.where(is_max, float(lam), 1.0)[row]
    V = np.zeros(n)
    last = None
    for it in range(1, max_iter + 1):
        vals = w + fac_row * V[tgt]
        V, choice = _greedy_float(vals, ptr, row, is_max)
        key = choice.tobytes()
        # exact checks only when the proposal changed and on a sparse schedule
        if key == last or (it & (it - 1) and it % 64):
            continue
        last = key
        nxt = [int(tgt[c]) for c in choice]
        wt = [int(w[c]) for c in choice]
        val, fac = _exact_policy_values(g, nxt, wt, lam)
        if _bellman_ok(g, val, fac):
            break
    else:
        raise RuntimeError("discounted strategies did not stabilise within the iteration cap")
    sigma = {s: nxt[s] for s in range(n) if not g.is_max[s]}
    tau = {s: nxt[s] for s in range(n) if g.is_max[s]}
    cost = CostSpec(CostKind.DISC, lam)
    witness, path = _round_witness(g, sigma, tau)
    value = val[g.initial]
    if evaluate_lasso(cost, witness) != value:
        raise AssertionError("discounted witness disagrees with the exact policy value")
    per_state = {g.labels[s]: val[s] for s in range(n)}
    return SolveResult(value, cost, witness, _labelled(g, sigma), _labelled(g, tau),
                       per_state_values=per_state, witness_path=path)


def _greedy_float(vals, ptr, row, is_max):
    lo = np.minimum.reduceat(vals, ptr[:-1])
    hi = np.maximum.reduceat(vals, ptr[:-1])
    best = np.where(is_max, hi, lo)
    hit = np.flatnonzero(np.abs(vals - best[row]) <= 1e-12 * np.maximum(1.0, np.abs(best[row])))
    _, first = np.unique(row[hit], return_index=True)
    return best, hit[first]


def _bellman_ok(g, val, fac):
    for s, out in enumerate(g.succ):
        opts = [w + fac[s] * val[t] for t, w in out]
        if val[s] != (max(opts) if g.is_max[s] else min(opts)):
            return False
    return True


# ---------------------------------------------------------------- QSG level

def solve(game: Qsg, cap: int = DEFAULT_CAP) -> SolveResult:
    """Exact value of a QSG with witness strategies and an arena-level witness play."""
    require_valid(game)
    wg = encode(game, cap)
    kind = game.cost.kind
    if kind is CostKind.AVG:
        res = value_mean_payoff(wg, rounds=True)
    elif kind is CostKind.DISC:
        res = value_discounted(wg, game.cost.lam)
    else:
        res = value_qualitative(wg, kind, rounds=True)
    res.cost = game.cost
    return res


def _engine(game: Qsg, engine: str) -> str:
    if engine != "auto":
        return engine
    if game.move_granularity != 1:
        return "explicit"
    from math import comb
    pairs = (len(game.vertices) + len(game.edges)) * comb(len(game.domain()) + game.budget, game.budget)
    return "explicit" if pairs <= EXPLICIT_LIMIT else "product"


def threshold(game: Qsg, T, cap: int = DEFAULT_CAP, engine: str = "auto") -> bool:
    """Is the value at most T?"""
    T = as_fraction(T)
    if T < 0:
        raise ValueError("threshold must be non-negative")
    require_valid(game)
    kind = game.cost.kind
    if kind in (CostKind.AVG, CostKind.DISC) or _engine(game, engine) == "explicit":
        return solve(game, cap).initial_value <= T
    pg = ProductGame(game)
    s0 = pg.initial_index()
    if kind is CostKind.SUP:
        a_min, _, _ = pg.attractor(1, pg.above(T))
        return not a_min[s0]
    if kind is CostKind.INF:
        a_min, _, _ = pg.attractor(0, pg.at_most(T))
        return bool(a_min[s0])
    if kind is CostKind.LIMINF:
        w_min, _ = pg.buchi(0, pg.at_most(T))
        return bool(w_min[s0])
    w_min, _ = pg.buchi(1, pg.above(T))
    return not w_min[s0]


def _safety_explicit(game, cap):
    sg = encode_safety(game, cap)
    g = sg.game
    pred = _preds(g)
    bad = [s in sg.bad for s in range(g.n)]
    a, strat = _attr(g, True, bad, None, [True] * g.n, pred)
    if a[g.initial]:
        return SafetyResult(SABOTEUR, _labelled(g, strat).get, "explicit")
    keep = {s: _stay(g, s, [True] * g.n, a, None) for s in range(g.n) if not g.is_max[s] and not a[s]}
    return SafetyResult(RUNNER, _labelled(g, _clean(keep)).get, "explicit")


class _ProductStrategy:
    """Lazy strategy over the implicit product; labels are (vertex, vector) or (vertex', vector)."""

    def __init__(self, pg, runner, in_min, in_max, wit):
        self.pg, self.runner = pg, runner
        self.in_min, self.in_max, self.wit = in_min, in_max, wit

    def __call__(self, state):
        pg = self.pg
        v, vec = state
        s = pg.vid[v] * pg.D + pg.space.index_of(list(vec))
        if self.runner:
            d = s % pg.D
            flag = pg.unsafe()
            for k in range(pg.out_ptr[pg.vid[v]], pg.out_ptr[pg.vid[v] + 1]):
                t = pg.out_dst[k] * pg.D + d
                if not flag[k, d] and not self.in_max[t]:
                    return pg.edges[k]
            return None
        t = self.wit[s]
        if t < 0:
            return None
        return pg.vertices[t // pg.D], pg.space.vector(t % pg.D)


def _safety_product(game):
    pg = ProductGame(game)
    in_min, in_max, wit = pg.attractor(1, pg.unsafe())
    lost = bool(in_min[pg.initial_index()])
    strat = _ProductStrategy(pg, not lost, in_min, in_max, wit)
    return SafetyResult(SABOTEUR if lost else RUNNER, strat, "product")


def solve_spr(game: Qsg, cap: int = DEFAULT_CAP, engine: str = "auto") -> SafetyResult:
    """Can Runner avoid every edge carrying budget forever?"""
    require_valid(game)
    if game.initial_distribution.total:
        raise ValueError("the safety problem starts from an empty distribution")
    if _engine(game, engine) == "explicit":
        return _safety_explicit(game, cap)
    return _safety_product(game)


def solve_espr(game, cap: int = DEFAULT_CAP, engine: str = "auto") -> SafetyResult:
    """Safety with safe edges and final vertices: reaching an unmarked final vertex wins for Runner."""
    require_valid(game)
    if game.initial_distribution.total:
        raise ValueError("the extended safety problem starts from an empty distribution")
    if game.cost.kind is not CostKind.SUP:
        raise ValueError("the extended safety problem uses the Sup cost")
    if _engine(game, engine) == "explicit":
        return _safety_explicit(game, cap)
    return _safety_product(game)
