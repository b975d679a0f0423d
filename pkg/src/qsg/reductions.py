"""Instance transformers for the hardness chain, plus the ABF game itself.

ABF game to extended safety, extended safety to plain safety, plain safety to
LimSup at threshold 0, and cost swaps between equivalent threshold-0 problems.
Every transformer needs move granularity 1.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .core import EMPTY, CostKind, CostSpec, ExtendedQsg, Qsg, require_valid

PROVER, DISPROVER = "Prover", "Disprover"
ABF_VARIABLE_CAP = 20
# abf_to_espr emits at most this many vertices per variable-or-literal
ABF_SIZE_FACTOR = 30


# ------------------------------------------------------------------ ABF game

def _literal(lit):
    if isinstance(lit, str):
        return (lit[1:], False) if lit.startswith("-") else (lit, True)
    var, pol = lit
    return str(var), bool(pol)


@dataclass(frozen=True)
class AbfInstance:
    prover_vars: tuple
    disprover_vars: tuple
    cnf: tuple  # clauses; each a tuple of (variable, polarity)
    initial_valuation: frozenset = frozenset()
    initial_player: str = PROVER

    def __post_init__(self):
        X = tuple(sorted(set(self.prover_vars)))
        Y = tuple(sorted(set(self.disprover_vars)))
        if set(X) & set(Y):
            raise ValueError(f"variables owned by both players: {sorted(set(X) & set(Y))}")
        cnf = tuple(tuple(_literal(l) for l in clause) for clause in self.cnf)
        known = set(X) | set(Y)
        for clause in cnf:
            for var, _ in clause:
                if var not in known:
                    raise ValueError(f"literal over unknown variable {var!r}")
        val = frozenset(self.initial_valuation)
        if not val <= known:
            raise ValueError(f"initial valuation names unknown variables {sorted(val - known)}")
        player = self.initial_player.capitalize() if isinstance(self.initial_player, str) else None
        if player not in (PROVER, DISPROVER):
            raise ValueError(f"initial player must be Prover or Disprover, got {self.initial_player!r}")
        object.__setattr__(self, "prover_vars", X)
        object.__setattr__(self, "disprover_vars", Y)
        object.__setattr__(self, "cnf", cnf)
        object.__setattr__(self, "initial_valuation", val)
        object.__setattr__(self, "initial_player", player)

    @property
    def variables(self) -> tuple:
        return tuple(sorted(self.prover_vars + self.disprover_vars))

    def satisfied(self, valuation) -> bool:
        return all(any((v in valuation) == pol for v, pol in clause) for clause in self.cnf)

    def replace(self, **changes) -> "AbfInstance":
        data = dict(prover_vars=self.prover_vars, disprover_vars=self.disprover_vars, cnf=self.cnf,
                    initial_valuation=self.initial_valuation, initial_player=self.initial_player)
        data.update(changes)
        return AbfInstance(**data)


@dataclass(frozen=True)
class AbfConfig:
    valuation: frozenset
    to_move: str


@dataclass
class AbfResult:
    winner: str
    strategy: object = field(repr=False)  # callable AbfConfig -> AbfConfig for the winner
    prover_region: int = 0  # configurations won by Prover


def solve_abf(instance: AbfInstance) -> AbfResult:
    """Reachability game on (valuation, player to move); Prover wants a satisfying valuation."""
    names = instance.variables
    N = len(names)
    if N > ABF_VARIABLE_CAP:
        raise ValueError(f"{N} variables exceed the cap of {ABF_VARIABLE_CAP}")
    bit = {v: 1 << i for i, v in enumerate(names)}
    masks = np.arange(1 << N, dtype=np.int64)
    sat = np.ones(1 << N, dtype=bool)
    for clause in instance.cnf:
        c = np.zeros(1 << N, dtype=bool)
        for var, pol in clause:
            has = (masks & bit[var]) != 0
            c |= has if pol else ~has
        sat &= c
    prover_flips = [0] + [bit[v] for v in instance.prover_vars]
    dis_flips = [0] + [bit[v] for v in instance.disprover_vars]
    P = sat.copy()  # Prover to move, Prover wins
    D = sat.copy()
    choice = np.full(1 << N, -1, dtype=np.int64)  # Prover's flip where it first wins
    while True:
        reach = np.zeros_like(P)
        pick = np.full(1 << N, -1, dtype=np.int64)
        for f in prover_flips:
            hit = D[masks ^ f] & (pick < 0)
            pick[hit] = f
            reach |= hit
        newP = P | reach
        forced = np.ones_like(D)
        for f in dis_flips:
            forced &= P[masks ^ f]
        newD = D | forced
        fresh = newP & ~P & ~sat
        choice[fresh] = pick[fresh]
        if (newP == P).all() and (newD == D).all():
            break
        P, D = newP, newD
    # satisfied Prover configurations: any move keeps the win
    choice[sat & (choice < 0)] = 0

    def decode(m):
        return frozenset(v for v in names if m & bit[v])

    def encode_val(val):
        return sum(bit[v] for v in val)

    start = encode_val(instance.initial_valuation)
    prover_wins = bool(P[start] if instance.initial_player == PROVER else D[start])

    def prover_move(cfg: AbfConfig):
        m = encode_val(cfg.valuation)
        if cfg.to_move != PROVER or not P[m]:
            return None
        return AbfConfig(decode(m ^ int(choice[m])), DISPROVER)

    def disprover_move(cfg: AbfConfig):
        m = encode_val(cfg.valuation)
        if cfg.to_move != DISPROVER or D[m]:
            return None
        for f in dis_flips:
            if not P[m ^ f]:
                return AbfConfig(decode(m ^ f), PROVER)
        return None

    return AbfResult(PROVER if prover_wins else DISPROVER,
                     prover_move if prover_wins else disprover_move,
                     int(P.sum() + D.sum()))


# ------------------------------------------------------------------ ABF -> extended safety

def final_name(var, positive: bool, copy: int) -> str:
    return f"Ver({var}).{'pos' if positive else 'neg'}.{copy}"


ALPHA = "alpha"


def abf_to_espr(instance: AbfInstance, move_granularity: int = 1) -> ExtendedQsg:
    """Extended safety game that Saboteur wins iff Prover wins the ABF game.

    Saboteur plays Prover, Runner plays Disprover. A valuation is encoded by
    two units on either the positive or the negative pair of each variable's
    four final vertices, plus one unit on alpha; the budget is 2N + 1.
    """
    if move_granularity != 1:
        raise ValueError("the ABF construction needs move granularity 1")
    names = instance.variables
    N = len(names)
    B = 2 * N + 1
    V, E, safe, finals = set(), set(), set(), set()

    def add(a, b, is_safe=True):
        V.update((a, b))
        E.add((a, b))
        if is_safe:
            safe.add((a, b))

    ver = {x: [final_name(x, p, c) for p in (False, True) for c in (1, 2)] for x in names}
    for x in names:
        finals.update(ver[x])
    finals.add(ALPHA)
    V.update(finals)

    # at least two marked vertices per Ver(x): triplet corners
    corners = []
    for x in names:
        for omit in ver[x]:
            t1, t2 = f"Tri({x})-{omit}.1", f"Tri({x})-{omit}.2"
            add(t1, t2)
            for f in ver[x]:
                if f != omit:
                    add(t2, f)
            corners.append(t1)
    # one marked vertex per mixed pair: Check(x)
    check = {}
    for x in names:
        check[x] = []
        for i in (1, 2):
            for j in (1, 2):
                p = f"Check({x}).neg{i}.pos{j}"
                add(p, final_name(x, False, i))
                add(p, final_name(x, True, j))
                check[x].append(p)

    main = []

    def node(name, alpha: bool, checked):
        V.add(name)
        main.append(name)
        if alpha:
            add(name, ALPHA)
        for x in checked:
            for p in check[x]:
                add(name, p)
        return name

    X, Y = instance.prover_vars, instance.disprover_vars
    play = node("Play", True, names)
    set1 = node("set1", True, Y)
    set2 = node("set2", True, names)
    choose = node("Choose", False, names)
    verif = node("Verif", True, names)
    for y in Y:
        for pos in (True, False):
            tag = y if pos else f"-{y}"
            a = node(f"set1[{tag}]", True, [z for z in names if z != y])
            b = node(f"set2[{tag}]", True, names)
            add(play, a)
            add(a, b)
            add(b, final_name(y, pos, 1))
            add(b, final_name(y, pos, 2))
            add(b, set1)
    if not Y:
        add(play, set1)
    add(set1, set2)
    add(set2, choose)
    add(choose, play, False)
    add(choose, verif, False)
    for ci, clause in enumerate(instance.cnf, start=1):
        head = node(f"Cl{ci}", False, names)
        add(verif, head)
        lits = list(dict.fromkeys(clause))
        if len(lits) == 1:
            # a lone atom needs a second exit, or Saboteur blocks it with the alpha unit
            var, pol = lits[0]
            add(head, final_name(var, pol, 1))
            add(head, final_name(var, pol, 2), False)
            continue
        cur, j = head, 0
        while True:
            var, pol = lits[j]
            add(cur, final_name(var, pol, 1))
            rest = len(lits) - j - 1
            if rest == 0:
                break
            if rest == 1:
                var2, pol2 = lits[j + 1]
                add(cur, final_name(var2, pol2, 1), False)
                break
            nxt = node(f"Cl{ci}/{j + 2}", False, names)
            add(cur, nxt, False)
            cur, j = nxt, j + 1
    # condition (i) is checked from every vertex of the main part
    for v in main:
        for c in corners:
            add(v, c)

    # initialisation: 2N+1 safe steps, then every required final must be marked
    chain = [f"Init.{i}" for i in range(B + 1)]
    for a, b in zip(chain, chain[1:]):
        add(a, b)
    ready = chain[-1]
    for x in names:
        val = x in instance.initial_valuation
        add(ready, final_name(x, val, 1))
        add(ready, final_name(x, val, 2))
    add(ready, ALPHA)
    # a Disprover start goes through Choose so an initially true formula can be verified
    add(ready, set1 if instance.initial_player == PROVER else choose)

    game = ExtendedQsg(vertices=tuple(V), edges=tuple(E), budget=B, initial_vertex=chain[0],
                       initial_distribution=EMPTY, cost=CostSpec(CostKind.SUP),
                       final_vertices=tuple(finals), safe_edges=tuple(safe))
    require_valid(game)
    return game


# ------------------------------------------------------------------ extended -> plain safety

def _fresh(base: str, taken: set) -> str:
    name, i = base, 1
    while name in taken:
        i += 1
        name = f"{base}~{i}"
    taken.add(name)
    return name


def espr_to_spr(game) -> Qsg:
    """Replace safe edges, then final vertices, by budget-resistant gadgets."""
    if game.move_granularity != 1:
        raise ValueError("gadget reductions need move granularity 1")
    require_valid(game)
    if not game.extended:
        return game
    B = game.budget
    if B == 1 and (game.final_vertices or game.safe_edges):
        # closing a gadget takes a second unit: with B = 1 a marked final vertex cannot be emulated
        raise ValueError("the gadgets need budget 0 or at least 2 once final vertices or safe edges occur")
    taken = set(game.vertices)
    V = set(game.vertices)
    E = set(game.edges)
    finals = list(game.final_vertices)
    for a, c in game.safe_edges:
        E.discard((a, c))
        for i in range(1, B + 2):
            ei = _fresh(f"safe[{a},{c}]/E[{i}]", taken)
            fi = _fresh(f"safe[{a},{c}]/F[{i}]", taken)
            V.update((ei, fi))
            E.update({(a, ei), (ei, fi), (ei, c)})
            finals.append(fi)
    # play stops at a final vertex, so whatever leaves it is dropped
    done = set(game.final_vertices)
    E = {e for e in E if e[0] not in done}
    for f in finals:
        # the final vertex itself becomes the entry of its gadget
        c1, c2 = _fresh(f"{f}/C1", taken), _fresh(f"{f}/C2", taken)
        alphas = [_fresh(f"{f}/alpha[{i}]", taken) for i in range(1, B + 2)]
        V.update([c1, c2, *alphas])
        E.update({(f, c1), (f, c2)})
        for a in alphas:
            E.update({(c1, a), (c2, a)})
            E.update((a, b) for b in alphas)
    delta = {k: n for k, n in game.initial_distribution.items()}
    if delta:
        raise ValueError("the extended safety problem starts from an empty distribution")
    out = Qsg(vertices=tuple(V), edges=tuple(E), budget=B, initial_vertex=game.initial_vertex,
              initial_distribution=EMPTY, cost=game.cost, move_granularity=1)
    require_valid(out)
    return out


# ------------------------------------------------------------------ safety -> LimSup at 0

def spr_to_limsup(game: Qsg) -> Qsg:
    """LimSup game whose value is 0 iff Runner wins the safety game."""
    require_valid(game)
    if game.extended:
        raise ValueError("spr_to_limsup expects a plain QSG")
    if game.move_granularity != 1:
        raise ValueError("gadget reductions need move granularity 1")
    if game.initial_distribution.total:
        raise ValueError("a safety instance starts from an empty distribution")
    if game.cost.kind is not CostKind.SUP:
        raise ValueError("a safety instance uses the Sup cost")
    B, Bp = game.budget, len(game.edges)
    taken = set(game.vertices)
    s = {(i, j): _fresh(f"s[{i}][{j}]", taken) for i in range(1, Bp + 2) for j in range(1, Bp + 1)}
    x = {m: _fresh(f"x[{m}]", taken) for m in range(B + 1, Bp + 1)}
    t = {m: _fresh(f"t[{m}]", taken) for m in (1, 2)}
    f = {k: _fresh(f"f[{k}]", taken) for k in range(1, B + 1)}
    # with B = 0 a lone exit e[1] per safe-path end lets Saboteur charge every lap
    e = {m: _fresh(f"e[{m}]", taken) for m in range(1, max(B, 1) + 2)}
    V = set(game.vertices) | set(s.values()) | set(x.values()) | set(t.values()) | set(f.values()) | set(e.values())
    E = set(game.edges)
    E |= {(e[i], f[j]) for i in e for j in f}
    E |= {(f[k], e[k]) for k in f} | {(f[k], e[k + 1]) for k in f}
    E |= {(x[l], t[m]) for l in x for m in t}
    E |= {(t[m], s[(i, Bp)]) for m in t for i in range(1, Bp + 2)}
    E |= {(s[(i, j)], s[(i2, j - 1)]) for i in range(1, Bp + 2) for i2 in range(1, Bp + 2)
          for j in range(2, Bp + 1)}
    E |= {(s[(i, 1)], e[m]) for i in range(1, Bp + 2) for m in e}
    succ_I = [b for a, b in game.edges if a == game.initial_vertex]
    E |= {(e[m], u) for m in e for u in succ_I}
    E |= {(u, x[l]) for u in game.vertices for l in x}
    E |= {(e[m], x[l]) for m in e for l in x}
    out = Qsg(vertices=tuple(V), edges=tuple(E), budget=Bp, initial_vertex=t[1],
              initial_distribution=EMPTY, cost=CostSpec(CostKind.LIMSUP))
    require_valid(out)
    return out


def swap_cost(game: Qsg, new_cost) -> Qsg:
    """Same arena, different cost: links threshold-0 problems that coincide."""
    if not isinstance(new_cost, CostSpec):
        new_cost = CostSpec.parse(new_cost)
    return game.replace(cost=new_cost)
