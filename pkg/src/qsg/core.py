"""Domain model: arenas, budget distributions, redistribution, cost functions."""
from __future__ import annotations

import dataclasses
import enum
import math
from collections.abc import Iterator, Mapping
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence, Union

Rational = Fraction
Edge = tuple[str, str]
Key = Union[Edge, str]  # an edge, or a final vertex in extended games


class CostKind(str, enum.Enum):
    INF = "Inf"
    SUP = "Sup"
    LIMINF = "LimInf"
    LIMSUP = "LimSup"
    AVG = "Avg"
    DISC = "Disc"

    def __str__(self):
        return self.value


QUALITATIVE = (CostKind.INF, CostKind.SUP, CostKind.LIMINF, CostKind.LIMSUP)


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        raise TypeError("floating point values are not accepted; use 'p/q' strings")
    return Fraction(x)


@dataclass(frozen=True)
class CostSpec:
    kind: CostKind
    lam: Fraction | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", CostKind(self.kind))
        if self.kind is CostKind.DISC:
            if self.lam is None:
                raise ValueError("Disc cost needs a discount factor")
            lam = as_fraction(self.lam)
            if not 0 < lam < 1:
                raise ValueError(f"discount factor {lam} is not in (0,1)")
            object.__setattr__(self, "lam", lam)
        elif self.lam is not None:
            raise ValueError(f"{self.kind} cost takes no discount factor")

    @classmethod
    def parse(cls, kind, lam=None) -> "CostSpec":
        if isinstance(kind, CostSpec):
            return kind
        return cls(CostKind(kind), None if lam is None else as_fraction(lam))

    def __str__(self):
        return f"Disc({self.lam})" if self.lam is not None else self.kind.value


def _key_order(k):
    return (1, (k,)) if isinstance(k, str) else (0, k)


class Distribution(Mapping):
    """Immutable assignment of budget units; absent keys carry 0."""

    __slots__ = ("_items", "_map", "_hash")

    def __init__(self, assignment: Mapping | Sequence | None = None):
        pairs = dict(assignment or {})
        for k, v in pairs.items():
            if isinstance(v, bool) or not isinstance(v, int) or v < 0:
                raise ValueError(f"budget units on {k!r} must be a non-negative integer")
        items = tuple(sorted(((k, v) for k, v in pairs.items() if v), key=lambda kv: _key_order(kv[0])))
        self._items = items
        self._map = dict(items)
        self._hash = hash(items)

    def __getitem__(self, key):
        return self._map.get(key, 0)

    def __contains__(self, key):
        return key in self._map

    def __iter__(self):
        return (k for k, _ in self._items)

    def __len__(self):
        return len(self._items)

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if isinstance(other, Distribution):
            return self._items == other._items
        if isinstance(other, Mapping):
            return self == Distribution(other)
        return NotImplemented

    @property
    def total(self) -> int:
        return sum(v for _, v in self._items)

    def items(self):
        return list(self._items)

    def __repr__(self):
        inner = ", ".join(f"{_fmt_key(k)}:{v}" for k, v in self._items)
        return "{" + inner + "}"


def _fmt_key(k):
    return f"{k[0]}->{k[1]}" if isinstance(k, tuple) else str(k)


EMPTY = Distribution()


def _edges(edges) -> tuple[Edge, ...]:
    return tuple(sorted({(str(a), str(b)) for a, b in edges}))


@dataclass(frozen=True)
class Qsg:
    vertices: tuple
    edges: tuple
    budget: int
    initial_vertex: str
    initial_distribution: Distribution = EMPTY
    cost: CostSpec = field(default_factory=lambda: CostSpec(CostKind.SUP))
    move_granularity: int = 1

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(sorted({str(v) for v in self.vertices})))
        object.__setattr__(self, "edges", _edges(self.edges))
        object.__setattr__(self, "initial_vertex", str(self.initial_vertex))
        if not isinstance(self.initial_distribution, Distribution):
            object.__setattr__(self, "initial_distribution", Distribution(self.initial_distribution))
        if not isinstance(self.cost, CostSpec):
            object.__setattr__(self, "cost", CostSpec.parse(self.cost))

    @property
    def extended(self) -> bool:
        return False

    def domain(self) -> tuple:
        """Keys that may carry budget, in canonical order."""
        return self.edges

    def successors(self, v) -> list[str]:
        return [b for a, b in self.edges if a == v]

    def out_edges(self, v) -> list[Edge]:
        return [e for e in self.edges if e[0] == v]

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True)
class ExtendedQsg(Qsg):
    final_vertices: tuple = ()
    safe_edges: tuple = ()

    def __post_init__(self):
        super().__post_init__()
        object.__setattr__(self, "final_vertices", tuple(sorted({str(v) for v in self.final_vertices})))
        object.__setattr__(self, "safe_edges", _edges(self.safe_edges))

    @property
    def extended(self) -> bool:
        return True

    def domain(self) -> tuple:
        safe = set(self.safe_edges)
        return tuple(e for e in self.edges if e not in safe) + self.final_vertices


@dataclass
class ValidationReport:
    violations: list[str]

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok

    def __str__(self):
        return "ok" if self.ok else "\n".join(self.violations)


def validate(game: Qsg) -> ValidationReport:
    out = []
    vs = set(game.vertices)
    finals = set(game.final_vertices) if game.extended else set()
    if not isinstance(game.budget, int) or isinstance(game.budget, bool) or game.budget < 0:
        out.append(f"budget {game.budget!r} is not a non-negative integer")
    if not isinstance(game.move_granularity, int) or game.move_granularity < 1:
        out.append(f"move granularity {game.move_granularity!r} is not a positive integer")
    if game.initial_vertex not in vs:
        out.append(f"initial vertex {game.initial_vertex} is not a vertex")
    for a, b in game.edges:
        for x in (a, b):
            if x not in vs:
                out.append(f"edge {a}->{b} references unknown vertex {x}")
    has_out = {a for a, _ in game.edges}
    for v in game.vertices:
        if v not in has_out and v not in finals:
            out.append(f"deadlock at vertex {v}")
    if game.extended:
        for f in game.final_vertices:
            if f not in vs:
                out.append(f"final vertex {f} is not a vertex")
        es = set(game.edges)
        for e in game.safe_edges:
            if e not in es:
                out.append(f"safe edge {_fmt_key(e)} is not an edge")
    dom = set(game.domain())
    delta = game.initial_distribution
    for k, n in delta.items():
        if k not in dom:
            if game.extended and k in set(game.safe_edges):
                out.append(f"safe edge {_fmt_key(k)} carries budget")
            else:
                out.append(f"distribution key {_fmt_key(k)} is not a game edge")
        if isinstance(game.budget, int) and n > game.budget:
            out.append(f"distribution puts {n} units on {_fmt_key(k)}, more than the budget")
    if isinstance(game.budget, int) and delta.total > game.budget:
        out.append(f"distribution exceeds budget ({delta.total} > {game.budget})")
    return ValidationReport(out)


def require_valid(game: Qsg) -> None:
    rep = validate(game)
    if not rep.ok:
        raise ValueError("invalid game: " + "; ".join(rep.violations))


class CapExceeded(RuntimeError):
    def __init__(self, what: str, count: int, cap: int):
        super().__init__(f"{what} count {count} exceeds cap {cap}")
        self.what, self.count, self.cap = what, count, cap


def _vectors(m: int, budget: int) -> Iterator[tuple[int, ...]]:
    """All length-m non-negative integer vectors with sum <= budget, lexicographically."""
    if m == 0:
        yield ()
        return

    def rec(i, left):
        if i == m - 1:
            for x in range(left + 1):
                yield (x,)
            return
        for x in range(left + 1):
            for rest in rec(i + 1, left - x):
                yield (x,) + rest

    yield from rec(0, budget)


class DistributionSpace:
    """Distributions over a fixed key tuple, handled as integer vectors."""

    def __init__(self, keys: Sequence, budget: int, k: int = 1):
        self.keys = tuple(keys)
        self.pos = {key: i for i, key in enumerate(self.keys)}
        self.budget = budget
        self.k = k
        self._nbr: dict = {}
        self._dist: dict = {}

    @property
    def count(self) -> int:
        return math.comb(len(self.keys) + self.budget, self.budget)

    def vectors(self) -> Iterator[tuple[int, ...]]:
        return _vectors(len(self.keys), self.budget)

    def vector(self, delta: Mapping) -> tuple[int, ...]:
        v = [0] * len(self.keys)
        for key, n in delta.items():
            v[self.pos[key]] = n
        return tuple(v)

    def dist(self, vec) -> Distribution:
        d = self._dist.get(vec)
        if d is None:
            d = Distribution({self.keys[i]: n for i, n in enumerate(vec) if n})
            self._dist[vec] = d
        return d

    def neighbours(self, vec: tuple[int, ...]) -> list[tuple[int, ...]]:
        """Sorted vectors reachable by one redistribution step (identity included)."""
        got = self._nbr.get(vec)
        if got is not None:
            return got
        k, B, m = self.k, self.budget, len(vec)
        total = sum(vec)
        out = {vec}
        takes = [i for i in range(m) if vec[i] >= k]
        for i in takes:  # drop to the reserve
            w = list(vec)
            w[i] -= k
            out.add(tuple(w))
        if total + k <= B:  # pick up from the reserve
            for j in range(m):
                if vec[j] + k <= B:
                    w = list(vec)
                    w[j] += k
                    out.add(tuple(w))
        for i in takes:  # move between two keys
            for j in range(m):
                if j != i and vec[j] + k <= B:
                    w = list(vec)
                    w[i] -= k
                    w[j] += k
                    out.add(tuple(w))
        got = sorted(out)
        self._nbr[vec] = got
        return got


class DistributionStream:
    """Iterable over Δ(keys, budget) in lexicographic order; `count` is exact."""

    def __init__(self, keys, budget):
        self.space = DistributionSpace(keys, budget)

    @property
    def count(self) -> int:
        return self.space.count

    def __len__(self):
        return self.count

    def __iter__(self):
        for vec in self.space.vectors():
            yield self.space.dist(vec)


def enumerate_distributions(edges: int | Sequence, budget: int) -> DistributionStream:
    if isinstance(edges, int):
        if edges < 1:
            raise ValueError("need at least one edge")
        edges = [f"e{i + 1}" for i in range(edges)]
    if budget < 0:
        raise ValueError("budget must be non-negative")
    return DistributionStream(edges, budget)


def redistributions(delta: Distribution, game: Qsg) -> frozenset:
    space = DistributionSpace(game.domain(), game.budget, game.move_granularity)
    return frozenset(space.dist(v) for v in space.neighbours(space.vector(delta)))


@dataclass(frozen=True)
class Lasso:
    prefix: tuple
    cycle: tuple

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(as_fraction(x) for x in self.prefix))
        object.__setattr__(self, "cycle", tuple(as_fraction(x) for x in self.cycle))
        if not self.cycle:
            raise ValueError("lasso cycle must be non-empty")

    def __str__(self):
        fmt = lambda xs: " ".join(str(x) for x in xs)
        return f"{fmt(self.prefix)} ({fmt(self.cycle)})^w".strip()


def evaluate_lasso(cost: CostSpec, lasso: Lasso) -> Fraction:
    cost = CostSpec.parse(cost)
    u, w = lasso.prefix, lasso.cycle
    kind = cost.kind
    if kind is CostKind.INF:
        return min(u + w)
    if kind is CostKind.SUP:
        return max(u + w)
    if kind is CostKind.LIMINF:
        return min(w)
    if kind is CostKind.LIMSUP:
        return max(w)
    if kind is CostKind.AVG:
        return sum(w, Fraction(0)) / len(w)
    lam = cost.lam
    head = sum((lam**i * x for i, x in enumerate(u)), Fraction(0))
    loop = sum((lam**j * x for j, x in enumerate(w)), Fraction(0))
    return head + lam ** len(u) * loop / (1 - lam ** len(w))


def lasso_from_path(weights: Sequence, loop_start: int) -> Lasso:
    return Lasso(tuple(weights[:loop_start]), tuple(weights[loop_start:]))


def format_key(k: Any) -> str:
    return _fmt_key(k)
