"""Seeded random QSGs for test corpora."""
from __future__ import annotations

import random

from .core import CostKind, CostSpec, Distribution, Qsg, require_valid


def generate_random(vertices: int, edges: int, budget: int, cost=CostKind.SUP, seed: int = 0,
                    *, empty_start: bool = False) -> Qsg:
    """Deadlock-free random arena; the initial distribution is uniform over valid ones."""
    n, m = vertices, edges
    if n < 1 or m < n or m > n * n or budget < 0:
        raise ValueError(f"no deadlock-free simple digraph with {n} vertices and {m} edges")
    if not isinstance(cost, CostSpec):
        cost = CostSpec.parse(cost)
    rng = random.Random(seed)
    names = [f"v{i}" for i in range(n)]
    chosen = {(a, rng.choice(names)) for a in names}
    rest = sorted({(a, b) for a in names for b in names} - chosen)
    chosen |= set(rng.sample(rest, m - n))
    edge_list = sorted(chosen)
    delta = Distribution()
    if not empty_start and budget:
        # stars and bars: B bar positions among m + B slots name a multiset of edges
        slots = sorted(rng.sample(range(m + budget), budget))
        units = {}
        for j, pos in enumerate(slots):
            k = pos - j
            if k < m:
                units[edge_list[k]] = units.get(edge_list[k], 0) + 1
        delta = Distribution(units)
    game = Qsg(vertices=tuple(names), edges=tuple(edge_list), budget=budget,
               initial_vertex=rng.choice(names), initial_distribution=delta, cost=cost)
    require_valid(game)
    return game


def corpus_params(seed: int) -> tuple[int, int, int]:
    """Sizes for the oracle-scale corpus: at most 4 vertices, 6 edges, budget 2."""
    rng = random.Random(10_000 + seed)
    n = rng.randint(1, 4)
    m = rng.randint(n, min(6, n * n))
    return n, m, rng.randint(0, 2)


def corpus(count: int = 200, cost=CostKind.AVG):
    """The seeded oracle-scale corpus as (seed, game) pairs."""
    out = []
    for seed in range(count):
        n, m, b = corpus_params(seed)
        out.append((seed, generate_random(n, m, b, cost, seed)))
    return out
