"""Small extended games for the gadget equivalence check."""
from qsg import ExtendedQsg


def ext(edges, finals=(), safe=(), budget=2, start="v0"):
    edges = [tuple(e.split(">")) for e in edges.split()]
    safe = [tuple(e.split(">")) for e in safe.split()] if safe else []
    vertices = {x for e in edges for x in e} | set(finals)
    return ExtendedQsg(vertices=tuple(vertices), edges=tuple(edges), budget=budget, initial_vertex=start,
                       cost="Sup", final_vertices=tuple(finals), safe_edges=tuple(safe))


GADGET_GAMES = {
    "lone-final": ext("v0>f", ["f"]),
    "final-after-step": ext("v0>v1 v1>f", ["f"]),
    "final-after-safe-step": ext("v0>v1 v1>f", ["f"], "v0>v1"),
    "safe-into-final": ext("v0>v1 v1>f", ["f"], "v1>f"),
    "safe-loop": ext("v0>v0", (), "v0>v0"),
    "safe-cycle": ext("v0>v1 v1>v0", (), "v0>v1 v1>v0"),
    "half-safe-cycle": ext("v0>v1 v1>v0", (), "v0>v1"),
    "two-finals": ext("v0>f1 v0>f2", ["f1", "f2"]),
    "two-finals-late": ext("v0>v1 v1>f1 v1>f2", ["f1", "f2"]),
    "final-or-loop": ext("v0>v1 v1>f v1>v1", ["f"]),
    "final-or-safe-loop": ext("v0>v1 v1>f v1>v1", ["f"], "v1>v1"),
    "triangle": ext("v0>v1 v1>v2 v2>v0"),
    "triangle-one-safe": ext("v0>v1 v1>v2 v2>v0", (), "v2>v0"),
    "branch-to-final": ext("v0>v1 v0>v2 v1>f v2>v2", ["f"]),
    "branch-safe": ext("v0>v1 v0>v2 v1>v1 v2>v2", (), "v1>v1"),
    "chain-of-finals": ext("v0>v1 v1>f1 v1>v2 v2>f2", ["f1", "f2"]),
    "zero-budget-final": ext("v0>v1 v1>f", ["f"], budget=0),
    "zero-budget-safe": ext("v0>v0", (), "v0>v0", budget=0),
    "final-self-loop": ext("v0>v1 v1>f f>f", ["f"]),
    "back-and-forth": ext("v0>v1 v1>v0 v1>f", ["f"], "v0>v1"),
    "two-safe-exits": ext("v0>v1 v0>v2 v1>v0 v2>v0", (), "v0>v1 v0>v2"),
    "long-safe-path": ext("v0>v1 v1>v2 v2>f", ["f"], "v0>v1 v1>v2"),
}
