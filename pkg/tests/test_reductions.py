import itertools
import random

import pytest

from qsg import (AbfInstance, ExtendedQsg, Qsg, abf_to_espr, encode_safety, espr_to_spr,
                 parse_abf, solve_abf, solve_espr, solve_spr, spr_to_limsup, swap_cost, threshold,
                 validate)
from qsg.reductions import ABF_SIZE_FACTOR, AbfConfig, final_name
from conftest import FIXTURES, cost, cycle_game


def example3(name):
    return parse_abf((FIXTURES / f"example3_{name}.abf").read_text())


def test_example3_winners():
    assert solve_abf(example3("prover")).winner == "Prover"
    assert solve_abf(example3("disprover")).winner == "Disprover"


def test_example3_prover_sets_a():
    inst = example3("prover")
    r = solve_abf(inst)
    nxt = r.strategy(AbfConfig(inst.initial_valuation, "Prover"))
    assert nxt.valuation == {"A", "B", "C", "D"} and inst.satisfied(nxt.valuation)


def test_tautology_always_prover():
    for val in [frozenset(), frozenset({"B"})]:
        for player in ("prover", "disprover"):
            inst = AbfInstance((), ("B",), [["B", "-B"]], val, player)
            assert solve_abf(inst).winner == "Prover"


def test_abf_invariants():
    with pytest.raises(ValueError):
        AbfInstance(("A",), ("A",), [["A"]])
    with pytest.raises(ValueError):
        AbfInstance(("A",), (), [["Z"]])


def test_extra_clause_never_helps_prover():
    rng = random.Random(4)
    for _ in range(200):
        X, Y = ("A", "B"), ("C",)
        lits = [(v, p) for v in X + Y for p in (True, False)]
        cnf = [rng.sample(lits, rng.randint(1, 2)) for _ in range(rng.randint(1, 3))]
        inst = AbfInstance(X, Y, cnf, frozenset(rng.sample(X + Y, rng.randint(0, 3))),
                           rng.choice(["prover", "disprover"]))
        if solve_abf(inst).winner == "Disprover":
            more = inst.replace(cnf=inst.cnf + (tuple(rng.sample(lits, 2)),))
            assert solve_abf(more).winner == "Disprover"


def test_abf_to_espr_example3_core():
    g = abf_to_espr(example3("prover"))
    names = set(g.vertices)
    assert {"Play", "Choose", "Verif", "set1", "set2", "Cl1", "Cl2", "Cl3", "Cl4"} <= names
    assert len(g.final_vertices) == 17 and "alpha" in g.final_vertices
    assert g.budget == 9
    E = set(g.edges)
    assert {("set1", "set2"), ("set2", "Choose"), ("Choose", "Play"), ("Choose", "Verif"),
            ("Play", "set1[C]"), ("Verif", "Cl1")} <= E
    assert validate(g).ok


def test_abf_to_espr_one_variable():
    g = abf_to_espr(AbfInstance(("X",), (), [["X"]]))
    assert g.budget == 3 and len(g.final_vertices) == 5
    assert final_name("X", True, 1) in g.final_vertices


def test_abf_to_espr_size_bound():
    rng = random.Random(9)
    for _ in range(30):
        vs = [f"x{i}" for i in range(rng.randint(1, 5))]
        cut = rng.randint(0, len(vs))
        cnf = [[(rng.choice(vs), rng.random() < 0.5) for _ in range(rng.randint(1, 3))]
               for _ in range(rng.randint(1, 4))]
        g = abf_to_espr(AbfInstance(vs[:cut], vs[cut:], cnf))
        assert len(g.vertices) <= ABF_SIZE_FACTOR * (len(vs) + sum(map(len, cnf)))


def test_abf_to_espr_granularity():
    with pytest.raises(ValueError):
        abf_to_espr(AbfInstance(("X",), (), [["X"]]), move_granularity=2)


@pytest.mark.parametrize("inst", [
    AbfInstance(("A",), (), [["A"]], frozenset(), "disprover"),
    AbfInstance((), ("C",), [["C"]], frozenset({"C"}), "disprover"),
    AbfInstance(("A",), ("C",), [["A", "-C"], ["C"]], frozenset({"C"}), "prover"),
], ids=["prover-sets", "disprover-flips", "mixed"])
def test_abf_end_to_end(inst):
    a = solve_abf(inst).winner
    assert (a == "Prover") == (solve_espr(abf_to_espr(inst)).winner == "Saboteur")


def test_espr_to_spr_identity():
    g = cycle_game(3, 1)
    assert espr_to_spr(g) == g
    eg = ExtendedQsg(vertices=g.vertices, edges=g.edges, budget=1, initial_vertex="0", cost=g.cost)
    h = espr_to_spr(eg)
    assert (h.vertices, h.edges, h.budget) == (g.vertices, g.edges, 1) and not h.extended


def test_espr_to_spr_final_gadget():
    g = ExtendedQsg(vertices=("s", "f"), edges=(("s", "s"), ("s", "f")), budget=2, initial_vertex="s",
                    cost=cost("Sup"), final_vertices=("f",))
    h = espr_to_spr(g)
    new = set(h.vertices) - set(g.vertices)
    assert len(new) == 5
    alphas = sorted(v for v in new if "alpha" in v)
    assert len(alphas) == 3
    assert {(a, b) for a in alphas for b in alphas} <= set(h.edges)
    assert h.budget == 2


def test_fig5a_marker_defeats_entry():
    # a unit already on (f, C1) plus a spare one: entering f loses, Saboteur loads (f, C2)
    g = ExtendedQsg(vertices=("p", "f"), edges=(("p", "f"), ("f", "f")), budget=2, initial_vertex="p",
                    cost=cost("Sup"), final_vertices=("f",))
    h = espr_to_spr(g)
    c1 = next(v for v in h.vertices if v.endswith("/C1"))
    loaded = h.replace(initial_distribution={("f", c1): 1})
    assert not threshold(loaded, 0)
    # without the preloaded unit Runner slips through a free marker
    assert threshold(h, 0)


def test_espr_to_spr_safe_edge_gadget():
    g = ExtendedQsg(vertices=("a", "c"), edges=(("a", "c"), ("c", "c")), budget=2, initial_vertex="a",
                    cost=cost("Sup"), safe_edges=(("a", "c"),))
    h = espr_to_spr(g)
    relays = [v for v in h.vertices if "/E[" in v and "/" not in v.split("/E[")[1]]
    assert len(relays) == 3 and ("a", "c") not in h.edges
    for r in relays:
        assert {("a", r), (r, "c")} <= set(h.edges)
    with pytest.raises(ValueError):
        espr_to_spr(g.replace(move_granularity=2))


def test_espr_to_spr_rejects_unit_budget():
    # Saboteur wins by loading f while Runner sits on v1; the gadgets would need a second unit
    g = ExtendedQsg(vertices=("v0", "v1", "f"), edges=(("v0", "v1"), ("v1", "f")), budget=1,
                    initial_vertex="v0", cost=cost("Sup"), final_vertices=("f",), safe_edges=(("v1", "f"),))
    assert solve_espr(g).winner == "Saboteur"
    with pytest.raises(ValueError):
        espr_to_spr(g)
    assert espr_to_spr(cycle_game(2, 1)) == cycle_game(2, 1)


def test_spr_to_limsup_counts():
    g = Qsg(vertices=("a", "b"), edges=(("a", "b"), ("b", "a"), ("b", "b")), budget=1,
            initial_vertex="a", cost=cost("Sup"))
    h = spr_to_limsup(g)
    Bp, B = 3, 1
    grid = [v for v in h.vertices if v.startswith("s[")]
    assert len(grid) == (Bp + 1) * Bp == 12
    assert len(h.vertices) == len(g.vertices) + (Bp + 1) * Bp + (Bp - B) + 2 + B + (B + 1)
    assert h.budget == 3 and h.initial_vertex == "t[1]" and h.cost.kind.value == "LimSup"


def test_spr_to_limsup_zero_budget_count():
    # B = 0 keeps two exit vertices e[1], e[2]
    g = cycle_game(2, 0)
    h = spr_to_limsup(g)
    Bp = 2
    assert len(h.vertices) == len(g.vertices) + (Bp + 1) * Bp + Bp + 2 + 2


def test_spr_to_limsup_structure():
    g = cycle_game(3, 1)
    h = spr_to_limsup(g)
    E, Bp = set(h.edges), 3
    es = [v for v in h.vertices if v.startswith("e[")]
    for m in ("t[1]", "t[2]"):
        for i in range(1, Bp + 2):
            assert (m, f"s[{i}][{Bp}]") in E
    for i in range(1, Bp + 2):
        for e in es:
            assert (f"s[{i}][1]", e) in E


def test_spr_to_limsup_rejects():
    with pytest.raises(ValueError):
        spr_to_limsup(cycle_game(2, 1, "Avg"))
    with pytest.raises(ValueError):
        spr_to_limsup(cycle_game(2, 1).replace(initial_distribution={("0", "1"): 1}))


@pytest.mark.parametrize("B", [0, 1])
def test_spr_to_limsup_small(B):
    for g in [cycle_game(1, B), cycle_game(2, B)]:
        assert threshold(spr_to_limsup(g), 0) == solve_spr(g).runner_wins


def test_swap_cost(fig1):
    sup = fig1.replace(cost=cost("Sup"))
    d = swap_cost(sup, cost("Disc"))
    assert (d.vertices, d.edges, d.budget, d.initial_distribution) == (
        sup.vertices, sup.edges, sup.budget, sup.initial_distribution)
    assert d.cost == cost("Disc")
    assert threshold(sup, 0) == threshold(d, 0)
    assert swap_cost(fig1, "LimSup").cost.kind.value == "LimSup"
