import math

import pytest

from qsg import CapExceeded, Distribution, ExtendedQsg, Qsg, encode, encode_safety, redistributions
from qsg.encoder import DUPLICATED, ROUNDS
from conftest import cost, loop_game, cycle_game


def test_fig1_min_out_degree(fig1):
    g = encode(fig1)
    for s, out in zip(g.labels, g.succ):
        if not g.is_max[g.index[s]] and s[0] == "2":
            assert sorted(g.labels[t][0] for t, _ in out) == [("2", "1"), ("2", "3")]


def test_zero_budget_is_arena_sized(fig1):
    g = encode(fig1.replace(budget=0))
    assert g.n == len(fig1.vertices) + len(fig1.edges)
    assert g.max_weight == 0


def test_max_state_successors_match_redistributions():
    q = cycle_game(2, 1)
    g = encode(q)
    for i, lab in enumerate(g.labels):
        if g.is_max[i]:
            assert len(g.succ[i]) == len(redistributions(lab[1], q))


def test_weights_and_structure(corpus200):
    for seed, q in corpus200[:60]:
        g = encode(q)
        assert not (g.min_states & g.max_states)
        assert all(g.succ[i] for i in range(g.n))
        assert g.max_weight <= q.budget
        for i, out in enumerate(g.succ):
            lab = g.labels[i]
            if not g.is_max[i]:
                assert len(out) == len(q.out_edges(lab[0]))
            for t, w in out:
                assert w == lab[1][lab[0]] if g.is_max[i] else w == lab[1][g.labels[t][0]]


def test_state_bound_on_corpus(corpus200):
    for seed, q in corpus200:
        bound = (len(q.vertices) + len(q.edges)) * math.comb(len(q.edges) + q.budget, q.budget)
        assert encode(q).n <= bound, seed


def test_disc_rounds_mode():
    q = loop_game(kind="Disc")
    g = encode(q)
    assert g.discount_mode == ROUNDS
    assert all(w == 0 for i, out in enumerate(g.succ) if g.is_max[i] for _, w in out)
    assert encode(loop_game(kind="Avg")).discount_mode == DUPLICATED


def test_cap():
    with pytest.raises(CapExceeded):
        encode(cycle_game(3, 3), cap=10)


def test_extended_needs_safety_encoding():
    q = ExtendedQsg(vertices=("a", "f"), edges=(("a", "f"),), budget=1, initial_vertex="a",
                    cost=cost("Sup"), final_vertices=("f",))
    with pytest.raises(ValueError):
        encode(q)


def test_safety_forced_loss():
    s = encode_safety(loop_game())
    assert s.game.initial in s.bad


def test_safety_zero_budget():
    s = encode_safety(cycle_game(3, 0))
    entered = {t for i, out in enumerate(s.game.succ) for t, _ in out if t != i}
    assert not (s.bad & entered)


def test_safety_final_vertex_marks():
    q = ExtendedQsg(vertices=("a", "f"), edges=(("a", "a"), ("a", "f")), budget=1,
                    initial_vertex="a", cost=cost("Sup"), final_vertices=("f",))
    s = encode_safety(q)
    # arrival is read on the max state (edge into f, distribution)
    arrivals = [lab for lab in s.game.labels if lab != "bad-sink" and lab[0] == ("a", "f")]
    assert arrivals
    for lab in arrivals:
        assert (lab in s.bad_states) == (lab[1]["f"] > 0)
        assert (lab in s.win_states) == (lab[1]["f"] == 0)
