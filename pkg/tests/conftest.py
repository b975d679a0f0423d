from fractions import Fraction
from pathlib import Path

import pytest

import qsg
from qsg import CostKind, CostSpec, Qsg, parse_game

FIXTURES = Path(qsg.__file__).parent / "fixtures"
LAM = Fraction(1, 2)


def cost(kind, lam=LAM):
    kind = CostKind(kind)
    return CostSpec(kind, lam) if kind is CostKind.DISC else CostSpec(kind)


@pytest.fixture(scope="session")
def fig1():
    return parse_game((FIXTURES / "fig1.game").read_text())


@pytest.fixture(scope="session")
def corpus200():
    return qsg.corpus(200)


def loop_game(budget=1, units=1, kind="Sup"):
    return Qsg(vertices=("a",), edges=(("a", "a"),), budget=budget, initial_vertex="a",
               initial_distribution={("a", "a"): units} if units else {}, cost=cost(kind))


def cycle_game(n, budget, kind="Sup", start="0"):
    vs = [str(i) for i in range(n)]
    return Qsg(vertices=vs, edges=[(vs[i], vs[(i + 1) % n]) for i in range(n)], budget=budget,
               initial_vertex=start, cost=cost(kind))


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(RESULTS, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
