"""JSON documents for games and ABF instances."""
from __future__ import annotations

import json
import re
from fractions import Fraction

from .core import CostKind, CostSpec, Distribution, ExtendedQsg, Qsg, validate
from .reductions import AbfInstance

FORMAT_VERSION = 1
GAME_FIELDS = ("format_version", "vertices", "edges", "budget", "initial_vertex", "initial_distribution",
               "cost", "move_granularity", "final_vertices", "safe_edges", "threshold")
ABF_FIELDS = ("format_version", "prover_vars", "disprover_vars", "clauses", "initial_valuation",
              "initial_player")
ARROW = "->"


class DocumentError(ValueError):
    def __init__(self, message: str, line: int | None = None, field: str | None = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)
        self.line, self.field = line, field


def _rational(x) -> str | int:
    x = Fraction(x)
    return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _parse_rational(x, field):
    if isinstance(x, bool) or not isinstance(x, (int, str)):
        raise DocumentError("expected an integer or a 'p/q' string", field=field)
    try:
        return Fraction(x)
    except (ValueError, ZeroDivisionError):
        raise DocumentError(f"not a rational: {x!r}", field=field) from None


class _Reader:
    """Field access that reports the line a top-level key sits on."""

    def __init__(self, text: str, known: tuple):
        try:
            self.data = json.loads(text)
        except json.JSONDecodeError as err:
            raise DocumentError(err.msg, line=err.lineno) from None
        if not isinstance(self.data, dict):
            raise DocumentError("document must be a JSON object", line=1)
        self.text = text
        for key in self.data:
            if key not in known:
                self.fail(key, "unknown field")
        version = self.data.get("format_version", FORMAT_VERSION)
        if version != FORMAT_VERSION:
            self.fail("format_version", f"unsupported version {version!r}")

    def line(self, key):
        m = re.search(r'"%s"\s*:' % re.escape(key), self.text)
        return self.text.count("\n", 0, m.start()) + 1 if m else None

    def fail(self, key, message, sub=None):
        raise DocumentError(message, line=self.line(key), field=key if sub is None else f"{key}{sub}")

    def get(self, key, kind, default=...):
        if key not in self.data:
            if default is ...:
                raise DocumentError("missing required field", field=key)
            return default
        value = self.data[key]
        if kind is int and (isinstance(value, bool) or not isinstance(value, int)):
            self.fail(key, "expected an integer")
        if kind is not int and not isinstance(value, kind):
            self.fail(key, f"expected {kind.__name__}")
        return value

    def strings(self, key, default=...):
        value = self.get(key, list, default)
        for i, x in enumerate(value or ()):
            if not isinstance(x, str):
                self.fail(key, "expected a string", f"[{i}]")
        return value

    def pairs(self, key, default=...):
        value = self.get(key, list, default)
        if value is None:
            return None
        for i, x in enumerate(value):
            if not (isinstance(x, list) and len(x) == 2 and all(isinstance(y, str) for y in x)):
                self.fail(key, "expected a [src, dst] pair of strings", f"[{i}]")
        return [tuple(x) for x in value]


# ------------------------------------------------------------------ games

def _read_game(text: str):
    r = _Reader(text, GAME_FIELDS)
    vertices = r.strings("vertices")
    for v in vertices:
        if ARROW in v:
            r.fail("vertices", f"vertex id {v!r} contains {ARROW!r}")
    known = set(vertices)
    edges = r.pairs("edges")
    for i, (a, b) in enumerate(edges):
        for x in (a, b):
            if x not in known:
                r.fail("edges", f"edge {a}{ARROW}{b} references unknown vertex {x!r}", f"[{i}]")
    budget = r.get("budget", int)
    start = r.get("initial_vertex", str)
    finals = r.strings("final_vertices", None)
    safe = r.pairs("safe_edges", None)
    units = {}
    for key, n in r.get("initial_distribution", dict, {}).items():
        if isinstance(n, bool) or not isinstance(n, int):
            r.fail("initial_distribution", "expected an integer count", f"[{key!r}]")
        if ARROW in key:
            a, _, b = key.partition(ARROW)
            units[(a, b)] = n
        else:
            units[key] = n
    cost_doc = r.get("cost", dict)
    if "kind" not in cost_doc:
        r.fail("cost", "missing 'kind'")
    try:
        kind = CostKind(cost_doc["kind"])
    except ValueError:
        r.fail("cost", f"unknown cost kind {cost_doc['kind']!r}", ".kind")
    extra = set(cost_doc) - {"kind", "lambda"}
    if extra:
        r.fail("cost", f"unknown keys {sorted(extra)}")
    lam = _parse_rational(cost_doc["lambda"], "cost.lambda") if "lambda" in cost_doc else None
    try:
        cost = CostSpec(kind, lam)
    except ValueError as err:
        r.fail("cost", str(err))
    common = dict(vertices=tuple(vertices), edges=tuple(edges), budget=budget, initial_vertex=start,
                  initial_distribution=Distribution(units), cost=cost,
                  move_granularity=r.get("move_granularity", int, 1))
    if finals is not None or safe is not None:
        game = ExtendedQsg(**common, final_vertices=tuple(finals or ()), safe_edges=tuple(safe or ()))
    else:
        game = Qsg(**common)
    report = validate(game)
    if not report.ok:
        raise DocumentError("; ".join(report.violations))
    T = r.data.get("threshold")
    return game, None if T is None else _parse_rational(T, "threshold")


def parse_game(text: str):
    """Qsg, or ExtendedQsg when final_vertices or safe_edges are present."""
    return _read_game(text)[0]


def parse_threshold(text: str):
    """The optional threshold of a game document, as a Fraction or None."""
    return _read_game(text)[1]


def _key(k) -> str:
    return f"{k[0]}{ARROW}{k[1]}" if isinstance(k, tuple) else str(k)


def serialize_game(game: Qsg, threshold=None) -> str:
    for v in game.vertices:
        if ARROW in v:
            raise ValueError(f"vertex id {v!r} contains {ARROW!r}")
    cost = {"kind": game.cost.kind.value}
    if game.cost.lam is not None:
        cost["lambda"] = _rational(game.cost.lam)
    doc = {
        "format_version": FORMAT_VERSION,
        "vertices": list(game.vertices),
        "edges": [list(e) for e in game.edges],
        "budget": game.budget,
        "initial_vertex": game.initial_vertex,
        "initial_distribution": {_key(k): n for k, n in game.initial_distribution.items() if n},
        "cost": cost,
        "move_granularity": game.move_granularity,
    }
    if game.extended:
        doc["final_vertices"] = list(game.final_vertices)
        doc["safe_edges"] = [list(e) for e in game.safe_edges]
    if threshold is not None:
        doc["threshold"] = _rational(threshold)
    return _dump(doc)


def _render(x, depth):
    # flat lists stay on one line so documents are easy to edit by hand
    pad = "  " * (depth + 1)
    if isinstance(x, dict) and x:
        body = ",\n".join(f"{pad}{json.dumps(k)}: {_render(v, depth + 1)}" for k, v in x.items())
        return "{\n" + body + "\n" + "  " * depth + "}"
    if isinstance(x, list) and any(isinstance(y, (list, dict)) for y in x):
        body = ",\n".join(pad + _render(y, depth + 1) for y in x)
        return "[\n" + body + "\n" + "  " * depth + "]"
    return json.dumps(x)


def _dump(doc) -> str:
    return _render(doc, 0) + "\n"


# ------------------------------------------------------------------ ABF

def parse_abf(text: str) -> AbfInstance:
    r = _Reader(text, ABF_FIELDS)
    clauses = r.get("clauses", list)
    for i, clause in enumerate(clauses):
        if not isinstance(clause, list) or not all(isinstance(l, str) and l.lstrip("-") for l in clause):
            r.fail("clauses", "expected a list of literal strings such as \"X\" or \"-X\"", f"[{i}]")
    player = r.get("initial_player", str, "prover")
    if player not in ("prover", "disprover"):
        r.fail("initial_player", "must be \"prover\" or \"disprover\"")
    try:
        return AbfInstance(prover_vars=tuple(r.strings("prover_vars")),
                           disprover_vars=tuple(r.strings("disprover_vars")),
                           cnf=tuple(tuple(c) for c in clauses),
                           initial_valuation=frozenset(r.strings("initial_valuation", [])),
                           initial_player=player)
    except ValueError as err:
        raise DocumentError(str(err)) from None


def serialize_abf(instance: AbfInstance) -> str:
    doc = {
        "format_version": FORMAT_VERSION,
        "prover_vars": list(instance.prover_vars),
        "disprover_vars": list(instance.disprover_vars),
        "clauses": [[v if pol else f"-{v}" for v, pol in clause] for clause in instance.cnf],
        "initial_valuation": sorted(instance.initial_valuation),
        "initial_player": instance.initial_player.lower(),
    }
    return _dump(doc)
