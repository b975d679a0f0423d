"""Command-line front end: `qsg <command> ...`.

Exit status: 0 on success or a true answer, 1 on a false answer, 2 on errors.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import docs
from .core import CapExceeded, CostKind, CostSpec, format_key, validate
from .encoder import BAD, DEFAULT_CAP, encode
from .generate import corpus, generate_random
from .oracle import oracle_discounted, oracle_static, oracle_value
from .reductions import abf_to_espr, espr_to_spr, solve_abf, spr_to_limsup, swap_cost
from .solvers import solve, solve_espr, solve_spr, threshold
from .static import fas_to_qsg, static_value

CAP_ENV = "QSG_CAP"
CHECK_HORIZON = 40


def _label(lab) -> str:
    if lab == BAD:
        return BAD
    where, delta = lab
    return f"{format_key(where)} | {delta!r}"


def _strategy(strat) -> dict:
    return {_label(k): _label(v) for k, v in sorted(strat.items(), key=lambda kv: _label(kv[0]))}


def _lasso(lasso) -> dict:
    return {"prefix": [str(x) for x in lasso.prefix], "cycle": [str(x) for x in lasso.cycle]}


def _read(path) -> str:
    try:
        return Path(path).read_text()
    except OSError as err:
        raise docs.DocumentError(f"cannot read {path}: {err.strerror}") from None


def _load(path):
    return docs.parse_game(_read(path))


def _plain(game, command):
    if game.extended:
        raise ValueError(f"{command} expects a plain QSG; this document has final vertices or safe edges")
    return game


def _write(path, text):
    if path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _rational(text) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}") from None


# ------------------------------------------------------------------ commands

def cmd_validate(args):
    game = _load(args.file)
    report = validate(game)
    print("ok" if report.ok else str(report))
    return 0 if report.ok else 1


def cmd_solve(args):
    game = _plain(_load(args.file), "solve")
    res = solve(game, args.cap)
    prefix, cycle = res.witness_path
    if args.json:
        out = {
            "value": str(res.initial_value),
            "cost": str(res.cost),
            "witness": _lasso(res.witness),
            "witness_path": {"prefix": [_label(s) for s in prefix], "cycle": [_label(s) for s in cycle]},
            "min_strategy": _strategy(res.min_strategy),
            "max_strategy": _strategy(res.max_strategy),
        }
        print(json.dumps(out, indent=2))
        return 0
    print(f"value = {res.initial_value}")
    print(f"cost = {res.cost}")
    print(f"witness = {res.witness}")
    print("witness cycle = " + " ; ".join(_label(s) for s in cycle))
    for name, strat in (("Runner", res.min_strategy), ("Saboteur", res.max_strategy)):
        print(f"{name} strategy ({len(strat)} states):")
        if args.strategies:
            for k, v in _strategy(strat).items():
                print(f"  {k}  =>  {v}")
    return 0


def cmd_threshold(args):
    text = _read(args.file)
    game = _plain(docs.parse_game(text), "threshold")
    T = args.value if args.value is not None else docs.parse_threshold(text)
    if T is None:
        raise ValueError("no --value given and the document has no threshold")
    ok = threshold(game, T, args.cap)
    print(f"value <= {T}: {'true' if ok else 'false'}")
    return 0 if ok else 1


def cmd_static(args):
    game = _load(args.file)
    res = static_value(game, args.cap)
    print(f"static value = {res.value}")
    print(f"distribution = {res.witness_distribution!r}")
    print(f"runner witness = {res.runner_witness}")
    if args.threshold is None:
        return 0
    ok = res.value <= args.threshold
    print(f"static value <= {args.threshold}: {'true' if ok else 'false'}")
    return 0 if ok else 1


def _safety(args, solver):
    res = solver(_load(args.file), args.cap)
    print(f"winner = {res.winner} ({res.engine} engine)")
    return 0 if res.runner_wins else 1


def cmd_spr(args):
    game = _load(args.file)
    if game.extended:
        raise ValueError("spr expects a plain QSG; use espr for final vertices or safe edges")
    return _safety(args, solve_spr)


def cmd_espr(args):
    return _safety(args, solve_espr)


def cmd_encode(args):
    game = _plain(_load(args.file), "encode")
    wg = encode(game, args.cap)
    out = {
        "format_version": docs.FORMAT_VERSION,
        "discount_mode": wg.discount_mode,
        "initial": wg.initial,
        "states": [{"id": i, "label": _label(lab), "owner": "Max" if wg.is_max[i] else "Min",
                    "succ": [[t, w] for t, w in wg.succ[i]]} for i, lab in enumerate(wg.labels)],
    }
    _write(args.out, json.dumps(out, indent=1) + "\n")
    print(f"{wg.n} states, {wg.transition_count()} transitions")
    return 0


def cmd_abf(args):
    inst = docs.parse_abf(_read(args.file))
    res = solve_abf(inst)
    print(f"winner = {res.winner}")
    return 0 if res.winner == "Prover" else 1


def _graph_doc(text):
    data = json.loads(text)
    if "vertices" not in data or "edges" not in data:
        raise docs.DocumentError("a graph document needs vertices and edges")
    return data["vertices"], [tuple(e) for e in data["edges"]]


def cmd_reduce(args):
    text = _read(args.input)
    kind = args.kind
    if kind == "abf2espr":
        out = abf_to_espr(docs.parse_abf(text))
    elif kind == "espr2spr":
        out = espr_to_spr(docs.parse_game(text))
    elif kind == "spr2limsup":
        out = spr_to_limsup(docs.parse_game(text))
    elif kind == "fas2qsg":
        if args.k is None:
            raise ValueError("fas2qsg needs --k")
        out = fas_to_qsg(_graph_doc(text), args.k, args.to or "LimSup", args.lam,
                         repair_sinks=args.repair_sinks)
    else:
        if args.to is None:
            raise ValueError("swapcost needs --to")
        out = swap_cost(docs.parse_game(text), CostSpec.parse(args.to, args.lam))
    _write(args.output, docs.serialize_game(out))
    return 0


def cmd_gen(args):
    if args.count is not None:
        if args.out in (None, "-"):
            raise ValueError("--count needs --out DIR")
        root = Path(args.out)
        root.mkdir(parents=True, exist_ok=True)
        for seed, game in corpus(args.count, CostSpec.parse(args.cost, args.lam)):
            (root / f"seed{seed:03d}.game").write_text(docs.serialize_game(game))
        print(f"wrote {args.count} games to {root}")
        return 0
    for name in ("vertices", "edges", "budget"):
        if getattr(args, name) is None:
            raise ValueError(f"gen needs --{name}")
    game = generate_random(args.vertices, args.edges, args.budget, CostSpec.parse(args.cost, args.lam),
                           args.seed, empty_start=args.empty_start)
    _write(args.out or "-", docs.serialize_game(game))
    return 0


def _check_one(game, cap):
    """(agree, message) for solver against oracle on one game."""
    if game.extended:
        a = solve_espr(game, cap, engine="explicit").winner
        b = solve_espr(game, cap, engine="product").winner
        return a == b, f"explicit {a}, product {b}"
    cost = game.cost
    res = solve(game, cap)
    if cost.kind is CostKind.DISC:
        iv = oracle_discounted(game, cost.lam, CHECK_HORIZON)
        return res.initial_value in iv, f"value {res.initial_value}, oracle [{iv.lo}, {iv.hi}]"
    rep = oracle_value(encode(game, cap), cost, hints=(res.min_strategy, res.max_strategy))
    ok = rep.agree and rep.value == res.initial_value
    return ok, f"value {res.initial_value}, oracle {rep.value_maxmin}..{rep.value_minmax} ({rep.method})"


def cmd_check(args):
    items = []
    if args.corpus is not None:
        items = [(f"seed{seed:03d}", g) for seed, g in corpus(args.corpus, CostSpec.parse(args.cost, args.lam))]
    for path in args.paths:
        p = Path(path)
        files = sorted(p.glob("*.game")) if p.is_dir() else [p]
        items += [(str(f), _load(f)) for f in files]
    if not items:
        raise ValueError("nothing to check: give FILE, DIR or --corpus N")
    failed = set()
    for name, game in items:
        ok, msg = _check_one(game, args.cap)
        print(f"{'ok' if ok else 'MISMATCH'} {name}: {msg}")
        if args.static and not game.extended:
            got, want = static_value(game).value, oracle_static(game)
            ok_static = got == want
            ok = ok and ok_static
            print(f"{'ok' if ok_static else 'MISMATCH'} {name} static: {got} vs oracle {want}")
        if not ok:
            failed.add(name)
    print(f"{len(items) - len(failed)}/{len(items)} agree")
    return 0 if not failed else 1


# ------------------------------------------------------------------ parser

def _default_cap() -> int:
    raw = os.environ.get(CAP_ENV)
    return int(raw) if raw else DEFAULT_CAP


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qsg", description="Quantitative sabotage game solver.")
    p.add_argument("--cap", type=int, default=None,
                   help=f"state/distribution cap (default {DEFAULT_CAP}, or ${CAP_ENV})")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", help="check a game document")
    s.add_argument("file")
    s.set_defaults(run=cmd_validate)

    s = sub.add_parser("solve", help="exact value, witness lasso and strategies")
    s.add_argument("file")
    s.add_argument("--json", action="store_true", help="machine-readable report")
    s.add_argument("--strategies", action="store_true", help="list every strategy choice")
    s.set_defaults(run=cmd_solve)

    s = sub.add_parser("threshold", help="is the value at most T?")
    s.add_argument("file")
    s.add_argument("--value", type=_rational, default=None, help="threshold (defaults to the document's)")
    s.set_defaults(run=cmd_threshold)

    s = sub.add_parser("static", help="value when Saboteur fixes one distribution")
    s.add_argument("file")
    s.add_argument("--threshold", type=_rational, default=None)
    s.set_defaults(run=cmd_static)

    for name, fn, text in (("spr", cmd_spr, "safety problem"), ("espr", cmd_espr, "extended safety problem")):
        s = sub.add_parser(name, help=f"{text}; exit 0 when Runner wins")
        s.add_argument("file")
        s.set_defaults(run=fn)

    s = sub.add_parser("encode", help="write the configuration game as JSON")
    s.add_argument("file")
    s.add_argument("--out", required=True, help="output path, or - for stdout")
    s.set_defaults(run=cmd_encode)

    s = sub.add_parser("abf", help="alternating Boolean formula games")
    abf = s.add_subparsers(dest="abf_command", required=True)
    a = abf.add_parser("solve", help="exit 0 when Prover wins")
    a.add_argument("file")
    a.set_defaults(run=cmd_abf)

    s = sub.add_parser("reduce", help="apply an instance transformer")
    s.add_argument("kind", choices=["abf2espr", "espr2spr", "spr2limsup", "fas2qsg", "swapcost"])
    s.add_argument("input")
    s.add_argument("output", help="output path, or - for stdout")
    s.add_argument("--k", type=int, default=None, help="feedback arc set size (fas2qsg)")
    s.add_argument("--to", default=None, help="target cost kind (swapcost, fas2qsg)")
    s.add_argument("--lambda", dest="lam", type=_rational, default=None)
    s.add_argument("--repair-sinks", action="store_true", help="fas2qsg: add self-loops to sinks")
    s.set_defaults(run=cmd_reduce)

    s = sub.add_parser("gen", help="seeded random game, or a corpus with --count")
    s.add_argument("--vertices", type=int)
    s.add_argument("--edges", type=int)
    s.add_argument("--budget", type=int)
    s.add_argument("--cost", default="Sup")
    s.add_argument("--lambda", dest="lam", type=_rational, default=None)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--empty-start", action="store_true", help="start from the empty distribution")
    s.add_argument("--count", type=int, default=None, help="write the seeded corpus instead")
    s.add_argument("--out", default=None)
    s.set_defaults(run=cmd_gen)

    s = sub.add_parser("check", help="solver against oracle; exit 1 on any disagreement")
    s.add_argument("paths", nargs="*", metavar="FILE|DIR")
    s.add_argument("--corpus", type=int, default=None, help="also check the first N corpus seeds")
    s.add_argument("--cost", default="Avg", help="cost for --corpus")
    s.add_argument("--lambda", dest="lam", type=_rational, default=None)
    s.add_argument("--static", action="store_true", help="also compare static values")
    s.set_defaults(run=cmd_check)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.cap is None:
            args.cap = _default_cap()
        return args.run(args)
    except (docs.DocumentError, CapExceeded, ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
