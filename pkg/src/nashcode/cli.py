"""Command-line interface.

Exit codes: 0 success / Nash, 1 a checked property fails, 2 usage or input
error (including an exceeded enumeration budget).
"""

from __future__ import annotations

import argparse
import itertools
import json
import random
import sys
from fractions import Fraction
from pathlib import Path

from . import binary as binary_mod
from .decoding import (
    DecoderTable,
    FixedOrder,
    Uniform,
    Weighted,
    deterministic_candidate_count,
    derive_fixed_order,
    enumerate_general_deterministic_monotonic,
    tie_structure,
)
from .equilibrium import BudgetExceeded, check_nash, pooling_code
from .instances import (
    InstanceError,
    decoder_from_json,
    dumps,
    instance_to_json,
    load_instance,
    random_instance,
    reproduce_tables,
    rule_to_json,
    sample_binary_games,
)
from .model import ModelError, format_rational, word_str
from .search import better_reply_dynamics, global_receiver_optimal, local_receiver_search

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class UsageError(ValueError):
    pass


def _emit(doc, pretty_text=None, pretty=False) -> None:
    if pretty and pretty_text is not None:
        sys.stdout.write(pretty_text.rstrip("\n") + "\n")
    else:
        sys.stdout.write(dumps(doc))


def _load(args):
    if not args.instance:
        raise UsageError("--instance is required")
    return load_instance(args.instance)


def _decoder(args, inst):
    raw = None
    if getattr(args, "decoder", None):
        text = args.decoder
        path = Path(text)
        if not text.lstrip().startswith("{") and path.exists():
            text = path.read_text()
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InstanceError(f"--decoder: {exc}") from None
    elif inst.decoder is not None:
        raw = inst.decoder
    if raw is None:
        return FixedOrder.natural(inst.game.M)
    return decoder_from_json(raw, inst.game)


def _codebook(inst):
    if inst.codebook is None:
        raise UsageError("instance has no codebook section")
    return inst.codebook


def _words(ws) -> list:
    return [word_str(w) for w in ws]


def report_to_json(report) -> dict:
    w = report.witness
    return {
        "isNash": report.is_nash,
        "receiverSideOk": report.receiver_side_ok,
        "receiverWitness": None
        if report.receiver_witness is None
        else {"output": word_str(report.receiver_witness[0]), "state": report.receiver_witness[1]},
        "perState": [format_rational(p) for p in report.per_state],
        "uniqueOptimum": list(report.unique_optimum),
        "senderPayoff": format_rational(report.sender_payoff),
        "receiverPayoff": format_rational(report.receiver_payoff),
        "witness": None
        if w is None
        else {
            "state": w.state,
            "alternative": word_str(w.alternative),
            "currentProb": format_rational(w.current_prob),
            "deviationProb": format_rational(w.deviation_prob),
        },
    }


def trace_to_json(trace) -> dict:
    return {
        "steps": [
            {
                "codebook": _words(s.codebook.words),
                "changedState": s.changed_state,
                "receiverPayoff": format_rational(s.receiver_payoff),
            }
            for s in trace.steps
        ],
        "terminal": _words(trace.terminal.words),
    }


def _trace_text(trace) -> str:
    lines = [f"{'step':>4}  {'codebook':<24} {'changed':>7}  V"]
    for k, s in enumerate(trace.steps):
        ch = "-" if s.changed_state is None else str(s.changed_state)
        lines.append(f"{k:>4}  {str(s.codebook):<24} {ch:>7}  {format_rational(s.receiver_payoff)}")
    return "\n".join(lines)


def cmd_check(args) -> int:
    inst = _load(args)
    code = _codebook(inst)
    report = check_nash(inst.game, code, _decoder(args, inst), args.budget)
    doc = report_to_json(report)
    doc["codebook"] = _words(code.words)
    text = [f"codebook {code}: {'Nash' if report.is_nash else 'not Nash'}"]
    text.append(f"U = {format_rational(report.sender_payoff)}  V = {format_rational(report.receiver_payoff)}")
    if report.witness:
        w = report.witness
        text.append(
            f"state {w.state}: send {word_str(w.alternative)} instead of {word_str(code[w.state])}: "
            f"{format_rational(w.current_prob)} -> {format_rational(w.deviation_prob)}"
        )
    if not report.receiver_side_ok:
        text.append(f"decoder is not a best response at {doc['receiverWitness']}")
    _emit(doc, "\n".join(text), args.pretty)
    return EXIT_OK if report.is_nash else EXIT_FAIL


def cmd_partition(args) -> int:
    inst = _load(args)
    code = _codebook(inst)
    ts = tie_structure(inst.game, code)
    regions = ts.regions()
    doc = {
        "codebook": _words(code.words),
        "regions": [_words(r) for r in regions],
        "ties": {word_str(y): sorted(T) for y, T in zip(ts.outputs, ts.ties)},
    }
    text = "\n".join(f"Y{i} = {{{', '.join(_words(r))}}}" for i, r in enumerate(regions))
    _emit(doc, text, args.pretty)
    return EXIT_OK


def cmd_payoff(args) -> int:
    inst = _load(args)
    code = _codebook(inst)
    report = check_nash(inst.game, code, _decoder(args, inst), args.budget)
    doc = {
        "codebook": _words(code.words),
        "perState": [format_rational(p) for p in report.per_state],
        "senderPayoff": format_rational(report.sender_payoff),
        "receiverPayoff": format_rational(report.receiver_payoff),
    }
    text = "  ".join(f"p{i}={format_rational(p)}" for i, p in enumerate(report.per_state))
    text += f"\nU = {doc['senderPayoff']}  V = {doc['receiverPayoff']}"
    _emit(doc, text, args.pretty)
    return EXIT_OK


def _start(inst):
    return inst.codebook if inst.codebook is not None else pooling_code(inst.game)[0]


def cmd_search_local(args) -> int:
    inst = _load(args)
    terminal, trace = local_receiver_search(inst.game, _start(inst), args.budget)
    doc = trace_to_json(trace)
    doc["terminalNash"] = check_nash(inst.game, terminal, None, args.budget).is_nash
    _emit(doc, _trace_text(trace), args.pretty)
    return EXIT_OK if doc["terminalNash"] else EXIT_FAIL


def cmd_search_global(args) -> int:
    inst = _load(args)
    code, value = global_receiver_optimal(inst.game, args.budget)
    nash = check_nash(inst.game, code, None, args.budget).is_nash
    doc = {"codebook": _words(code.words), "receiverPayoff": format_rational(value), "isNash": nash}
    _emit(doc, f"receiver-optimal codebook {code}: V = {format_rational(value)}", args.pretty)
    return EXIT_OK if nash else EXIT_FAIL


def cmd_dynamics(args) -> int:
    inst = _load(args)
    rule = _decoder(args, inst)
    if isinstance(rule, DecoderTable):
        raise UsageError("dynamics needs a tie-breaking rule, not a fixed table")
    terminal, trace = better_reply_dynamics(inst.game, _start(inst), rule, args.budget)
    doc = trace_to_json(trace)
    doc["terminalNash"] = check_nash(inst.game, terminal, rule, args.budget).is_nash
    _emit(doc, _trace_text(trace), args.pretty)
    return EXIT_OK if doc["terminalNash"] else EXIT_FAIL


def _sweep_rules(names, M, seed, orders):
    rng = random.Random(seed)
    rules = []
    for name in names:
        if name == "uniform":
            rules.append(Uniform())
        elif name == "fixed-order":
            perms = list(itertools.permutations(range(M)))
            picked = perms if orders is None or orders >= len(perms) else rng.sample(perms, orders)
            rules.extend(FixedOrder(p) for p in picked)
        elif name == "weighted":
            for _ in range(2):
                rules.append(Weighted(tuple(Fraction(rng.randint(1, 9), rng.randint(1, 9)) for _ in range(M))))
        else:
            raise UsageError(f"unknown rule family {name!r}")
    return rules


def cmd_verify_binary_sweep(args) -> int:
    games = sample_binary_games(args.states, args.uses, args.games, args.seed)
    rules = _sweep_rules(args.rules.split(","), args.states, args.seed, args.orders)
    report = binary_mod.verify_binary_theorem(games, rules, budget=args.budget, workers=args.workers)
    doc = {
        "states": report.M,
        "uses": report.n,
        "instances": report.games,
        "codebooks": report.codebooks,
        "rules": report.rules,
        "checks": report.checks,
        "nash": report.nash,
        "counterexamples": report.counterexamples,
    }
    text = (
        f"M={report.M} n={report.n}: {report.games} games x {report.codebooks} codebooks x "
        f"{len(report.rules)} rules = {report.checks} checks, {report.nash} Nash, "
        f"{len(report.counterexamples)} counterexamples"
    )
    _emit(doc, text, args.pretty)
    return EXIT_OK if report.all_nash else EXIT_FAIL


def cmd_enumerate_monotonic(args) -> int:
    decoders = enumerate_general_deterministic_monotonic(args.states, max_states=args.max_states)
    orders = [list(derive_fixed_order(g).order) for g in decoders]
    doc = {
        "states": args.states,
        "candidates": deterministic_candidate_count(args.states),
        "count": len(decoders),
        "orders": orders,
    }
    text = f"{len(decoders)} of {doc['candidates']} deterministic decoders are monotonic:\n"
    text += "\n".join(" < ".join(map(str, o)) for o in orders)
    _emit(doc, text, args.pretty)
    return EXIT_OK


def cmd_paper_tables(args) -> int:
    report = reproduce_tables()
    doc = {"cells": report.cells, "diff": report.diffs}
    text = f"{report.cells} cells checked, {len(report.diffs)} mismatches"
    for d in report.diffs:
        text += f"\n  {d['cell']}: expected {d['expected']}, got {d['got']}"
    _emit(doc, text, args.pretty)
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_random(args) -> int:
    inst = random_instance(
        args.seed, args.states, args.inputs, args.outputs, args.uses, args.max_denominator, binary=args.binary
    )
    if args.with_decoder:
        inst.decoder = rule_to_json(FixedOrder.natural(inst.game.M))
    doc = instance_to_json(inst)
    if args.out:
        Path(args.out).write_text(dumps(doc))
    else:
        sys.stdout.write(dumps(doc))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nashcode", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, instance=True, decoder=False):
        if instance:
            sp.add_argument("--instance", help="instance JSON file")
        if decoder:
            sp.add_argument("--decoder", help="decoder JSON (inline or file path)")
        sp.add_argument("--budget", type=int, help="enumeration budget (default: $NASHCODE_BUDGET or 2^20)")
        sp.add_argument("--pretty", action="store_true", help="human-readable output")

    for name, fn, dec in (
        ("check", cmd_check, True),
        ("partition", cmd_partition, False),
        ("payoff", cmd_payoff, True),
        ("search-local", cmd_search_local, False),
        ("search-global", cmd_search_global, False),
        ("dynamics", cmd_dynamics, True),
    ):
        sp = sub.add_parser(name)
        common(sp, decoder=dec)
        sp.set_defaults(func=fn)

    sp = sub.add_parser("verify-binary-sweep")
    common(sp, instance=False)
    sp.add_argument("--states", type=int, required=True)
    sp.add_argument("--uses", type=int, required=True)
    sp.add_argument("--rules", default="uniform,fixed-order,weighted")
    sp.add_argument("--games", type=int, default=1)
    sp.add_argument("--orders", type=int, default=None, help="sample this many fixed orders (default: all)")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--workers", type=int, default=1)
    sp.set_defaults(func=cmd_verify_binary_sweep)

    sp = sub.add_parser("enumerate-monotonic")
    common(sp, instance=False)
    sp.add_argument("--states", type=int, required=True)
    sp.add_argument("--max-states", type=int, default=5)
    sp.set_defaults(func=cmd_enumerate_monotonic)

    sp = sub.add_parser("paper-tables")
    common(sp, instance=False)
    sp.set_defaults(func=cmd_paper_tables)

    sp = sub.add_parser("random")
    common(sp, instance=False)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--states", type=int, default=2)
    sp.add_argument("--inputs", type=int, default=2)
    sp.add_argument("--outputs", type=int, default=2)
    sp.add_argument("--uses", type=int, default=1)
    sp.add_argument("--max-denominator", type=int, default=1000)
    sp.add_argument("--binary", action="store_true")
    sp.add_argument("--with-decoder", action="store_true")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_random)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except BudgetExceeded as exc:
        sys.stderr.write(json.dumps({"error": "budget-exceeded", "message": str(exc)}) + "\n")
        return EXIT_INPUT
    except (InstanceError, ModelError, UsageError, ValueError, OSError) as exc:
        sys.stderr.write(json.dumps({"error": "input", "message": str(exc)}) + "\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
