"""Command-line front end.  Exit status: 0 for a true verdict, 1 for a false
one, 2 for usage or input errors."""
from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from .core import GossipError, format_sequence, parse_agent, parse_call, parse_sequence
from .formula import parse_formula
from .modelcheck import (
    check_truth,
    enumerate_nonredundant,
    eval,
    eval_bounded,
    eval_bounded_converged,
    thread_count,
)
from .pairview import epv
from .protocol import (
    all_expert,
    check_partial_correctness,
    decide_termination,
    parse_protocol,
    simulate,
)
from .transforms import abab_witness, r_ab
from .views import a_simplification


def _seq_text(C, n: int) -> str:
    return format_sequence(C, n) or "ε"


def _emit(args, plain: str, data: dict) -> None:
    if args.json:
        print(json.dumps(data, sort_keys=True))
    else:
        print(plain)


def _load_protocol(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_protocol(fh.read())
    except OSError as exc:
        raise GossipError(f"cannot read protocol file: {exc}") from None


def cmd_eval(args) -> int:
    n = args.agents
    C = parse_sequence(args.seq, n)
    phi = parse_formula(args.formula, n)
    if args.bound is None:
        value = eval(phi, C, n)
        extra = {}
    elif args.bound == "auto":
        value, L = eval_bounded_converged(phi, C, n)
        extra = {"bound": L}
    else:
        value = eval_bounded(phi, C, int(args.bound), n)
        extra = {"bound": int(args.bound)}
    _emit(args, "true" if value else "false", {"value": value, **extra})
    return 0 if value else 1


def cmd_truth(args) -> int:
    n = args.agents
    verdict = check_truth(parse_formula(args.formula, n), n)
    plain = "true" if verdict.holds else f"false (counterexample: {_seq_text(verdict.counterexample, n)})"
    _emit(args, plain, verdict.to_dict(n))
    return 0 if verdict.holds else 1


def cmd_terminates(args) -> int:
    P = _load_protocol(args.protocol)
    v = decide_termination(P)
    n = P.num_agents
    if v.terminates:
        plain = "terminates"
    else:
        prefix, loop = v.witness
        plain = f"does not terminate (witness: {_seq_text(prefix, n)} then repeat {_seq_text(loop, n)})"
    _emit(args, plain, v.to_dict(n))
    return 0 if v.terminates else 1


def cmd_correctness(args) -> int:
    P = _load_protocol(args.protocol)
    n = P.num_agents
    goal = all_expert(n) if args.goal == "all-expert" else parse_formula(args.goal, n)
    verdict = check_partial_correctness(P, goal)
    plain = "true" if verdict.holds else f"false (counterexample: {_seq_text(verdict.counterexample, n)})"
    _emit(args, plain, verdict.to_dict(n))
    return 0 if verdict.holds else 1


def cmd_epv(args) -> int:
    n = args.agents
    V = epv(parse_sequence(args.seq, n), n)
    data = V.to_dict()
    lines = [f"*: {data['actual']}"]
    lines += [f"{k}: {' '.join(v)}" for k, v in data["pairs"].items()]
    _emit(args, "\n".join(lines), data)
    return 0


def cmd_reduce(args) -> int:
    n = args.agents
    C = parse_sequence(args.seq, n)
    a = parse_agent(args.agent, n)
    if args.kind == "a-simplify":
        out = a_simplification(C, a, n)
    else:
        if args.other is None:
            raise GossipError("r-ab needs --other")
        out = r_ab(C, a, parse_agent(args.other, n), n)
    _emit(args, _seq_text(out, n), {"sequence": format_sequence(out, n)})
    return 0


def cmd_witness(args) -> int:
    n = args.agents
    pair = parse_call(args.pair, n)
    chain = abab_witness(parse_sequence(args.seq, n), pair.lo, pair.hi, n)
    _emit(args, chain.render(n), {"chain": chain.records(n), "construction": chain.construction})
    return 0


def cmd_enumerate(args) -> int:
    n = args.agents
    seqs = [_seq_text(node.sequence, n)
            for node in enumerate_nonredundant(n, threads=thread_count(args.threads))]
    if args.json:
        print(json.dumps({"count": len(seqs), "sequences": seqs}, sort_keys=True))
    else:
        print("\n".join(seqs))
        print(f"# {len(seqs)} sequences")
    return 0


def cmd_simulate(args) -> int:
    P = _load_protocol(args.protocol)
    scheduler = args.scheduler or ("lexicographic" if args.seed is None else "random")
    run = simulate(P, scheduler, args.max_steps, args.seed)
    n = P.num_agents
    lines = [f"{s.step}: {s.call.name(n)} -> {s.situation}" for s in run.trace]
    lines.append(("terminal" if run.terminal else "not terminal") + f": {run.final}")
    _emit(args, "\n".join(lines), run.to_dict(n))
    return 0 if run.terminal else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gossipck", description="Epistemic gossip model checker")
    p.add_argument("--json", action="store_true", help="structured output")
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads for enumeration (default: $GOSSIPCK_THREADS or 1)")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(func=func)
        sp.add_argument("--json", action="store_true", default=argparse.SUPPRESS)
        return sp

    sp = add("eval", cmd_eval, "evaluate a formula after a call sequence")
    sp.add_argument("--agents", type=int, required=True)
    sp.add_argument("--seq", required=True)
    sp.add_argument("--formula", required=True)
    sp.add_argument("--bound", help="use the bounded universe of this size ('auto' to grow it)")

    sp = add("truth", cmd_truth, "decide whether a formula holds after every sequence")
    sp.add_argument("--agents", type=int, required=True)
    sp.add_argument("--formula", required=True)

    sp = add("terminates", cmd_terminates, "decide whether a protocol always terminates")
    sp.add_argument("--protocol", required=True)

    sp = add("correctness", cmd_correctness, "check partial correctness of a protocol")
    sp.add_argument("--protocol", required=True)
    sp.add_argument("--goal", required=True, help="formula, or 'all-expert'")

    sp = add("epv", cmd_epv, "print the pair-view of a sequence")
    sp.add_argument("--agents", type=int, required=True)
    sp.add_argument("--seq", required=True)

    sp = add("reduce", cmd_reduce, "simplify or reroute a sequence")
    sp.add_argument("--agents", type=int, required=True)
    sp.add_argument("--seq", required=True)
    sp.add_argument("--kind", choices=["a-simplify", "r-ab"], required=True)
    sp.add_argument("--agent", required=True)
    sp.add_argument("--other")

    sp = add("witness", cmd_witness, "chain relating an ab-free sequence to the empty one")
    sp.add_argument("--agents", type=int, required=True)
    sp.add_argument("--seq", required=True)
    sp.add_argument("--pair", required=True)

    sp = add("enumerate", cmd_enumerate, "list the non-redundant sequences")
    sp.add_argument("--agents", type=int, required=True)
    sp.add_argument("--threads", type=int, default=argparse.SUPPRESS)

    sp = add("simulate", cmd_simulate, "run a protocol")
    sp.add_argument("--protocol", required=True)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--max-steps", type=int, default=100)
    sp.add_argument("--scheduler", choices=["lexicographic", "random"])
    return p


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except GossipError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())
