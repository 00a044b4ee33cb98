"""Guarded-rule gossip protocols on communication graphs.

A protocol is a list of rules ``guard -> (x, y)``; a call is enabled after a
sequence when some rule for it has a true guard.  Guards may use common
knowledge without nesting, so whether a call is enabled depends only on the
pair-view of the sequence, which makes the generated runs a walk on a
finite graph of pair-views.
"""
from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from typing import Sequence

from .core import (
    Call,
    GossipError,
    Situation,
    agent_name,
    format_sequence,
    parse_agent,
    parse_call,
)
from .formula import (
    Atom,
    Common,
    Formula,
    Fragment,
    Implies,
    Not,
    classify,
    conj,
    format_formula,
    max_agent,
    parse_formula,
)
from .modelcheck import TruthVerdict, check_truth, eval_at, shared_explorer
from .pairview import EpistemicPairView, epv

__all__ = [
    "CommunicationGraph",
    "Rule",
    "Protocol",
    "TerminationVerdict",
    "TraceStep",
    "Simulation",
    "parse_protocol",
    "common_knowledge_protocol",
    "all_expert",
    "enabled_calls",
    "enabled_at",
    "decide_termination",
    "check_partial_correctness",
    "simulate",
    "unsettled_triples",
]


@dataclass(frozen=True)
class CommunicationGraph:
    num_agents: int
    edges: frozenset

    def __post_init__(self):
        edges = frozenset(Call.of(*e) if not isinstance(e, Call) else e for e in self.edges)
        object.__setattr__(self, "edges", edges)
        if self.num_agents < 2:
            raise GossipError("need at least two agents")
        for e in edges:
            if e.hi >= self.num_agents:
                raise GossipError(f"edge {e} out of range")
        # connectivity by flood fill from agent 0
        seen = {0}
        stack = [0]
        while stack:
            u = stack.pop()
            for v in self.neighbours(u):
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        if len(seen) != self.num_agents:
            raise GossipError("communication graph is not connected")

    def neighbours(self, i: int) -> list[int]:
        return sorted(e.other(i) for e in self.edges if i in e)

    @classmethod
    def complete(cls, n: int) -> "CommunicationGraph":
        return cls(n, frozenset(Call(i, j) for i in range(n) for j in range(i + 1, n)))

    @classmethod
    def path(cls, n: int) -> "CommunicationGraph":
        return cls(n, frozenset(Call(i, i + 1) for i in range(n - 1)))


@dataclass(frozen=True)
class Rule:
    guard: Formula
    call: Call

    def __str__(self) -> str:
        return f"{format_formula(self.guard)} -> ({agent_name(self.call.lo)},{agent_name(self.call.hi)})"


@dataclass(frozen=True)
class Protocol:
    graph: CommunicationGraph
    rules: tuple[Rule, ...]

    def __post_init__(self):
        if not self.rules:
            raise GossipError("a protocol needs at least one rule")
        for r in self.rules:
            if r.call not in self.graph.edges:
                raise GossipError(f"rule call {r.call} is not an edge of the graph")
            if classify(r.guard) is Fragment.GENERAL:
                raise GossipError(f"guard {format_formula(r.guard)} nests common knowledge")
            if max_agent(r.guard) >= self.graph.num_agents:
                raise GossipError(f"guard {format_formula(r.guard)} mentions an unknown agent")

    @property
    def num_agents(self) -> int:
        return self.graph.num_agents


@dataclass(frozen=True)
class TerminationVerdict:
    """``witness`` is ``(prefix, loop)``: the protocol can generate ``prefix``
    followed by ``loop`` repeated forever.  ``loop`` has a single call when
    that call leaves the pair-view unchanged."""

    terminates: bool
    witness: tuple[tuple[Call, ...], tuple[Call, ...]] | None = None
    explored: int = 0

    @property
    def call(self) -> Call | None:
        if self.witness is None or len(self.witness[1]) != 1:
            return None
        return self.witness[1][0]

    def to_dict(self, n: int = 0) -> dict:
        w = None
        if self.witness is not None:
            w = {"prefix": format_sequence(self.witness[0], n),
                 "loop": format_sequence(self.witness[1], n)}
        return {"terminates": self.terminates, "witness": w, "explored": self.explored}


# --- parsing -------------------------------------------------------------------

_RULE_RE = re.compile(r"^rule\s+(?P<guard>.*)->\s*\(\s*(?P<x>\w+)\s*,\s*(?P<y>\w+)\s*\)\s*$")
_BINDER_RE = re.compile(r"^\s*(?P<var>\w+)\s+in\s+(?P<dom>A|P|N\(\s*(?P<of>\w+)\s*\))\s*$")


def _expand(binders: list[tuple[str, str, str | None]], graph: CommunicationGraph):
    """All variable assignments for a ``forall`` header."""
    n = graph.num_agents
    envs = [{}]
    for var, dom, of in binders:
        nxt = []
        for env in envs:
            if dom == "A":
                values = range(n)
            elif dom == "P":
                values = range(n)
            else:
                if of not in env:
                    raise GossipError(f"N({of}) refers to an unbound variable")
                values = graph.neighbours(env[of])
            for v in values:
                nxt.append({**env, var: v})
        envs = nxt
    return envs


def _rule_lines(line: str, graph: CommunicationGraph) -> list[Rule]:
    n = graph.num_agents
    binders: list[tuple[str, str, str | None]] = []
    body = line
    if line.startswith("forall"):
        header, sep, body = line[len("forall"):].partition(":")
        if not sep:
            raise GossipError(f"missing ':' in template: {line!r}")
        parsed = []
        for part in header.split(","):
            m = _BINDER_RE.match(part)
            if not m:
                raise GossipError(f"bad binder {part.strip()!r}")
            dom = m["dom"] if m["of"] is None else "N"
            parsed.append((m["var"], dom, m["of"]))
        bound = {v for v, _, _ in parsed}
        # variables only used as N(i) range over all agents
        implicit = [(of, "A", None) for _, dom, of in parsed
                    if dom == "N" and of not in bound]
        binders = list(dict.fromkeys(implicit)) + parsed
        body = body.strip()
    m = _RULE_RE.match(body)
    if not m:
        raise GossipError(f"not a rule: {line!r}")
    rules = []
    for env in _expand(binders, graph):
        try:
            x = env[m["x"]] if m["x"] in env else parse_agent(m["x"], n)
            y = env[m["y"]] if m["y"] in env else parse_agent(m["y"], n)
            call = Call.of(x, y)
        except GossipError as exc:
            raise GossipError(f"bad rule call in {line!r}: {exc}") from None
        if call not in graph.edges:
            raise GossipError(f"rule call ({agent_name(x, n)},{agent_name(y, n)}) is not an edge")
        guard = parse_formula(m["guard"].strip(), n, env)
        rules.append(Rule(guard, call))
    return rules


def parse_protocol(text: str) -> Protocol:
    """Read the line-oriented protocol format::

        agents: a b c
        edges: ab bc ca
        rule Fa A -> (a,b)
        forall j in N(i), B in P: rule Fi B & !C{i,j} Fj B -> (i,j)

    ``#`` starts a comment.  Without an ``edges`` line the graph is complete.
    """
    n = None
    edges = None
    rule_lines = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("agents:"):
            names = line[len("agents:"):].split()
            if len(names) == 1 and names[0].isdigit():
                n = int(names[0])
            else:
                idx = [parse_agent(a) for a in names]
                if idx != list(range(len(idx))):
                    raise GossipError("agents must be listed as the first names in order (a b c ...)")
                n = len(idx)
        elif line.startswith("edges:"):
            edges = [parse_call(e) for e in line[len("edges:"):].replace(",", " ").split()]
        elif line.startswith("rule") or line.startswith("forall"):
            rule_lines.append(line)
        else:
            raise GossipError(f"unrecognised line: {line!r}")
    if n is None:
        raise GossipError("missing 'agents:' line")
    graph = CommunicationGraph.complete(n) if edges is None else CommunicationGraph(n, frozenset(edges))
    rules = [r for line in rule_lines for r in _rule_lines(line, graph)]
    return Protocol(graph, tuple(rules))


def common_knowledge_protocol(graph: CommunicationGraph) -> Protocol:
    """Agent ``i`` calls neighbour ``j`` while it knows a secret that is not
    yet common knowledge between the two to be known by ``j``."""
    n = graph.num_agents
    rules = []
    for i in range(n):
        for j in graph.neighbours(i):
            for s in range(n):
                guard = conj([Atom(i, s), Not(Common(frozenset({i, j}), Atom(j, s)))])
                rules.append(Rule(guard, Call.of(i, j)))
    return Protocol(graph, tuple(rules))


def all_expert(n: int) -> Formula:
    return conj([Atom(i, j) for i in range(n) for j in range(n)])


# --- semantics -----------------------------------------------------------------


def enabled_at(P: Protocol, V: EpistemicPairView) -> list[Call]:
    return sorted({r.call for r in P.rules if eval_at(r.guard, V)})


def enabled_calls(P: Protocol, C: Sequence[Call]) -> list[Call]:
    return enabled_at(P, epv(C, P.num_agents))


def decide_termination(P: Protocol) -> TerminationVerdict:
    """Search the generated runs for a repeated pair-view.

    A run that returns to a pair-view it already had can repeat the calls in
    between forever, since enabledness and successors depend on the
    pair-view alone.  Without such a repetition every run is a path in a
    finite graph and ends.
    """
    ex = shared_explorer(P.num_agents)
    done: set = set()
    explored = 0
    # iterative DFS: (prefix, view, iterator over enabled calls)
    root = ex.root
    path_views = [root]
    path_calls: list[Call] = []
    on_path = {root: 0}
    stack = [iter(enabled_at(P, root))]
    explored = 1
    while stack:
        V = path_views[-1]
        c = next(stack[-1], None)
        if c is None:
            stack.pop()
            done.add(path_views.pop())
            del on_path[V]
            if path_calls:
                path_calls.pop()
            continue
        W = ex.step(V, c)
        if W in on_path:
            k = on_path[W]
            calls = path_calls + [c]
            return TerminationVerdict(False, (tuple(calls[:k]), tuple(calls[k:])), explored)
        if W in done:
            continue
        explored += 1
        on_path[W] = len(path_views)
        path_views.append(W)
        path_calls.append(c)
        stack.append(iter(enabled_at(P, W)))
    return TerminationVerdict(True, None, explored)


def check_partial_correctness(P: Protocol, goal: Formula) -> TruthVerdict:
    """Truth of: no guard holds -> goal."""
    if classify(goal) is Fragment.GENERAL:
        raise GossipError("goal nests common knowledge")
    exit_condition = conj([Not(r.guard) for r in P.rules])
    return check_truth(Implies(exit_condition, goal), P.num_agents)


@dataclass(frozen=True)
class TraceStep:
    step: int
    call: Call
    situation: Situation

    def to_dict(self, n: int = 0) -> dict:
        return {"step": self.step, "call": self.call.name(n), "situation": str(self.situation)}


@dataclass(frozen=True)
class Simulation:
    trace: tuple[TraceStep, ...]
    terminal: bool
    final: Situation
    sequence: tuple[Call, ...] = field(default=())

    def to_dict(self, n: int = 0) -> dict:
        return {
            "trace": [s.to_dict(n) for s in self.trace],
            "terminal": self.terminal,
            "final": str(self.final),
        }


def simulate(P: Protocol, scheduler: str = "lexicographic", max_steps: int = 100,
             seed: int | None = None) -> Simulation:
    """Run the protocol, picking among enabled calls either the smallest
    (``lexicographic``) or uniformly at random with the given seed."""
    if scheduler not in ("lexicographic", "random"):
        raise GossipError(f"unknown scheduler {scheduler!r}")
    rng = random.Random(seed)
    ex = shared_explorer(P.num_agents)
    V = ex.root
    seq: list[Call] = []
    trace = []
    enabled = enabled_at(P, V)
    while enabled and len(trace) < max_steps:
        c = enabled[0] if scheduler == "lexicographic" else rng.choice(enabled)
        V = ex.step(V, c)
        seq.append(c)
        trace.append(TraceStep(len(trace) + 1, c, V.actual))
        enabled = enabled_at(P, V)
    return Simulation(tuple(trace), not enabled, V.actual, tuple(seq))


def unsettled_triples(graph: CommunicationGraph, V: EpistemicPairView) -> int:
    """Number of ``(i, j, s)`` with ``j`` a neighbour of ``i`` such that it
    is not common knowledge between them that ``j`` knows ``s``."""
    n = graph.num_agents
    return sum(
        1
        for i in range(n)
        for j in graph.neighbours(i)
        for s in range(n)
        if not eval_at(Common(frozenset({i, j}), Atom(j, s)), V)
    )
