"""Evaluating formulas after call sequences and deciding universal truth.

Formulas without nested common knowledge are evaluated exactly from the
pair-view of the sequence.  Universal truth and enumeration walk the
sequences whose prefixes have pairwise different pair-views; there are
finitely many of them.  Nested formulas go through :func:`eval_bounded`,
which is exact only relative to a finite universe of sequences.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

from .bounded import universe
from .core import Call, GossipError, all_calls, format_sequence, reachable_situations
from .formula import (
    And,
    Atom,
    Common,
    Formula,
    Fragment,
    Implies,
    Not,
    Or,
    WrongFragmentError,
    classify,
    eval_propositional,
    max_agent,
)
from .pairview import EpistemicPairView, epv, epv_init, epv_step

__all__ = [
    "TruthVerdict",
    "NonRedundantNode",
    "Explorer",
    "eval",
    "eval_at",
    "check_truth",
    "enumerate_nonredundant",
    "eval_bounded",
    "eval_bounded_converged",
    "ab_redundant_free",
    "exactly_decidable",
    "thread_count",
]


@dataclass(frozen=True)
class TruthVerdict:
    holds: bool
    counterexample: tuple[Call, ...] | None = None
    explored: int = 0

    def to_dict(self, n: int = 0) -> dict:
        ce = None if self.counterexample is None else format_sequence(self.counterexample, n)
        return {"holds": self.holds, "counterexample": ce, "explored": self.explored}


@dataclass(frozen=True)
class NonRedundantNode:
    sequence: tuple[Call, ...]
    epv: EpistemicPairView = field(repr=False)


def thread_count(threads: int | None = None) -> int:
    if threads is None:
        threads = int(os.environ.get("GOSSIPCK_THREADS", "1") or 1)
    return max(1, threads)


def _check_agents(phi: Formula, n: int) -> None:
    if max_agent(phi) >= n:
        raise GossipError(f"formula mentions an agent or secret beyond the {n} agents")


def exactly_decidable(phi: Formula) -> bool:
    """Weakly nested formulas, plus nesting directly under groups of three
    or more agents: such a group links every pair of sequences, so its
    operator only asks whether the body holds everywhere."""
    if isinstance(phi, Atom):
        return True
    if isinstance(phi, Not):
        return exactly_decidable(phi.body)
    if isinstance(phi, Common):
        if len(phi.group) >= 3:
            return exactly_decidable(phi.body)
        return classify(phi.body) is Fragment.PROPOSITIONAL
    return exactly_decidable(phi.left) and exactly_decidable(phi.right)


def _require_exact(phi: Formula) -> None:
    if not exactly_decidable(phi):
        raise WrongFragmentError("nested common knowledge: use eval_bounded for this formula")


@lru_cache(maxsize=4096)
def _valid(phi: Formula, n: int) -> bool:
    return check_truth(phi, n).holds


@lru_cache(maxsize=None)
def _all_situations(n: int):
    return reachable_situations(n)


def eval_at(phi: Formula, V: EpistemicPairView) -> bool:
    """Truth of a formula without nested modalities at any sequence whose
    pair-view is ``V``."""
    if isinstance(phi, Atom):
        return bool(V.actual[phi.agent] >> phi.secret & 1)
    if isinstance(phi, Not):
        return not eval_at(phi.body, V)
    if isinstance(phi, And):
        return eval_at(phi.left, V) and eval_at(phi.right, V)
    if isinstance(phi, Or):
        return eval_at(phi.left, V) or eval_at(phi.right, V)
    if isinstance(phi, Implies):
        return not eval_at(phi.left, V) or eval_at(phi.right, V)
    group = sorted(phi.group)
    if len(group) == 1:
        worlds = V[(group[0], group[0])]
    elif len(group) == 2:
        worlds = V[tuple(group)]
    elif classify(phi.body) is Fragment.PROPOSITIONAL:
        # three or more agents link every pair of sequences
        worlds = _all_situations(V.n)
    else:
        return _valid(phi.body, V.n)
    return all(eval_propositional(phi.body, s) for s in worlds)


def eval(phi: Formula, C: Sequence[Call], num_agents: int) -> bool:
    _require_exact(phi)
    _check_agents(phi, num_agents)
    return eval_at(phi, epv(C, num_agents))


class Explorer:
    """Successor function on pair-views with memoised transitions.

    Transitions are cached on the exact structural key, so the cache never
    conflates states whose futures could differ.
    """

    def __init__(self, num_agents: int):
        self.n = num_agents
        self.calls = all_calls(num_agents)
        self.root = epv_init(num_agents)
        self._succ: dict = {}

    def step(self, V: EpistemicPairView, c: Call) -> EpistemicPairView:
        key = (V.key(), c)
        W = self._succ.get(key)
        if W is None:
            W = self._succ[key] = epv_step(V, c)
        return W


@lru_cache(maxsize=8)
def shared_explorer(num_agents: int) -> Explorer:
    """One memoised transition table per agent count."""
    return Explorer(num_agents)


def _walk(ex: Explorer, prefix: tuple[Call, ...], V: EpistemicPairView,
          path: list, calls: Sequence[Call]) -> Iterator[NonRedundantNode]:
    yield NonRedundantNode(prefix, V)
    for c in calls:
        W = ex.step(V, c)
        if W in path:
            continue
        path.append(W)
        yield from _walk(ex, prefix + (c,), W, path, calls)
        path.pop()


def enumerate_nonredundant(num_agents: int, threads: int | None = None,
                           explorer: Explorer | None = None) -> Iterator[NonRedundantNode]:
    """All sequences whose prefixes have pairwise different pair-views, in
    depth-first order with calls tried lexicographically.  With more than
    one thread the top-level subtrees are produced concurrently and the
    order of the stream is unspecified."""
    ex = explorer or shared_explorer(num_agents)
    workers = thread_count(threads)
    if workers == 1:
        yield from _walk(ex, (), ex.root, [ex.root], ex.calls)
        return
    yield NonRedundantNode((), ex.root)

    def subtree(c: Call) -> list:
        local = Explorer(num_agents)  # private table per worker
        W = local.step(local.root, c)
        if W == local.root:
            return []
        return list(_walk(local, (c,), W, [local.root, W], local.calls))

    with ThreadPoolExecutor(max_workers=workers) as pool:
        for nodes in pool.map(subtree, ex.calls):
            yield from nodes


def check_truth(phi: Formula, num_agents: int) -> TruthVerdict:
    """Decide whether ``phi`` holds after every call sequence.

    Depth-first over non-redundant sequences; a state already fully
    explored is not entered again, which keeps the first counterexample in
    depth-first order unchanged.
    """
    _require_exact(phi)
    _check_agents(phi, num_agents)
    ex = shared_explorer(num_agents)
    seen: set = set()
    explored = 0

    stack = [((), ex.root, (ex.root,))]
    while stack:
        C, V, path = stack.pop()
        k = V.key()
        if k in seen:
            continue
        seen.add(k)
        explored += 1
        if not eval_at(phi, V):
            return TruthVerdict(False, C, explored)
        children = []
        for c in ex.calls:
            W = ex.step(V, c)
            if W not in path:
                children.append((C + (c,), W, path + (W,)))
        stack.extend(reversed(children))
    return TruthVerdict(True, None, explored)


def ab_redundant_free(C: Sequence[Call], a: int, b: int, num_agents: int) -> tuple[Call, ...]:
    """Drop the calls other than ``ab`` that leave the situation unchanged."""
    from .core import apply_call, root

    ab = Call.of(a, b)
    s = root(num_agents)
    out = []
    for c in C:
        t = apply_call(s, c)
        if c == ab or t != s:
            out.append(c)
        s = t
    return tuple(out)


# --- bounded universes ---------------------------------------------------------


def _extension(phi: Formula, U) -> np.ndarray:
    """Boolean truth value of ``phi`` at every sequence of the universe."""
    if isinstance(phi, Atom):
        return (U.situation_array[:, phi.agent] >> phi.secret & 1).astype(bool)
    if isinstance(phi, Not):
        return ~_extension(phi.body, U)
    if isinstance(phi, And):
        return _extension(phi.left, U) & _extension(phi.right, U)
    if isinstance(phi, Or):
        return _extension(phi.left, U) | _extension(phi.right, U)
    if isinstance(phi, Implies):
        return ~_extension(phi.left, U) | _extension(phi.right, U)
    body = _extension(phi.body, U)
    lab = U.labels(phi.group)
    failing = np.bincount(lab, weights=~body) > 0
    return ~failing[lab]


def eval_bounded(phi: Formula, C: Sequence[Call], max_len: int, num_agents: int) -> bool:
    """Kripke evaluation over all sequences of length at most ``max_len``.

    Modalities only range over that universe, so a universal claim can hold
    here while failing for longer sequences.
    """
    _check_agents(phi, num_agents)
    if len(C) > max_len:
        raise GossipError("sequence longer than max_len")
    U = universe(num_agents, max_len)
    return bool(_extension(phi, U)[U.lookup(C)])


def eval_bounded_converged(phi: Formula, C: Sequence[Call], num_agents: int,
                           start: int | None = None, patience: int = 2,
                           limit: int = 10) -> tuple[bool, int]:
    """Raise the bound until the verdict has not changed for ``patience``
    consecutive steps.  Returns the verdict and the bound reached.  This is
    a heuristic stopping rule, not a proof of exactness."""
    L = max(len(C), 1) if start is None else start
    value = eval_bounded(phi, C, L, num_agents)
    stable = 0
    while stable < patience and L < limit:
        L += 1
        nxt = eval_bounded(phi, C, L, num_agents)
        stable = stable + 1 if nxt == value else 0
        value = nxt
    return value, L
