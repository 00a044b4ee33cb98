"""Epistemic pair-views: for every agent pair the situations produced by the
call sequences the pair cannot jointly tell apart from the actual one.

Single-agent slots ``(a, a)`` are plain situation sets; the update for a
call ``(a, x)`` keeps the ``(a, x)``-images consistent with what ``a`` saw
and closes them under calls without ``a``.

Two-agent slots are not a function of their situation sets: ``ac;bc;ac``
and ``bc;ac;bc`` agree on the actual situation and on slot ``(a, b)``, yet
the two slots differ after a further ``ab``.  Each two-agent slot is
therefore backed by a :class:`PairTracker` holding a small Kripke structure
(one world per surviving history class, each with an ``a``-class and a
``b``-class id) that is exact up to bisimulation.  Calls other than ``ab`` only extend the actual suffix; a call
``ab`` rebuilds the structure from the reachable extensions.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from .core import (
    Call,
    GossipError,
    Situation,
    agent_name,
    all_calls,
    apply_call,
    closure,
    root,
)

__all__ = [
    "PairTracker",
    "EpistemicPairView",
    "epv_init",
    "epv_step",
    "epv",
    "epv_oracle",
    "epv_oracle_converged",
    "leq_situation",
    "leq_epv",
    "pairs",
]

Trace = tuple[tuple[int, int], ...]


def pairs(n: int) -> list[tuple[int, int]]:
    """All pair slots ``(a, b)`` with ``a <= b``."""
    return [(a, b) for a in range(n) for b in range(a, n)]


def extend_trace(trace: Trace, partner: int, post: int) -> Trace:
    """Append a call with ``partner`` after which both callers hold ``post``.

    Within a run of entries with equal ``post`` only the first and the last
    entry per partner are kept, and an entry repeating its predecessor is
    dropped.  Every dropped entry is a call that changes nothing in every
    history producing the trace, so histories with the full and the reduced
    trace can be matched one-to-one without touching anything else.
    """
    if not trace or trace[-1][1] != post:
        return trace + ((partner, post),)
    return _extend_block(trace, partner, post)


@lru_cache(maxsize=1 << 16)
def _extend_block(trace: Trace, partner: int, post: int) -> Trace:
    entries = list(trace) + [(partner, post)]
    start = len(entries) - 1
    while start > 0 and entries[start - 1][1] == post:
        start -= 1
    block = entries[start:]
    while True:
        firsts, lasts = {}, {}
        for i, (x, _) in enumerate(block):
            firsts.setdefault(x, i)
            lasts[x] = i
        keep = [x_i for x_i in range(len(block))
                if firsts[block[x_i][0]] == x_i or lasts[block[x_i][0]] == x_i]
        reduced = [block[i] for i in keep]
        deduped = [e for i, e in enumerate(reduced) if i == 0 or reduced[i - 1] != e]
        if deduped == block:
            break
        block = deduped
    return tuple(entries[:start] + block)


def _minimize(worlds: list[tuple[Situation, int, int]], actual: int):
    """Bisimulation quotient of a structure whose two relations are given as
    class ids.  Returns the reduced worlds and the index of ``actual``."""
    vals = [w[0] for w in worlds]
    codes: dict = {}
    block = [codes.setdefault(v, len(codes)) for v in vals]
    while True:
        amembers: dict[int, set] = {}
        bmembers: dict[int, set] = {}
        for i, (_, ac, bc) in enumerate(worlds):
            amembers.setdefault(ac, set()).add(block[i])
            bmembers.setdefault(bc, set()).add(block[i])
        codes = {}
        new = [codes.setdefault((block[i], frozenset(amembers[ac]), frozenset(bmembers[bc])), len(codes))
               for i, (_, ac, bc) in enumerate(worlds)]
        if len(codes) == len(set(block)):
            break
        block = new
    k = len(set(block))
    amembers, bmembers = {}, {}
    for i, (_, ac, bc) in enumerate(worlds):
        amembers.setdefault(ac, set()).add(block[i])
        bmembers.setdefault(bc, set()).add(block[i])
    reps: list = [None] * k
    for i, (v, ac, bc) in enumerate(worlds):
        if reps[block[i]] is None:
            reps[block[i]] = (v, frozenset(amembers[ac]), frozenset(bmembers[bc]))
    acodes: dict = {}
    bcodes: dict = {}
    out = [(v, acodes.setdefault(am, len(acodes)), bcodes.setdefault(bm, len(bcodes)))
           for v, am, bm in reps]
    return out, block[actual]


# Colours are interned globally so that equal structures built at different
# times get identical keys.
_COLOURS: dict = {}


def _colour(key) -> int:
    c = _COLOURS.get(key)
    if c is None:
        c = _COLOURS[key] = len(_COLOURS)
    return c


def _canonical(worlds: Sequence[tuple[Situation, int, int]]) -> tuple[tuple, list[int]]:
    """Canonical form of a minimised structure and the colour of each world."""
    col = [_colour(("v", w[0])) for w in worlds]
    nblocks = len(set(col))
    while True:
        am: dict[int, list] = {}
        bm: dict[int, list] = {}
        for i, (_, ac, bc) in enumerate(worlds):
            am.setdefault(ac, []).append(col[i])
            bm.setdefault(bc, []).append(col[i])
        col = [_colour((col[i], tuple(sorted(am[ac])), tuple(sorted(bm[bc]))))
               for i, (_, ac, bc) in enumerate(worlds)]
        k = len(set(col))
        if k == nblocks:
            break
        nblocks = k
    am, bm = {}, {}
    for i, (_, ac, bc) in enumerate(worlds):
        am.setdefault(ac, []).append(col[i])
        bm.setdefault(bc, []).append(col[i])
    form = tuple(sorted((col[i], tuple(sorted(am[ac])), tuple(sorted(bm[bc])))
                        for i, (_, ac, bc) in enumerate(worlds)))
    return form, col


@dataclass(frozen=True)
class PairTracker:
    """Exact state of the ``(a, b)`` slot of a pair-view.

    ``worlds`` describes the histories up to the last call ``ab`` (or the
    empty history); ``actual`` is the index of the real one and ``suffix_*``
    summarise the real calls made since.
    """

    n: int
    a: int
    b: int
    worlds: tuple[tuple[Situation, int, int], ...]
    actual: int
    situation: Situation
    trace_a: Trace = ()
    trace_b: Trace = ()
    _key: tuple = field(default=None, compare=False, repr=False)

    @classmethod
    def initial(cls, n: int, a: int, b: int) -> "PairTracker":
        return cls(n, a, b, ((root(n), 0, 0),), 0, root(n))

    @property
    def other_calls(self) -> list[Call]:
        ab = Call(self.a, self.b)
        return [c for c in all_calls(self.n) if c != ab]

    def situations(self) -> frozenset[Situation]:
        return closure([w[0] for w in self.worlds], self.other_calls)

    def _advance(self, t, ta, tb, c: Call):
        a, b = self.a, self.b
        t = apply_call(t, c)
        if a in c:
            ta = extend_trace(ta, c.other(a), t[a])
        elif b in c:
            tb = extend_trace(tb, c.other(b), t[b])
        return t, ta, tb

    def step(self, c: Call) -> "PairTracker":
        if c != Call(self.a, self.b):
            t, ta, tb = self._advance(self.situation, self.trace_a, self.trace_b, c)
            return PairTracker(self.n, self.a, self.b, self.worlds, self.actual, t, ta, tb)
        return self._through_ab(c)

    def _through_ab(self, ab: Call) -> "PairTracker":
        a, b = self.a, self.b
        target = self.situation[a] | self.situation[b]
        calls = self.other_calls
        start = [(w, v, (), ()) for w, (v, _, _) in enumerate(self.worlds)]
        seen = set(start)
        stack = list(start)
        while stack:
            w, t, ta, tb = stack.pop()
            for c in calls:
                t2 = apply_call(t, c)
                # a and b only gain secrets; states past the target never return
                if (t2[a] | t2[b]) & ~target:
                    continue
                nxt = (w, *self._advance(t, ta, tb, c))
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        states = [s for s in seen if (s[1][a] | s[1][b]) == target]
        me = (self.actual, self.situation, self.trace_a, self.trace_b)
        if me not in seen:
            raise GossipError("internal error: actual history not among the extensions")
        index = {s: i for i, s in enumerate(states)}
        akeys: dict = {}
        bkeys: dict = {}
        alab = [akeys.setdefault((self.worlds[s[0]][1], s[2]), len(akeys)) for s in states]
        blab = [bkeys.setdefault((self.worlds[s[0]][2], s[3]), len(bkeys)) for s in states]
        parent = list(range(len(akeys) + len(bkeys)))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for i in range(len(states)):
            ra, rb = find(alab[i]), find(len(akeys) + blab[i])
            if ra != rb:
                parent[ra] = rb
        mine = find(alab[index[me]])
        new_worlds = []
        new_actual = None
        seen_w: dict = {}
        for i, s in enumerate(states):
            if find(alab[i]) != mine:
                continue
            w = (apply_call(s[1], ab), alab[i], blab[i])
            j = seen_w.setdefault(w, len(new_worlds))
            if j == len(new_worlds):
                new_worlds.append(w)
            if i == index[me]:
                new_actual = j
        reduced, actual = _minimize(new_worlds, new_actual)
        now = apply_call(self.situation, ab)
        return PairTracker(self.n, a, b, tuple(reduced), actual, now)

    def key(self) -> tuple:
        """Hashable identity: equal keys imply identical futures."""
        if self._key is None:
            form, col = _canonical(self.worlds)
            object.__setattr__(self, "_key", (form, col[self.actual], self.situation,
                                              self.trace_a, self.trace_b))
        return self._key


def _single_step(S: frozenset, a: int, c: Call, actual: Situation, n: int) -> frozenset:
    if a not in c:
        return S
    post = apply_call(actual, c)[a]
    images = [t for t in (apply_call(s, c) for s in S) if t[a] == post]
    return closure(images, [d for d in all_calls(n) if a not in d])


@dataclass(frozen=True, eq=False)
class EpistemicPairView:
    """Pair-view of a call sequence.

    ``pair_sets`` maps every slot ``(a, b)`` with ``a <= b`` to a situation
    set and ``actual`` is the real situation.  Equality compares exactly
    these (the set-level notion); :meth:`key` is the finer identity that
    also fixes the future and is what the search procedures use.
    """

    n: int
    actual: Situation
    pair_sets: Mapping[tuple[int, int], frozenset]
    trackers: Mapping[tuple[int, int], PairTracker] = field(repr=False, default=None)

    def __getitem__(self, pair) -> frozenset:
        a, b = pair
        return self.pair_sets[(a, b) if a <= b else (b, a)]

    def __eq__(self, other) -> bool:
        if not isinstance(other, EpistemicPairView):
            return NotImplemented
        return self.n == other.n and self.actual == other.actual and \
            dict(self.pair_sets) == dict(other.pair_sets)

    def __hash__(self) -> int:
        return hash((self.actual, frozenset(self.pair_sets.items())))

    def key(self) -> tuple:
        singles = tuple(self.pair_sets[(a, a)] for a in range(self.n))
        return (self.actual, singles,
                tuple(self.trackers[p].key() for p in sorted(self.trackers)))

    def to_dict(self) -> dict:
        n = self.n
        return {
            "actual": str(self.actual),
            "pairs": {
                agent_name(a, n) + agent_name(b, n): sorted(str(s) for s in S)
                for (a, b), S in sorted(self.pair_sets.items())
            },
        }


def epv_init(num_agents: int) -> EpistemicPairView:
    n = num_agents
    r = root(n)
    sets = {}
    trackers = {}
    for a, b in pairs(n):
        if a == b:
            sets[(a, a)] = closure([r], [c for c in all_calls(n) if a not in c])
        else:
            trackers[(a, b)] = PairTracker.initial(n, a, b)
            sets[(a, b)] = trackers[(a, b)].situations()
    return EpistemicPairView(n, r, sets, trackers)


def epv_step(V: EpistemicPairView, c: Call,
             prev_actual: Situation | None = None) -> EpistemicPairView:
    if prev_actual is not None and tuple(prev_actual) != tuple(V.actual):
        raise GossipError("inconsistent state: prev_actual differs from the view's actual situation")
    if c.hi >= V.n:
        raise GossipError(f"call {c} out of range for {V.n} agents")
    n = V.n
    sets = dict(V.pair_sets)
    trackers = dict(V.trackers)
    for a in range(n):
        sets[(a, a)] = _single_step(V.pair_sets[(a, a)], a, c, V.actual, n)
    for p, tr in V.trackers.items():
        nt = tr.step(c)
        trackers[p] = nt
        if nt.worlds is not tr.worlds:
            sets[p] = nt.situations()
    return EpistemicPairView(n, apply_call(V.actual, c), sets, trackers)


def epv(C: Sequence[Call], num_agents: int) -> EpistemicPairView:
    V = epv_init(num_agents)
    for c in C:
        V = epv_step(V, c)
    return V


def epv_oracle(C: Sequence[Call], a: int, b: int, max_len: int, num_agents: int) -> frozenset[Situation]:
    """Situations of the sequences of length at most ``max_len`` linked to
    ``C`` by chains of equal ``a``- or ``b``-views inside that universe."""
    from .bounded import universe

    if len(C) > max_len:
        raise GossipError("sequence longer than max_len")
    return universe(num_agents, max_len).situations_of(C, {a, b})


def epv_oracle_converged(C: Sequence[Call], a: int, b: int, num_agents: int,
                         start: int | None = None, limit: int = 12) -> tuple[frozenset, int]:
    """Grow ``max_len`` until the oracle set is unchanged for two steps.
    Returns the set and the first bound at which it appeared."""
    L = max(len(C), 1) if start is None else start
    prev = epv_oracle(C, a, b, L, num_agents)
    first, stable = L, 0
    while stable < 2 and L < limit:
        L += 1
        cur = epv_oracle(C, a, b, L, num_agents)
        if cur == prev:
            stable += 1
        else:
            prev, first, stable = cur, L, 0
    return prev, first


def leq_situation(s: Sequence[int], t: Sequence[int]) -> bool:
    if len(s) != len(t):
        raise GossipError("situations over different agent counts")
    return all(x & ~y == 0 for x, y in zip(s, t))


def _covers(V: Iterable, W: Iterable) -> bool:
    """True iff every element of ``W`` can be given its own distinct element
    of ``V`` below it (equivalently: a surjection from a subset of ``V``)."""
    V, W = list(V), list(W)
    if len(W) > len(V):
        return False
    if not W:
        return True
    rows, cols = [], []
    for i, u in enumerate(W):
        for j, s in enumerate(V):
            if leq_situation(s, u):
                rows.append(i)
                cols.append(j)
    if len(set(rows)) < len(W):
        return False
    graph = csr_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(len(W), len(V)))
    match = maximum_bipartite_matching(graph, perm_type="column")
    return bool((match >= 0).all())


def leq_epv(V: EpistemicPairView, W: EpistemicPairView) -> bool:
    if V.n != W.n:
        raise GossipError("pair-views over different agent counts")
    if not leq_situation(V.actual, W.actual):
        return False
    return all(_covers(V.pair_sets[p], W.pair_sets[p]) for p in V.pair_sets)
