"""Agent views of call sequences, view equivalence and a-simplification."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .core import Call, GossipError, Situation, apply_call, root

__all__ = [
    "View",
    "view",
    "view_key",
    "equiv_view",
    "is_a_irrelevant",
    "a_simplification",
]


@dataclass(frozen=True)
class View:
    initial: Situation
    steps: tuple[tuple[Call, Situation], ...] = ()

    @property
    def last(self) -> Situation:
        return self.steps[-1][1] if self.steps else self.initial

    def __str__(self) -> str:
        n = len(self.initial)
        parts = [str(self.initial)]
        for c, s in self.steps:
            parts.append(f"-{c.name(n)}-> {s}")
        return " ".join(parts)


def _trace(calls: Sequence[Call], a: int, n: int):
    s = root(n)
    last = s
    steps = []
    for c in calls:
        s = apply_call(s, c)
        if a in c:
            after = list(last)
            after[c.lo] = s[c.lo]
            after[c.hi] = s[c.hi]
            last = Situation(after)
            steps.append((c, last))
    return steps


def view(calls: Sequence[Call], a: int, n: int) -> View:
    if not 0 <= a < n:
        raise GossipError(f"agent {a} out of range")
    return View(root(n), tuple(_trace(calls, a, n)))


def view_key(calls: Sequence[Call], a: int, n: int) -> tuple:
    """Hashable stand-in for ``view(calls, a, n)``.

    Both callers hold the same set after a call, so a step is fully
    determined by the call and that shared set.
    """
    s = root(n)
    key = []
    for c in calls:
        s = apply_call(s, c)
        if a in c:
            key.append((c, s[c.lo]))
    return tuple(key)


def equiv_view(C: Sequence[Call], D: Sequence[Call], a: int, n: int) -> bool:
    return view_key(C, a, n) == view_key(D, a, n)


def is_a_irrelevant(C: Sequence[Call], index: int, a: int, n: int) -> bool:
    if not 0 <= index < len(C):
        raise GossipError(f"index {index} out of range for a sequence of length {len(C)}")
    rest = tuple(C[:index]) + tuple(C[index + 1:])
    return equiv_view(rest, C, a, n)


def a_simplification(C: Sequence[Call], a: int, n: int) -> tuple[Call, ...]:
    """Left-to-right pass removing every call that is a-irrelevant in the
    sequence as simplified so far."""
    current = list(C)
    i = 0
    while i < len(current):
        if is_a_irrelevant(current, i, a, n):
            del current[i]
        else:
            i += 1
    return tuple(current)
