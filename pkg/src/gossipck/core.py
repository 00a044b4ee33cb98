"""Gossip kernel: agents, secrets, calls, situations and call application.

Agents are indices ``0 .. n-1``.  The secret of agent ``i`` is bit ``i`` of
a secret set, so a situation is a tuple of ``n`` bit masks.  In text agents
are written ``a, b, c, ...`` and secrets ``A, B, C, ...``; beyond 26 agents
the names become ``a0, a1, ...`` and ``A0, A1, ...``.
"""
from __future__ import annotations

import re
from typing import Iterable, NamedTuple, Sequence

__all__ = [
    "GossipError",
    "Call",
    "Situation",
    "agent_name",
    "secret_name",
    "parse_agent",
    "parse_call",
    "parse_sequence",
    "format_sequence",
    "all_calls",
    "root",
    "apply_call",
    "apply_sequence",
    "is_noop_call",
    "reachable_situations",
    "closure",
]

_AGENT_RE = re.compile(r"[a-z]\d*")
_SECRET_RE = re.compile(r"[A-Z]\d*")


class GossipError(ValueError):
    """Invalid configuration, malformed text or out-of-range agent."""


def agent_name(i: int, n: int = 0) -> str:
    if n > 26 or i >= 26:
        return f"a{i}"
    return chr(ord("a") + i)


def secret_name(i: int, n: int = 0) -> str:
    if n > 26 or i >= 26:
        return f"A{i}"
    return chr(ord("A") + i)


def _index(token: str) -> int:
    if len(token) == 1:
        return ord(token.lower()) - ord("a")
    return int(token[1:])


def parse_agent(text: str, n: int | None = None) -> int:
    text = text.strip()
    if not _AGENT_RE.fullmatch(text):
        raise GossipError(f"not an agent name: {text!r}")
    i = _index(text)
    if n is not None and i >= n:
        raise GossipError(f"agent {text!r} out of range for {n} agents")
    return i


class Call(NamedTuple):
    """A call between two agents, always stored with ``lo < hi``."""

    lo: int
    hi: int

    @classmethod
    def of(cls, x: int, y: int) -> "Call":
        if x == y:
            raise GossipError("a call needs two different agents")
        if x < 0 or y < 0:
            raise GossipError("agent indices are non-negative")
        return cls(x, y) if x < y else cls(y, x)

    def __contains__(self, agent) -> bool:  # type: ignore[override]
        return agent == self.lo or agent == self.hi

    def other(self, agent: int) -> int:
        if agent == self.lo:
            return self.hi
        if agent == self.hi:
            return self.lo
        raise GossipError(f"agent {agent} not in call {self}")

    def name(self, n: int = 0) -> str:
        return agent_name(self.lo, n) + agent_name(self.hi, n)

    def __str__(self) -> str:
        return self.name()


def parse_call(text: str, n: int | None = None) -> Call:
    """Parse ``ab``, ``(a,b)`` or ``a3a12``."""
    tokens = _AGENT_RE.findall(text.replace("(", " ").replace(")", " "))
    leftover = _AGENT_RE.sub("", text)
    if len(tokens) != 2 or leftover.strip(" (),"):
        raise GossipError(f"not a call: {text!r}")
    return Call.of(parse_agent(tokens[0], n), parse_agent(tokens[1], n))


def parse_sequence(text: str, n: int | None = None) -> tuple[Call, ...]:
    """Parse ``ac;bc;ac`` (``.`` and ``,`` between calls are accepted too)."""
    text = text.strip()
    if text in ("", "eps", "ε"):
        return ()
    if "(" in text:
        parts = re.findall(r"\([^)]*\)", text)
    else:
        parts = [p for p in re.split(r"[;.,\s]+", text) if p]
    return tuple(parse_call(p, n) for p in parts)


def format_sequence(calls: Iterable[Call], n: int = 0, sep: str = ";") -> str:
    return sep.join(c.name(n) for c in calls)


def all_calls(n: int) -> list[Call]:
    """All calls for ``n`` agents in lexicographic ``(lo, hi)`` order."""
    return [Call(i, j) for i in range(n) for j in range(i + 1, n)]


class Situation(tuple):
    """Per-agent secret sets as bit masks; ``str`` gives ``AC.B.AC``."""

    __slots__ = ()

    @property
    def n(self) -> int:
        return len(self)

    def knows(self, agent: int, secret: int) -> bool:
        return bool(self[agent] >> secret & 1)

    def secrets_of(self, agent: int) -> list[int]:
        return [j for j in range(len(self)) if self[agent] >> j & 1]

    def is_expert(self, agent: int) -> bool:
        return self[agent] == (1 << len(self)) - 1

    def total(self) -> int:
        return sum(bin(q).count("1") for q in self)

    def __str__(self) -> str:
        n = len(self)
        return ".".join(
            "".join(secret_name(j, n) for j in range(n) if q >> j & 1) for q in self
        )

    def __repr__(self) -> str:
        return f"Situation({str(self)!r})"

    @classmethod
    def parse(cls, text: str) -> "Situation":
        parts = text.strip().split(".")
        n = len(parts)
        masks = []
        for part in parts:
            names = _SECRET_RE.findall(part)
            if "".join(names) != part.strip():
                raise GossipError(f"bad secret list {part!r} in {text!r}")
            mask = 0
            for name in names:
                j = _index(name)
                if j >= n:
                    raise GossipError(f"secret {name!r} out of range for {n} agents")
                mask |= 1 << j
            masks.append(mask)
        s = cls(masks)
        for i, q in enumerate(s):
            if not q >> i & 1:
                raise GossipError(f"agent {agent_name(i, n)} must know its own secret")
        return s


def root(num_agents: int) -> Situation:
    if num_agents < 2:
        raise GossipError("need at least two agents")
    return Situation(1 << i for i in range(num_agents))


def apply_call(s: Sequence[int], c: Call) -> Situation:
    u = s[c.lo] | s[c.hi]
    out = list(s)
    out[c.lo] = out[c.hi] = u
    return Situation(out)


def apply_sequence(s: Sequence[int], calls: Iterable[Call]) -> Situation:
    for c in calls:
        s = apply_call(s, c)
    return Situation(s)


def is_noop_call(s: Sequence[int], c: Call) -> bool:
    return s[c.lo] == s[c.hi]


def closure(seeds: Iterable[Situation], calls: Sequence[Call]) -> frozenset[Situation]:
    """Smallest superset of ``seeds`` closed under the given calls."""
    seen = set(seeds)
    stack = list(seen)
    while stack:
        s = stack.pop()
        for c in calls:
            if s[c.lo] != s[c.hi]:
                t = apply_call(s, c)
                if t not in seen:
                    seen.add(t)
                    stack.append(t)
    return frozenset(seen)


def reachable_situations(num_agents: int, forbidden: Iterable[Call] = ()) -> frozenset[Situation]:
    banned = set(forbidden)
    allowed = [c for c in all_calls(num_agents) if c not in banned]
    return closure([root(num_agents)], allowed)
