"""Formulas of the common-knowledge gossip language.

Atoms ``Fa B`` say that agent ``a`` knows secret ``B``.  ``C{a,b} phi`` is
common knowledge of ``phi`` among ``a`` and ``b``; ``Ka phi`` is the
singleton case and parses to the same node.  ``|`` and ``->`` are kept as
their own nodes so formulas print back the way they were written.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence, Union

from .core import GossipError, agent_name, secret_name

__all__ = [
    "Atom",
    "Not",
    "And",
    "Or",
    "Implies",
    "Common",
    "Formula",
    "Fragment",
    "FormulaSyntaxError",
    "WrongFragmentError",
    "K",
    "knows_chain",
    "parse_formula",
    "format_formula",
    "classify",
    "is_negation_free",
    "eval_propositional",
    "max_agent",
    "conj",
    "disj",
]


class FormulaSyntaxError(GossipError):
    def __init__(self, message: str, text: str, pos: int):
        super().__init__(f"{message} at position {pos}: {text[:pos]}⟨here⟩{text[pos:]}")
        self.pos = pos


class WrongFragmentError(GossipError):
    """Formula outside the fragment an operation supports."""


@dataclass(frozen=True)
class Atom:
    agent: int
    secret: int

    def __str__(self) -> str:
        return format_formula(self)


@dataclass(frozen=True)
class Not:
    body: "Formula"

    def __str__(self) -> str:
        return format_formula(self)


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"

    def __str__(self) -> str:
        return format_formula(self)


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"

    def __str__(self) -> str:
        return format_formula(self)


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"

    def __str__(self) -> str:
        return format_formula(self)


@dataclass(frozen=True)
class Common:
    group: frozenset
    body: "Formula"

    def __post_init__(self):
        if not self.group:
            raise GossipError("common knowledge needs a non-empty group")
        object.__setattr__(self, "group", frozenset(self.group))

    def __str__(self) -> str:
        return format_formula(self)


Formula = Union[Atom, Not, And, Or, Implies, Common]


def K(agent: int, body: Formula) -> Common:
    return Common(frozenset([agent]), body)


def knows_chain(agents: Sequence[int], body: Formula) -> Formula:
    """``K_{a1} ... K_{ak} body``."""
    for a in reversed(agents):
        body = K(a, body)
    return body


def conj(parts: Sequence[Formula]) -> Formula:
    parts = list(parts)
    if not parts:
        raise GossipError("empty conjunction")
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def disj(parts: Sequence[Formula]) -> Formula:
    parts = list(parts)
    if not parts:
        raise GossipError("empty disjunction")
    out = parts[0]
    for p in parts[1:]:
        out = Or(out, p)
    return out


class Fragment(enum.Enum):
    PROPOSITIONAL = "Propositional"
    WEAKLY_NESTED = "WeaklyNested"
    GENERAL = "General"

    def __str__(self) -> str:
        return self.value


# --- parsing -----------------------------------------------------------------


class _Parser:
    def __init__(self, text: str, n: int | None, env: dict | None = None):
        self.text = text
        self.pos = 0
        self.n = n
        self.env = env or {}

    def error(self, msg: str, pos: int | None = None):
        raise FormulaSyntaxError(msg, self.text, self.pos if pos is None else pos)

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self, s: str) -> bool:
        self.skip()
        return self.text.startswith(s, self.pos)

    def expect(self, s: str):
        if not self.peek(s):
            self.error(f"expected {s!r}")
        self.pos += len(s)

    def _name(self, lower: bool) -> int:
        self.skip()
        start = self.pos
        t = self.text
        if self.pos >= len(t) or not (t[self.pos].islower() if lower else t[self.pos].isupper()):
            self.error("expected an agent name" if lower else "expected a secret name")
        self.pos += 1
        digits = self.pos
        while self.pos < len(t) and t[self.pos].isdigit():
            self.pos += 1
        if t[start:self.pos] in self.env:
            return self.env[t[start:self.pos]]
        if self.pos > digits:
            idx = int(t[digits:self.pos])
        else:
            idx = ord(t[start].lower()) - ord("a")
        if self.n is not None and idx >= self.n:
            kind = "agent" if lower else "secret"
            self.error(f"unknown {kind} {t[start:self.pos]!r} for {self.n} agents", start)
        return idx

    def agent(self) -> int:
        return self._name(True)

    def secret(self) -> int:
        return self._name(False)

    def formula(self) -> Formula:
        left = self.disj()
        if self.peek("->"):
            self.pos += 2
            return Implies(left, self.formula())
        return left

    def disj(self) -> Formula:
        out = self.conj()
        while self.peek("|"):
            self.pos += 1
            out = Or(out, self.conj())
        return out

    def conj(self) -> Formula:
        out = self.unary()
        while self.peek("&"):
            self.pos += 1
            out = And(out, self.unary())
        return out

    def unary(self) -> Formula:
        self.skip()
        if self.pos >= len(self.text):
            self.error("unexpected end of formula")
        ch = self.text[self.pos]
        if ch in "!¬~":
            self.pos += 1
            return Not(self.unary())
        if ch == "(":
            self.pos += 1
            inner = self.formula()
            self.expect(")")
            return inner
        if ch == "K":
            self.pos += 1
            a = self.agent()
            return K(a, self.unary())
        if ch == "C":
            self.pos += 1
            self.expect("{")
            group = [self.agent()]
            while self.peek(","):
                self.pos += 1
                group.append(self.agent())
            self.expect("}")
            return Common(frozenset(group), self.unary())
        if ch == "F":
            self.pos += 1
            a = self.agent()
            return Atom(a, self.secret())
        self.error(f"unexpected character {ch!r}")


def parse_formula(text: str, num_agents: int | None = None,
                  bindings: dict[str, int] | None = None) -> Formula:
    """Parse a formula; agent and secret indices are range-checked when
    ``num_agents`` is given.  ``bindings`` maps names such as ``i`` or ``B``
    to indices and takes precedence over the literal meaning of the name."""
    p = _Parser(text, num_agents, bindings)
    phi = p.formula()
    p.skip()
    if p.pos != len(text):
        p.error("trailing input")
    return phi


# --- printing ----------------------------------------------------------------

_PREC = {Implies: 1, Or: 2, And: 3}


def format_formula(phi: Formula, n: int = 0) -> str:
    def go(f: Formula, ctx: int) -> str:
        if isinstance(f, Atom):
            return f"F{agent_name(f.agent, n)} {secret_name(f.secret, n)}"
        if isinstance(f, Not):
            return "!" + go(f.body, 4)
        if isinstance(f, Common):
            members = sorted(f.group)
            if len(members) == 1:
                head = "K" + agent_name(members[0], n)
            else:
                head = "C{" + ",".join(agent_name(a, n) for a in members) + "}"
            return head + " " + go(f.body, 4)
        prec = _PREC[type(f)]
        op = {Implies: " -> ", Or: " | ", And: " & "}[type(f)]
        if isinstance(f, Implies):
            s = go(f.left, prec + 1) + op + go(f.right, prec)
        else:
            s = go(f.left, prec) + op + go(f.right, prec + 1)
        return f"({s})" if prec < ctx else s

    return go(phi, 0)


# --- analysis ----------------------------------------------------------------


def _has_common(phi: Formula) -> bool:
    if isinstance(phi, Atom):
        return False
    if isinstance(phi, Common):
        return True
    if isinstance(phi, Not):
        return _has_common(phi.body)
    return _has_common(phi.left) or _has_common(phi.right)


def classify(phi: Formula) -> Fragment:
    if not _has_common(phi):
        return Fragment.PROPOSITIONAL

    def nested(f: Formula) -> bool:
        if isinstance(f, Atom):
            return False
        if isinstance(f, Common):
            return _has_common(f.body)
        if isinstance(f, Not):
            return nested(f.body)
        return nested(f.left) or nested(f.right)

    return Fragment.GENERAL if nested(phi) else Fragment.WEAKLY_NESTED


def is_negation_free(phi: Formula) -> bool:
    if isinstance(phi, Atom):
        return True
    if isinstance(phi, (Not, Implies)):
        return False
    if isinstance(phi, Common):
        return is_negation_free(phi.body)
    return is_negation_free(phi.left) and is_negation_free(phi.right)


def max_agent(phi: Formula) -> int:
    """Largest agent or secret index mentioned."""
    if isinstance(phi, Atom):
        return max(phi.agent, phi.secret)
    if isinstance(phi, Common):
        return max(max(phi.group), max_agent(phi.body))
    if isinstance(phi, Not):
        return max_agent(phi.body)
    return max(max_agent(phi.left), max_agent(phi.right))


def eval_propositional(phi: Formula, s: Sequence[int]) -> bool:
    if isinstance(phi, Atom):
        return bool(s[phi.agent] >> phi.secret & 1)
    if isinstance(phi, Not):
        return not eval_propositional(phi.body, s)
    if isinstance(phi, And):
        return eval_propositional(phi.left, s) and eval_propositional(phi.right, s)
    if isinstance(phi, Or):
        return eval_propositional(phi.left, s) or eval_propositional(phi.right, s)
    if isinstance(phi, Implies):
        return not eval_propositional(phi.left, s) or eval_propositional(phi.right, s)
    raise WrongFragmentError("modal operator in a formula evaluated on a single situation")
