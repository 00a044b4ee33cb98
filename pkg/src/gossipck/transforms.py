"""Rewrites of ab-free call sequences that keep one agent's view fixed, and
the four-link chain relating any ab-free sequence to the empty one."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .core import Call, GossipError, agent_name, apply_call, format_sequence, root
from .views import a_simplification, equiv_view, is_a_irrelevant, view_key

__all__ = [
    "IllFormedInput",
    "InvariantViolation",
    "linked",
    "leads_to",
    "BCallClassification",
    "classify_b_calls",
    "r_ab",
    "rebuild_for",
    "WitnessChain",
    "abab_witness",
]


class IllFormedInput(GossipError):
    pass


class InvariantViolation(RuntimeError):
    """A constructed witness failed verification; always a bug."""


def linked(c: Call, d: Call) -> bool:
    return len({c.lo, c.hi} & {d.lo, d.hi}) == 1


def leads_to(C: Sequence[Call], from_index: int, a: int) -> int | None:
    """Index of the earliest call with ``a`` reachable from ``C[from_index]``
    along later, pairwise linked calls that avoid ``a`` until the last."""
    if not 0 <= from_index < len(C):
        raise GossipError(f"index {from_index} out of range")
    if a in C[from_index]:
        raise GossipError("the starting call already involves the target agent")
    reached = [from_index]
    for j in range(from_index + 1, len(C)):
        if any(linked(C[i], C[j]) for i in reached):
            if a in C[j]:
                return j
            reached.append(j)
    return None


@dataclass(frozen=True)
class BCallClassification:
    essential: tuple[int, ...]
    inessential: tuple[int, ...]
    targets: dict  # b-call index -> earliest a-call index it leads to (or None)
    earliest: int | None

    def render(self, C: Sequence[Call], n: int = 0) -> dict:
        return {
            "essential": [C[i].name(n) for i in self.essential],
            "inessential": [C[i].name(n) for i in self.inessential],
        }


def _check_standing(C: Sequence[Call], a: int, b: int, n: int) -> None:
    if a == b:
        raise IllFormedInput("the two agents must differ")
    if Call.of(a, b) in C:
        raise IllFormedInput(f"sequence contains the call {Call.of(a, b).name(n)}")
    for i in range(len(C)):
        if is_a_irrelevant(C, i, a, n):
            raise IllFormedInput(
                f"call {C[i].name(n)} at position {i} is irrelevant to {agent_name(a, n)}; "
                "simplify first"
            )


def _classify(C: Sequence[Call], a: int, b: int) -> BCallClassification:
    bcalls = [i for i, c in enumerate(C) if b in c]
    targets = {i: leads_to(C, i, a) for i in bcalls}
    reached = [t for t in targets.values() if t is not None]
    earliest = min(reached) if reached else None
    ess = tuple(i for i in bcalls if earliest is not None and targets[i] == earliest)
    return BCallClassification(ess, tuple(i for i in bcalls if i not in ess), targets, earliest)


def classify_b_calls(C: Sequence[Call], a: int, b: int, n: int) -> BCallClassification:
    """Split the b-calls by whether they reach the earliest a-call any b-call
    reaches.  Irrelevant calls are tolerated here (they simply lead nowhere
    and count as inessential); :func:`r_ab` is the one that rejects them."""
    if a == b:
        raise IllFormedInput("the two agents must differ")
    if Call.of(a, b) in C:
        raise IllFormedInput(f"sequence contains the call {Call.of(a, b).name(n)}")
    return _classify(C, a, b)


def r_ab(C: Sequence[Call], a: int, b: int, n: int) -> tuple[Call, ...]:
    """Reroute every b-call that is inessential for ``a``: a call ``bc``
    whose first reachable a-call is ``ad`` becomes ``cd``, or disappears
    when ``c == d``.  Calls are handled first to last and the
    classification is redone after each rewrite.

    The result usually keeps ``a``'s view, but not always: a rerouted call
    ``cd`` can feed an a-call with ``d`` that precedes its target, as in
    ``bc;bd;ac;bc;ac``.  :func:`abab_witness` verifies before relying on it.
    """
    _check_standing(C, a, b, n)
    current = list(C)
    while True:
        cls = _classify(current, a, b)
        if not cls.inessential:
            return tuple(current)
        i = cls.inessential[0]
        target = cls.targets[i]
        if target is None:
            raise IllFormedInput(f"b-call at position {i} leads to no call of {agent_name(a, n)}")
        c = current[i].other(b)
        d = current[target].other(a)
        # neither c nor d is b, so the rewritten call is no longer a b-call
        if c == d:
            del current[i]
        else:
            current[i] = Call.of(c, d)


def rebuild_for(C: Sequence[Call], a: int, b: int, n: int) -> tuple[Call, ...]:
    """A sequence with ``a``'s view of ``C`` in which ``b`` calls only once,
    before the first a-call that hands ``a`` the secret of ``b``.

    Each a-call ``ax`` with outcome ``S`` is preceded by calls giving ``x``
    every missing secret of ``S``.  A secret is fetched from its owner, or
    for ``b``'s secret after its first delivery, from the partner of that
    delivery.  No agent ever holds a secret outside ``a``'s next outcome,
    so ``a`` receives exactly ``S``.
    """
    if Call.of(a, b) in C:
        raise IllFormedInput(f"sequence contains the call {Call.of(a, b).name(n)}")
    s = root(n)
    out: list[Call] = []
    carrier = None
    for c, post in view_key(C, a, n):
        x = c.other(a)
        for y in range(n):
            if y in (a, x) or not post >> y & 1 or s[x] >> y & 1:
                continue
            source = carrier if y == b and carrier is not None else y
            d = Call.of(x, source)
            out.append(d)
            s = apply_call(s, d)
        out.append(c)
        s = apply_call(s, c)
        if carrier is None and post >> b & 1:
            carrier = x
    return tuple(out)


@dataclass(frozen=True)
class WitnessChain:
    """``sequences[i]`` and ``sequences[i+1]`` look the same to ``agents[i]``.

    ``construction`` is ``"reroute"`` when the second sequence is the
    rerouting of the simplified one and ``"rebuild"`` when that failed
    verification and :func:`rebuild_for` was used instead.
    """

    sequences: tuple[tuple[Call, ...], ...]
    agents: tuple[int, ...]
    simplified: tuple[Call, ...]
    construction: str = "reroute"

    def records(self, n: int = 0) -> list[dict]:
        out = []
        for i, seq in enumerate(self.sequences):
            rec = {"sequence": format_sequence(seq, n)}
            if i < len(self.agents):
                rec["agent"] = agent_name(self.agents[i], n)
                rec["verified"] = True
            out.append(rec)
        return out

    def render(self, n: int = 0) -> str:
        parts = []
        for i, seq in enumerate(self.sequences):
            parts.append(format_sequence(seq, n) or "ε")
            if i < len(self.agents):
                parts.append(f"≡_{agent_name(self.agents[i], n)}")
        return " ".join(parts)


def abab_witness(C: Sequence[Call], a: int, b: int, n: int) -> WitnessChain:
    if a == b:
        raise IllFormedInput("the two agents must differ")
    if Call.of(a, b) in C:
        raise IllFormedInput(f"sequence contains the call {Call.of(a, b).name(n)}")
    C = tuple(C)
    C1 = a_simplification(C, a, n)
    chain = _chain(C, r_ab(C1, a, b, n), a, b, C1, "reroute")
    if _broken_link(chain, n) is None:
        return chain
    chain = _chain(C, rebuild_for(C, a, b, n), a, b, C1, "rebuild")
    bad = _broken_link(chain, n)
    if bad is not None:
        x, y, agent = bad
        raise InvariantViolation(
            f"witness link {format_sequence(x, n)} ~ {format_sequence(y, n)} "
            f"fails for agent {agent_name(agent, n)}"
        )
    return chain


def _chain(C, C2, a, b, C1, construction) -> WitnessChain:
    last_b = max((i for i, c in enumerate(C2) if b in c), default=-1)
    C3 = C2[: last_b + 1]
    C4 = tuple(c for c in C3 if b not in c)
    return WitnessChain((C, C2, C3, C4, ()), (a, b, a, b), C1, construction)


def _broken_link(chain: WitnessChain, n: int):
    for (x, y), agent in zip(zip(chain.sequences, chain.sequences[1:]), chain.agents):
        if not equiv_view(x, y, agent, n):
            return x, y, agent
    return None
