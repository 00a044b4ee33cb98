from __future__ import annotations

import random

from hypothesis import strategies as st

from gossipck.core import Call, all_calls
from gossipck.formula import And, Atom, Common, Implies, Not, Or


def calls(n: int):
    return st.sampled_from(all_calls(n))


def sequences(n: int, max_size: int = 6, min_size: int = 0):
    return st.lists(calls(n), min_size=min_size, max_size=max_size).map(tuple)


def atoms(n: int):
    return st.builds(Atom, st.integers(0, n - 1), st.integers(0, n - 1))


def propositional(n: int, negation: bool = True, max_leaves: int = 6):
    def extend(children):
        options = [st.builds(And, children, children), st.builds(Or, children, children)]
        if negation:
            options += [st.builds(Not, children), st.builds(Implies, children, children)]
        return st.one_of(*options)

    return st.recursive(atoms(n), extend, max_leaves=max_leaves)


def groups(n: int, max_size: int | None = None):
    return st.frozensets(st.integers(0, n - 1), min_size=1, max_size=max_size or n)


def weakly_nested(n: int, negation: bool = True, max_size: int = 2):
    """Boolean combinations of atoms and modal operators over propositional
    bodies, with groups of at most ``max_size`` agents."""
    modal = st.builds(Common, groups(n, max_size), propositional(n, negation, 4))
    base = st.one_of(atoms(n), modal)

    def extend(children):
        options = [st.builds(And, children, children), st.builds(Or, children, children)]
        if negation:
            options += [st.builds(Not, children), st.builds(Implies, children, children)]
        return st.one_of(*options)

    return st.recursive(base, extend, max_leaves=4)


def any_formula(n: int):
    def extend(children):
        return st.one_of(
            st.builds(Not, children),
            st.builds(And, children, children),
            st.builds(Or, children, children),
            st.builds(Implies, children, children),
            st.builds(Common, groups(n), children),
        )

    return st.recursive(atoms(n), extend, max_leaves=6)


# --- seeded generators (acceptance runs are reproducible without hypothesis) ---


def random_sequence(rng: random.Random, n: int, max_len: int, min_len: int = 0) -> tuple[Call, ...]:
    cs = all_calls(n)
    return tuple(rng.choice(cs) for _ in range(rng.randint(min_len, max_len)))


def random_propositional(rng: random.Random, n: int, depth: int, negation: bool = True):
    if depth == 0 or rng.random() < 0.3:
        return Atom(rng.randrange(n), rng.randrange(n))
    ops = ["and", "or"] + (["not", "implies"] if negation else [])
    op = rng.choice(ops)
    if op == "not":
        return Not(random_propositional(rng, n, depth - 1, negation))
    left = random_propositional(rng, n, depth - 1, negation)
    right = random_propositional(rng, n, depth - 1, negation)
    return {"and": And, "or": Or, "implies": Implies}[op](left, right)


def random_weakly_nested(rng: random.Random, n: int, depth: int = 3, negation: bool = True,
                         max_group: int = 2):
    if depth == 0 or rng.random() < 0.35:
        if rng.random() < 0.5:
            return Atom(rng.randrange(n), rng.randrange(n))
        size = rng.randint(1, max_group)
        group = frozenset(rng.sample(range(n), size))
        return Common(group, random_propositional(rng, n, 2, negation))
    ops = ["and", "or"] + (["not", "implies"] if negation else [])
    op = rng.choice(ops)
    if op == "not":
        return Not(random_weakly_nested(rng, n, depth - 1, negation, max_group))
    left = random_weakly_nested(rng, n, depth - 1, negation, max_group)
    right = random_weakly_nested(rng, n, depth - 1, negation, max_group)
    return {"and": And, "or": Or, "implies": Implies}[op](left, right)
