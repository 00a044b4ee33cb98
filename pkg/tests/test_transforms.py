import itertools
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gossipck.core import Call, all_calls, format_sequence, parse_sequence
from gossipck.transforms import (
    IllFormedInput,
    abab_witness,
    classify_b_calls,
    leads_to,
    linked,
    r_ab,
    rebuild_for,
)
from gossipck.views import a_simplification, equiv_view
from strategies import sequences

A, B = 0, 1
SIMPLE = "bc;ce;df;ef;bh;af;bg;ag;ah"


def seq(text, n=8):
    return parse_sequence(text, n)


def show(C, n=8):
    return format_sequence(C, n)


class TestLinked:
    def test_examples(self):
        assert linked(Call.of(1, 2), Call.of(2, 4))
        assert not linked(Call.of(1, 2), Call.of(1, 2))
        assert not linked(Call.of(1, 2), Call.of(3, 5))


class TestLeadsTo:
    def test_reaches_first_a_call(self):
        C = seq(SIMPLE)
        assert leads_to(C, 0, A) == 5

    def test_both_b_calls_reach_same_call(self):
        C = seq("bh;ce;df;ef;af;bg;bc;ag")
        assert leads_to(C, 0, A) == 7
        assert leads_to(C, 5, A) == 7

    def test_after_last_a_call(self):
        assert leads_to(seq("ab;bc"), 1, A) is None

    def test_start_with_a(self):
        with pytest.raises(Exception):
            leads_to(seq("ab;bc"), 0, A)


class TestClassify:
    def test_one_essential(self):
        C = seq(SIMPLE)
        cls = classify_b_calls(C, A, B, 8)
        assert cls.render(C, 8) == {"essential": ["bc"], "inessential": ["bh", "bg"]}

    def test_two_essential(self):
        C = seq("bh;ce;df;ef;af;bg;bc;ag")
        cls = classify_b_calls(C, A, B, 8)
        assert [C[i] for i in cls.essential] == [Call.of(1, 7), Call.of(1, 6)]

    def test_no_b_calls(self):
        cls = classify_b_calls(seq("ac;cd"), A, B, 8)
        assert cls.essential == () and cls.inessential == ()

    def test_rejects_pair_call(self):
        with pytest.raises(IllFormedInput):
            classify_b_calls(seq("ab;bc"), A, B, 8)


class TestReroute:
    def test_single_pass(self):
        assert show(r_ab(seq(SIMPLE), A, B, 8)) == "bc;ce;df;ef;gh;af;ag;ah"

    def test_second_sequence(self):
        assert show(r_ab(seq("ah;bc;bd;be;ad;bf;af"), A, B, 8)) == "ah;bc;bd;ef;ad;af"

    def test_nothing_to_reroute(self):
        C = seq("bc;ac")
        assert r_ab(C, A, B, 8) == C

    def test_rejects_irrelevant_call(self):
        with pytest.raises(IllFormedInput):
            r_ab(seq("de;ac"), A, B, 8)

    def test_rejects_pair_call(self):
        with pytest.raises(IllFormedInput):
            r_ab(seq("ab"), A, B, 8)


class TestRerouteCanChangeView:
    """Rerouting ``bd`` into ``cd`` feeds the first ``ac`` as well."""

    C = "bc;bd;ac;bc;ac"

    def test_view_changes(self):
        C = seq(self.C, 4)
        assert a_simplification(C, A, 4) == C
        R = r_ab(C, A, B, 4)
        assert show(R, 4) == "bc;cd;ac;ac"
        assert not equiv_view(C, R, A, 4)

    def test_witness_falls_back(self):
        chain = abab_witness(seq(self.C, 4), A, B, 4)
        assert chain.construction == "rebuild"
        assert [show(C, 4) for C in chain.sequences[1:]] == ["bc;ac;cd;ac", "bc", "", ""]


class TestRebuild:
    def test_example(self):
        C = seq("ah;cd;bc;bd;be;ad;bf;bg;af")
        R = rebuild_for(C, A, B, 8)
        assert equiv_view(C, R, A, 8)
        assert sum(B in c for c in R) == 1

    def test_rejects_pair_call(self):
        with pytest.raises(IllFormedInput):
            rebuild_for(seq("ab"), A, B, 8)


class TestWitness:
    def test_full_chain(self):
        chain = abab_witness(seq("ah;cd;bc;bd;be;ad;bf;bg;af"), A, B, 8)
        assert show(chain.simplified) == "ah;bc;bd;be;ad;bf;af"
        assert [show(C) for C in chain.sequences[1:]] == ["ah;bc;bd;ef;ad;af", "ah;bc;bd", "ah", ""]
        assert chain.agents == (A, B, A, B)
        assert chain.construction == "reroute"
        for (x, y), agent in zip(zip(chain.sequences, chain.sequences[1:]), chain.agents):
            assert equiv_view(x, y, agent, 8)

    def test_empty(self):
        chain = abab_witness((), A, B, 8)
        assert all(C == () for C in chain.sequences)

    def test_unrelated_calls(self):
        chain = abab_witness(seq("cd;ce"), A, B, 8)
        assert chain.simplified == () and chain.sequences[1:] == ((), (), (), ())

    def test_records(self):
        recs = abab_witness(seq("ah;cd;bc;bd;be;ad;bf;bg;af"), A, B, 8).records(8)
        assert recs[0] == {"sequence": "ah;cd;bc;bd;be;ad;bf;bg;af", "agent": "a", "verified": True}
        assert recs[-1] == {"sequence": ""}

    def test_render(self):
        text = abab_witness(seq("ah;cd;bc;bd;be;ad;bf;bg;af"), A, B, 8).render(8)
        assert text.endswith("ah ≡_b ε")

    def test_rejects_pair_call(self):
        with pytest.raises(IllFormedInput):
            abab_witness(seq("ab"), A, B, 8)


def _without_pair(C, a=A, b=B):
    return tuple(c for c in C if c != Call.of(a, b))


@given(st.integers(3, 8).flatmap(lambda n: st.tuples(st.just(n), sequences(n, 8))))
def test_witness_exists(arg):
    n, C = arg
    chain = abab_witness(_without_pair(C), A, B, n)
    assert chain.sequences[-1] == ()


@given(sequences(6, 8))
def test_reroute_leaves_only_essential_calls(C):
    R = r_ab(a_simplification(_without_pair(C), A, 6), A, B, 6)
    assert classify_b_calls(R, A, B, 6).inessential == ()


@given(st.integers(3, 8).flatmap(lambda n: st.tuples(st.just(n), sequences(n, 8))))
def test_rebuild_keeps_view_and_calls_b_at_most_once(arg):
    n, C = arg
    C = _without_pair(C)
    R = rebuild_for(C, A, B, n)
    assert equiv_view(C, R, A, n)
    b_calls = [i for i, c in enumerate(R) if B in c]
    assert len(b_calls) <= 1
    if b_calls:
        assert leads_to(R, b_calls[0], A) is not None


@given(sequences(6, 8))
def test_classification_partitions_b_calls(C):
    C = _without_pair(C)
    cls = classify_b_calls(C, A, B, 6)
    b_calls = {i for i, c in enumerate(C) if B in c}
    assert set(cls.essential) | set(cls.inessential) == b_calls
    assert not set(cls.essential) & set(cls.inessential)


def test_leads_to_never_increases_under_extension():
    rng = random.Random(11)
    cs = all_calls(5)
    for _ in range(500):
        C = tuple(rng.choice(cs) for _ in range(rng.randint(1, 7)))
        i = rng.randrange(len(C))
        if A in C[i]:
            continue
        before = leads_to(C, i, A)
        for c in cs:
            after = leads_to(C + (c,), i, A)
            if before is not None:
                assert after == before


def test_witness_exhaustive_small():
    constructions = set()
    for k in range(6):
        for C in itertools.product([c for c in all_calls(4) if c != Call.of(A, B)], repeat=k):
            chain = abab_witness(C, A, B, 4)
            assert chain.sequences[-1] == ()
            constructions.add(chain.construction)
    assert constructions == {"reroute", "rebuild"}
