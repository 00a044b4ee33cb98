import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gossipck.core import (
    Call,
    GossipError,
    Situation,
    all_calls,
    apply_call,
    apply_sequence,
    format_sequence,
    is_noop_call,
    parse_call,
    parse_sequence,
    reachable_situations,
    root,
)
from gossipck.pairview import leq_situation
from strategies import calls, sequences

S = Situation.parse


def seq(text, n=3):
    return parse_sequence(text, n)


class TestRoot:
    def test_three(self):
        assert str(root(3)) == "A.B.C"

    def test_two(self):
        assert str(root(2)) == "A.B"

    def test_eight(self):
        assert str(root(8)) == "A.B.C.D.E.F.G.H"

    def test_too_small(self):
        with pytest.raises(GossipError):
            root(1)

    def test_many_agents_use_indexed_names(self):
        s = root(28)
        assert str(s).split(".")[27] == "A27"


class TestCalls:
    def test_apply_examples(self):
        assert apply_call(S("A.B.C"), Call.of(0, 2)) == S("AC.B.AC")
        assert apply_call(S("AC.B.AC"), Call.of(1, 2)) == S("AC.ABC.ABC")
        assert apply_call(S("AB.AB.C"), Call.of(0, 1)) == S("AB.AB.C")

    def test_apply_sequence_examples(self):
        assert str(apply_sequence(root(3), seq("ac;bc;ac"))) == "ABC.ABC.ABC"
        assert apply_sequence(root(3), ()) == root(3)
        assert str(apply_sequence(root(3), seq("ab;ab"))) == "AB.AB.C"

    def test_noop(self):
        assert is_noop_call(S("AB.AB.C"), Call.of(0, 1))
        assert not is_noop_call(S("A.B.C"), Call.of(0, 1))
        s = S("AC.B.AC")
        assert is_noop_call(s, Call.of(0, 2)) == (apply_call(s, Call.of(0, 2)) == s)
        assert is_noop_call(s, Call.of(0, 2))

    def test_normalised(self):
        assert Call.of(2, 0) == Call(0, 2)
        with pytest.raises(GossipError):
            Call.of(1, 1)

    @pytest.mark.parametrize("text", ["ab", "(a,b)", "ba", "(b, a)"])
    def test_parse_call(self, text):
        assert parse_call(text) == Call(0, 1)

    def test_parse_indexed(self):
        assert parse_call("a3a12") == Call(3, 12)

    @pytest.mark.parametrize("text", ["", "eps", "ε"])
    def test_empty_sequence(self, text):
        assert parse_sequence(text) == ()

    def test_sequence_separators(self):
        expected = (Call(0, 2), Call(1, 2), Call(0, 2))
        for text in ["ac;bc;ac", "ac.bc.ac", "ac, bc, ac", "(a,c)(b,c)(a,c)", "ac bc ac"]:
            assert parse_sequence(text) == expected

    def test_out_of_range(self):
        with pytest.raises(GossipError):
            parse_sequence("ad", 3)

    def test_bad_call(self):
        with pytest.raises(GossipError):
            parse_call("abc")

    def test_format_round_trip(self):
        C = seq("ac;bc;ac")
        assert parse_sequence(format_sequence(C)) == C


class TestSituations:
    def test_parse_and_print(self):
        assert str(S("AC.B.AC")) == "AC.B.AC"

    def test_must_know_own_secret(self):
        with pytest.raises(GossipError):
            S("B.B.C")

    def test_bad_secret(self):
        with pytest.raises(GossipError):
            S("AD.B.C")

    def test_expert(self):
        s = S("ABC.AB.ABC")
        assert s.is_expert(0) and not s.is_expert(1)
        assert s.secrets_of(1) == [0, 1]
        assert s.total() == 8


class TestReachable:
    def test_full_gossip_reachable(self):
        assert S("ABC.ABC.ABC") in reachable_situations(3)

    def test_forbidden_call(self):
        assert S("AB.AB.C") not in reachable_situations(3, {Call(0, 1)})

    def test_two_agents_without_their_call(self):
        assert reachable_situations(2, {Call(0, 1)}) == {S("A.B")}

    def test_matches_brute_force(self):
        # every situation of some sequence of length <= 6 over 3 agents
        seen = set()
        for k in range(7):
            for C in itertools.product(all_calls(3), repeat=k):
                seen.add(apply_sequence(root(3), C))
        assert reachable_situations(3) == seen


@given(sequences(3, 8), sequences(3, 4))
def test_prefix_monotone(C, D):
    assert leq_situation(apply_sequence(root(3), C), apply_sequence(root(3), C + D))


@given(sequences(4, 8))
def test_self_knowledge(C):
    s = apply_sequence(root(4), C)
    assert all(s.knows(a, a) for a in range(4))


@given(sequences(4, 6), calls(4))
def test_call_idempotent(C, c):
    s = apply_sequence(root(4), C)
    assert apply_call(apply_call(s, c), c) == apply_call(s, c)


@given(st.integers(2, 5))
def test_closure_within_secret_bound(n):
    full = (1 << n) - 1
    for s in reachable_situations(n):
        assert all(q & ~full == 0 for q in s)
