"""Model checking for epistemic gossip with common knowledge."""
from .core import (
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
from .formula import Fragment, classify, eval_propositional, is_negation_free, parse_formula
from .modelcheck import check_truth, enumerate_nonredundant, eval, eval_bounded, eval_bounded_converged
from .pairview import EpistemicPairView, epv, epv_init, epv_oracle, epv_step, leq_epv, leq_situation
from .protocol import (
    CommunicationGraph,
    Protocol,
    check_partial_correctness,
    decide_termination,
    enabled_calls,
    parse_protocol,
    simulate,
)
from .transforms import abab_witness, classify_b_calls, leads_to, linked, r_ab, rebuild_for
from .views import a_simplification, equiv_view, is_a_irrelevant, view

__version__ = "0.1.0"

__all__ = [
    "Call",
    "GossipError",
    "Situation",
    "all_calls",
    "apply_call",
    "apply_sequence",
    "format_sequence",
    "is_noop_call",
    "parse_call",
    "parse_sequence",
    "reachable_situations",
    "root",
    "Fragment",
    "classify",
    "eval_propositional",
    "is_negation_free",
    "parse_formula",
    "check_truth",
    "enumerate_nonredundant",
    "eval",
    "eval_bounded",
    "eval_bounded_converged",
    "EpistemicPairView",
    "epv",
    "epv_init",
    "epv_oracle",
    "epv_step",
    "leq_epv",
    "leq_situation",
    "CommunicationGraph",
    "Protocol",
    "check_partial_correctness",
    "decide_termination",
    "enabled_calls",
    "parse_protocol",
    "simulate",
    "abab_witness",
    "classify_b_calls",
    "leads_to",
    "linked",
    "r_ab",
    "rebuild_for",
    "a_simplification",
    "equiv_view",
    "is_a_irrelevant",
    "view",
]
