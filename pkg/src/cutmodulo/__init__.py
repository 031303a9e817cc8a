"""Sequent calculus modulo rewrite systems: checking, atomic decision
procedures and cut elimination."""

from .analysis import (
    EmpiricalOrdering,
    Fails,
    Holds,
    NotTerminating,
    Unknown,
    confluent,
    critical_pairs,
    default_universe,
    locally_confluent,
    multiset_greater,
    terminating,
)
from .atomic import (
    NotProvable,
    Provable,
    SymProof,
    check_sym_proof,
    cut_free_provable_atomic,
    cut_redundancy_vs_confluence,
    proof_from_conversion,
    provable_atomic_asym,
    provable_atomic_sym,
    reduce_symmetric_atomic,
)
from .elimination import (
    BudgetExhausted,
    Choice,
    CutFree,
    Failed,
    RuleOrder,
    Scripted,
    eliminate_cuts_atomic_asym,
    eliminate_sym_atomic,
    instrument_measure,
    newman_step,
)
from .full import eliminate_cuts_full, normalize_axioms
from .generator import generate_random_system
from .kernel import Proof, Sequent, check_proof, is_cut_free
from .rewriting import Budget, ConversionSequence, RewriteRule, RewriteSystem, convertible, joinable, reducts
from .syntax import ParseError, parse_problem, parse_prop, parse_rules, parse_sequent, parse_term, render
from .terms import Atom, Signature, alpha_equal, substitute

__version__ = "0.1.0"

__all__ = [
    "__version__", "alpha_equal", "Atom", "Budget", "BudgetExhausted", "check_proof",
    "check_sym_proof", "Choice", "confluent", "ConversionSequence", "convertible",
    "critical_pairs", "cut_free_provable_atomic", "cut_redundancy_vs_confluence", "CutFree",
    "default_universe", "eliminate_cuts_atomic_asym", "eliminate_cuts_full",
    "eliminate_sym_atomic", "EmpiricalOrdering", "Failed", "Fails", "generate_random_system",
    "Holds", "instrument_measure", "is_cut_free", "joinable", "locally_confluent",
    "multiset_greater", "newman_step", "normalize_axioms", "NotProvable", "NotTerminating",
    "parse_problem", "parse_prop", "parse_rules", "parse_sequent", "parse_term", "ParseError",
    "Proof", "proof_from_conversion", "Provable", "provable_atomic_asym", "provable_atomic_sym",
    "reduce_symmetric_atomic", "reducts", "render", "RewriteRule", "RewriteSystem", "RuleOrder",
    "Scripted", "Sequent", "Signature", "substitute", "SymProof", "terminating", "Unknown",
]
