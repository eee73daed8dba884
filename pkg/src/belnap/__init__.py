"""Paraconsistent reasoning with LLM-judge grounded atomic valuations."""

from .semantics import UnknownAtomError, evaluate, evaluate_with_trace
from .syntax import (
    And,
    Atom,
    Const,
    ExistsR,
    ForallR,
    Formula,
    Neg,
    Or,
    Signature,
    Var,
    format_formula,
    parse_formula,
)
from .truth import (
    E,
    F,
    GTV,
    QuantifierMode,
    T,
    TruthValue,
    and3,
    exists_q,
    forall_q,
    neg3,
    or3,
    project,
)
from .validity import BudgetExceededError, Verdict, check_validity

__version__ = "0.1.0"
