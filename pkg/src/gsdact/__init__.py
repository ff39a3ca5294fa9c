"""Reasoning about insert/delete actions on graph-structured data guarded by
description-logic knowledge bases: execution, regression, satisfiability,
static verification and bounded planning."""

__version__ = "0.1.0"

from .actions import execute, execute_sequence
from .errors import BudgetExceeded, EvaluationError, FragmentViolation, GsdError
from .interpretation import Interpretation, models, parse_interpretation, print_interpretation
from .parser import ParseError, parse_action, parse_concept, parse_formula, parse_role
from .regression import tr, tr_branches_neg, tr_branches_pos, tr_neg

__all__ = [
    "BudgetExceeded", "EvaluationError", "FragmentViolation", "GsdError", "Interpretation",
    "ParseError", "execute", "execute_sequence", "models", "parse_action", "parse_concept",
    "parse_formula", "parse_interpretation", "parse_role", "print_interpretation", "tr",
    "tr_branches_neg", "tr_branches_pos", "tr_neg",
]
