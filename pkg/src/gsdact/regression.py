"""Regression of knowledge bases through ground actions.

``tr`` and ``tr_neg`` build one formula; ``tr_branches_neg`` and
``tr_branches_pos`` enumerate the per-branch formulae lazily, one for each
combination of guard outcomes.  Sequences are regressed right to left, and
substitution keeps shared subterms shared, so results are DAGs.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Iterator

from . import syntax as S
from .errors import BudgetExceeded

DEFAULT_NODE_BUDGET = 10**6


def node_budget() -> int:
    return int(os.environ.get("GSDACT_NODE_BUDGET", DEFAULT_NODE_BUDGET))


@dataclass(frozen=True)
class BranchChoice:
    """Guard outcomes, one per conditional met along an execution path."""

    decisions: tuple = ()

    def __str__(self) -> str:
        return "".join("T" if d else "F" for d in self.decisions) or "-"


# -- symbol substitution ------------------------------------------------------


def substitute_symbol(formula, name: str, replacement):
    """Replace every occurrence of concept/role name ``name`` by ``replacement``.

    The kind of ``name`` is taken from ``replacement``.  Occurrences under an
    inverse become the inverse of the replacement.  Replacement happens in a
    single pass, so ``name`` inside ``replacement`` is left alone.
    """
    if isinstance(replacement, S.CONCEPT_TYPES):
        is_concept = True
    elif isinstance(replacement, S.ROLE_TYPES):
        is_concept = False
    else:
        raise TypeError(f"replacement must be a concept or a role, got {replacement!r}")
    inv_replacement = None if is_concept else S.inverse(replacement)
    memo: dict[int, object] = {}
    keep = []

    def go(node):
        if isinstance(node, (S.Ind, S.Var)):
            return node
        key = id(node)
        hit = memo.get(key)
        if hit is not None:
            return hit
        if is_concept and isinstance(node, S.ConceptName) and node.name == name:
            out = replacement
        elif not is_concept and isinstance(node, S.RoleName) and node.name == name:
            out = replacement
        elif (not is_concept and isinstance(node, S.Inverse)
              and isinstance(node.role, S.RoleName) and node.role.name == name):
            out = inv_replacement
        else:
            out = S._map_children(node, go)
        memo[key] = out
        keep.append(node)
        return out

    if isinstance(formula, tuple):
        return tuple(go(s) for s in formula)
    return go(formula)


def _step_substitution(step, formula):
    if isinstance(step, S.AddConcept):
        return substitute_symbol(formula, step.name, S.Or(S.ConceptName(step.name), step.concept))
    if isinstance(step, S.RemoveConcept):
        return substitute_symbol(formula, step.name, S.And(S.ConceptName(step.name), S.Not(step.concept)))
    if isinstance(step, S.AddRole):
        return substitute_symbol(formula, step.name, S.RoleUnion(S.RoleName(step.name), step.role))
    if isinstance(step, S.RemoveRole):
        return substitute_symbol(formula, step.name, S.RoleDiff(S.RoleName(step.name), step.role))
    raise TypeError(f"not a basic step: {step!r}")


def _require_ground(action):
    if not S.is_ground(action):
        names = ", ".join(str(v) for v in S.free_variables(action))
        raise ValueError(f"regression needs a ground action (free variables: {names})")


# -- whole-formula transformations ---------------------------------------------


def _regress(steps, formula, combine, budget, total):
    for st in reversed(steps):
        if isinstance(st, S.Conditional):
            then_f = _regress(st.then, formula, combine, budget, total)
            else_f = _regress(st.orelse, formula, combine, budget, total)
            formula = combine(st.guard, then_f, else_f)
            size = S.node_count(formula)
            if size > budget:
                raise BudgetExceeded(
                    f"regressed formula exceeds {budget} nodes "
                    f"(action has {total} conditionals); use branch enumeration",
                    nodes=size, conditionals=total)
        else:
            formula = _step_substitution(st, formula)
    return formula


def _tr_combine(guard, then_f, else_f):
    return S.Conj(S.Disj(S.Neg(guard), then_f), S.Disj(guard, else_f))


def _tr_neg_combine(guard, then_f, else_f):
    return S.Disj(S.Conj(guard, then_f), S.Conj(S.Neg(guard), else_f))


def tr(action, kb, budget: int | None = None):
    """``TR_alpha(K)``: ``I |= tr(a, K)`` iff ``execute(I, a) |= K``."""
    _require_ground(action)
    budget = node_budget() if budget is None else budget
    return _regress(tuple(action), kb, _tr_combine, budget, S.count_conditionals(action))


def tr_neg(action, kb, budget: int | None = None):
    """Formula equivalent to ``not tr(action, kb)``, with conditionals as disjunctions."""
    _require_ground(action)
    budget = node_budget() if budget is None else budget
    return _regress(tuple(action), S.Neg(kb), _tr_neg_combine, budget, S.count_conditionals(action))


# -- branch sets ---------------------------------------------------------------


def _branches(steps: tuple, base) -> Iterator[tuple[tuple, object]]:
    if not steps:
        yield (), base
        return
    head, rest = steps[0], steps[1:]
    if isinstance(head, S.Conditional):
        for choices, f in _branches(tuple(head.then) + rest, base):
            yield (True,) + choices, S.Conj(head.guard, f)
        for choices, f in _branches(tuple(head.orelse) + rest, base):
            yield (False,) + choices, S.Conj(S.Neg(head.guard), f)
    else:
        for choices, f in _branches(rest, base):
            yield choices, _step_substitution(head, f)


def tr_branches_neg(action, kb) -> Iterator[tuple[BranchChoice, object]]:
    """Members of the negated branch set; their disjunction is ``tr_neg``."""
    _require_ground(action)
    for choices, f in _branches(tuple(action), S.Neg(kb)):
        yield BranchChoice(choices), f


def tr_branches_pos(action, kb) -> Iterator[tuple[BranchChoice, object]]:
    """Members of the positive branch set.

    For every interpretation, some member holds iff ``tr(action, kb)`` holds.
    """
    _require_ground(action)
    for choices, f in _branches(tuple(action), kb):
        yield BranchChoice(choices), f


# -- negation normal form and negated inclusions --------------------------------


def nnf(formula):
    """Push formula-level negation down to inclusions and assertions."""
    if isinstance(formula, S.Neg):
        arg = formula.arg
        if isinstance(arg, S.Neg):
            return nnf(arg.arg)
        if isinstance(arg, S.Conj):
            return S.Disj(nnf(S.Neg(arg.left)), nnf(S.Neg(arg.right)))
        if isinstance(arg, S.Disj):
            return S.Conj(nnf(S.Neg(arg.left)), nnf(S.Neg(arg.right)))
        return formula
    if isinstance(formula, S.Conj):
        return S.Conj(nnf(formula.left), nnf(formula.right))
    if isinstance(formula, S.Disj):
        return S.Disj(nnf(formula.left), nnf(formula.right))
    return formula


def eliminate_negated_inclusions(formula, avoid=(), una: bool = False):
    """NNF, then turn each negated inclusion into assertions.

    ``not (C <= D)`` becomes ``o : C and not D`` and ``not (r <= s)`` becomes
    ``(o, o') : r - s`` for fresh ``o``, ``o'``.  Under unique names a fresh
    individual cannot stand for a named element, so with ``una`` the witness
    is a disjunction over the named individuals of the formula and the fresh
    ones.  Either way the result is equisatisfiable with the input.
    """
    out = nnf(formula)
    taken = set(avoid) | S.all_names(out)
    named = sorted(S.individuals(out)) if una else []

    def fresh():
        (name,) = S.fresh_names(1, taken, stem="o")
        taken.add(name)
        return S.Ind(name)

    def go(f):
        if isinstance(f, S.Conj):
            return S.Conj(go(f.left), go(f.right))
        if isinstance(f, S.Disj):
            return S.Disj(go(f.left), go(f.right))
        if isinstance(f, S.Neg):
            a = f.arg
            if isinstance(a, S.ConceptInclusion):
                c = S.And(a.lhs, S.Not(a.rhs))
                return S.disj(*(S.ConceptAssertion(x, c) for x in [S.Ind(o) for o in named] + [fresh()]))
            if isinstance(a, S.RoleInclusion):
                r = S.RoleDiff(a.lhs, a.rhs)
                if not una:
                    return S.RoleAssertion(fresh(), fresh(), r)
                f1, f2 = fresh(), fresh()
                pool = [S.Ind(o) for o in named] + [f1]
                pairs = [(x, y) for x in pool for y in pool] + [(f1, f2)]
                return S.disj(*(S.RoleAssertion(x, y, r) for x, y in pairs))
        return f

    return go(out)
