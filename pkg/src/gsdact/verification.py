"""Static verification: does an action preserve a knowledge base?

An action violates ``K_post`` from some model of ``K_pre`` iff
``K_pre and not TR(K_post)`` has a finite model, where the action's variables
are replaced by fresh individuals.  The negated regression is split into
branches (one per combination of guard outcomes) and each branch is handed to
a satisfiability backend.
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass, field

from . import syntax as S
from .actions import execute
from .errors import BudgetExceeded, FragmentViolation
from .fragments import is_dllite_formula, is_simple_action
from .interpretation import Interpretation, models
from .regression import BranchChoice, eliminate_negated_inclusions, tr_branches_neg
from .satisfiability import Satisfiable, Unsatisfiable, sat_bounded, sat_dllite
from .satisfiability.bounded import DEFAULT_MAX_DOMAIN
from .satisfiability.propositional import propositionally_satisfiable

BACKENDS = ("bounded", "dllite")


@dataclass(frozen=True)
class Preserving:
    """No model of the precondition is ever taken outside the postcondition."""

    proof: str = "complete"

    def __bool__(self) -> bool:
        return True


@dataclass(frozen=True)
class NotPreserving:
    counterexample: Interpretation
    branch: BranchChoice
    grounding: dict = field(default_factory=dict)
    ground_action: tuple = ()

    def __bool__(self) -> bool:
        return False


@dataclass(frozen=True)
class NoCounterexampleUpTo:
    bound: int

    def __bool__(self) -> bool:
        return True


def time_budget() -> float | None:
    raw = os.environ.get("GSDACT_TIME_BUDGET")
    return float(raw) if raw else None


class Deadline:
    def __init__(self, seconds: float | None):
        self.end = None if seconds is None else time.monotonic() + seconds
        self.seconds = seconds

    def check(self):
        if self.end is not None and time.monotonic() > self.end:
            raise BudgetExceeded(f"time budget of {self.seconds}s exhausted", seconds=self.seconds)


def pad_individuals(interp: Interpretation, names) -> Interpretation:
    """Give every name in ``names`` a denotation, adding fresh elements as needed."""
    missing = sorted(set(names) - set(interp.names))
    if not missing:
        return interp
    taken = set(interp.domain)
    elems = S.fresh_names(len(missing), taken, stem="e")
    new_names = dict(interp.names)
    new_names.update(zip(missing, elems))
    return interp.replace(domain=interp.domain + tuple(elems), names=new_names)


def strip_reserved(interp: Interpretation, keep=()) -> Interpretation:
    """Drop reserved-prefix names that were only bookkeeping for a search."""
    keep = set(keep)
    names = {n: e for n, e in interp.names.items()
             if not n.startswith(S.RESERVED_PREFIX) or n in keep}
    return interp.replace(names=names) if len(names) != len(interp.names) else interp


def canonical_substitutions(variables, individuals, stem="v"):
    """Substitutions of ``variables`` up to renaming of fresh individuals.

    Each variable goes to an input individual or to a fresh representative;
    fresh representatives are introduced in order (restricted growth), so
    every identification pattern appears exactly once.  The all-distinct-fresh
    substitution comes first.
    """
    variables = list(variables)
    individuals = sorted(individuals)
    reps = S.fresh_names(len(variables), set(individuals), stem=stem)
    out = []

    def rec(i, sigma, used):
        if i == len(variables):
            out.append(dict(sigma))
            return
        v = variables[i]
        for j in range(used + 1):
            if j < len(reps):
                sigma[v] = S.Ind(reps[j])
                rec(i + 1, sigma, max(used, j + 1))
        for o in individuals:
            sigma[v] = S.Ind(o)
            rec(i + 1, sigma, used)
        sigma.pop(v, None)

    rec(0, {}, 0)
    # put the all-fresh substitution first, the rest in generation order
    out.sort(key=lambda s: 0 if len({x.name for x in s.values()}) == len(s)
             and all(x.name in reps for x in s.values()) else 1)
    return out


def check_sat(formula, backend: str, max_domain: int, una: bool, extra=()):
    """Run one backend on a ground formula; returns a verdict with a padded witness."""
    if not propositionally_satisfiable(formula):
        return Unsatisfiable()
    if backend == "dllite":
        lite = eliminate_negated_inclusions(formula, una=True)
        report = is_dllite_formula(lite)
        if not report:
            raise FragmentViolation("branch formula left the lightweight fragment", report.diagnostics)
        verdict = sat_dllite(lite)
    elif backend == "bounded":
        verdict = sat_bounded(formula, max_domain, una=una, extra_individuals=extra)
    else:
        raise ValueError(f"unknown backend {backend!r}")
    if isinstance(verdict, Satisfiable):
        witness = pad_individuals(verdict.witness, extra)
        return Satisfiable(witness)
    return verdict


def _check_fragment(action, *kbs):
    diags = []
    for kb in kbs:
        diags += is_dllite_formula(kb).diagnostics
    diags += is_simple_action(action).diagnostics
    if diags:
        raise FragmentViolation("input is outside the lightweight fragment", diags)


def verify_pre_post(action, pre, post, backend: str = "bounded",
                    max_domain: int = DEFAULT_MAX_DOMAIN, una: bool | None = None):
    """Does every ground instance of ``action`` take models of ``pre`` into ``post``?"""
    if backend not in BACKENDS:
        raise ValueError(f"unknown backend {backend!r}")
    for kb in (pre, post):
        if not S.is_ground(kb):
            raise ValueError("pre- and postconditions must be ground")
    action = tuple(action)
    if backend == "dllite":
        _check_fragment(action, pre, post)
        una = True
    una = bool(una)
    deadline = Deadline(time_budget())
    kb_names = S.all_names(pre) | S.all_names(post)
    ground, sigma = S.canonical_grounding(action, avoid=kb_names)
    groundings = [(ground, sigma)]
    if una and sigma:
        # distinct names denote distinct elements, so identifications of
        # variables with each other and with known individuals are separate cases
        inds = (S.individuals(pre) | S.individuals(post) | S.individuals(action))
        groundings = []
        for sub in canonical_substitutions(sigma, inds, stem="x"):
            groundings.append((S.apply_substitution(action, sub), sub))
    complete = True
    for ground, sub in groundings:
        names = S.individuals(ground) | S.individuals(pre) | S.individuals(post)
        for branch, negated in tr_branches_neg(ground, post):
            deadline.check()
            target = S.Conj(pre, negated)
            verdict = check_sat(target, backend, max_domain, una, extra=names)
            if isinstance(verdict, Satisfiable):
                witness = verdict.witness
                if not (models(witness, pre) and not models(execute(witness, ground), post)):
                    raise AssertionError("internal error: counterexample failed re-validation")
                return NotPreserving(strip_reserved(witness, names), branch, sub, ground)
            if not isinstance(verdict, Unsatisfiable):
                complete = False
    if complete:
        return Preserving("complete" if backend == "dllite" else "propositional")
    return NoCounterexampleUpTo(max_domain)


def verify_preserving(action, kb, backend: str = "bounded",
                      max_domain: int = DEFAULT_MAX_DOMAIN, una: bool | None = None):
    return verify_pre_post(action, kb, kb, backend, max_domain, una)
