"""Bounded planning: search from a concrete state, plan existence from a
precondition, conformant certification and bounded synthesis."""

from __future__ import annotations

import itertools
import os
from collections import deque
from dataclasses import dataclass, field

from . import syntax as S
from .actions import execute, execute_sequence
from .errors import BudgetExceeded, FragmentViolation
from .fragments import is_dllite_formula, is_simple_action
from .interpretation import Interpretation, canonical_fingerprint, evaluator, expand_domain, models
from .regression import BranchChoice, tr_branches_neg, tr_branches_pos
from .satisfiability import Satisfiable, Unsatisfiable
from .satisfiability.bounded import DEFAULT_MAX_DOMAIN
from .verification import Deadline, canonical_substitutions, check_sat, strip_reserved, time_budget

DEFAULT_STATE_BUDGET = 200_000
DEFAULT_CANDIDATE_BUDGET = 100_000


def state_budget() -> int:
    return int(os.environ.get("GSDACT_STATE_BUDGET", DEFAULT_STATE_BUDGET))


def candidate_budget() -> int:
    return int(os.environ.get("GSDACT_CANDIDATE_BUDGET", DEFAULT_CANDIDATE_BUDGET))


@dataclass(frozen=True)
class PlanStep:
    action_index: int
    substitution: dict
    action: tuple  # ground (or, for synthesis, with precondition variables left open)


@dataclass(frozen=True)
class Plan:
    steps: tuple = ()
    initial: Interpretation | None = None

    def __len__(self) -> int:
        return len(self.steps)

    @property
    def actions(self) -> list:
        return [s.action for s in self.steps]

    def combined(self) -> tuple:
        return tuple(st for s in self.steps for st in s.action)


@dataclass(frozen=True)
class PlanningInstance:
    actions: tuple
    goal: object
    k: int
    pre: object = None
    initial: Interpretation | None = None


def ground_instances(actions, universe) -> list[PlanStep]:
    """Every instance of every action with variables mapped into ``universe``."""
    universe = sorted(universe)
    out = []
    for j, a in enumerate(actions):
        variables = S.free_variables(a)
        for combo in itertools.product(universe, repeat=len(variables)):
            sigma = {v: S.Ind(o) for v, o in zip(variables, combo)}
            out.append(PlanStep(j, sigma, S.apply_substitution(tuple(a), sigma)))
    return out


# -- plan search from an interpretation ----------------------------------------


def state_bound(actions, k: int, interp: Interpretation) -> int:
    """Number of distinct states over the expanded domain."""
    d = len(interp.domain) + k
    concepts = set().union(*(S.concept_names(tuple(a)) for a in actions)) if actions else set()
    roles = set().union(*(S.role_names(tuple(a)) for a in actions)) if actions else set()
    return 2 ** (len(roles) * d * d + len(concepts) * d)


def find_plan(interp: Interpretation, actions, goal, k: int = 0,
              length_cap: int | None = None) -> Plan | None:
    """Shortest plan reaching ``goal`` from ``interp`` extended by ``k`` fresh elements.

    Breadth-first over states; substitutions range over the named
    individuals of the extended interpretation.  Returns ``None`` when the
    reachable state space is exhausted (or ``length_cap`` is reached) without
    meeting the goal; raises ``BudgetExceeded`` when the state budget runs out.
    """
    if not S.is_ground(goal):
        raise ValueError("goal must be ground")
    start = expand_domain(interp, k)
    instances = ground_instances(actions, start.names)
    cap = state_bound(actions, k, interp) if length_cap is None else length_cap
    budget = state_budget()
    deadline = Deadline(time_budget())
    if evaluator(start).holds(goal):
        return Plan((), start)
    seen = {canonical_fingerprint(start)}
    queue = deque([(start, ())])
    while queue:
        state, path = queue.popleft()
        if len(path) >= cap:
            continue
        deadline.check()
        for step in instances:
            nxt = execute(state, step.action)
            fp = canonical_fingerprint(nxt)
            if fp in seen:
                continue
            seen.add(fp)
            if len(seen) > budget:
                raise BudgetExceeded(f"explored more than {budget} states", states=len(seen))
            new_path = path + (step,)
            if evaluator(nxt).holds(goal):
                return Plan(new_path, start)
            queue.append((nxt, new_path))
    return None


# -- shared helpers for precondition-based problems ------------------------------


def _fragment_check(actions, *kbs):
    diags = []
    for kb in kbs:
        # variables are instantiated before reasoning, so judge a fresh grounding
        ground, _ = S.canonical_grounding(kb)
        diags += is_dllite_formula(ground).diagnostics
    for a in actions:
        diags += is_simple_action(a).diagnostics
    if diags:
        raise FragmentViolation("input is outside the lightweight fragment", diags)


def _vars_of(*objs) -> list:
    seen: dict = {}
    for o in objs:
        for v in S.free_variables(o):
            seen.setdefault(v)
    return list(seen)


def _inputs_individuals(actions, *kbs) -> set:
    out = set()
    for a in actions:
        out |= S.individuals(tuple(a))
    for kb in kbs:
        out |= S.individuals(kb)
    return out


@dataclass(frozen=True)
class PlanExists:
    substitution: dict
    plan: Plan
    witness: Interpretation


def plan_exists(actions, pre, goal, k: int, backend: str = "bounded",
                max_domain: int = DEFAULT_MAX_DOMAIN, extra_names: int | None = None):
    """Is there a substitution, a model of the precondition and a plan of
    length at most ``k`` from it to the goal?

    Returns a ``PlanExists`` triple or ``None`` (no plan found; with the
    bounded backend, none within ``max_domain`` elements).
    """
    actions = [tuple(a) for a in actions]
    una = backend == "dllite"
    deadline = Deadline(time_budget())
    variables = _vars_of(pre, goal)
    inds = _inputs_individuals(actions, pre, goal)
    budget = candidate_budget()
    tried = 0
    for sigma in canonical_substitutions(variables, inds, stem="v"):
        spre = S.apply_substitution(pre, sigma)
        sgoal = S.apply_substitution(goal, sigma)
        if una:
            _fragment_check(actions, spre, sgoal)
        universe = inds | {o.name for o in sigma.values()}
        n_extra = max((len(S.free_variables(a)) for a in actions), default=0) if extra_names is None else extra_names
        universe |= set(S.fresh_names(n_extra, universe | S.all_names(spre) | S.all_names(sgoal), stem="u"))
        instances = ground_instances(actions, universe)
        for length in range(k + 1):
            for seq in itertools.product(instances, repeat=length):
                tried += 1
                if tried > budget:
                    raise BudgetExceeded(f"examined more than {budget} candidate sequences", candidates=tried)
                combined = tuple(st for step in seq for st in step.action)
                names = S.individuals(combined) | S.individuals(spre) | S.individuals(sgoal)
                for _, branch in tr_branches_pos(combined, sgoal):
                    deadline.check()
                    verdict = check_sat(S.Conj(spre, branch), backend, max_domain, una, extra=names)
                    if isinstance(verdict, Satisfiable):
                        w = verdict.witness
                        if not (models(w, spre) and models(execute_sequence(w, [s.action for s in seq]), sgoal)):
                            raise AssertionError("internal error: plan witness failed re-validation")
                        return PlanExists(sigma, Plan(tuple(seq), w), strip_reserved(w, names))
    return None


# -- certification -------------------------------------------------------------------


@dataclass(frozen=True)
class Certified:
    def __bool__(self) -> bool:
        return True


@dataclass(frozen=True)
class Refuted:
    counterexample: Interpretation
    substitution: dict
    branch: BranchChoice = field(default_factory=BranchChoice)

    def __bool__(self) -> bool:
        return False


@dataclass(frozen=True)
class UnknownUpTo:
    """No counterexample with at most ``bound`` elements."""

    bound: int

    def __bool__(self) -> bool:
        return True


def certify(plan_actions, pre, goal, backend: str = "bounded",
            max_domain: int = DEFAULT_MAX_DOMAIN):
    """Is the sequence a plan for the goal from every model of ``pre``,
    under every substitution of the shared variables?"""
    plan_actions = [tuple(a) for a in plan_actions]
    una = backend == "dllite"
    if una:
        _fragment_check(plan_actions, pre, goal)
    deadline = Deadline(time_budget())
    combined = tuple(st for a in plan_actions for st in a)
    variables = _vars_of(combined, pre, goal)
    inds = _inputs_individuals(plan_actions, pre, goal)
    if una:
        substitutions = canonical_substitutions(variables, inds, stem="v")
    else:
        # without unique names, one all-fresh grounding covers every identification
        substitutions = canonical_substitutions(variables, inds, stem="v")[:1]
    complete = True
    for sigma in substitutions:
        spre = S.apply_substitution(pre, sigma)
        sgoal = S.apply_substitution(goal, sigma)
        sact = S.apply_substitution(combined, sigma)
        names = S.individuals(sact) | S.individuals(spre) | S.individuals(sgoal)
        for choice, branch in tr_branches_neg(sact, sgoal):
            deadline.check()
            verdict = check_sat(S.Conj(spre, branch), backend, max_domain, una, extra=names)
            if isinstance(verdict, Satisfiable):
                w = verdict.witness
                if not (models(w, spre) and not models(execute(w, sact), sgoal)):
                    raise AssertionError("internal error: refutation failed re-validation")
                return Refuted(strip_reserved(w, names), sigma, choice)
            if not isinstance(verdict, Unsatisfiable):
                complete = False
    return Certified() if complete else UnknownUpTo(max_domain)


# -- bounded synthesis -------------------------------------------------------------


@dataclass(frozen=True)
class Synthesized:
    plan: Plan
    verdict: object  # Certified or UnknownUpTo
    candidates: int = 0


def synthesize(actions, pre, goal, k: int, backend: str = "bounded",
               max_domain: int = DEFAULT_MAX_DOMAIN) -> Synthesized | None:
    """First sequence of at most ``k`` action instances (length-lexicographic)
    that ``certify`` accepts, or ``None``.

    Action variables range over the input individuals and the variables of
    the precondition and goal; the latter stay open so certification
    quantifies over them.  With the bounded backend a sequence certified only
    up to the domain bound is accepted and reported as such.
    """
    actions = [tuple(a) for a in actions]
    if backend == "dllite":
        _fragment_check(actions, pre, goal)
    inds = sorted(_inputs_individuals(actions, pre, goal))
    shared = _vars_of(pre, goal)
    instances = []
    for j, a in enumerate(actions):
        variables = S.free_variables(a)
        pool = [S.Ind(o) for o in inds] + [v for v in shared]
        for combo in itertools.product(pool, repeat=len(variables)):
            sigma = dict(zip(variables, combo))
            instances.append(PlanStep(j, sigma, S.apply_substitution(a, sigma)))
    budget = candidate_budget()
    tried = 0
    for length in range(k + 1):
        for seq in itertools.product(instances, repeat=length):
            tried += 1
            if tried > budget:
                raise BudgetExceeded(f"examined more than {budget} candidate sequences", candidates=tried)
            verdict = certify([s.action for s in seq], pre, goal, backend, max_domain)
            if isinstance(verdict, (Certified, UnknownUpTo)):
                return Synthesized(Plan(tuple(seq)), verdict, tried)
    return None
