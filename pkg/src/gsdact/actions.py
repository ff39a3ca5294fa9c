"""Interpretation updates and execution of ground actions."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

from . import syntax as S
from .errors import EvaluationError
from .interpretation import Interpretation, evaluator


@dataclass(frozen=True)
class UpdateOp:
    target: str
    kind: Literal["concept", "role"]
    mode: Literal["add", "remove"]
    payload: frozenset


def update(interp: Interpretation, op: UpdateOp) -> Interpretation:
    """Apply ``I (+/-)_E W``: only the extension of ``op.target`` changes."""
    dom = set(interp.domain)
    if op.kind == "concept":
        if not op.payload <= dom:
            raise EvaluationError(f"payload for {op.target} leaves the domain")
        old = interp.concept(op.target)
        new = old | op.payload if op.mode == "add" else old - op.payload
        if new == old:
            return interp
        return interp.replace(concepts={**interp.concepts, op.target: new})
    if op.kind == "role":
        if any(a not in dom or b not in dom for a, b in op.payload):
            raise EvaluationError(f"payload for {op.target} leaves the domain")
        old = interp.role(op.target)
        new = old | op.payload if op.mode == "add" else old - op.payload
        if new == old:
            return interp
        return interp.replace(roles={**interp.roles, op.target: new})
    raise ValueError(f"unknown update kind {op.kind!r}")


@dataclass(frozen=True)
class TraceEntry:
    """One executed step: a basic update, or a guard test."""

    path: tuple
    step: object
    op: UpdateOp | None = None
    guard_value: bool | None = None


def step_op(interp: Interpretation, step) -> UpdateOp:
    ev = evaluator(interp)
    if isinstance(step, S.AddConcept):
        return UpdateOp(step.name, "concept", "add", ev.concept(step.concept))
    if isinstance(step, S.RemoveConcept):
        return UpdateOp(step.name, "concept", "remove", ev.concept(step.concept))
    if isinstance(step, S.AddRole):
        return UpdateOp(step.name, "role", "add", ev.role(step.role))
    if isinstance(step, S.RemoveRole):
        return UpdateOp(step.name, "role", "remove", ev.role(step.role))
    raise TypeError(f"not a basic step: {step!r}")


def execute(interp: Interpretation, action, trace: list | None = None) -> Interpretation:
    """``S_alpha(I)`` for a ground action; appends to ``trace`` when given."""
    if not S.is_ground(action):
        names = ", ".join(str(v) for v in S.free_variables(action))
        raise EvaluationError(f"action is not ground (free variables: {names})")
    return _run(interp, tuple(action), trace, ())


def _run(interp, steps, trace, path):
    for i, st in enumerate(steps):
        here = path + (i,)
        if isinstance(st, S.Conditional):
            value = evaluator(interp).holds(st.guard)
            if trace is not None:
                trace.append(TraceEntry(here, st, guard_value=value))
            branch = st.then if value else st.orelse
            interp = _run(interp, branch, trace, here + ("then" if value else "else",))
        else:
            op = step_op(interp, st)
            if trace is not None:
                trace.append(TraceEntry(here, st, op=op))
            interp = update(interp, op)
    return interp


def execute_sequence(interp: Interpretation, actions) -> Interpretation:
    for a in actions:
        interp = execute(interp, a)
    return interp
