"""Render syntax trees in the concrete text grammar.

Output re-parses to the same tree.  Internal-only role constructors are
written with ``@inv(...)`` / ``@dom(...)`` markers, which the parser accepts
only in internal mode.
"""

from __future__ import annotations

from .syntax import (
    AddConcept, AddRole, And, AtLeast, AtMost, Bottom, ConceptAssertion,
    ConceptInclusion, ConceptName, Conditional, Conj, Disj, DomainRestrict,
    Exists, Forall, Ind, Inverse, Neg, Nominal, Not, Or, RangeRestrict,
    RemoveConcept, RemoveRole, RoleAssertion, RoleDiff, RoleInclusion,
    RoleName, RoleUnion, SingletonRole, Top, Var,
)

# concept precedence: or < and < prefix < atom
_C_OR, _C_AND, _C_PREFIX, _C_ATOM = 1, 2, 3, 4
# role precedence: +/- < restriction < atom
_R_SUM, _R_RESTRICT, _R_ATOM = 1, 2, 3
# formula precedence: v < & < ! < atom
_F_DISJ, _F_CONJ, _F_NEG, _F_ATOM = 1, 2, 3, 4


def term(t) -> str:
    if isinstance(t, Var):
        return "?" + t.name
    if isinstance(t, Ind):
        return t.name
    raise TypeError(f"not a term: {t!r}")


def _concept(c, ctx: int) -> str:
    if isinstance(c, ConceptName):
        return c.name
    if isinstance(c, Top):
        return "Top"
    if isinstance(c, Bottom):
        return "Bot"
    if isinstance(c, Nominal):
        return "{" + term(c.term) + "}"
    if isinstance(c, Or):
        s, prec = f"{_concept(c.left, _C_OR)} or {_concept(c.right, _C_AND)}", _C_OR
    elif isinstance(c, And):
        s, prec = f"{_concept(c.left, _C_AND)} and {_concept(c.right, _C_PREFIX)}", _C_AND
    elif isinstance(c, Not):
        s, prec = "not " + _concept(c.arg, _C_PREFIX), _C_PREFIX
    elif isinstance(c, Exists):
        s, prec = f"exists {_role(c.role, _R_SUM)} . {_concept(c.filler, _C_PREFIX)}", _C_PREFIX
    elif isinstance(c, Forall):
        s, prec = f"forall {_role(c.role, _R_SUM)} . {_concept(c.filler, _C_PREFIX)}", _C_PREFIX
    elif isinstance(c, AtLeast):
        s, prec = f"atleast {c.n} {_role(c.role, _R_SUM)} . {_concept(c.filler, _C_PREFIX)}", _C_PREFIX
    elif isinstance(c, AtMost):
        s, prec = f"atmost {c.n} {_role(c.role, _R_SUM)} . {_concept(c.filler, _C_PREFIX)}", _C_PREFIX
    else:
        raise TypeError(f"not a concept: {c!r}")
    return f"({s})" if prec < ctx else s


def _role(r, ctx: int) -> str:
    if isinstance(r, RoleName):
        return r.name
    if isinstance(r, Inverse):
        if isinstance(r.role, RoleName):
            return "inv " + r.role.name
        return f"@inv({_role(r.role, _R_SUM)})"
    if isinstance(r, SingletonRole):
        return "{(" + term(r.first) + "," + term(r.second) + ")}"
    if isinstance(r, DomainRestrict):
        return f"@dom({_concept(r.concept, _C_OR)}, {_role(r.role, _R_SUM)})"
    if isinstance(r, RoleUnion):
        s, prec = f"{_role(r.left, _R_SUM)} + {_role(r.right, _R_RESTRICT)}", _R_SUM
    elif isinstance(r, RoleDiff):
        s, prec = f"{_role(r.left, _R_SUM)} - {_role(r.right, _R_RESTRICT)}", _R_SUM
    elif isinstance(r, RangeRestrict):
        # the restricting concept is parsed at prefix level; parenthesize the rest
        s, prec = f"{_role(r.role, _R_RESTRICT)} | {_concept(r.concept, _C_ATOM)}", _R_RESTRICT
    else:
        raise TypeError(f"not a role: {r!r}")
    return f"({s})" if prec < ctx else s


def concept(c) -> str:
    return _concept(c, 0)


def role(r) -> str:
    return _role(r, 0)


def axiom(a) -> str:
    if isinstance(a, ConceptInclusion):
        return f"{concept(a.lhs)} <= {concept(a.rhs)}"
    if isinstance(a, RoleInclusion):
        return f"{role(a.lhs)} <= {role(a.rhs)}"
    if isinstance(a, ConceptAssertion):
        return f"{term(a.term)} : {concept(a.concept)}"
    if isinstance(a, RoleAssertion):
        return f"({term(a.first)},{term(a.second)}) : {role(a.role)}"
    raise TypeError(f"not an axiom: {a!r}")


def _formula(f, ctx: int) -> str:
    if isinstance(f, Disj):
        s, prec = f"{_formula(f.left, _F_DISJ)} v {_formula(f.right, _F_CONJ)}", _F_DISJ
    elif isinstance(f, Conj):
        s, prec = f"{_formula(f.left, _F_CONJ)} & {_formula(f.right, _F_NEG)}", _F_CONJ
    elif isinstance(f, Neg):
        s, prec = "! " + _formula(f.arg, _F_NEG), _F_NEG
    else:
        return axiom(f)
    return f"({s})" if prec < ctx else s


def formula(f) -> str:
    return _formula(f, 0)


def formula_lines(f) -> str:
    """Top-level conjuncts on separate lines, for KB files."""
    parts = []
    while isinstance(f, Conj):
        parts.append(f.right)
        f = f.left
    parts.append(f)
    return " &\n".join(_formula(p, _F_NEG) for p in reversed(parts)) + "\n"


def step(s, indent: str = "") -> str:
    if isinstance(s, AddConcept):
        return f"{indent}{s.name} += {concept(s.concept)}"
    if isinstance(s, RemoveConcept):
        return f"{indent}{s.name} -= {concept(s.concept)}"
    if isinstance(s, AddRole):
        return f"{indent}{s.name} += {role(s.role)}"
    if isinstance(s, RemoveRole):
        return f"{indent}{s.name} -= {role(s.role)}"
    if isinstance(s, Conditional):
        inner = indent + "  "
        out = f"{indent}if {formula(s.guard)} then {{\n{_steps(s.then, inner)}\n{indent}}}"
        if s.orelse:
            out += f" else {{\n{_steps(s.orelse, inner)}\n{indent}}}"
        return out
    raise TypeError(f"not a step: {s!r}")


def _steps(steps, indent: str) -> str:
    if not steps:
        return indent + "skip"
    return " ;\n".join(step(s, indent) for s in steps)


def action(a) -> str:
    return _steps(tuple(a), "") + "\n"


def action_inline(a) -> str:
    if not a:
        return "skip"
    return " ; ".join(" ".join(step(s).split()) for s in a)


def to_text(obj) -> str:
    """Dispatch on node kind; actions (tuples) print inline."""
    from .syntax import CONCEPT_TYPES, FORMULA_TYPES, ROLE_TYPES, STEP_TYPES
    if isinstance(obj, tuple):
        return action_inline(obj)
    if isinstance(obj, FORMULA_TYPES):
        return formula(obj)
    if isinstance(obj, CONCEPT_TYPES):
        return concept(obj)
    if isinstance(obj, ROLE_TYPES):
        return role(obj)
    if isinstance(obj, STEP_TYPES):
        return " ".join(step(obj).split())
    raise TypeError(f"cannot print {obj!r}")
