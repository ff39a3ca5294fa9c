"""Syntactic checks for the lightweight fragment and for simple actions."""

from __future__ import annotations

from dataclasses import dataclass, field

from . import printer
from . import syntax as S


@dataclass
class FragmentReport:
    ok: bool
    diagnostics: list = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok


def is_basic_concept(c) -> bool:
    """``A``, ``exists p . Top`` or ``exists inv p . Top``."""
    if isinstance(c, S.ConceptName):
        return True
    return isinstance(c, S.Exists) and isinstance(c.filler, S.Top) and is_basic_role(c.role)


def is_basic_role(r) -> bool:
    return isinstance(r, S.RoleName) or (isinstance(r, S.Inverse) and isinstance(r.role, S.RoleName))


def bplus_violations(c) -> list:
    """Subconcepts of ``c`` that take it outside B+ (empty list if none)."""
    if isinstance(c, (S.ConceptName, S.Nominal, S.Top, S.Bottom)):
        return []
    if isinstance(c, S.Not):
        return bplus_violations(c.arg)
    if isinstance(c, (S.And, S.Or)):
        return bplus_violations(c.left) + bplus_violations(c.right)
    if isinstance(c, S.Exists) and isinstance(c.filler, S.Top):
        return role_violations(c.role)
    return [c]


def role_violations(r) -> list:
    """Concepts nested in a role expression that are outside B+."""
    out = []
    for n in S.walk(r):
        if isinstance(n, S.RangeRestrict):
            out += bplus_violations(n.concept)
        elif isinstance(n, S.DomainRestrict):
            out += bplus_violations(n.concept)
    return out


def _negative_role_inclusion(ax) -> bool:
    # r <= not s is written r <= r - s
    rhs = ax.rhs
    return (isinstance(rhs, S.RoleDiff) and rhs.left == ax.lhs and is_basic_role(rhs.right))


def _show(x) -> str:
    return printer.to_text(x)


def _axiom_diagnostics(ax) -> list:
    if isinstance(ax, S.ConceptInclusion):
        out = []
        if not is_basic_concept(ax.lhs):
            out.append(f"inclusion left side {_show(ax.lhs)} is not a basic concept")
        rhs = ax.rhs.arg if isinstance(ax.rhs, S.Not) else ax.rhs
        if not is_basic_concept(rhs):
            out.append(f"inclusion right side {_show(ax.rhs)} is not a basic concept or its negation")
        return out
    if isinstance(ax, S.RoleInclusion):
        out = []
        if not is_basic_role(ax.lhs):
            out.append(f"role inclusion left side {_show(ax.lhs)} is not p or inv p")
        if not (is_basic_role(ax.rhs) or _negative_role_inclusion(ax)):
            out.append(f"role inclusion right side {_show(ax.rhs)} is not p, inv p or a negated one")
        return out
    if isinstance(ax, S.ConceptAssertion):
        return [f"assertion concept {_show(v)} is outside B+ in {_show(ax)}"
                for v in bplus_violations(ax.concept)]
    if isinstance(ax, S.RoleAssertion):
        return [f"role assertion {_show(ax)} nests {_show(v)}, outside B+"
                for v in role_violations(ax.role)]
    raise TypeError(f"not an axiom: {ax!r}")


def is_dllite_formula(formula) -> FragmentReport:
    diags: list[str] = []

    def go(f):
        if isinstance(f, (S.Conj, S.Disj)):
            go(f.left)
            go(f.right)
        elif isinstance(f, S.Neg):
            if not isinstance(f.arg, S.ASSERTION_TYPES):
                diags.append(f"negation in front of a non-assertion: {_show(f)}")
            else:
                go(f.arg)
        else:
            diags.extend(_axiom_diagnostics(f))

    go(formula)
    if not S.is_ground(formula):
        diags.append("formula has free variables")
    return FragmentReport(not diags, diags)


def is_simple_action(action) -> FragmentReport:
    diags: list[str] = []
    for node in S.walk(tuple(action)):
        if isinstance(node, S.Conditional):
            for a in S.atoms(node.guard):
                if isinstance(a, S.INCLUSION_TYPES):
                    diags.append(f"guard contains inclusion {_show(a)}")
                elif isinstance(a, S.ConceptAssertion):
                    diags += [f"guard concept {_show(v)} is outside B+" for v in bplus_violations(a.concept)]
                else:
                    diags += [f"guard role nests {_show(v)}, outside B+" for v in role_violations(a.role)]
        elif isinstance(node, (S.AddConcept, S.RemoveConcept)):
            diags += [f"step concept {_show(v)} is outside B+ in {_show(node)}"
                      for v in bplus_violations(node.concept)]
        elif isinstance(node, (S.AddRole, S.RemoveRole)):
            diags += [f"step role nests {_show(v)}, outside B+ in {_show(node)}"
                      for v in role_violations(node.role)]
    return FragmentReport(not diags, diags)


def is_dllite_core(formula) -> bool:
    """Plain conjunction of fragment inclusions and basic assertions."""
    for c in S.conjuncts(formula):
        if isinstance(c, S.ConceptAssertion):
            if not isinstance(c.concept, S.ConceptName):
                return False
        elif isinstance(c, S.RoleAssertion):
            if not isinstance(c.role, S.RoleName):
                return False
        elif not isinstance(c, S.INCLUSION_TYPES) or _axiom_diagnostics(c):
            return False
    return True
