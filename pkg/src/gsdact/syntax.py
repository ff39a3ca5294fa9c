"""Abstract syntax for concepts, roles, formulae and actions.

All nodes are frozen dataclasses, so they hash, compare structurally and can
be shared freely between threads.  Formula-level connectives are ``Conj``,
``Disj`` and ``Neg``; the concept-level ones are ``And``, ``Or`` and ``Not``.
An action is a plain tuple of steps, the empty tuple being the empty action.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from typing import Iterable, Iterator, Union

RESERVED_PREFIX = "_"


def _cached_hash(self) -> int:
    # structural hashing of deep trees is the hot spot in the reasoners,
    # so each node computes its hash once
    h = self.__dict__.get("_hash")
    if h is None:
        h = hash((type(self).__name__,) + tuple(getattr(self, f) for f in self.__dataclass_fields__))
        object.__setattr__(self, "_hash", h)
    return h


def node(cls):
    """Frozen dataclass with a cached structural hash."""
    cls.__hash__ = _cached_hash
    return dataclass(frozen=True)(cls)


# -- terms -------------------------------------------------------------------


@node
class Ind:
    name: str

    def __str__(self) -> str:
        return self.name


@node
class Var:
    name: str

    def __str__(self) -> str:
        return "?" + self.name


Term = Union[Ind, Var]


# -- concepts ----------------------------------------------------------------


@node
class ConceptName:
    name: str


@node
class Nominal:
    term: Term


@node
class Top:
    pass


@node
class Bottom:
    pass


@node
class Not:
    arg: "Concept"


@node
class And:
    left: "Concept"
    right: "Concept"


@node
class Or:
    left: "Concept"
    right: "Concept"


@node
class Exists:
    role: "Role"
    filler: "Concept"


@node
class Forall:
    role: "Role"
    filler: "Concept"


@node
class AtLeast:
    n: int
    role: "Role"
    filler: "Concept"


@node
class AtMost:
    n: int
    role: "Role"
    filler: "Concept"


Concept = Union[ConceptName, Nominal, Top, Bottom, Not, And, Or, Exists, Forall, AtLeast, AtMost]

TOP = Top()
BOTTOM = Bottom()


# -- roles -------------------------------------------------------------------


@node
class RoleName:
    name: str


@node
class Inverse:
    role: "Role"


@node
class SingletonRole:
    first: Term
    second: Term


@node
class RoleUnion:
    left: "Role"
    right: "Role"


@node
class RoleDiff:
    left: "Role"
    right: "Role"


@node
class RangeRestrict:
    role: "Role"
    concept: Concept


@node
class DomainRestrict:
    """Pairs of ``role`` whose first component is in ``concept``.

    Not part of the surface grammar; produced when inverting a range
    restriction.
    """

    concept: Concept
    role: "Role"


Role = Union[RoleName, Inverse, SingletonRole, RoleUnion, RoleDiff, RangeRestrict, DomainRestrict]


# -- axioms and formulae -----------------------------------------------------


@node
class ConceptInclusion:
    lhs: Concept
    rhs: Concept


@node
class RoleInclusion:
    lhs: Role
    rhs: Role


@node
class ConceptAssertion:
    term: Term
    concept: Concept


@node
class RoleAssertion:
    first: Term
    second: Term
    role: Role


@node
class Conj:
    left: "Formula"
    right: "Formula"


@node
class Disj:
    left: "Formula"
    right: "Formula"


@node
class Neg:
    arg: "Formula"


Axiom = Union[ConceptInclusion, RoleInclusion, ConceptAssertion, RoleAssertion]
Formula = Union[ConceptInclusion, RoleInclusion, ConceptAssertion, RoleAssertion, Conj, Disj, Neg]
AXIOM_TYPES = (ConceptInclusion, RoleInclusion, ConceptAssertion, RoleAssertion)
INCLUSION_TYPES = (ConceptInclusion, RoleInclusion)
ASSERTION_TYPES = (ConceptAssertion, RoleAssertion)


# -- actions -----------------------------------------------------------------


@node
class AddConcept:
    name: str
    concept: Concept


@node
class RemoveConcept:
    name: str
    concept: Concept


@node
class AddRole:
    name: str
    role: Role


@node
class RemoveRole:
    name: str
    role: Role


@node
class Conditional:
    guard: Formula
    then: tuple
    orelse: tuple = ()


Step = Union[AddConcept, RemoveConcept, AddRole, RemoveRole, Conditional]
Action = tuple  # tuple[Step, ...]
BASIC_STEP_TYPES = (AddConcept, RemoveConcept, AddRole, RemoveRole)
EMPTY_ACTION: Action = ()

Node = Union[Concept, Role, Formula, Step]


# -- builders ----------------------------------------------------------------


def conj(*parts: Formula) -> Formula:
    """Left-nested conjunction of one or more formulae."""
    if not parts:
        raise ValueError("empty conjunction")
    out = parts[0]
    for p in parts[1:]:
        out = Conj(out, p)
    return out


def disj(*parts: Formula) -> Formula:
    if not parts:
        raise ValueError("empty disjunction")
    out = parts[0]
    for p in parts[1:]:
        out = Disj(out, p)
    return out


def and_(*parts: Concept) -> Concept:
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def or_(*parts: Concept) -> Concept:
    out = parts[0]
    for p in parts[1:]:
        out = Or(out, p)
    return out


def ind(name: str) -> Ind:
    return Ind(name)


def inverse(role: Role) -> Role:
    """Converse of ``role``, with ``Inverse`` pushed down to role names."""
    if isinstance(role, RoleName):
        return Inverse(role)
    if isinstance(role, Inverse):
        return role.role
    if isinstance(role, SingletonRole):
        return SingletonRole(role.second, role.first)
    if isinstance(role, RoleUnion):
        return RoleUnion(inverse(role.left), inverse(role.right))
    if isinstance(role, RoleDiff):
        return RoleDiff(inverse(role.left), inverse(role.right))
    if isinstance(role, RangeRestrict):
        return DomainRestrict(role.concept, inverse(role.role))
    if isinstance(role, DomainRestrict):
        return RangeRestrict(inverse(role.role), role.concept)
    raise TypeError(f"not a role: {role!r}")


def normalize_role(role: Role) -> Role:
    """Push every ``Inverse`` to a role name."""
    if isinstance(role, Inverse):
        return inverse(normalize_role(role.role))
    return _map_children(role, _normalize_any)


def _normalize_any(node):
    if isinstance(node, ROLE_TYPES):
        return normalize_role(node)
    return _map_children(node, _normalize_any)


# -- generic traversal -------------------------------------------------------

CONCEPT_TYPES = (ConceptName, Nominal, Top, Bottom, Not, And, Or, Exists, Forall, AtLeast, AtMost)
ROLE_TYPES = (RoleName, Inverse, SingletonRole, RoleUnion, RoleDiff, RangeRestrict, DomainRestrict)
FORMULA_TYPES = AXIOM_TYPES + (Conj, Disj, Neg)
STEP_TYPES = BASIC_STEP_TYPES + (Conditional,)
_NODE_TYPES = CONCEPT_TYPES + ROLE_TYPES + FORMULA_TYPES + STEP_TYPES + (Ind, Var)


def _map_children(node, fn):
    """Rebuild ``node`` with ``fn`` applied to each child node (or action)."""
    changed = False
    values = []
    for f in fields(node):
        v = getattr(node, f.name)
        if isinstance(v, _NODE_TYPES):
            nv = fn(v)
        elif isinstance(v, tuple):
            nv = tuple(fn(s) for s in v)
        else:
            nv = v
        changed |= nv is not v
        values.append(nv)
    return type(node)(*values) if changed else node


def children(node) -> Iterator:
    for f in fields(node):
        v = getattr(node, f.name)
        if isinstance(v, _NODE_TYPES):
            yield v
        elif isinstance(v, tuple):
            yield from v


def walk(obj) -> Iterator:
    """Pre-order traversal of a node, or of every step of an action."""
    stack = list(reversed(obj)) if isinstance(obj, tuple) else [obj]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(list(children(node))))


def free_variables(obj) -> list[Var]:
    """Variables of ``obj`` in order of first occurrence."""
    seen: dict[Var, None] = {}
    for n in walk(obj):
        if isinstance(n, Var):
            seen.setdefault(n)
    return list(seen)


def is_ground(obj) -> bool:
    return not any(isinstance(n, Var) for n in walk(obj))


def individuals(obj) -> set[str]:
    return {n.name for n in walk(obj) if isinstance(n, Ind)}


def concept_names(obj) -> set[str]:
    out = set()
    for n in walk(obj):
        if isinstance(n, ConceptName):
            out.add(n.name)
        elif isinstance(n, (AddConcept, RemoveConcept)):
            out.add(n.name)
    return out


def role_names(obj) -> set[str]:
    out = set()
    for n in walk(obj):
        if isinstance(n, RoleName):
            out.add(n.name)
        elif isinstance(n, (AddRole, RemoveRole)):
            out.add(n.name)
    return out


def all_names(obj) -> set[str]:
    return individuals(obj) | concept_names(obj) | role_names(obj)


def max_counting_rank(obj) -> int:
    return max((n.n for n in walk(obj) if isinstance(n, (AtLeast, AtMost))), default=0)


def node_count(obj) -> int:
    """Size of ``obj`` as a tree (shared subterms counted once per use)."""
    memo: dict[int, int] = {}

    def size(n) -> int:
        key = id(n)
        if key in memo:
            return memo[key]
        s = 1 + sum(size(c) for c in children(n))
        memo[key] = s
        return s

    if isinstance(obj, tuple):
        return sum(size(s) for s in obj)
    return size(obj)


def atoms(formula: Formula) -> list[Axiom]:
    """Distinct inclusions/assertions of a formula, in order of occurrence."""
    seen: dict = {}
    stack = [formula]
    while stack:
        f = stack.pop()
        if isinstance(f, (Conj, Disj)):
            stack.append(f.right)
            stack.append(f.left)
        elif isinstance(f, Neg):
            stack.append(f.arg)
        else:
            seen.setdefault(f)
    return list(seen)


def conjuncts(formula: Formula) -> list[Formula]:
    out = []
    stack = [formula]
    while stack:
        f = stack.pop()
        if isinstance(f, Conj):
            stack.append(f.right)
            stack.append(f.left)
        else:
            out.append(f)
    return out


def count_conditionals(action: Action) -> int:
    return sum(1 for n in walk(action) if isinstance(n, Conditional))


# -- substitutions and grounding ---------------------------------------------


def apply_substitution(obj, sigma: dict):
    """Replace each variable in the domain of ``sigma`` by its image.

    ``sigma`` maps ``Var`` (or bare variable names) to ``Ind`` (or bare
    individual names).  Variables outside its domain are left untouched.
    Works on formulae, concepts, roles, steps and actions.
    """
    table = {}
    for k, v in sigma.items():
        table[k if isinstance(k, Var) else Var(k)] = v if isinstance(v, (Ind, Var)) else Ind(v)
    if not table:
        return obj
    memo: dict[int, object] = {}

    def go(node):
        if isinstance(node, Var):
            return table.get(node, node)
        if isinstance(node, Ind):
            return node
        key = id(node)
        hit = memo.get(key)
        if hit is None:
            hit = _map_children(node, go)
            memo[key] = hit
        return hit

    if isinstance(obj, tuple):
        return tuple(go(s) for s in obj)
    return go(obj)


def fresh_names(count: int, avoid: Iterable[str], stem: str = "f") -> list[str]:
    """``count`` reserved-prefix names (``_f0``, ``_f1``, ...) not in ``avoid``."""
    taken = set(avoid)
    out, i = [], 0
    while len(out) < count:
        cand = f"{RESERVED_PREFIX}{stem}{i}"
        if cand not in taken:
            out.append(cand)
            taken.add(cand)
        i += 1
    return out


def canonical_grounding(action: Action, avoid: Iterable[str] = ()) -> tuple[Action, dict[Var, Ind]]:
    """Replace each variable of ``action`` by a distinct fresh individual."""
    variables = free_variables(action)
    names = fresh_names(len(variables), set(avoid) | all_names(action))
    sigma = {v: Ind(n) for v, n in zip(variables, names)}
    return apply_substitution(action, sigma), sigma
