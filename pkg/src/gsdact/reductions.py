"""Generators that compile 3-colouring and exists-forall QBF instances into
verification and synthesis problems, plus brute-force oracles for both."""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field

from . import syntax as S
from .planning import PlanningInstance

ORACLE_3COL_LIMIT = 12
ORACLE_QBF_LIMIT = 16
COLOURS = (0, 1, 2)


class ReductionInputError(ValueError):
    pass


# -- graphs and 3-colouring ---------------------------------------------------------


@dataclass(frozen=True)
class Graph:
    """Undirected graph on vertices 1..n; edges stored as sorted pairs."""

    n: int
    edges: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if self.n < 1:
            raise ReductionInputError("a graph needs at least one vertex")
        norm = set()
        for u, v in self.edges:
            if u == v:
                raise ReductionInputError(f"self-loop on vertex {u}")
            if not (1 <= u <= self.n and 1 <= v <= self.n):
                raise ReductionInputError(f"edge ({u}, {v}) leaves the vertex range 1..{self.n}")
            norm.add((min(u, v), max(u, v)))
        object.__setattr__(self, "edges", frozenset(norm))

    @classmethod
    def complete(cls, n: int) -> "Graph":
        return cls(n, frozenset(itertools.combinations(range(1, n + 1), 2)))


def all_graphs(n: int):
    """Every labelled graph on n vertices."""
    pairs = list(itertools.combinations(range(1, n + 1), 2))
    for mask in range(2 ** len(pairs)):
        yield Graph(n, frozenset(p for i, p in enumerate(pairs) if mask >> i & 1))


def colour_concept(v: int, c: int) -> str:
    return f"A{v}c{c}"


def gen_3col(g: Graph):
    """KB and action such that the action fails to preserve the KB exactly
    when ``g`` is 3-colourable."""
    o = S.Nominal(S.Ind("o"))
    d = "D"
    kb = [S.ConceptInclusion(S.ConceptName(d), S.Not(S.ConceptName(d)))]
    for u, v in sorted(g.edges):
        for c in COLOURS:
            kb.append(S.ConceptInclusion(S.ConceptName(colour_concept(u, c)),
                                         S.Not(S.ConceptName(colour_concept(v, c)))))
    vertices = range(1, g.n + 1)
    steps = [S.AddConcept(d, o)]
    steps += [S.AddConcept(f"B{i}", o) for i in vertices]
    for i in vertices:
        steps += [S.RemoveConcept(f"B{i}", S.ConceptName(colour_concept(i, c))) for c in COLOURS]
    steps += [S.RemoveConcept(d, S.ConceptName(f"B{i}")) for i in vertices]
    return S.conj(*kb), tuple(steps)


def oracle_3col(g: Graph) -> bool:
    if g.n > ORACLE_3COL_LIMIT:
        raise ReductionInputError(f"oracle limited to {ORACLE_3COL_LIMIT} vertices")
    for col in itertools.product(COLOURS, repeat=g.n):
        if all(col[u - 1] != col[v - 1] for u, v in g.edges):
            return True
    return False


def parse_graph(text: str) -> Graph:
    """Edge-list format: ``vertices N`` then one ``u v`` pair per line; ``#`` comments."""
    n = None
    edges = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            if parts[0] == "vertices" and len(parts) == 2:
                n = int(parts[1])
            elif len(parts) == 2:
                edges.add((int(parts[0]), int(parts[1])))
            else:
                raise ValueError
        except ValueError:
            raise ReductionInputError(f"line {lineno}: expected 'vertices N' or 'u v'") from None
    if n is None:
        n = max((max(e) for e in edges), default=0)
    return Graph(n, frozenset(edges))


def print_graph(g: Graph) -> str:
    lines = [f"vertices {g.n}"] + [f"{u} {v}" for u, v in sorted(g.edges)]
    return "\n".join(lines) + "\n"


# -- QBF ---------------------------------------------------------------------------------


@dataclass(frozen=True)
class Lit:
    var: str
    positive: bool = True


@dataclass(frozen=True)
class QAnd:
    left: object
    right: object


@dataclass(frozen=True)
class QOr:
    left: object
    right: object


@dataclass(frozen=True)
class QBF2:
    """Exists ``exists`` forall ``forall``: ``matrix`` (negation on variables only)."""

    exists: tuple
    forall: tuple
    matrix: object

    def __post_init__(self):
        names = list(self.exists) + list(self.forall)
        if len(set(names)) != len(names):
            raise ReductionInputError("quantified variables must be distinct")
        unbound = matrix_vars(self.matrix) - set(names)
        if unbound:
            raise ReductionInputError(f"unquantified variables: {', '.join(sorted(unbound))}")


def matrix_vars(m) -> set:
    if isinstance(m, Lit):
        return {m.var}
    return matrix_vars(m.left) | matrix_vars(m.right)


def matrix_depth(m) -> int:
    if isinstance(m, Lit):
        return 0
    return 1 + max(matrix_depth(m.left), matrix_depth(m.right))


def eval_matrix(m, assignment: dict) -> bool:
    if isinstance(m, Lit):
        return assignment[m.var] == m.positive
    if isinstance(m, QAnd):
        return eval_matrix(m.left, assignment) and eval_matrix(m.right, assignment)
    return eval_matrix(m.left, assignment) or eval_matrix(m.right, assignment)


def oracle_qbf(phi: QBF2) -> bool:
    if len(phi.exists) + len(phi.forall) > ORACLE_QBF_LIMIT:
        raise ReductionInputError(f"oracle limited to {ORACLE_QBF_LIMIT} variables")
    for ps in itertools.product((False, True), repeat=len(phi.exists)):
        outer = dict(zip(phi.exists, ps))
        if all(eval_matrix(phi.matrix, {**outer, **dict(zip(phi.forall, qs))})
               for qs in itertools.product((False, True), repeat=len(phi.forall))):
            return True
    return False


def var_individual(v: str) -> str:
    return f"o_{v}"


def _matrix_kb(m):
    if isinstance(m, Lit):
        return S.ConceptAssertion(S.Ind(var_individual(m.var)), S.ConceptName("T" if m.positive else "F"))
    cls = S.Conj if isinstance(m, QAnd) else S.Disj
    return cls(_matrix_kb(m.left), _matrix_kb(m.right))


def gen_qbf(phi: QBF2) -> PlanningInstance:
    """Synthesis instance whose answer is positive exactly when ``phi`` is true.

    The precondition leaves the existential variables unset and forces each
    universal one to exactly one truth value; action ``2i`` sets ``p_i`` true
    and action ``2i+1`` sets it false, each guarded so the value cannot flip.
    """
    t, f = S.ConceptName("T"), S.ConceptName("F")
    pre = []
    for p in phi.exists:
        pre.append(S.ConceptAssertion(S.Ind(var_individual(p)), S.Not(S.Or(t, f))))
    for q in phi.forall:
        pre.append(S.ConceptAssertion(S.Ind(var_individual(q)),
                                      S.And(S.Or(t, f), S.Or(S.Not(t), S.Not(f)))))
    actions = []
    for p in phi.exists:
        o = S.Ind(var_individual(p))
        actions.append((S.Conditional(S.ConceptAssertion(o, S.Not(f)), (S.AddConcept("T", S.Nominal(o)),), ()),))
        actions.append((S.Conditional(S.ConceptAssertion(o, S.Not(t)), (S.AddConcept("F", S.Nominal(o)),), ()),))
    return PlanningInstance(tuple(actions), _matrix_kb(phi.matrix), len(phi.exists), S.conj(*pre))


_QBF_TOKEN = re.compile(r"\s*(?:([A-Za-z][A-Za-z0-9_]*)|(.))")


def _parse_matrix(text: str):
    toks = []
    for m in _QBF_TOKEN.finditer(text):
        if m.group(1):
            toks.append(("var", m.group(1)))
        elif m.group(2) and not m.group(2).isspace():
            if m.group(2) not in "~&|()":
                raise ReductionInputError(f"unexpected character {m.group(2)!r} in matrix")
            toks.append(("op", m.group(2)))
    pos = 0

    def peek():
        return toks[pos] if pos < len(toks) else ("end", None)

    def take(op):
        nonlocal pos
        if peek() != ("op", op):
            raise ReductionInputError(f"expected {op!r} in matrix, found {peek()[1]!r}")
        pos += 1

    def disj():
        left = conj()
        while peek() == ("op", "|"):
            take("|")
            left = QOr(left, conj())
        return left

    def conj():
        left = unary()
        while peek() == ("op", "&"):
            take("&")
            left = QAnd(left, unary())
        return left

    def unary():
        nonlocal pos
        kind, val = peek()
        if (kind, val) == ("op", "~"):
            take("~")
            return _negate(unary())
        if (kind, val) == ("op", "("):
            take("(")
            inner = disj()
            take(")")
            return inner
        if kind == "var":
            pos += 1
            return Lit(val)
        raise ReductionInputError(f"unexpected {val!r} in matrix")

    out = disj()
    if pos != len(toks):
        raise ReductionInputError(f"trailing input in matrix at {peek()[1]!r}")
    return out


def _negate(m):
    # push negation inward so the matrix stays in negation normal form
    if isinstance(m, Lit):
        return Lit(m.var, not m.positive)
    if isinstance(m, QAnd):
        return QOr(_negate(m.left), _negate(m.right))
    return QAnd(_negate(m.left), _negate(m.right))


def parse_qbf(text: str) -> QBF2:
    """Prefix-matrix format::

        e p1 p2
        a q1
        matrix (p1 | ~q1) & p2
    """
    exists, forall, matrix = [], [], None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        if head == "e":
            exists += rest.split()
        elif head == "a":
            forall += rest.split()
        elif head == "matrix":
            matrix = _parse_matrix(rest)
        else:
            raise ReductionInputError(f"line {lineno}: expected 'e', 'a' or 'matrix'")
    if matrix is None:
        raise ReductionInputError("missing 'matrix' line")
    return QBF2(tuple(exists), tuple(forall), matrix)


def matrix_text(m, ctx: int = 0) -> str:
    if isinstance(m, Lit):
        return m.var if m.positive else "~" + m.var
    prec, op = (2, "&") if isinstance(m, QAnd) else (1, "|")
    out = f"{matrix_text(m.left, prec)} {op} {matrix_text(m.right, prec + 1)}"
    return f"({out})" if prec < ctx else out


def print_qbf(phi: QBF2) -> str:
    lines = []
    if phi.exists:
        lines.append("e " + " ".join(phi.exists))
    if phi.forall:
        lines.append("a " + " ".join(phi.forall))
    lines.append("matrix " + matrix_text(phi.matrix))
    return "\n".join(lines) + "\n"
