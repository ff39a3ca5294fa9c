"""Bounded finite-model search by reduction to propositional SAT.

For each domain size ``n = 1 .. max_domain`` the formula is grounded over
``n`` elements: one variable per concept-name membership, per role-name
pair, and per (individual, element) denotation.  Complex concepts, roles and
formula connectives get Tseitin definitions; ``atleast`` uses a sequential
counter.  Each size is handed to a CDCL solver.
"""

from __future__ import annotations

import os

from pysat.solvers import Solver

from .. import syntax as S
from ..errors import BudgetExceeded
from ..interpretation import Interpretation, Signature, models
from .verdicts import NoModelUpTo, Satisfiable

DEFAULT_MAX_DOMAIN = 4
DEFAULT_CLAUSE_BUDGET = 5_000_000


def clause_budget() -> int:
    return int(os.environ.get("GSDACT_CLAUSE_BUDGET", DEFAULT_CLAUSE_BUDGET))


class _Encoder:
    def __init__(self, n: int, individuals: list[str], una: bool):
        self.n = n
        self.clauses: list[list[int]] = []
        self.nvars = 1
        self.TRUE = 1
        self.clauses.append([1])
        self.cvar: dict = {}
        self.rvar: dict = {}
        self.memo: dict = {}
        self.individuals = individuals
        self.mvar = {}
        for i, o in enumerate(individuals):
            # symmetry breaking: the i-th individual denotes one of the first i+1 elements
            row = [self.new() if e <= i else -self.TRUE for e in range(n)]
            self.mvar[o] = row
            lits = [v for v in row if v != -self.TRUE]
            self.clauses.append(lits)
            for a in range(len(lits)):
                for b in range(a + 1, len(lits)):
                    self.clauses.append([-lits[a], -lits[b]])
        if una:
            for e in range(n):
                col = [self.mvar[o][e] for o in individuals if self.mvar[o][e] != -self.TRUE]
                for a in range(len(col)):
                    for b in range(a + 1, len(col)):
                        self.clauses.append([-col[a], -col[b]])

    def new(self) -> int:
        self.nvars += 1
        return self.nvars

    def check_budget(self):
        if len(self.clauses) > clause_budget():
            raise BudgetExceeded(f"SAT encoding exceeds {clause_budget()} clauses",
                                 clauses=len(self.clauses), domain=self.n)

    # -- gates with constant folding --

    def and_(self, lits) -> int:
        T = self.TRUE
        out = []
        for x in lits:
            if x == -T:
                return -T
            if x != T:
                out.append(x)
        if not out:
            return T
        if len(out) == 1:
            return out[0]
        v = self.new()
        for x in out:
            self.clauses.append([-v, x])
        self.clauses.append([v] + [-x for x in out])
        return v

    def or_(self, lits) -> int:
        return -self.and_([-x for x in lits])

    # -- names --

    def cname(self, name: str, e: int) -> int:
        key = (name, e)
        v = self.cvar.get(key)
        if v is None:
            v = self.cvar[key] = self.new()
        return v

    def rname(self, name: str, e: int, f: int) -> int:
        key = (name, e, f)
        v = self.rvar.get(key)
        if v is None:
            v = self.rvar[key] = self.new()
        return v

    def denotes(self, term, e: int) -> int:
        if isinstance(term, S.Var):
            raise ValueError(f"cannot encode variable ?{term.name}")
        return self.mvar[term.name][e]

    # -- concepts: one literal per element --

    def concept(self, c) -> list[int]:
        key = ("c", c)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        n, T = self.n, self.TRUE
        if isinstance(c, S.ConceptName):
            out = [self.cname(c.name, e) for e in range(n)]
        elif isinstance(c, S.Top):
            out = [T] * n
        elif isinstance(c, S.Bottom):
            out = [-T] * n
        elif isinstance(c, S.Nominal):
            out = [self.denotes(c.term, e) for e in range(n)]
        elif isinstance(c, S.Not):
            out = [-x for x in self.concept(c.arg)]
        elif isinstance(c, S.And):
            left, right = self.concept(c.left), self.concept(c.right)
            out = [self.and_([a, b]) for a, b in zip(left, right)]
        elif isinstance(c, S.Or):
            left, right = self.concept(c.left), self.concept(c.right)
            out = [self.or_([a, b]) for a, b in zip(left, right)]
        elif isinstance(c, (S.Exists, S.Forall, S.AtLeast, S.AtMost)):
            rel, fil = self.role(c.role), self.concept(c.filler)
            out = []
            for e in range(n):
                succ = [self.and_([rel[e][f], fil[f]]) for f in range(n)]
                if isinstance(c, S.Exists):
                    out.append(self.or_(succ))
                elif isinstance(c, S.Forall):
                    out.append(self.and_([self.or_([-rel[e][f], fil[f]]) for f in range(n)]))
                elif isinstance(c, S.AtLeast):
                    out.append(self.at_least(succ, c.n))
                else:
                    out.append(-self.at_least(succ, c.n + 1))
        else:
            raise TypeError(f"not a concept: {c!r}")
        self.memo[key] = out
        self.check_budget()
        return out

    def at_least(self, lits: list[int], k: int) -> int:
        """Literal for 'at least ``k`` of ``lits`` are true'."""
        T = self.TRUE
        if k <= 0:
            return T
        if k > len(lits):
            return -T
        # row[j] = at least j of the literals seen so far
        row = [T] + [-T] * k
        for x in lits:
            new = [T]
            for j in range(1, k + 1):
                new.append(self.or_([row[j], self.and_([x, row[j - 1]])]))
            row = new
        return row[k]

    # -- roles: n x n literal matrix --

    def role(self, r) -> list[list[int]]:
        key = ("r", r)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        n = self.n
        rng = range(n)
        if isinstance(r, S.RoleName):
            out = [[self.rname(r.name, e, f) for f in rng] for e in rng]
        elif isinstance(r, S.Inverse):
            m = self.role(r.role)
            out = [[m[f][e] for f in rng] for e in rng]
        elif isinstance(r, S.SingletonRole):
            a = [self.denotes(r.first, e) for e in rng]
            b = [self.denotes(r.second, e) for e in rng]
            out = [[self.and_([a[e], b[f]]) for f in rng] for e in rng]
        elif isinstance(r, (S.RoleUnion, S.RoleDiff)):
            x, y = self.role(r.left), self.role(r.right)
            if isinstance(r, S.RoleUnion):
                out = [[self.or_([x[e][f], y[e][f]]) for f in rng] for e in rng]
            else:
                out = [[self.and_([x[e][f], -y[e][f]]) for f in rng] for e in rng]
        elif isinstance(r, S.RangeRestrict):
            m, c = self.role(r.role), self.concept(r.concept)
            out = [[self.and_([m[e][f], c[f]]) for f in rng] for e in rng]
        elif isinstance(r, S.DomainRestrict):
            m, c = self.role(r.role), self.concept(r.concept)
            out = [[self.and_([m[e][f], c[e]]) for f in rng] for e in rng]
        else:
            raise TypeError(f"not a role: {r!r}")
        self.memo[key] = out
        self.check_budget()
        return out

    # -- formulae --

    def formula(self, f) -> int:
        key = ("f", f)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        rng = range(self.n)
        if isinstance(f, S.Conj):
            out = self.and_([self.formula(f.left), self.formula(f.right)])
        elif isinstance(f, S.Disj):
            out = self.or_([self.formula(f.left), self.formula(f.right)])
        elif isinstance(f, S.Neg):
            out = -self.formula(f.arg)
        elif isinstance(f, S.ConceptInclusion):
            c, d = self.concept(f.lhs), self.concept(f.rhs)
            out = self.and_([self.or_([-c[e], d[e]]) for e in rng])
        elif isinstance(f, S.RoleInclusion):
            r, s = self.role(f.lhs), self.role(f.rhs)
            out = self.and_([self.or_([-r[e][g], s[e][g]]) for e in rng for g in rng])
        elif isinstance(f, S.ConceptAssertion):
            c = self.concept(f.concept)
            out = self.or_([self.and_([self.denotes(f.term, e), c[e]]) for e in rng])
        elif isinstance(f, S.RoleAssertion):
            r = self.role(f.role)
            a = [self.denotes(f.first, e) for e in rng]
            b = [self.denotes(f.second, e) for e in rng]
            out = self.or_([self.and_([a[e], b[g], r[e][g]]) for e in rng for g in rng])
        else:
            raise TypeError(f"not a formula: {f!r}")
        self.memo[key] = out
        self.check_budget()
        return out


def _decode(enc: _Encoder, model: list[int], sig: Signature, una: bool) -> Interpretation:
    true = {v for v in model if v > 0}
    domain = tuple(f"d{e}" for e in range(enc.n))
    concepts = {a: {domain[e] for e in range(enc.n) if enc.cvar.get((a, e)) in true}
                for a in sorted(sig.concepts)}
    roles = {p: {(domain[e], domain[f]) for e in range(enc.n) for f in range(enc.n)
                 if enc.rvar.get((p, e, f)) in true}
             for p in sorted(sig.roles)}
    names = {}
    for o, row in enc.mvar.items():
        for e, v in enumerate(row):
            if v == enc.TRUE or (v > 0 and v in true):
                names[o] = domain[e]
                break
    return Interpretation(domain, concepts, roles, names, una)


def sat_bounded(kb, max_domain: int = DEFAULT_MAX_DOMAIN, una: bool = False,
                min_domain: int = 1, extra_individuals=()):
    """Search for a model of ``kb`` with at most ``max_domain`` elements.

    Returns ``Satisfiable(witness)`` for the smallest domain size that admits
    a model, else ``NoModelUpTo(max_domain)``.  The witness interprets exactly
    the names of ``kb`` (plus ``extra_individuals``).
    """
    if max_domain < 1:
        raise ValueError("max_domain must be at least 1")
    if not S.is_ground(kb):
        raise ValueError("satisfiability needs a ground formula")
    sig = Signature.of(kb)
    inds = sorted(sig.individuals | set(extra_individuals))
    lo = max(min_domain, 1, len(inds) if una else 1)
    for n in range(lo, max_domain + 1):
        enc = _Encoder(n, inds, una)
        root = enc.formula(kb)
        enc.clauses.append([root])
        with Solver(name="g3", bootstrap_with=enc.clauses) as solver:
            if solver.solve():
                witness = _decode(enc, solver.get_model(), sig, una)
                if not models(witness, kb):
                    raise AssertionError("internal error: decoded witness is not a model")
                return Satisfiable(witness)
    return NoModelUpTo(max_domain)
