"""Propositional abstraction: inclusions and assertions as plain atoms."""

from __future__ import annotations

from pysat.solvers import Solver

from .. import syntax as S


def propositionally_satisfiable(formula) -> bool:
    """False means ``formula`` is unsatisfiable for boolean reasons alone."""
    ids: dict = {}
    clauses: list = []
    counter = [0]

    def new():
        counter[0] += 1
        return counter[0]

    memo: dict[int, int] = {}
    keep = []

    def lit(f) -> int:
        key = id(f)
        if key in memo:
            return memo[key]
        if isinstance(f, S.Neg):
            out = -lit(f.arg)
        elif isinstance(f, (S.Conj, S.Disj)):
            a, b = lit(f.left), lit(f.right)
            out = new()
            if isinstance(f, S.Conj):
                clauses.extend([[-out, a], [-out, b], [out, -a, -b]])
            else:
                clauses.extend([[out, -a], [out, -b], [-out, a, b]])
        else:
            if f not in ids:
                ids[f] = new()
            out = ids[f]
        memo[key] = out
        keep.append(f)
        return out

    root = lit(formula)
    with Solver(name="g3", bootstrap_with=clauses + [[root]]) as solver:
        return solver.solve()
