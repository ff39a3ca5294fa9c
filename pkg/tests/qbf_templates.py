"""Fixed family of exists-forall formulas used by the QBF harness.

Matrix shapes of depth at most 3 are filled with literals in every way up
to renaming of variables, and every split of the variables into an
existential and a universal block is taken.
"""

import itertools

from gsdact.reductions import QBF2, Lit, QAnd, QOr

X = "leaf"

TEMPLATES = (
    X,
    (QAnd, X, X),
    (QOr, X, X),
    (QOr, (QAnd, X, X), X),
    (QAnd, (QOr, X, X), X),
    (QOr, (QAnd, X, X), (QAnd, X, X)),
    (QAnd, (QOr, X, X), (QOr, X, X)),
    (QOr, (QAnd, (QOr, X, X), X), X),
    (QAnd, (QOr, (QAnd, X, X), X), X),
)


def leaves(t) -> int:
    return 1 if t == X else leaves(t[1]) + leaves(t[2])


def fill(t, lits):
    if t == X:
        return next(lits)
    cls, left, right = t
    return cls(fill(left, lits), fill(right, lits))


def restricted_growth(n: int, blocks: int):
    """Variable patterns for ``n`` leaves over at most ``blocks`` variables."""
    def rec(prefix, top):
        if len(prefix) == n:
            yield tuple(prefix)
            return
        for v in range(min(top + 2, blocks)):
            yield from rec(prefix + [v], max(top, v))
    yield from rec([], -1)


def instances(max_vars: int = 3):
    for t in TEMPLATES:
        k = leaves(t)
        for pattern in restricted_growth(k, max_vars):
            names = [f"v{i}" for i in range(max(pattern) + 1)]
            for signs in itertools.product((True, False), repeat=k):
                matrix = fill(t, iter(Lit(names[v], s) for v, s in zip(pattern, signs)))
                for quant in itertools.product("ea", repeat=len(names)):
                    ex = tuple(n for n, q in zip(names, quant) if q == "e")
                    fa = tuple(n for n, q in zip(names, quant) if q == "a")
                    yield QBF2(ex, fa, matrix)
