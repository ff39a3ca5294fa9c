"""Recursive-descent parser for formulae and actions.

Lexical conventions: concept names start with an upper-case letter, role and
individual names with a lower-case letter, variables with ``?``.  Names with
the reserved ``_`` prefix are only accepted with ``internal=True`` (the tool
itself generates them), as are the ``@inv``/``@dom`` role markers.

Alternatives that share a prefix (``(`` may open a formula, a concept, a role
or a role assertion) are resolved by backtracking with memoization; a syntax
error reports the furthest position reached and the tokens expected there.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .syntax import (
    RESERVED_PREFIX, AddConcept, AddRole, And, AtLeast, AtMost, BOTTOM,
    ConceptAssertion, ConceptInclusion, ConceptName, Conditional, Conj, Disj,
    DomainRestrict, Exists, Forall, Ind, Inverse, Neg, Nominal, Not, Or,
    RangeRestrict, RemoveConcept, RemoveRole, RoleAssertion, RoleDiff,
    RoleInclusion, RoleName, RoleUnion, SingletonRole, TOP, Var,
)


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int, expected=()):
        self.line = line
        self.column = column
        self.expected = sorted(set(expected))
        detail = f" (expected one of: {', '.join(self.expected)})" if self.expected else ""
        super().__init__(f"{line}:{column}: {message}{detail}")


KEYWORDS = {
    "not", "and", "or", "exists", "forall", "atleast", "atmost", "inv",
    "Top", "Bot", "skip", "if", "then", "else", "v",
}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+|\#[^\n]*)
  | (?P<op><=|\+=|-=|@inv|@dom|[:,(){}.+\-|&!;])
  | (?P<int>[0-9]+)
  | (?P<var>\?[A-Za-z_][A-Za-z0-9_]*)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
    """,
    re.VERBOSE,
)


@dataclass(frozen=True, slots=True)
class Token:
    kind: str  # 'op', 'int', 'var', 'kw', 'cname', 'lname', 'eof'
    text: str
    line: int
    col: int


def tokenize(text: str, internal: bool = False) -> list[Token]:
    out: list[Token] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        tok = m.group()
        if kind != "ws":
            if kind == "ident":
                if tok in KEYWORDS:
                    kind = "kw"
                elif tok[0].isupper():
                    kind = "cname"
                else:
                    kind = "lname"
                if tok.startswith(RESERVED_PREFIX) and not internal:
                    raise ParseError(f"name {tok!r} uses the reserved prefix '{RESERVED_PREFIX}'", line, col)
            elif kind == "op" and tok.startswith("@") and not internal:
                raise ParseError(f"{tok} is an internal-only constructor", line, col)
            out.append(Token(kind, tok, line, col))
        nl = tok.count("\n")
        if nl:
            line += nl
            line_start = m.start() + tok.rfind("\n") + 1
        pos = m.end()
    out.append(Token("eof", "<end of input>", line, pos - line_start + 1))
    return out


class _Fail(Exception):
    pass


_FAIL = _Fail()


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.pos = 0
        self.far = 0
        self.far_expected: set[str] = set()
        self.memo: dict = {}

    # -- primitives ---------------------------------------------------------

    def peek(self, offset: int = 0) -> Token:
        return self.toks[min(self.pos + offset, len(self.toks) - 1)]

    def fail(self, *expected: str):
        if self.pos > self.far:
            self.far, self.far_expected = self.pos, set(expected)
        elif self.pos == self.far:
            self.far_expected.update(expected)
        raise _FAIL

    def at(self, text: str) -> bool:
        t = self.peek()
        return t.kind in ("op", "kw") and t.text == text

    def eat(self, text: str) -> bool:
        if self.at(text):
            self.pos += 1
            return True
        return False

    def expect(self, text: str) -> None:
        if not self.eat(text):
            self.fail(repr(text))

    def expect_kind(self, kind: str, label: str) -> Token:
        t = self.peek()
        if t.kind != kind:
            self.fail(label)
        self.pos += 1
        return t

    def attempt(self, fn):
        """Run ``fn``; on failure restore the position and return None."""
        start = self.pos
        try:
            return fn()
        except _Fail:
            self.pos = start
            return None

    def memoized(self, key: str, fn):
        k = (key, self.pos)
        hit = self.memo.get(k)
        if hit is not None:
            ok, val, end = hit
            if not ok:
                raise _FAIL
            self.pos = end
            return val
        start = self.pos
        try:
            val = fn()
        except _Fail:
            self.memo[k] = (False, None, start)
            self.pos = start
            raise
        self.memo[k] = (True, val, self.pos)
        return val

    # -- terms --------------------------------------------------------------

    def term(self):
        t = self.peek()
        if t.kind == "var":
            self.pos += 1
            return Var(t.text[1:])
        if t.kind == "lname":
            self.pos += 1
            return Ind(t.text)
        self.fail("individual", "variable")

    # -- concepts -----------------------------------------------------------

    def concept(self):
        return self.memoized("concept", self._concept_or)

    def _concept_or(self):
        left = self.concept_and()
        while self.eat("or"):
            left = Or(left, self.concept_and())
        return left

    def concept_and(self):
        left = self.concept_prefix()
        while self.eat("and"):
            left = And(left, self.concept_prefix())
        return left

    def concept_prefix(self):
        return self.memoized("cprefix", self._concept_prefix)

    def _concept_prefix(self):
        if self.eat("not"):
            return Not(self.concept_prefix())
        for kw, ctor in (("exists", Exists), ("forall", Forall)):
            if self.eat(kw):
                r = self.role()
                self.expect(".")
                return ctor(r, self.concept_prefix())
        for kw, ctor in (("atleast", AtLeast), ("atmost", AtMost)):
            if self.eat(kw):
                n = int(self.expect_kind("int", "number").text)
                r = self.role()
                self.expect(".")
                return ctor(n, r, self.concept_prefix())
        return self.concept_atom()

    def concept_atom(self):
        t = self.peek()
        if t.kind == "cname":
            self.pos += 1
            return ConceptName(t.text)
        if self.eat("Top"):
            return TOP
        if self.eat("Bot"):
            return BOTTOM
        if self.at("{"):
            self.pos += 1
            tm = self.term()
            self.expect("}")
            return Nominal(tm)
        if self.eat("("):
            c = self.concept()
            self.expect(")")
            return c
        self.fail("concept name", "'Top'", "'Bot'", "'{'", "'('", "'not'", "'exists'",
                  "'forall'", "'atleast'", "'atmost'")

    # -- roles --------------------------------------------------------------

    def role(self):
        return self.memoized("role", self._role_sum)

    def _role_sum(self):
        left = self.role_restrict()
        while True:
            if self.eat("+"):
                left = RoleUnion(left, self.role_restrict())
            elif self.eat("-"):
                left = RoleDiff(left, self.role_restrict())
            else:
                return left

    def role_restrict(self):
        r = self.role_atom()
        while self.eat("|"):
            r = RangeRestrict(r, self.concept_prefix())
        return r

    def role_atom(self):
        t = self.peek()
        if t.kind == "lname":
            self.pos += 1
            return RoleName(t.text)
        if self.eat("inv"):
            return Inverse(RoleName(self.expect_kind("lname", "role name").text))
        if self.at("{") and self.peek(1).kind == "op" and self.peek(1).text == "(":
            self.pos += 2
            a = self.term()
            self.expect(",")
            b = self.term()
            self.expect(")")
            self.expect("}")
            return SingletonRole(a, b)
        if self.eat("@inv"):
            self.expect("(")
            r = self.role()
            self.expect(")")
            return Inverse(r)
        if self.eat("@dom"):
            self.expect("(")
            c = self.concept()
            self.expect(",")
            r = self.role()
            self.expect(")")
            return DomainRestrict(c, r)
        if self.eat("("):
            r = self.role()
            self.expect(")")
            return r
        self.fail("role name", "'inv'", "'{('", "'('")

    # -- formulae -----------------------------------------------------------

    def formula(self):
        return self.memoized("formula", self._formula_disj)

    def _formula_disj(self):
        left = self.formula_conj()
        while self.eat("v"):
            left = Disj(left, self.formula_conj())
        return left

    def formula_conj(self):
        left = self.formula_unary()
        while self.eat("&"):
            left = Conj(left, self.formula_unary())
        return left

    def formula_unary(self):
        if self.eat("!"):
            return Neg(self.formula_unary())
        if self.at("("):
            def paren():
                self.pos += 1
                f = self.formula()
                self.expect(")")
                return f
            f = self.attempt(paren)
            if f is not None:
                return f
        return self.axiom()

    def axiom(self):
        return self.memoized("axiom", self._axiom)

    def _axiom(self):
        def role_assertion():
            self.expect("(")
            a = self.term()
            self.expect(",")
            b = self.term()
            self.expect(")")
            self.expect(":")
            return RoleAssertion(a, b, self.role())

        def concept_assertion():
            t = self.term()
            self.expect(":")
            return ConceptAssertion(t, self.concept())

        def role_inclusion():
            lhs = self.role()
            self.expect("<=")
            return RoleInclusion(lhs, self.role())

        def concept_inclusion():
            lhs = self.concept()
            self.expect("<=")
            return ConceptInclusion(lhs, self.concept())

        for alt in (role_assertion, concept_assertion, role_inclusion, concept_inclusion):
            res = self.attempt(alt)
            if res is not None:
                return res
        raise _FAIL

    # -- actions ------------------------------------------------------------

    def action(self):
        steps = list(self.statement())
        while self.eat(";"):
            if self.at("}") or self.peek().kind == "eof":
                break
            steps.extend(self.statement())
        return tuple(steps)

    def statement(self):
        if self.eat("skip"):
            return ()
        if self.eat("if"):
            guard = self.formula()
            self.expect("then")
            self.expect("{")
            then = self.action()
            self.expect("}")
            orelse = ()
            if self.eat("else"):
                self.expect("{")
                orelse = self.action()
                self.expect("}")
            return (Conditional(guard, then, orelse),)
        t = self.peek()
        if t.kind == "cname":
            self.pos += 1
            if self.eat("+="):
                return (AddConcept(t.text, self.concept()),)
            self.expect("-=")
            return (RemoveConcept(t.text, self.concept()),)
        if t.kind == "lname":
            self.pos += 1
            if self.eat("+="):
                return (AddRole(t.text, self.role()),)
            self.expect("-=")
            return (RemoveRole(t.text, self.role()),)
        self.fail("'skip'", "'if'", "concept name", "role name")


def _run(text: str, rule: str, internal: bool):
    toks = tokenize(text, internal=internal)
    p = _Parser(toks)
    if toks[0].kind == "eof":
        raise ParseError("empty input", toks[0].line, toks[0].col, [rule])
    try:
        result = getattr(p, rule)()
        if p.peek().kind != "eof":
            p.fail("end of input")
        return result
    except _Fail:
        tok = p.toks[min(p.far, len(p.toks) - 1)]
        raise ParseError(f"unexpected {tok.text!r}", tok.line, tok.col, p.far_expected) from None


def parse_formula(text: str, internal: bool = False):
    return _run(text, "formula", internal)


def parse_action(text: str, internal: bool = False):
    return _run(text, "action", internal)


def parse_concept(text: str, internal: bool = False):
    return _run(text, "concept", internal)


def parse_role(text: str, internal: bool = False):
    return _run(text, "role", internal)


def parse_bindings(items) -> dict:
    """Parse ``?x=o`` strings into a substitution."""
    sigma = {}
    for item in items:
        lhs, sep, rhs = item.partition("=")
        lhs, rhs = lhs.strip(), rhs.strip()
        if not sep or not lhs.startswith("?") or not rhs:
            raise ParseError(f"bad binding {item!r}, expected ?var=individual", 1, 1)
        sigma[Var(lhs[1:])] = Ind(rhs)
    return sigma
