"""Finite interpretations: evaluation, model checking, fingerprints, file I/O."""

from __future__ import annotations

import hashlib
import itertools
import math
import re
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping

from . import syntax as S
from .errors import EvaluationError


@dataclass(frozen=True)
class Signature:
    concepts: frozenset = frozenset()
    roles: frozenset = frozenset()
    individuals: frozenset = frozenset()
    max_count: int = 0

    @classmethod
    def of(cls, *objs) -> "Signature":
        cs, rs, inds, mx = set(), set(), set(), 0
        for o in objs:
            cs |= S.concept_names(o)
            rs |= S.role_names(o)
            inds |= S.individuals(o)
            mx = max(mx, S.max_counting_rank(o))
        return cls(frozenset(cs), frozenset(rs), frozenset(inds), mx)

    def __or__(self, other: "Signature") -> "Signature":
        return Signature(self.concepts | other.concepts, self.roles | other.roles,
                         self.individuals | other.individuals, max(self.max_count, other.max_count))


@dataclass(frozen=True, eq=False)
class Interpretation:
    """A finite interpretation.

    ``concepts``/``roles`` map names to extensions; names missing from the maps
    have empty extensions.  ``names`` maps individual names to elements.
    """

    domain: tuple
    concepts: Mapping[str, frozenset] = field(default_factory=dict)
    roles: Mapping[str, frozenset] = field(default_factory=dict)
    names: Mapping[str, str] = field(default_factory=dict)
    una: bool = False

    def __post_init__(self):
        dom = tuple(self.domain)
        if not dom:
            raise ValueError("interpretation domain must be non-empty")
        if len(set(dom)) != len(dom):
            raise ValueError("duplicate domain elements")
        dset = set(dom)
        concepts = {k: frozenset(v) for k, v in self.concepts.items()}
        roles = {k: frozenset((a, b) for a, b in v) for k, v in self.roles.items()}
        for k, ext in concepts.items():
            if not ext <= dset:
                raise ValueError(f"extension of {k} leaves the domain: {sorted(ext - dset)}")
        for k, ext in roles.items():
            bad = [p for p in ext if p[0] not in dset or p[1] not in dset]
            if bad:
                raise ValueError(f"extension of {k} leaves the domain: {sorted(bad)}")
        names = dict(self.names)
        for n, e in names.items():
            if e not in dset:
                raise ValueError(f"individual {n} denotes unknown element {e}")
        if self.una and len(set(names.values())) != len(names):
            raise ValueError("unique name assumption violated by the name map")
        object.__setattr__(self, "domain", dom)
        object.__setattr__(self, "concepts", MappingProxyType(concepts))
        object.__setattr__(self, "roles", MappingProxyType(roles))
        object.__setattr__(self, "names", MappingProxyType(names))

    def __eq__(self, other):
        if not isinstance(other, Interpretation):
            return NotImplemented
        return (self.domain == other.domain and self.una == other.una
                and dict(self.names) == dict(other.names)
                and _nonempty(self.concepts) == _nonempty(other.concepts)
                and _nonempty(self.roles) == _nonempty(other.roles))

    __hash__ = None

    def concept(self, name: str) -> frozenset:
        return self.concepts.get(name, frozenset())

    def role(self, name: str) -> frozenset:
        return self.roles.get(name, frozenset())

    def element(self, individual: str) -> str:
        try:
            return self.names[individual]
        except KeyError:
            raise EvaluationError(f"individual {individual!r} is not interpreted") from None

    def replace(self, **changes) -> "Interpretation":
        kw = dict(domain=self.domain, concepts=self.concepts, roles=self.roles,
                  names=self.names, una=self.una)
        kw.update(changes)
        return Interpretation(**kw)

    def __repr__(self) -> str:
        return f"Interpretation(|domain|={len(self.domain)}, names={dict(self.names)})"


def _nonempty(m):
    return {k: v for k, v in m.items() if v}


# -- evaluation --------------------------------------------------------------


class _Eval:
    def __init__(self, interp: Interpretation):
        self.i = interp
        self.dom = frozenset(interp.domain)
        self.memo: dict[int, object] = {}
        self._keep: list = []

    def term(self, t) -> str:
        if isinstance(t, S.Var):
            raise EvaluationError(f"cannot evaluate variable ?{t.name}; ground the input first")
        return self.i.element(t.name)

    def concept(self, c) -> frozenset:
        key = id(c)
        hit = self.memo.get(key)
        if hit is None:
            hit = self._concept(c)
            self.memo[key] = hit
            self._keep.append(c)
        return hit

    def _concept(self, c) -> frozenset:
        if isinstance(c, S.ConceptName):
            return self.i.concept(c.name)
        if isinstance(c, S.Top):
            return self.dom
        if isinstance(c, S.Bottom):
            return frozenset()
        if isinstance(c, S.Nominal):
            return frozenset((self.term(c.term),))
        if isinstance(c, S.Not):
            return self.dom - self.concept(c.arg)
        if isinstance(c, S.And):
            return self.concept(c.left) & self.concept(c.right)
        if isinstance(c, S.Or):
            return self.concept(c.left) | self.concept(c.right)
        if isinstance(c, (S.Exists, S.Forall, S.AtLeast, S.AtMost)):
            rel = self.role(c.role)
            filler = self.concept(c.filler)
            counts = dict.fromkeys(self.i.domain, 0)
            succ = dict.fromkeys(self.i.domain, 0)
            for a, b in rel:
                succ[a] += 1
                if b in filler:
                    counts[a] += 1
            if isinstance(c, S.Exists):
                return frozenset(e for e, n in counts.items() if n >= 1)
            if isinstance(c, S.Forall):
                return frozenset(e for e in self.i.domain if counts[e] == succ[e])
            if isinstance(c, S.AtLeast):
                return frozenset(e for e, n in counts.items() if n >= c.n)
            return frozenset(e for e, n in counts.items() if n <= c.n)
        raise TypeError(f"not a concept: {c!r}")

    def role(self, r) -> frozenset:
        key = id(r)
        hit = self.memo.get(key)
        if hit is None:
            hit = self._role(r)
            self.memo[key] = hit
            self._keep.append(r)
        return hit

    def _role(self, r) -> frozenset:
        if isinstance(r, S.RoleName):
            return self.i.role(r.name)
        if isinstance(r, S.Inverse):
            return frozenset((b, a) for a, b in self.role(r.role))
        if isinstance(r, S.SingletonRole):
            return frozenset(((self.term(r.first), self.term(r.second)),))
        if isinstance(r, S.RoleUnion):
            return self.role(r.left) | self.role(r.right)
        if isinstance(r, S.RoleDiff):
            return self.role(r.left) - self.role(r.right)
        if isinstance(r, S.RangeRestrict):
            c = self.concept(r.concept)
            return frozenset(p for p in self.role(r.role) if p[1] in c)
        if isinstance(r, S.DomainRestrict):
            c = self.concept(r.concept)
            return frozenset(p for p in self.role(r.role) if p[0] in c)
        raise TypeError(f"not a role: {r!r}")

    def holds(self, f) -> bool:
        if isinstance(f, S.Conj):
            return self.holds(f.left) and self.holds(f.right)
        if isinstance(f, S.Disj):
            return self.holds(f.left) or self.holds(f.right)
        if isinstance(f, S.Neg):
            return not self.holds(f.arg)
        if isinstance(f, S.ConceptInclusion):
            return self.concept(f.lhs) <= self.concept(f.rhs)
        if isinstance(f, S.RoleInclusion):
            return self.role(f.lhs) <= self.role(f.rhs)
        if isinstance(f, S.ConceptAssertion):
            return self.term(f.term) in self.concept(f.concept)
        if isinstance(f, S.RoleAssertion):
            return (self.term(f.first), self.term(f.second)) in self.role(f.role)
        raise TypeError(f"not a formula: {f!r}")


def eval_concept(interp: Interpretation, concept) -> frozenset:
    return _Eval(interp).concept(concept)


def eval_role(interp: Interpretation, role) -> frozenset:
    return _Eval(interp).role(role)


def models(interp: Interpretation, formula) -> bool:
    """``interp |= formula`` for a ground formula."""
    return _Eval(interp).holds(formula)


def evaluator(interp: Interpretation) -> _Eval:
    """A memoizing evaluator bound to one interpretation (for repeated queries)."""
    return _Eval(interp)


# -- domain expansion --------------------------------------------------------


def expand_domain(interp: Interpretation, k: int, stem: str = "n") -> Interpretation:
    """Add ``k`` fresh elements, each denoted by a fresh reserved-prefix name."""
    if k < 0:
        raise ValueError("k must be non-negative")
    if k == 0:
        return interp
    taken = set(interp.domain) | set(interp.names)
    new = S.fresh_names(k, taken, stem=stem)
    names = dict(interp.names)
    names.update({n: n for n in new})
    return interp.replace(domain=interp.domain + tuple(new), names=names)


# -- canonical fingerprints ---------------------------------------------------

PERMUTATION_LIMIT = 5040


def canonical_fingerprint(interp: Interpretation) -> str:
    """Digest invariant under renaming of anonymous (unnamed) elements."""
    label: dict[str, tuple] = {}
    for n, e in interp.names.items():
        label.setdefault(e, []).append(n)
    label = {e: tuple(sorted(ns)) for e, ns in label.items()}
    anon = [e for e in interp.domain if e not in label]
    concepts = {k: v for k, v in interp.concepts.items() if v}
    roles = {k: v for k, v in interp.roles.items() if v}

    order = _anonymous_order(interp.domain, anon, label, concepts, roles)
    text = _encode(order, label, concepts, roles, interp.una, len(interp.domain))
    return hashlib.sha256(text.encode()).hexdigest()


def _encode(order: dict, label, concepts, roles, una, size) -> str:
    def ident(e):
        return "n:" + ",".join(label[e]) if e in label else f"a:{order[e]}"

    parts = [f"size={size}", f"una={int(una)}"]
    parts += [f"name {','.join(ns)}" for ns in sorted(label.values())]
    for k in sorted(concepts):
        parts.append(f"C {k} " + " ".join(sorted(ident(e) for e in concepts[k])))
    for k in sorted(roles):
        parts.append(f"R {k} " + " ".join(sorted(f"{ident(a)}>{ident(b)}" for a, b in roles[k])))
    return "\n".join(parts)


def _anonymous_order(domain, anon, label, concepts, roles) -> dict:
    if not anon:
        return {}
    # colour refinement over anonymous elements; named elements are fixed colours
    colour = {e: ("n", label[e]) for e in label}
    for e in anon:
        colour[e] = ("a", tuple(sorted(k for k, v in concepts.items() if e in v)))
    for _ in range(len(anon)):
        new = {}
        for e in anon:
            sig = []
            for k, ext in roles.items():
                for a, b in ext:
                    if a == e:
                        sig.append((k, ">", colour[b] if b != e else "self"))
                    if b == e and a != e:
                        sig.append((k, "<", colour[a]))
            new[e] = ("a", colour[e], tuple(sorted(sig, key=repr)))
        stable = len({new[e] for e in anon}) == len({colour[e] for e in anon})
        colour.update(new)
        if stable:
            break
    keyed = sorted(anon, key=lambda e: repr(colour[e]))
    groups = [list(g) for _, g in itertools.groupby(keyed, key=lambda e: repr(colour[e]))]
    n_perms = math.prod(math.factorial(len(g)) for g in groups)
    if n_perms > PERMUTATION_LIMIT:
        # too symmetric to canonize exhaustively; fall back to a sound
        # domain-order numbering (never merges non-isomorphic states)
        pos = {e: i for i, e in enumerate(domain)}
        return {e: pos[e] for e in anon}
    best, best_text = None, None
    for combo in itertools.product(*(itertools.permutations(g) for g in groups)):
        flat = [e for g in combo for e in g]
        order = {e: i for i, e in enumerate(flat)}
        text = _encode(order, label, concepts, roles, False, 0)
        if best_text is None or text < best_text:
            best, best_text = order, text
    return best


# -- file format ---------------------------------------------------------------

_ELEM = r"[A-Za-z0-9_]+"
_LINE_DOMAIN = re.compile(rf"^domain((?:\s+{_ELEM})+)\s*$")
_LINE_NAME = re.compile(rf"^name\s+({_ELEM})\s*=\s*({_ELEM})\s*$")
_LINE_CONCEPT = re.compile(rf"^concept\s+({_ELEM})\s*=\s*\{{(.*)\}}\s*$")
_LINE_ROLE = re.compile(rf"^role\s+({_ELEM})\s*=\s*\{{(.*)\}}\s*$")
_LINE_UNA = re.compile(r"^una\s+(on|off)\s*$")
_PAIR = re.compile(rf"\(\s*({_ELEM})\s*,\s*({_ELEM})\s*\)")


class InterpretationSyntaxError(ValueError):
    def __init__(self, message: str, line: int):
        self.line = line
        super().__init__(f"line {line}: {message}")


def parse_interpretation(text: str) -> Interpretation:
    domain = None
    names, concepts, roles = {}, {}, {}
    una = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if m := _LINE_DOMAIN.match(line):
            if domain is not None:
                raise InterpretationSyntaxError("domain declared twice", lineno)
            domain = tuple(m.group(1).split())
        elif m := _LINE_NAME.match(line):
            names[m.group(1)] = m.group(2)
        elif m := _LINE_CONCEPT.match(line):
            body = m.group(2).strip()
            elems = [x.strip() for x in body.split(",")] if body else []
            if any(not re.fullmatch(_ELEM, x) for x in elems):
                raise InterpretationSyntaxError(f"bad element list {{{body}}}", lineno)
            concepts[m.group(1)] = set(concepts.get(m.group(1), ())) | set(elems)
        elif m := _LINE_ROLE.match(line):
            body = m.group(2).strip()
            pairs = _PAIR.findall(body)
            if _PAIR.sub("", body).replace(",", "").strip():
                raise InterpretationSyntaxError(f"bad pair list {{{body}}}", lineno)
            roles[m.group(1)] = set(roles.get(m.group(1), ())) | set(pairs)
        elif m := _LINE_UNA.match(line):
            una = m.group(1) == "on"
        else:
            raise InterpretationSyntaxError(
                f"cannot parse {line!r}; expected domain/name/concept/role/una", lineno)
    if domain is None:
        raise InterpretationSyntaxError("missing 'domain' line", 1)
    try:
        return Interpretation(domain, concepts, roles, names, una)
    except ValueError as exc:
        raise InterpretationSyntaxError(str(exc), 0) from None


def print_interpretation(interp: Interpretation) -> str:
    pos = {e: i for i, e in enumerate(interp.domain)}
    lines = ["domain " + " ".join(interp.domain), f"una {'on' if interp.una else 'off'}"]
    lines += [f"name {n} = {e}" for n, e in sorted(interp.names.items())]
    for k in sorted(interp.concepts):
        elems = sorted(interp.concepts[k], key=pos.__getitem__)
        lines.append(f"concept {k} = {{{', '.join(elems)}}}")
    for k in sorted(interp.roles):
        pairs = sorted(interp.roles[k], key=lambda p: (pos[p[0]], pos[p[1]]))
        lines.append(f"role {k} = {{{', '.join(f'({a},{b})' for a, b in pairs)}}}")
    return "\n".join(lines) + "\n"


def restrict_to(interp: Interpretation, concepts: Iterable[str], roles: Iterable[str]) -> Interpretation:
    cs, rs = set(concepts), set(roles)
    return interp.replace(concepts={k: v for k, v in interp.concepts.items() if k in cs},
                          roles={k: v for k, v in interp.roles.items() if k in rs})
