"""Complete finite-satisfiability procedure for the lightweight fragment.

Pipeline: pick a propositional selection of the KB's atoms, turn negated
inclusions into assertions on fresh individuals, complete the assertion set
until only basic assertions remain, then decide the remaining plain
inclusion-plus-basic-assertion problem by saturation.  A model is assembled
from the saturated types and checked before it is returned.  The unique name
assumption is in force throughout.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator

from .. import syntax as S
from ..errors import FragmentViolation, GsdError
from ..fragments import is_basic_role, is_dllite_formula
from ..interpretation import Interpretation, models
from ..regression import nnf
from .verdicts import Satisfiable, Unsatisfiable


class IncompleteWitness(GsdError):
    """A consistent completion was found but no model could be assembled."""


# -- propositional selections --------------------------------------------------


def _eval3(f, assign: dict):
    if isinstance(f, S.Conj):
        a = _eval3(f.left, assign)
        if a is False:
            return False
        b = _eval3(f.right, assign)
        if b is False:
            return False
        return True if (a and b) else None
    if isinstance(f, S.Disj):
        a = _eval3(f.left, assign)
        if a is True:
            return True
        b = _eval3(f.right, assign)
        if b is True:
            return True
        return False if (a is False and b is False) else None
    if isinstance(f, S.Neg):
        a = _eval3(f.arg, assign)
        return None if a is None else not a
    return assign.get(f)


def _implicants(f) -> Iterator[dict]:
    """Conjunctions of literals whose disjunction is equivalent to ``f``
    (negation in front of atoms only), generated lazily left to right."""
    if isinstance(f, S.Disj):
        yield from _implicants(f.left)
        yield from _implicants(f.right)
    elif isinstance(f, S.Conj):
        for left in _implicants(f.left):
            for right in _implicants(f.right):
                if all(left.get(a, v) == v for a, v in right.items()):
                    yield {**left, **right}
    elif isinstance(f, S.Neg):
        yield {f.arg: False}
    else:
        yield {f: True}


def propositional_selections(kb, mode: str = "full") -> Iterator[dict]:
    """Assignments to the atoms of ``kb`` that make it true, as ordered dicts.

    ``mode="full"`` yields every total propositional model.  ``mode="implicant"``
    yields the distinct terms of a lazily built disjunctive normal form: partial
    assignments, not necessarily disjoint, whose union of models covers all
    models.
    """
    if mode not in ("full", "implicant"):
        raise ValueError(f"unknown selection mode {mode!r}")
    if mode == "implicant":
        seen = set()
        for sel in _implicants(nnf(kb)):
            key = frozenset(sel.items())
            if key not in seen:
                seen.add(key)
                yield sel
        return
    atoms = S.atoms(kb)

    def rec(assign: dict):
        if _eval3(kb, assign) is False:
            return
        atom = next((a for a in atoms if a not in assign), None)
        if atom is None:
            yield dict(assign)
            return
        for value in (True, False):
            assign[atom] = value
            yield from rec(assign)
            del assign[atom]

    yield from rec({})


# -- completion ----------------------------------------------------------------


def _norm_concept(c, pos: bool):
    while isinstance(c, S.Not):
        c, pos = c.arg, not pos
    return c, pos


def _concept_key(o: str, c, pos: bool):
    c, pos = _norm_concept(c, pos)
    return ("c", o, c), pos


_normalize_role = lru_cache(maxsize=65536)(S.normalize_role)


def _role_key(a: str, b: str, r, pos: bool):
    r = _normalize_role(r)
    if isinstance(r, S.Inverse):
        return ("r", b, a, r.role), pos
    return ("r", a, b, r), pos


def _is_basic_fact(key) -> bool:
    if key[0] == "c":
        c = key[2]
        return isinstance(c, S.ConceptName) or (
            isinstance(c, S.Exists) and isinstance(c.filler, S.Top) and is_basic_role(c.role))
    return isinstance(key[3], S.RoleName)


class _Clash(Exception):
    pass


@dataclass
class Completion:
    """A clash-free assertion set closed under the completion rules.

    ``facts`` maps ``("c", o, C)`` / ``("r", a, b, R)`` to a polarity.  Concepts
    carry no leading negation and roles no top-level inverse.
    """

    facts: dict
    individuals: list
    fresh: list = field(default_factory=list)

    def basic(self) -> dict:
        return {k: v for k, v in self.facts.items() if _is_basic_fact(k)}


class _State:
    def __init__(self, individuals):
        self.facts: dict = {}
        self.inds: list = list(individuals)
        self.fresh: list = []
        self.queue: list = []
        self.agenda: list = []  # branching obligations, in arrival order
        self.neg_exists: list = []  # (o, role) pairs that apply to every individual
        self.fire: set = set()  # individuals whose existential needs are made explicit
        self.taken: set = set(individuals)

    def copy(self) -> "_State":
        s = _State.__new__(_State)
        s.facts = dict(self.facts)
        s.inds = list(self.inds)
        s.fresh = list(self.fresh)
        s.queue = list(self.queue)
        s.agenda = list(self.agenda)
        s.neg_exists = list(self.neg_exists)
        s.fire = set(self.fire)
        s.taken = set(self.taken)
        return s

    def add(self, key, pos: bool):
        old = self.facts.get(key)
        if old is None:
            self.facts[key] = pos
            self.queue.append(key)
        elif old != pos:
            raise _Clash(key)

    def add_concept(self, o, c, pos):
        key, pos = _concept_key(o, c, pos)
        self.add(key, pos)

    def add_role(self, a, b, r, pos):
        key, pos = _role_key(a, b, r, pos)
        self.add(key, pos)

    def new_individual(self) -> str:
        (name,) = S.fresh_names(1, self.taken, stem="c")
        self.taken.add(name)
        self.inds.append(name)
        self.fresh.append(name)
        for o, r in self.neg_exists:
            self.add_role(o, name, r, False)
        return name

    def holds(self, key, pos) -> bool:
        return self.facts.get(key) == pos

    def holds_concept(self, o, c, pos) -> bool:
        key, pos = _concept_key(o, c, pos)
        return self.holds(key, pos)

    def holds_role(self, a, b, r, pos) -> bool:
        key, pos = _role_key(a, b, r, pos)
        return self.holds(key, pos)


def _apply_rules(st: _State):
    """Exhaust deterministic rules; branching obligations go to the agenda."""
    while st.queue:
        key = st.queue.pop()
        pos = st.facts[key]
        if key[0] == "c":
            _, o, c = key
            if isinstance(c, S.Top):
                if not pos:
                    raise _Clash(key)
            elif isinstance(c, S.Bottom):
                if pos:
                    raise _Clash(key)
            elif isinstance(c, S.Nominal):
                same = c.term.name == o
                if same != pos:
                    raise _Clash(key)
            elif isinstance(c, S.And):
                if pos:
                    st.add_concept(o, c.left, True)
                    st.add_concept(o, c.right, True)
                else:
                    st.agenda.append(key)
            elif isinstance(c, S.Or):
                if pos:
                    st.agenda.append(key)
                else:
                    st.add_concept(o, c.left, False)
                    st.add_concept(o, c.right, False)
            elif isinstance(c, S.Exists) and isinstance(c.filler, S.Top):
                if pos:
                    st.agenda.append(key)
                else:
                    st.neg_exists.append((o, c.role))
                    for x in st.inds:
                        st.add_role(o, x, c.role, False)
                    if not is_basic_role(c.role):
                        st.fire.add(o)
            elif not isinstance(c, S.ConceptName):
                raise FragmentViolation(f"concept outside B+ in assertion: {c!r}")
        else:
            _, a, b, r = key
            if isinstance(r, S.SingletonRole):
                same = r.first.name == a and r.second.name == b
                if same != pos:
                    raise _Clash(key)
            elif isinstance(r, S.RoleUnion):
                if pos:
                    st.agenda.append(key)
                else:
                    st.add_role(a, b, r.left, False)
                    st.add_role(a, b, r.right, False)
            elif isinstance(r, S.RoleDiff):
                if pos:
                    st.add_role(a, b, r.left, True)
                    st.add_role(a, b, r.right, False)
                else:
                    st.agenda.append(key)
            elif isinstance(r, S.RangeRestrict):
                if pos:
                    st.add_role(a, b, r.role, True)
                    st.add_concept(b, r.concept, True)
                else:
                    st.agenda.append(key)
            elif isinstance(r, S.DomainRestrict):
                if pos:
                    st.add_role(a, b, r.role, True)
                    st.add_concept(a, r.concept, True)
                else:
                    st.agenda.append(key)
            elif not isinstance(r, S.RoleName):
                raise FragmentViolation(f"unsupported role in assertion: {r!r}")


def _alternatives(st: _State, key):
    """Mutually exclusive alternatives for a branching obligation, or None
    when it is already met.  Each later alternative carries the negation of
    the earlier ones, so no completion is explored twice."""
    if key[0] == "c":
        _, o, c = key
        if isinstance(c, S.Or):  # positive
            if st.holds_concept(o, c.left, True) or st.holds_concept(o, c.right, True):
                return None
            return _exclusive(("c", o, c.left, True), ("c", o, c.right, True))
        if isinstance(c, S.And):  # negative
            if st.holds_concept(o, c.left, False) or st.holds_concept(o, c.right, False):
                return None
            return _exclusive(("c", o, c.left, False), ("c", o, c.right, False))
        # positive existential: a fresh successor or a named individual.
        # A negated existential over a complex role at o can rule out every
        # fresh successor, so named ones stay available even for basic roles.
        # Reusing an earlier fresh individual is never needed: a new one can
        # copy its type, and nominals cannot tell the two apart.
        if any(st.holds_role(o, x, c.role, True) for x in st.inds):
            return None
        anonymous = set(st.fresh)
        named = [("r", o, x, c.role, True) for x in st.inds if x not in anonymous]
        if is_basic_role(c.role):
            return _exclusive(("new", o, c.role), *named)
        return _exclusive(*named, ("new", o, c.role))
    _, a, b, r = key
    if isinstance(r, S.RoleUnion):  # positive
        if st.holds_role(a, b, r.left, True) or st.holds_role(a, b, r.right, True):
            return None
        return _exclusive(("r", a, b, r.left, True), ("r", a, b, r.right, True))
    if isinstance(r, S.RoleDiff):  # negative
        if st.holds_role(a, b, r.left, False) or st.holds_role(a, b, r.right, True):
            return None
        return _exclusive(("r", a, b, r.left, False), ("r", a, b, r.right, True))
    if isinstance(r, S.RangeRestrict):  # negative
        if st.holds_role(a, b, r.role, False) or st.holds_concept(b, r.concept, False):
            return None
        return _exclusive(("r", a, b, r.role, False), ("c", b, r.concept, False))
    if isinstance(r, S.DomainRestrict):  # negative
        if st.holds_role(a, b, r.role, False) or st.holds_concept(a, r.concept, False):
            return None
        return _exclusive(("r", a, b, r.role, False), ("c", a, r.concept, False))
    raise AssertionError(f"unexpected agenda item {key!r}")


def _negate_item(item):
    return item[:-1] + (not item[-1],)


def _exclusive(*items):
    out = []
    before = []
    seen = set()
    for item in items:
        if item in seen:
            continue
        seen.add(item)
        out.append(before + [item])
        if item[0] != "new":
            before = before + [_negate_item(item)]
    return out


def _apply_choice(st: _State, choice):
    for item in choice:
        if item[0] == "c":
            st.add_concept(item[1], item[2], item[3])
        elif item[0] == "r":
            st.add_role(item[1], item[2], item[3], item[4])
        else:
            _, o, r = item
            x = st.new_individual()
            st.add_role(o, x, r, True)


def _probe(st: _State, choice):
    child = st.copy()
    try:
        _apply_choice(child, choice)
        _apply_rules(child)
    except _Clash:
        return None
    return child


def _complete(st: _State, viable=None) -> Iterator[_State]:
    """Clash-free completions of ``st``; ``viable`` may veto partial states.

    Every open obligation is probed first: one without a surviving
    alternative closes the branch, one with a single survivor is applied
    outright, and otherwise the obligation with the fewest survivors is
    branched on, skipping children that ``viable`` rejects.
    """
    try:
        _apply_rules(st)
    except _Clash:
        return
    while True:
        pending = []
        for key in st.agenda:
            alts = _alternatives(st, key)
            if alts is not None:
                pending.append((key, alts))
        st.agenda = [key for key, _ in pending]
        if not pending:
            yield st
            return
        best = None
        for key, alts in pending:
            live = [c for c in (_probe(st, choice) for choice in alts) if c is not None]
            if not live:
                return
            if best is None or len(live) < len(best):
                best = live
                if len(live) == 1:
                    break
        if len(best) > 1:
            # forced steps are cheap; consult the veto only on new branches
            for child in best:
                if viable is None or viable(child):
                    yield from _complete(child, viable)
            return
        st = best[0]


def _add_literal(st: _State, lit):
    pos = True
    while isinstance(lit, S.Neg):
        lit, pos = lit.arg, not pos
    if isinstance(lit, S.ConceptAssertion):
        st.add_concept(lit.term.name, lit.concept, pos)
    elif isinstance(lit, S.RoleAssertion):
        st.add_role(lit.first.name, lit.second.name, lit.role, pos)
    else:
        raise FragmentViolation(f"not an assertion: {lit!r}")


# -- the polynomial core -------------------------------------------------------


def _inv(r):
    return r.role if isinstance(r, S.Inverse) else S.Inverse(r)


def _ex(r):
    return S.Exists(r, S.TOP)


@dataclass
class CoreResult:
    consistent: bool
    types: dict = field(default_factory=dict)
    pair_roles: dict = field(default_factory=dict)
    anon_types: dict = field(default_factory=dict)
    sup: dict = field(default_factory=dict)
    reason: str = ""

    def __bool__(self) -> bool:
        return self.consistent


class _TBox:
    def __init__(self, inclusions, role_names):
        self.pos_c: list = []
        self.neg_c: list = []
        self.pos_r: list = []
        self.neg_r: list = []
        names = set(role_names)
        for ax in inclusions:
            names |= S.role_names(ax)
            if isinstance(ax, S.ConceptInclusion):
                if isinstance(ax.rhs, S.Not):
                    self.neg_c.append((ax.lhs, ax.rhs.arg))
                else:
                    self.pos_c.append((ax.lhs, ax.rhs))
            elif isinstance(ax, S.RoleInclusion):
                if isinstance(ax.rhs, S.RoleDiff):
                    self.neg_r.append((ax.lhs, ax.rhs.right))
                else:
                    self.pos_r.append((ax.lhs, ax.rhs))
            else:
                raise FragmentViolation(f"not an inclusion: {ax!r}")
        self.roles = [S.RoleName(p) for p in sorted(names)] + [S.Inverse(S.RoleName(p)) for p in sorted(names)]
        self.sup = {r: self._sup(r) for r in self.roles}

    def _sup(self, r) -> frozenset:
        seen = {r}
        stack = [r]
        while stack:
            x = stack.pop()
            for lhs, rhs in self.pos_r:
                for y in ((rhs,) if lhs == x else ()) + ((_inv(rhs),) if _inv(lhs) == x else ()):
                    if y not in seen:
                        seen.add(y)
                        stack.append(y)
        return frozenset(seen)

    def roles_clash(self, rs) -> bool:
        for r1, r2 in self.neg_r:
            if r1 in rs and r2 in rs:
                return True
            if _inv(r1) in rs and _inv(r2) in rs:
                return True
        return False

    def closure(self, seed) -> frozenset:
        out = set(seed)
        stack = list(out)
        while stack:
            b = stack.pop()
            new = [rhs for lhs, rhs in self.pos_c if lhs == b]
            if isinstance(b, S.Exists):
                new += [_ex(s) for s in self.sup.get(b.role, (b.role,))]
            for x in new:
                if x not in out:
                    out.add(x)
                    stack.append(x)
        return frozenset(out)

    def type_clash(self, t) -> bool:
        return any(b1 in t and b2 in t for b1, b2 in self.neg_c)


@lru_cache(maxsize=256)
def _tbox(inclusions: tuple, role_names: frozenset) -> _TBox:
    return _TBox(inclusions, role_names)


def sat_dllite_core(inclusions, basic_facts: dict, individuals=()) -> CoreResult:
    """Decide a set of inclusions plus basic (possibly negative) assertions.

    ``basic_facts`` maps ``("c", o, A)``, ``("c", o, exists R . Top)`` and
    ``("r", a, b, p)`` to polarities, as in ``Completion.facts``.
    """
    role_names = set()
    inds = list(individuals)
    for key in basic_facts:
        if key[0] == "r":
            role_names.add(key[3].name)
            inds += [key[1], key[2]]
        else:
            role_names |= S.role_names(key[2])
            inds.append(key[1])
    inds = list(dict.fromkeys(inds))
    tb = _tbox(tuple(inclusions), frozenset(role_names))

    pair_roles: dict = {}
    for key, pos in basic_facts.items():
        if key[0] == "r" and pos:
            _, a, b, p = key
            pair_roles.setdefault((a, b), set()).update(tb.sup[p])
            pair_roles.setdefault((b, a), set()).update(tb.sup[S.Inverse(p)])
    for pr, rs in pair_roles.items():
        if tb.roles_clash(rs):
            return CoreResult(False, reason=f"negative role inclusion violated on {pr}")

    types = {}
    for o in inds:
        seed = {k[2] for k, v in basic_facts.items() if k[0] == "c" and k[1] == o and v}
        seed |= {_ex(r) for (a, _), rs in pair_roles.items() if a == o for r in rs}
        t = tb.closure(seed)
        if tb.type_clash(t):
            return CoreResult(False, reason=f"negative inclusion violated at {o}")
        types[o] = t

    for key, pos in basic_facts.items():
        if pos:
            continue
        if key[0] == "c" and key[2] in types[key[1]]:
            return CoreResult(False, reason=f"{key[1]} must not be in a derived concept")
        if key[0] == "r" and key[3] in pair_roles.get((key[1], key[2]), ()):
            return CoreResult(False, reason=f"({key[1]},{key[2]}) must not be in a derived role")

    anon: dict = {}
    stack = [b.role for t in types.values() for b in t if isinstance(b, S.Exists)]
    while stack:
        r = stack.pop()
        if r in anon:
            continue
        if tb.roles_clash(tb.sup[r]):
            return CoreResult(False, reason="an unsatisfiable role is required")
        t = tb.closure({_ex(_inv(r))})
        if tb.type_clash(t):
            return CoreResult(False, reason="an anonymous successor has a clashing type")
        anon[r] = t
        stack += [b.role for b in t if isinstance(b, S.Exists)]
    return CoreResult(True, types, {k: frozenset(v) for k, v in pair_roles.items()}, anon, tb.sup)


# -- model assembly --------------------------------------------------------------


def _assemble(core: CoreResult, keep_names) -> Interpretation:
    layers = 3
    domain = list(core.types)
    concepts: dict = {}
    roles: dict = {}

    def put_type(x, t):
        for b in t:
            if isinstance(b, S.ConceptName):
                concepts.setdefault(b.name, set()).add(x)

    def put_edge(x, y, rs):
        for r in rs:
            if isinstance(r, S.RoleName):
                roles.setdefault(r.name, set()).add((x, y))
            else:
                roles.setdefault(r.role.name, set()).add((y, x))

    anon_elems = {(r, i): f"_w{i}_{k}" for k, r in enumerate(core.anon_types) for i in range(layers)}
    used = set()

    def need(x, t, layer):
        for b in t:
            if isinstance(b, S.Exists):
                w = anon_elems[(b.role, layer)]
                put_edge(x, w, core.sup[b.role])
                used.add((b.role, layer))

    for o, t in core.types.items():
        put_type(o, t)
        satisfied = {r for (a, _), rs in core.pair_roles.items() if a == o for r in rs}
        need(o, frozenset(b for b in t if not (isinstance(b, S.Exists) and b.role in satisfied)), 0)
    for (a, b), rs in core.pair_roles.items():
        put_edge(a, b, [r for r in rs if isinstance(r, S.RoleName)])
    frontier = set(used)
    done = set()
    while frontier:
        item = frontier.pop()
        if item in done:
            continue
        done.add(item)
        r, layer = item
        w = anon_elems[item]
        put_type(w, core.anon_types[r])
        before = set(used)
        need(w, core.anon_types[r], (layer + 1) % layers)
        frontier |= used - before - done
    domain += [anon_elems[i] for i in sorted(done, key=lambda i: anon_elems[i])]
    names = {o: o for o in core.types if o in keep_names}
    # individuals the selection never mentions are unconstrained: isolated elements
    for o in sorted(set(keep_names) - set(core.types)):
        domain.append(o)
        names[o] = o
    return Interpretation(tuple(domain), concepts, roles, names, una=True)


# -- top level -------------------------------------------------------------------


def _lazy_fire(st: _State, core: CoreResult) -> list:
    """Existentials to make explicit at individuals under a negated
    existential over a complex role.

    The anonymous successor the core would invent might fall inside that
    complex role, so such successors are introduced as individuals instead
    and the pairwise rules apply to them.
    """
    extra = []
    for o in sorted(st.fire):
        named = {r for (a, _), rs in core.pair_roles.items() if a == o for r in rs}
        for b in sorted(core.types.get(o, ()), key=repr):
            if isinstance(b, S.Exists) and b.role not in named:
                extra.append(("c", o, b))
    return extra


def _closed_states(inclusions, st: _State) -> Iterator[tuple[_State, CoreResult]]:
    # more basic facts only add constraints, so an inconsistent partial
    # state cannot be rescued by further choices
    def viable(partial):
        return bool(sat_dllite_core(inclusions, _basic(partial.facts), partial.inds))

    for done in _complete(st, viable):
        core = sat_dllite_core(inclusions, _basic(done.facts), done.inds)
        if core:
            extra = _lazy_fire(done, core)
            if extra:
                nxt = done.copy()
                try:
                    for key in extra:
                        if key in nxt.facts:
                            nxt.agenda.append(key)
                        else:
                            nxt.add(key, True)
                except _Clash:
                    continue
                yield from _closed_states(inclusions, nxt)
                continue
        yield done, core


def _basic(facts: dict) -> dict:
    return {k: v for k, v in facts.items() if _is_basic_fact(k)}


def _initial_state(literals, avoid=(), individuals=()) -> _State:
    inds = set(individuals)
    if literals:
        inds |= S.individuals(S.conj(*literals))
    inds = sorted(inds)
    st = _State(inds)
    st.taken |= set(avoid)
    for lit in literals:
        _add_literal(st, lit)
    if not st.inds:
        st.new_individual()  # the domain is never empty
    return st


def complete_abox(inclusions, assertions) -> Iterator[Completion]:
    """Enumerate clash-free completions of (possibly negated) assertions.

    Existentials at individuals that carry a negated existential over a
    complex role are made explicit using ``inclusions``; all other inclusion
    reasoning is left to ``sat_dllite_core``.
    """
    inclusions = list(inclusions)
    try:
        st = _initial_state(list(assertions))
    except _Clash:
        return
    for done, _ in _closed_states(inclusions, st):
        yield Completion(done.facts, done.inds, done.fresh)


def sat_dllite(kb, selection_mode: str = "implicant"):
    """Decide finite satisfiability of a fragment KB under unique names."""
    report = is_dllite_formula(kb)
    if not report:
        raise FragmentViolation("formula is outside the lightweight fragment", report.diagnostics)
    names = S.individuals(kb)
    avoid = S.all_names(kb)
    invalid = 0
    for sel in propositional_selections(kb, selection_mode):
        inclusions = [a for a, v in sel.items() if v and isinstance(a, S.INCLUSION_TYPES)]
        literals = [a if v else S.Neg(a) for a, v in sel.items() if isinstance(a, S.ASSERTION_TYPES)]
        # inclusions occur only positively, so one selected false is simply dropped
        # individuals outside the selected literals need no completion work
        try:
            st = _initial_state(literals, avoid)
        except _Clash:
            continue
        for _, core in _closed_states(inclusions, st):
            if not core:
                continue
            witness = _assemble(core, names)
            if models(witness, kb):
                return Satisfiable(witness)
            invalid += 1
    if invalid:
        raise IncompleteWitness(f"{invalid} consistent completions produced no valid model")
    return Unsatisfiable()
