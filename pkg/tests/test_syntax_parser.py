import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gsdact import printer
from gsdact import syntax as S
from gsdact.fragments import is_dllite_formula, is_simple_action
from gsdact.parser import ParseError, parse_action, parse_concept, parse_formula, parse_role
from randgen import Gen

seeds = st.integers(min_value=0, max_value=10**9)


@settings(max_examples=300, deadline=None)
@given(seeds)
def test_formula_round_trip(seed):
    f = Gen(seed).formula(size=4, depth=2)
    assert parse_formula(printer.formula(f)) == f
    assert parse_formula(printer.formula_lines(f)) == f


@settings(max_examples=300, deadline=None)
@given(seeds)
def test_action_round_trip(seed):
    a = Gen(seed).action(steps=3, conditionals=2)
    assert parse_action(printer.action(a)) == a
    assert parse_action(printer.action_inline(a)) == a


@settings(max_examples=200, deadline=None)
@given(seeds)
def test_lite_round_trip(seed):
    g = Gen(seed)
    f = g.lite_formula(4)
    assert parse_formula(printer.formula(f)) == f
    a = g.simple_action(3, 1)
    assert parse_action(printer.action(a)) == a


def test_internal_markers_round_trip():
    r = S.RoleUnion(S.Inverse(S.RoleDiff(S.RoleName("p"), S.RoleName("q"))),
                    S.DomainRestrict(S.ConceptName("A"), S.RoleName("p")))
    text = printer.role(r)
    assert parse_role(text, internal=True) == r
    with pytest.raises(ParseError):
        parse_role(text)


def test_precedence():
    f = parse_formula("! a : A v b : B & c : C")
    assert f == S.Disj(S.Neg(S.ConceptAssertion(S.Ind("a"), S.ConceptName("A"))),
                       S.Conj(S.ConceptAssertion(S.Ind("b"), S.ConceptName("B")),
                              S.ConceptAssertion(S.Ind("c"), S.ConceptName("C"))))
    c = parse_concept("not A and B or C")
    assert c == S.Or(S.And(S.Not(S.ConceptName("A")), S.ConceptName("B")), S.ConceptName("C"))
    r = parse_role("p + inv q | A")
    assert r == S.RoleUnion(S.RoleName("p"), S.RangeRestrict(S.Inverse(S.RoleName("q")), S.ConceptName("A")))


def test_comments_and_whitespace(data_dir):
    k1 = parse_formula((data_dir / "k1.kb").read_text())
    assert len(S.conjuncts(k1)) == 3
    assert parse_action("skip") == ()
    assert parse_action("# nothing\nskip ; skip") == ()


@pytest.mark.parametrize("text", ["a : ", "A <=", "(a,b) : ", "a : A &", "A <= B B", "a : exists p C"])
def test_syntax_errors_have_positions(text):
    with pytest.raises(ParseError) as info:
        parse_formula(text)
    assert info.value.line == 1 and info.value.column >= 1


def test_error_reports_expected_tokens():
    with pytest.raises(ParseError) as info:
        parse_action("A += {?x")
    assert "'}'" in info.value.expected


def test_reserved_prefix_rejected():
    with pytest.raises(ParseError):
        parse_formula("a : _x")
    assert parse_formula("_f0 : A", internal=True) == S.ConceptAssertion(S.Ind("_f0"), S.ConceptName("A"))


def test_parse_examples(a1, a2):
    assert len(a1) == 3
    assert a1[2] == S.RemoveConcept("Empl", S.Forall(S.RoleName("worksFor"), S.Nominal(S.Ind("p1"))))
    assert [v.name for v in S.free_variables(a2)] == ["x", "y", "z"]
    assert S.count_conditionals(a2) == 1


@settings(max_examples=200, deadline=None)
@given(seeds)
def test_grounding_idempotent(seed):
    g = Gen(seed)
    a = g.action(3, 1)
    sigma = {S.Var(v): S.Ind(o) for v, o in zip("xyz", "abc")}
    once = S.apply_substitution(a, sigma)
    assert S.apply_substitution(once, sigma) == once


def test_canonical_grounding(a2):
    avoid = {"_f0", "e1"}
    ground, sigma = S.canonical_grounding(a2, avoid=avoid)
    assert S.is_ground(ground)
    assert len(sigma) == len(S.free_variables(a2)) == 3
    fresh = {o.name for o in sigma.values()}
    assert len(fresh) == 3 and not fresh & avoid
    assert all(n.startswith(S.RESERVED_PREFIX) for n in fresh)


def test_fragment_goldens(k1, a1, a2):
    r = is_dllite_formula(k1)
    assert not r and any("ActivePrj or FinishedPrj" in d for d in r.diagnostics)
    assert is_dllite_formula(parse_formula("A1 <= not A2 & o : A1"))
    assert not is_dllite_formula(parse_formula("! (A <= B)"))
    assert is_dllite_formula(parse_formula("! (o : A) & (o,o2) : p - q"))
    assert is_simple_action(a2)
    assert is_simple_action(())
    assert not is_simple_action(parse_action("if A <= B then { A += B }"))
    # universal restrictions are not in the lightweight concept language
    assert not is_simple_action(a1)


def test_fragment_diagnostics_name_subterms():
    r = is_dllite_formula(parse_formula("o : forall p . A"))
    assert not r and any("forall p . A" in d for d in r.diagnostics)


def test_generated_lite_inputs_are_in_fragment():
    for seed in range(300):
        g = Gen(seed)
        assert is_dllite_formula(g.lite_formula(g.r.randint(1, 6)))
        assert is_simple_action(g.simple_action(3, 1))
