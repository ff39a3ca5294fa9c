import pytest

import exhaustive
from gsdact import syntax as S
from gsdact.actions import execute
from gsdact.errors import BudgetExceeded
from gsdact.fragments import is_dllite_formula
from gsdact.interpretation import eval_role, models
from gsdact.parser import parse_action, parse_concept, parse_formula, parse_role
from gsdact.regression import (BranchChoice, eliminate_negated_inclusions, nnf, substitute_symbol,
                               tr, tr_branches_neg, tr_branches_pos, tr_neg)
from randgen import Gen

DISPLAYED_TR = (
    "Prj <= (ActivePrj and not {p1}) or (FinishedPrj or {p1}) & "
    "exists worksFor . Top <= Empl and exists worksFor . not {p1} & "
    "exists inv worksFor . Top <= Prj"
)


def dag_size(obj) -> int:
    seen, stack = set(), [obj]
    while stack:
        n = stack.pop()
        if id(n) not in seen:
            seen.add(id(n))
            stack.extend(S.children(n))
    return len(seen)


def population(count, start=0):
    for seed in range(start, start + count):
        g = Gen(seed)
        yield g.interpretation(4), g.action(g.r.randint(1, 4), 2), g.formula(g.r.randint(1, 4), 2)


def test_base_cases():
    k = parse_formula("o : A")
    assert tr((), k) == k
    assert tr_neg((), k) == S.Neg(k)
    assert [f for _, f in tr_branches_pos((), k)] == [k]
    assert [(c, f) for c, f in tr_branches_neg((), k)] == [(BranchChoice(()), S.Neg(k))]


def test_displayed_regression_equivalent(k1, a1):
    assert exhaustive.disagreements(tr(a1, k1), parse_formula(DISPLAYED_TR), max_domain=3) == 0
    # and the check has teeth: the original KB is not equivalent
    assert exhaustive.disagreements(k1, parse_formula(DISPLAYED_TR), max_domain=3) > 0


def test_substitute_examples(k1):
    second = S.conjuncts(k1)[1]
    repl = parse_concept("Empl and not forall worksFor . {p1}")
    out = substitute_symbol(second, "Empl", repl)
    assert out == S.ConceptInclusion(second.lhs, repl)
    assert substitute_symbol(k1, "Empl", S.ConceptName("Empl")) == k1
    # replacement is not re-substituted
    assert substitute_symbol(parse_formula("o : A"), "A", parse_concept("A or B")) == parse_formula("o : A or B")


def test_substitute_under_inverse():
    f = parse_formula("o : exists inv p . Top")
    out = substitute_symbol(f, "p", parse_role("p - r"))
    role = out.concept.role
    assert role == S.RoleDiff(S.Inverse(S.RoleName("p")), S.Inverse(S.RoleName("r")))
    for seed in range(100):
        interp = Gen(seed, roles=("p", "r")).interpretation(4)
        pr = parse_role("p - r")
        assert eval_role(interp, role) == {(b, a) for a, b in eval_role(interp, pr)}


def test_substitute_rejects_non_expressions():
    with pytest.raises(TypeError):
        substitute_symbol(parse_formula("o : A"), "A", parse_formula("o : B"))


def test_non_ground_rejected(a2):
    with pytest.raises(ValueError):
        tr(a2, parse_formula("o : A"))
    with pytest.raises(ValueError):
        list(tr_branches_neg(a2, parse_formula("o : A")))


def test_regression_property():
    bad = 0
    for interp, a, k in population(1000):
        if models(execute(interp, a), k) != models(interp, tr(a, k)):
            bad += 1
    assert bad == 0


def test_negated_regression():
    for interp, a, k in population(600):
        assert models(interp, tr_neg(a, k)) == (not models(interp, tr(a, k)))


def test_conditional_free_negation_shape():
    a = parse_action("A += B ; p -= q")
    k = parse_formula("o : A & (o,o) : p")
    assert tr_neg(a, k) == S.Neg(tr(a, k))


def test_branch_sets_cover():
    for interp, a, k in population(600, start=5000):
        neg = [models(interp, f) for _, f in tr_branches_neg(a, k)]
        pos = [models(interp, f) for _, f in tr_branches_pos(a, k)]
        assert any(neg) == models(interp, tr_neg(a, k))
        assert any(pos) == models(interp, tr(a, k))


def test_branch_counts():
    k = parse_formula("o : A")
    assert len(list(tr_branches_neg(parse_action("A += B ; A -= C"), k))) == 1
    two = parse_action("if o : B then { A += B } ; if o : C then { A -= C } else { A += C }")
    branches = list(tr_branches_neg(two, k))
    assert len(branches) == 4
    assert [str(c) for c, _ in branches] == ["TT", "TF", "FT", "FF"]


def test_guard_true_branch_carries_guard():
    a = parse_action("if o : B then { A += B }")
    k = parse_formula("o : A")
    (c1, f1), (c2, f2) = list(tr_branches_pos(a, k))
    assert c1.decisions == (True,) and f1.left == parse_formula("o : B")
    assert c2.decisions == (False,) and f2.left == S.Neg(parse_formula("o : B"))


def test_branch_size_linear():
    worst = 0.0
    for _, a, k in population(600):
        base = S.node_count(a) + S.node_count(k)
        for gen in (tr_branches_neg, tr_branches_pos):
            for _, f in gen(a, k):
                worst = max(worst, dag_size(f) / base)
    assert worst <= 3


def test_node_budget():
    a = tuple(parse_action(f"if o : A{i} then {{ B += C }} else {{ B -= C }}")[0] for i in range(12))
    with pytest.raises(BudgetExceeded) as info:
        tr(a, parse_formula("o : B"), budget=500)
    assert info.value.detail["conditionals"] == 12


def test_nnf_pushes_negation():
    f = nnf(parse_formula("! (o : A & (A <= B v ! (o,o) : p))"))
    assert f == parse_formula("! o : A v (! (A <= B) & (o,o) : p)")


def test_eliminate_without_una():
    out = eliminate_negated_inclusions(parse_formula("! (A <= B)"))
    assert isinstance(out, S.ConceptAssertion)
    assert out.term.name.startswith(S.RESERVED_PREFIX)
    assert out.concept == parse_concept("A and not B")
    role = eliminate_negated_inclusions(parse_formula("! (p <= q)"))
    assert isinstance(role, S.RoleAssertion) and role.first != role.second
    assert role.role == parse_role("p - q")
    plain = parse_formula("o : A & A <= B")
    assert eliminate_negated_inclusions(plain) == plain


def test_eliminate_with_una_tries_named_individuals():
    out = eliminate_negated_inclusions(parse_formula("! (A <= B) & o : C"), una=True)
    witnesses = {a.term.name for a in S.atoms(out) if isinstance(a, S.ConceptAssertion)
                 and a.concept == parse_concept("A and not B")}
    assert "o" in witnesses and any(w.startswith(S.RESERVED_PREFIX) for w in witnesses)


def test_eliminated_branches_stay_in_fragment():
    checked = 0
    for seed in range(300):
        g = Gen(seed)
        k = g.lite_formula(g.r.randint(1, 4))
        a = g.simple_action(g.r.randint(1, 3), 1)
        for _, f in tr_branches_neg(a, k):
            out = eliminate_negated_inclusions(S.Conj(k, f), una=True)
            assert is_dllite_formula(out), out
            checked += 1
    assert checked >= 300
