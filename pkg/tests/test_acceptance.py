"""Acceptance suite: one check per criterion, each reporting a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py`` (lines appear in the terminal
summary) or directly with ``python tests/test_acceptance.py``.
"""

import random
import sys
import tempfile
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

import exhaustive  # noqa: E402
import qbf_templates  # noqa: E402
from gsdact.actions import execute, execute_sequence  # noqa: E402
from gsdact.cli import main as cli_main  # noqa: E402
from gsdact.fragments import is_dllite_formula, is_simple_action  # noqa: E402
from gsdact.interpretation import models, parse_interpretation, print_interpretation  # noqa: E402
from gsdact.parser import parse_action, parse_formula  # noqa: E402
from gsdact.planning import find_plan, synthesize  # noqa: E402
from gsdact.reductions import (Graph, all_graphs, gen_3col, gen_qbf, oracle_3col, oracle_qbf,  # noqa: E402
                               parse_qbf, print_qbf)
from gsdact.regression import tr, tr_branches_neg, tr_branches_pos, tr_neg  # noqa: E402
from gsdact.satisfiability import Satisfiable, sat_bounded, sat_dllite  # noqa: E402
from gsdact.verification import NoCounterexampleUpTo, NotPreserving, verify_preserving  # noqa: E402
from randgen import INDS, Gen  # noqa: E402

DATA = Path(__file__).resolve().parent.parent / "data" / "projects"

DISPLAYED_TR = (
    "Prj <= (ActivePrj and not {p1}) or (FinishedPrj or {p1}) & "
    "exists worksFor . Top <= Empl and exists worksFor . not {p1} & "
    "exists inv worksFor . Top <= Prj"
)

RESULTS: list[str] = []


def load(name):
    return (DATA / name).read_text()


def population(count=1000):
    """Random (I, action, KB): at most 4 elements, 3 concepts, 2 roles, 2 conditionals."""
    for seed in range(count):
        g = Gen(seed)
        yield g.interpretation(4), g.action(g.r.randint(1, 4), 2), g.formula(g.r.randint(1, 4), 2)


def timed(fn):
    start = time.perf_counter()
    ok, detail = fn()
    return ok, detail, time.perf_counter() - start


# -- criteria ------------------------------------------------------------------------------------


def c1_exec_close_project():
    with tempfile.TemporaryDirectory() as tmp:
        out = Path(tmp) / "after.gsd"
        code = cli_main(["exec", "--interp", str(DATA / "i1.gsd"), "--action", str(DATA / "a1.act"),
                         "--out", str(out)])
        got = out.read_text()
    expected = print_interpretation(parse_interpretation(load("i1_after_a1.gsd")))
    after = parse_interpretation(got)
    facts = (after.concepts["ActivePrj"] == {"p2"} and after.concepts["FinishedPrj"] == {"p1"}
             and after.concepts["Empl"] == {"e7"}
             and after.roles["worksFor"] == parse_interpretation(load("i1.gsd")).roles["worksFor"])
    return code == 0 and got == expected and facts, "byte-identical result file"


def c2_displayed_regression():
    k1, a1 = parse_formula(load("k1.kb")), parse_action(load("a1.act"))
    bad = exhaustive.disagreements(tr(a1, k1), parse_formula(DISPLAYED_TR), max_domain=3, una=False)
    return bad == 0, f"{bad} disagreements over domains of size <= 3"


def c3_regression_property():
    bad = n = 0
    for interp, a, k in population():
        n += 1
        bad += models(execute(interp, a), k) != models(interp, tr(a, k))
    return bad == 0 and n >= 1000, f"{n - bad}/{n} agree"


def c4_branch_sets():
    bad = n = 0
    for interp, a, k in population():
        n += 1
        holds = models(interp, tr(a, k))
        ok = (models(interp, tr_neg(a, k)) == (not holds)
              and any(models(interp, f) for _, f in tr_branches_neg(a, k)) == (not holds)
              and any(models(interp, f) for _, f in tr_branches_pos(a, k)) == holds)
        bad += not ok
    return bad == 0, f"{n - bad}/{n} agree"


def c5_verification_goldens():
    k1 = parse_formula(load("k1.kb"))
    a1, a1p = parse_action(load("a1.act")), parse_action(load("a1p.act"))
    v = verify_preserving(a1, k1, "bounded", 4)
    genuine = (isinstance(v, NotPreserving) and models(v.counterexample, k1)
               and not models(execute(v.counterexample, v.ground_action), k1))
    w = verify_preserving(a1p, k1, "bounded", 4)
    return genuine and w == NoCounterexampleUpTo(4), f"close project: {type(v).__name__}; with unassign: {w}"


def c6_dllite_vs_bounded():
    contradictions = invalid = 0
    for seed in range(500):
        g = Gen(seed, inds=INDS)
        kb = g.lite_formula(g.r.randint(1, 6))
        lite, bounded = sat_dllite(kb), sat_bounded(kb, 4, una=True)
        if isinstance(lite, Satisfiable) and not models(lite.witness, kb):
            invalid += 1
        if isinstance(bounded, Satisfiable) and not isinstance(lite, Satisfiable):
            contradictions += 1
    return contradictions == 0 and invalid == 0, f"{contradictions} contradictions, {invalid} invalid witnesses"


def c7_three_colouring():
    graphs = [g for n in range(1, 5) for g in all_graphs(n)]
    graphs += random.Random(7).sample(list(all_graphs(5)), 100)
    bad = 0
    for g in graphs:
        k, a = gen_3col(g)
        bad += isinstance(verify_preserving(a, k, "bounded", 1), NotPreserving) != oracle_3col(g)
    return bad == 0, f"{len(graphs) - bad}/{len(graphs)} graphs match the oracle"


def c8_qbf():
    n = 0
    wrong = []
    for phi in qbf_templates.instances(3):
        n += 1
        inst = gen_qbf(phi)
        in_fragment = is_dllite_formula(inst.pre) and is_dllite_formula(inst.goal)
        out = synthesize(inst.actions, inst.pre, inst.goal, inst.k, "dllite")
        if not in_fragment or (out is not None) != oracle_qbf(phi):
            wrong.append(print_qbf(phi))
    return not wrong, f"{n - len(wrong)}/{n} instances match the oracle"


def c9_planning():
    i1 = parse_interpretation(load("i1.gsd"))
    kg = parse_formula(load("kg.kb"))
    plan = find_plan(i1, [parse_action(load("a2.act")), parse_action(load("a1p.act"))], kg, 0)
    ok = (plan is not None and len(plan) == 2 and [s.action_index for s in plan.steps] == [0, 1]
          and models(execute_sequence(plan.initial, plan.actions), kg))
    return ok, f"plan of length {None if plan is None else len(plan)}"


def c10_fragments():
    k1 = parse_formula(load("k1.kb"))
    k3, _ = gen_3col(Graph.complete(3))
    inst = gen_qbf(parse_qbf("e p1 p2\na q\nmatrix (p1 | ~q) & (p2 | q)"))
    ok = (not is_dllite_formula(k1) and bool(is_dllite_formula(k3)) and bool(is_dllite_formula(inst.pre))
          and bool(is_dllite_formula(inst.goal)) and bool(is_simple_action(parse_action(load("a2.act")))))
    return ok, "project constraints rejected; colouring, QBF and move-employee inputs accepted"


CRITERIA = [
    (1, "exec on the project example", c1_exec_close_project, 1),
    (2, "regression equals the displayed formula", c2_displayed_regression, 30),
    (3, "regression property on random cases", c3_regression_property, 120),
    (4, "branch-set equivalences", c4_branch_sets, None),
    (5, "verification goldens", c5_verification_goldens, 60),
    (6, "lightweight reasoner vs bounded search", c6_dllite_vs_bounded, 300),
    (7, "3-colouring harness", c7_three_colouring, None),
    (8, "QBF harness", c8_qbf, None),
    (9, "planning golden", c9_planning, 10),
    (10, "fragment checkers", c10_fragments, None),
]


def check(number: int) -> bool:
    _, title, fn, limit = CRITERIA[number - 1]
    ok, detail, elapsed = timed(fn)
    in_time = limit is None or elapsed < limit
    budget = f" (limit {limit}s)" if limit else ""
    status = "PASS" if ok and in_time else "FAIL"
    line = f"{status} criterion {number}: {title}: {detail}; {elapsed:.2f}s{budget}"
    RESULTS.append(line)
    print(line)
    return ok and in_time


def test_c01_exec_close_project():
    assert check(1)


def test_c02_displayed_regression():
    assert check(2)


def test_c03_regression_property():
    assert check(3)


def test_c04_branch_sets():
    assert check(4)


def test_c05_verification_goldens():
    assert check(5)


def test_c06_dllite_vs_bounded():
    assert check(6)


def test_c07_three_colouring():
    assert check(7)


def test_c08_qbf():
    assert check(8)


def test_c09_planning():
    assert check(9)


def test_c10_fragments():
    assert check(10)


if __name__ == "__main__":
    results = [check(n) for n, *_ in CRITERIA]
    sys.exit(0 if all(results) else 1)
