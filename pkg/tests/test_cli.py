import json
import subprocess
import sys
from importlib import resources

import jsonschema
import pytest

from gsdact.cli import main
from gsdact.interpretation import parse_interpretation, print_interpretation
from gsdact.parser import parse_action

SCHEMA = json.loads(resources.files("gsdact").joinpath("report.schema.json").read_text())


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--json")
    report = json.loads(out)
    jsonschema.validate(report, SCHEMA)
    assert report["exit_code"] == code
    return code, report


@pytest.fixture
def files(tmp_path):
    def write(name, text):
        p = tmp_path / name
        p.write_text(text)
        return p
    return write


# -- the running example ----------------------------------------------------------------


def test_exec_reproduces_close_project(capsys, data_dir, tmp_path):
    out = tmp_path / "after.gsd"
    code, _, _ = run(capsys, "exec", "--interp", data_dir / "i1.gsd", "--action", data_dir / "a1.act", "--out", out)
    assert code == 0
    expected = print_interpretation(parse_interpretation((data_dir / "i1_after_a1.gsd").read_text()))
    assert out.read_text() == expected


def test_exec_trace_and_bindings(capsys, data_dir):
    code, out, err = run(capsys, "exec", "--interp", data_dir / "i1.gsd", "--action", data_dir / "a2.act",
                         "--bind", "?x=e1", "--bind", "?y=p1", "--bind", "?z=p2", "--trace")
    assert code == 0
    assert "(e1,p2)" in out.replace(" ", "")
    assert "guard" in err and "is true" in err
    code, _, err = run(capsys, "exec", "--interp", data_dir / "i1.gsd", "--action", data_dir / "a2.act")
    assert code == 2 and "unbound variables" in err


def test_model_check(capsys, data_dir, tmp_path):
    assert run(capsys, "model-check", "--interp", data_dir / "i1.gsd", "--kb", data_dir / "k1.kb")[0] == 0
    code, report = run_json(capsys, "model-check", "--interp", data_dir / "i1.gsd", "--kb", data_dir / "kg.kb")
    assert code == 1 and report["verdict"] == "NotModels"
    assert report["details"]["failing_conjuncts"] == ["! p1 : ActivePrj"]


def test_verify_counterexample_revalidates(capsys, data_dir, tmp_path):
    cex = tmp_path / "cex.gsd"
    code, report = run_json(capsys, "verify", "--kb", data_dir / "k1.kb", "--action", data_dir / "a1.act",
                            "--backend", "bounded", "--max-domain", 5, "--out", cex)
    assert code == 1 and report["verdict"] == "NotPreserving"
    assert cex.read_text() == report["witness"]
    assert run(capsys, "model-check", "--interp", cex, "--kb", data_dir / "k1.kb")[0] == 0
    after = tmp_path / "after.gsd"
    ground = tmp_path / "ground.act"
    ground.write_text(report["details"]["ground_action"])
    assert run(capsys, "exec", "--interp", cex, "--action", ground, "--out", after)[0] == 0
    assert run(capsys, "model-check", "--interp", after, "--kb", data_dir / "k1.kb")[0] == 1


def test_verify_bounded_never_claims_preservation(capsys, data_dir):
    code, report = run_json(capsys, "verify", "--kb", data_dir / "k1.kb", "--action", data_dir / "a1p.act",
                            "--max-domain", 3)
    assert code == 0 and report["verdict"] == "NoCounterexampleUpTo" and report["details"]["bound"] == 3


def test_verify_fragment_violation(capsys, data_dir):
    code, report = run_json(capsys, "verify", "--kb", data_dir / "k1.kb", "--action", data_dir / "a1.act",
                            "--backend", "dllite")
    assert code == 4 and report["outcome"] == "fragment" and report["diagnostics"]


def test_verify_pre_post_and_usage(capsys, data_dir, files):
    pre, post = files("pre.kb", "o : A"), files("post.kb", "o : not A")
    act = files("a.act", "A -= {o}")
    code, report = run_json(capsys, "verify", "--pre", pre, "--post", post, "--action", act, "--backend", "dllite")
    assert code == 0 and report["verdict"] == "Preserving"
    assert run(capsys, "verify", "--action", act)[0] == 2
    assert run(capsys, "verify", "--kb", pre, "--pre", pre, "--post", post, "--action", act)[0] == 2
    assert run(capsys, "verify", "--kb", pre, "--action", act, "--backend", "dllite", "--una", "off")[0] == 2


def test_regress(capsys, data_dir):
    code, report = run_json(capsys, "regress", "--kb", data_dir / "k1.kb", "--action", data_dir / "a1.act")
    assert code == 0 and "forall worksFor" in report["details"]["formula"]
    code, report = run_json(capsys, "regress", "--kb", data_dir / "k1.kb", "--action", data_dir / "a2.act",
                            "--bind", "?x=e1", "--bind", "?y=p1", "--bind", "?z=p2", "--branches")
    assert [b["branch"] for b in report["details"]["branches"]] == ["T", "F"]
    code, report = run_json(capsys, "regress", "--kb", data_dir / "k1.kb", "--action", data_dir / "a2.act",
                            "--bind", "?x=e1", "--bind", "?y=p1", "--bind", "?z=p2", "--branches", "pos")
    assert len(report["details"]["branches"]) == 2


def test_check_sat(capsys, files, tmp_path):
    kb = files("k.kb", "A <= not B & o : A")
    out = tmp_path / "w.gsd"
    code, report = run_json(capsys, "check-sat", "--kb", kb, "--backend", "dllite", "--out", out)
    assert code == 0 and report["verdict"] == "Satisfiable"
    assert run(capsys, "model-check", "--interp", out, "--kb", kb)[0] == 0
    bad = files("bad.kb", "o : A & A <= not A")
    code, report = run_json(capsys, "check-sat", "--kb", bad, "--max-domain", 2)
    assert code == 1 and report["verdict"] == "NoModelUpTo" and report["details"]["bound"] == 2
    assert run(capsys, "check-sat", "--kb", bad, "--backend", "dllite")[1].strip() == "Unsatisfiable"
    una = files("una.kb", "o : {o2}")
    assert run(capsys, "check-sat", "--kb", una, "--una", "on")[0] == 1
    assert run(capsys, "check-sat", "--kb", una)[0] == 0


def test_plan_golden(capsys, data_dir, tmp_path):
    out = tmp_path / "plan.act"
    code, report = run_json(capsys, "plan", "--interp", data_dir / "i1.gsd", "--action", data_dir / "a2.act",
                            "--action", data_dir / "a1p.act", "--goal", data_dir / "kg.kb", "--out", out)
    assert code == 0 and report["details"]["length"] == 2
    assert report["plan"][0]["substitution"] == {"?x": "e1", "?y": "p1", "?z": "p2"}
    text = out.read_text()
    assert "# step 1: action 0" in text and "# step 2: action 1" in text
    # the written plan is itself an executable action file
    parse_action(text)
    after = tmp_path / "after.gsd"
    assert run(capsys, "exec", "--interp", data_dir / "i1.gsd", "--action", out, "--out", after)[0] == 0
    assert run(capsys, "model-check", "--interp", after, "--kb", data_dir / "kg.kb")[0] == 0


def test_plan_none_and_budget(capsys, data_dir, files):
    goal = files("g.kb", "p1 : Empl & p1 : not Empl")
    args = ("plan", "--interp", data_dir / "i1.gsd", "--action", data_dir / "a2.act", "--goal")
    assert run(capsys, *args, goal)[0] == 1
    code, report = run_json(capsys, *args, files("g2.kb", "e7 : FinishedPrj"), "--state-budget", 3)
    assert code == 3 and report["outcome"] == "budget"


def test_plan_exists_and_certify(capsys, files):
    pre = files("pre.kb", "ActivePrj <= not FinishedPrj & ?x : FinishedPrj")
    goal = files("goal.kb", "?x : ActivePrj")
    act = files("reopen.act", "ActivePrj += {?p}")
    code, report = run_json(capsys, "plan-exists", "--pre", pre, "--goal", goal, "--action", act,
                            "--max-length", 1, "--backend", "dllite")
    assert code == 0 and report["details"]["length"] == 1 and report["witness"]
    assert run(capsys, "plan-exists", "--pre", pre, "--goal", goal, "--action", act)[0] == 1
    assert run(capsys, "plan-exists", "--pre", pre, "--goal", goal)[0] == 2

    same = files("a.kb", "o : A")
    empty = files("skip.act", "skip")
    assert run_json(capsys, "certify", "--plan", empty, "--pre", same, "--goal", same,
                    "--backend", "dllite")[1]["verdict"] == "Certified"
    code, report = run_json(capsys, "certify", "--plan", empty, "--pre", files("top.kb", "Top <= Top"),
                            "--goal", same)
    assert code == 1 and report["verdict"] == "Refuted" and report["witness"]


def test_gen_and_synth(capsys, files, tmp_path):
    src = files("phi.qbf", "e p\na q\nmatrix p | q\n")
    out = tmp_path / "qbf"
    code, report = run_json(capsys, "gen", "qbf", src, "--out-dir", out)
    assert code == 0 and "instance.txt" in report["details"]["files"]
    code, report = run_json(capsys, "synth", "--instance", out / "instance.txt", "--backend", "dllite")
    assert code == 0 and report["details"]["certification"] == "Certified"
    assert [s["action_index"] for s in report["plan"]] == [0]

    false_src = files("psi.qbf", "e p\na q\nmatrix p & q\n")
    run(capsys, "gen", "qbf", false_src, "--out-dir", tmp_path / "psi")
    assert run(capsys, "synth", "--instance", tmp_path / "psi" / "instance.txt", "--backend", "dllite")[0] == 1


def test_gen_3col_round_trip(capsys, files, tmp_path):
    src = files("k3.graph", "vertices 3\n1 2\n2 3\n1 3\n")
    out = tmp_path / "k3"
    assert run(capsys, "gen", "3col", src, "--out-dir", out)[0] == 0
    code, report = run_json(capsys, "verify", "--kb", out / "k.kb", "--action", out / "alpha.act",
                            "--max-domain", 1)
    assert code == 1
    assert run(capsys, "gen", "3col", files("bad.graph", "1 1\n"), "--out-dir", out)[0] == 2


def test_usage_errors(capsys, data_dir, files):
    assert run(capsys, "model-check", "--interp", data_dir / "missing.gsd", "--kb", data_dir / "k1.kb")[0] == 2
    code, report = run_json(capsys, "check-sat", "--kb", files("bad.kb", "o : "))
    assert code == 2 and report["outcome"] == "error"
    with pytest.raises(SystemExit) as info:
        main(["verify", "--max-domain", "-1"])
    assert info.value.code == 2
    with pytest.raises(SystemExit):
        main(["frobnicate"])


def test_entry_point(data_dir):
    proc = subprocess.run([sys.executable, "-m", "gsdact", "model-check", "--interp", str(data_dir / "i1.gsd"),
                           "--kb", str(data_dir / "k1.kb")], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip() == "Models"
    proc = subprocess.run([sys.executable, "-m", "gsdact", "verify", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0 and "bounded" in proc.stdout and "dllite" in proc.stdout
