"""Command-line front end.

Exit codes: 0 positive or consistent, 1 negative or refuted, 2 usage or
input error, 3 budget exceeded, 4 input outside the lightweight fragment.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import os
import sys
import time
from pathlib import Path

from . import __version__, printer
from . import syntax as S
from .actions import execute
from .errors import BudgetExceeded, FragmentViolation, GsdError
from .interpretation import InterpretationSyntaxError, models, parse_interpretation, print_interpretation
from .parser import ParseError, parse_action, parse_bindings, parse_formula
from .planning import Refuted, UnknownUpTo, certify, find_plan, plan_exists, synthesize
from .reductions import ReductionInputError, gen_3col, gen_qbf, parse_graph, parse_qbf
from .regression import tr, tr_branches_neg, tr_branches_pos
from .satisfiability import NoModelUpTo, Satisfiable, sat_bounded, sat_dllite
from .verification import NoCounterexampleUpTo, NotPreserving, verify_pre_post

SCHEMA_VERSION = "1.0"
EXIT_POSITIVE, EXIT_NEGATIVE, EXIT_USAGE, EXIT_BUDGET, EXIT_FRAGMENT = range(5)

BUDGET_ENV = {
    "node_budget": "GSDACT_NODE_BUDGET",
    "time_budget": "GSDACT_TIME_BUDGET",
    "state_budget": "GSDACT_STATE_BUDGET",
    "candidate_budget": "GSDACT_CANDIDATE_BUDGET",
    "clause_budget": "GSDACT_CLAUSE_BUDGET",
}

SOUNDNESS_NOTE = """\
backends:
  dllite   complete decision procedure for the lightweight fragment under
           unique names; verdicts are definitive.  Rejects other input
           with exit code 4.
  bounded  finite model search up to --max-domain elements for the full
           logic; a model or counterexample found is genuine, but a negative
           search only covers models up to that size, so it never claims
           preservation or certification outright.
"""


class UsageError(Exception):
    pass


class Report:
    def __init__(self, command: str):
        self.command = command
        self.verdict: str | None = None
        self.message = ""
        self.details: dict = {}
        self.witness: str | None = None
        self.plan: list | None = None
        self.diagnostics: list = []
        self.text: list = []

    def to_json(self, outcome: str, code: int, elapsed: float) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "outcome": outcome,
            "exit_code": code,
            "verdict": self.verdict,
            "message": self.message,
            "details": self.details,
            "witness": self.witness,
            "plan": self.plan,
            "diagnostics": [str(d) for d in self.diagnostics],
            "elapsed_seconds": round(elapsed, 6),
        }


# -- input helpers -------------------------------------------------------------------


def _read(path) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _formula(path):
    return parse_formula(_read(path))


def _action(path):
    return parse_action(_read(path))


def _interp(path):
    return parse_interpretation(_read(path))


def _bind(action, bindings):
    sigma = parse_bindings(bindings or [])
    return S.apply_substitution(action, sigma) if sigma else action


def _una(args, default: bool) -> bool:
    if getattr(args, "una", None) is None:
        return default
    return args.una == "on"


def _write(path, text: str):
    Path(path).write_text(text)


def _sigma_json(sigma: dict) -> dict:
    return {str(k): str(v) for k, v in sigma.items()}


def _sigma_text(sigma: dict) -> str:
    return ", ".join(f"{k}={v}" for k, v in sigma.items()) or "no variables"


def _plan_json(plan, names) -> list:
    return [{"action_index": s.action_index,
             "action_file": names[s.action_index] if names else None,
             "substitution": _sigma_json(s.substitution),
             "action": printer.action_inline(s.action)} for s in plan.steps]


def plan_text(plan, names=None) -> str:
    """A plan as one action file, each step preceded by a provenance comment."""
    if not plan.steps:
        return "# plan of length 0\nskip\n"
    chunks = []
    for i, s in enumerate(plan.steps, 1):
        src = f"action {s.action_index}" + (f" ({names[s.action_index]})" if names else "")
        body = printer.action(s.action).rstrip("\n")
        chunks.append(f"# step {i}: {src} with {_sigma_text(s.substitution)}\n{body}")
    return f"# plan of length {len(plan.steps)}\n" + " ;\n".join(chunks) + "\n"


def _load_instance(args):
    """Fill pre/goal/actions/length from --instance when given."""
    if not args.instance:
        if not (args.pre and args.goal and args.action):
            raise UsageError("give --instance, or all of --pre, --goal and --action")
        return
    base = Path(args.instance).parent
    pre = goal = None
    actions = []
    length = None
    for lineno, raw in enumerate(_read(args.instance).splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, val = line.partition(" ")
        val = val.strip()
        if key == "pre":
            pre = str(base / val)
        elif key == "goal":
            goal = str(base / val)
        elif key == "action":
            actions.append(str(base / val))
        elif key == "length":
            length = int(val)
        else:
            raise UsageError(f"{args.instance}:{lineno}: unknown key {key!r}")
    args.pre = args.pre or pre
    args.goal = args.goal or goal
    args.action = args.action or actions
    if args.max_length is None:
        args.max_length = length
    if not (args.pre and args.goal and args.action):
        raise UsageError(f"{args.instance} lacks pre, goal or action entries")


# -- verbs ------------------------------------------------------------------------------


def cmd_check_sat(args, rep: Report) -> int:
    kb = _formula(args.kb)
    if args.backend == "dllite":
        if args.una == "off":
            raise UsageError("the dllite backend always assumes unique names")
        verdict = sat_dllite(kb)
    else:
        verdict = sat_bounded(kb, args.max_domain, una=_una(args, False))
    rep.verdict = type(verdict).__name__
    if isinstance(verdict, Satisfiable):
        rep.witness = print_interpretation(verdict.witness)
        rep.message = "satisfiable"
        rep.text += ["Satisfiable", rep.witness.rstrip("\n")]
        if args.out:
            _write(args.out, rep.witness)
        return EXIT_POSITIVE
    if isinstance(verdict, NoModelUpTo):
        rep.details["bound"] = verdict.bound
        rep.message = f"no model with at most {verdict.bound} elements"
        rep.text.append(f"NoModelUpTo {verdict.bound}")
    else:
        rep.message = "unsatisfiable"
        rep.text.append("Unsatisfiable")
    return EXIT_NEGATIVE


def cmd_model_check(args, rep: Report) -> int:
    interp = _interp(args.interp)
    kb = _formula(args.kb)
    ok = models(interp, kb)
    rep.verdict = "Models" if ok else "NotModels"
    rep.message = "the interpretation satisfies the formula" if ok else "the interpretation violates the formula"
    if not ok:
        failing = [printer.formula(c) for c in S.conjuncts(kb) if not models(interp, c)]
        rep.details["failing_conjuncts"] = failing
        rep.text += ["NotModels"] + [f"  fails: {f}" for f in failing]
    else:
        rep.text.append("Models")
    return EXIT_POSITIVE if ok else EXIT_NEGATIVE


def _trace_lines(trace) -> list:
    out = []
    for t in trace:
        where = ".".join(map(str, t.path))
        if t.op is None:
            out.append(f"{where}: guard {printer.formula(t.step.guard)} is {'true' if t.guard_value else 'false'}")
        else:
            sign = "+=" if t.op.mode == "add" else "-="
            items = sorted(", ".join(x) if isinstance(x, tuple) else x for x in t.op.payload)
            out.append(f"{where}: {t.op.target} {sign} {{{'; '.join(items)}}}")
    return out


def cmd_exec(args, rep: Report) -> int:
    interp = _interp(args.interp)
    action = _bind(_action(args.action), args.bind)
    if not S.is_ground(action):
        free = ", ".join(str(v) for v in S.free_variables(action))
        raise UsageError(f"action has unbound variables ({free}); bind them with --bind ?x=o")
    trace: list = []
    result = execute(interp, action, trace)
    out = print_interpretation(result)
    lines = _trace_lines(trace)
    rep.verdict = "Executed"
    rep.witness = out
    rep.details["trace"] = lines
    if args.out:
        _write(args.out, out)
    else:
        rep.text.append(out.rstrip("\n"))
    if args.trace:
        print("\n".join(f"# {ln}" for ln in lines), file=sys.stderr)
    return EXIT_POSITIVE


def cmd_regress(args, rep: Report) -> int:
    kb = _formula(args.kb)
    action = _bind(_action(args.action), args.bind)
    if not S.is_ground(action):
        free = ", ".join(str(v) for v in S.free_variables(action))
        raise UsageError(f"action has unbound variables ({free}); bind them with --bind ?x=o")
    rep.verdict = "Regressed"
    if args.branches:
        gen = tr_branches_neg if args.branches == "neg" else tr_branches_pos
        items = []
        for choice, f in gen(action, kb):
            items.append({"branch": str(choice), "formula": printer.formula(f)})
            rep.text += [f"# branch {choice}", printer.formula_lines(f).rstrip("\n"), ""]
        rep.details["branches"] = items
    else:
        f = tr(action, kb)
        rep.details["formula"] = printer.formula(f)
        rep.text.append(printer.formula_lines(f).rstrip("\n"))
    return EXIT_POSITIVE


def cmd_verify(args, rep: Report) -> int:
    action = _action(args.action)
    if args.kb:
        if args.pre or args.post:
            raise UsageError("use either --kb or --pre/--post")
        pre = post = _formula(args.kb)
    elif args.pre and args.post:
        pre, post = _formula(args.pre), _formula(args.post)
    else:
        raise UsageError("give --kb, or both --pre and --post")
    if args.backend == "dllite" and args.una == "off":
        raise UsageError("the dllite backend always assumes unique names")
    verdict = verify_pre_post(action, pre, post, args.backend, args.max_domain, una=_una(args, False))
    rep.verdict = type(verdict).__name__
    if isinstance(verdict, NotPreserving):
        rep.witness = print_interpretation(verdict.counterexample)
        rep.details.update(branch=str(verdict.branch), grounding=_sigma_json(verdict.grounding),
                           ground_action=printer.action_inline(verdict.ground_action))
        rep.message = "the action can violate the postcondition"
        rep.text += ["NotPreserving", f"# branch {verdict.branch}; grounding {_sigma_text(verdict.grounding)}",
                     rep.witness.rstrip("\n")]
        if args.out:
            _write(args.out, rep.witness)
        return EXIT_NEGATIVE
    if isinstance(verdict, NoCounterexampleUpTo):
        rep.details["bound"] = verdict.bound
        rep.message = f"no counterexample with at most {verdict.bound} elements"
        rep.text.append(f"NoCounterexampleUpTo {verdict.bound}")
    else:
        rep.details["proof"] = verdict.proof
        rep.message = "preserving"
        rep.text.append("Preserving")
    return EXIT_POSITIVE


def cmd_plan(args, rep: Report) -> int:
    interp = _interp(args.interp)
    actions = [_action(p) for p in args.action]
    goal = _formula(args.goal)
    plan = find_plan(interp, actions, goal, args.extra, args.max_length)
    if plan is None:
        rep.verdict = "NoPlan"
        rep.message = "no plan reaches the goal"
        rep.text.append("NoPlan")
        return EXIT_NEGATIVE
    rep.verdict = "Plan"
    rep.plan = _plan_json(plan, args.action)
    rep.details["length"] = len(plan)
    rep.witness = print_interpretation(plan.initial)
    text = plan_text(plan, args.action)
    rep.text.append(text.rstrip("\n"))
    if args.out:
        _write(args.out, text)
    return EXIT_POSITIVE


def cmd_plan_exists(args, rep: Report) -> int:
    _load_instance(args)
    actions = [_action(p) for p in args.action]
    pre, goal = _formula(args.pre), _formula(args.goal)
    res = plan_exists(actions, pre, goal, args.max_length or 0, args.backend, args.max_domain)
    if res is None:
        rep.verdict = "NoPlan"
        rep.message = "no substitution, model and plan found"
        rep.text.append("NoPlan")
        return EXIT_NEGATIVE
    rep.verdict = "PlanExists"
    rep.plan = _plan_json(res.plan, args.action)
    rep.witness = print_interpretation(res.witness)
    rep.details.update(substitution=_sigma_json(res.substitution), length=len(res.plan))
    text = plan_text(res.plan, args.action)
    rep.text += [f"# substitution {_sigma_text(res.substitution)}", text.rstrip("\n"),
                 "# initial interpretation", rep.witness.rstrip("\n")]
    if args.out:
        _write(args.out, text)
    return EXIT_POSITIVE


def _certify_report(verdict, rep: Report) -> int:
    rep.verdict = type(verdict).__name__
    if isinstance(verdict, Refuted):
        rep.witness = print_interpretation(verdict.counterexample)
        rep.details.update(substitution=_sigma_json(verdict.substitution), branch=str(verdict.branch))
        rep.message = "the plan fails from some model of the precondition"
        rep.text += ["Refuted", f"# substitution {_sigma_text(verdict.substitution)}; branch {verdict.branch}",
                     rep.witness.rstrip("\n")]
        return EXIT_NEGATIVE
    if isinstance(verdict, UnknownUpTo):
        rep.details["bound"] = verdict.bound
        rep.message = f"no counterexample with at most {verdict.bound} elements"
        rep.text.append(f"UnknownUpTo {verdict.bound}")
    else:
        rep.message = "certified"
        rep.text.append("Certified")
    return EXIT_POSITIVE


def cmd_certify(args, rep: Report) -> int:
    plan = _action(args.plan)
    verdict = certify([plan], _formula(args.pre), _formula(args.goal), args.backend, args.max_domain)
    return _certify_report(verdict, rep)


def cmd_synth(args, rep: Report) -> int:
    _load_instance(args)
    actions = [_action(p) for p in args.action]
    pre, goal = _formula(args.pre), _formula(args.goal)
    res = synthesize(actions, pre, goal, args.max_length or 0, args.backend, args.max_domain)
    if res is None:
        rep.verdict = "NoPlan"
        rep.message = "every candidate sequence was refuted"
        rep.text.append("NoPlan")
        return EXIT_NEGATIVE
    rep.verdict = "Synthesized"
    rep.plan = _plan_json(res.plan, args.action)
    rep.details.update(length=len(res.plan), candidates=res.candidates,
                       certification=type(res.verdict).__name__)
    if isinstance(res.verdict, UnknownUpTo):
        rep.details["bound"] = res.verdict.bound
    text = plan_text(res.plan, args.action)
    rep.text += [f"# {type(res.verdict).__name__} after {res.candidates} candidates", text.rstrip("\n")]
    if args.out:
        _write(args.out, text)
    return EXIT_POSITIVE


def cmd_gen(args, rep: Report) -> int:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    if args.kind == "3col":
        g = parse_graph(_read(args.source))
        kb, action = gen_3col(g)
        (out / "k.kb").write_text(printer.formula_lines(kb))
        (out / "alpha.act").write_text(printer.action(action))
        written = ["k.kb", "alpha.act"]
        rep.details.update(vertices=g.n, edges=len(g.edges))
    else:
        phi = parse_qbf(_read(args.source))
        inst = gen_qbf(phi)
        (out / "pre.kb").write_text(printer.formula_lines(inst.pre))
        (out / "goal.kb").write_text(printer.formula_lines(inst.goal))
        lines = [f"length {inst.k}", "pre pre.kb", "goal goal.kb"]
        written = ["pre.kb", "goal.kb"]
        for i, a in enumerate(inst.actions):
            name = f"act{i}.act"
            (out / name).write_text(printer.action(a))
            lines.append(f"action {name}")
            written.append(name)
        (out / "instance.txt").write_text("\n".join(lines) + "\n")
        written.append("instance.txt")
        rep.details.update(exists=len(phi.exists), forall=len(phi.forall))
    rep.verdict = "Generated"
    rep.details["files"] = written
    rep.text += [str(out / w) for w in written]
    return EXIT_POSITIVE


# -- argument parsing ----------------------------------------------------------------------


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("output and budgets")
    g.add_argument("--json", action="store_true", help="print a JSON report instead of text")
    g.add_argument("--deterministic", action="store_true",
                   help="sequential search order (the only mode; accepted for scripts)")
    g.add_argument("--node-budget", type=int, help="formula nodes for regression (default 1000000)")
    g.add_argument("--time-budget", type=float, help="wall-clock seconds for search (default unlimited)")
    g.add_argument("--state-budget", type=int, help="states explored by 'plan' (default 200000)")
    g.add_argument("--candidate-budget", type=int,
                   help="candidate sequences for 'plan-exists' and 'synth' (default 100000)")
    g.add_argument("--clause-budget", type=int, help="clauses per bounded SAT encoding (default 5000000)")
    return p


def _backend(p, una=True):
    p.add_argument("--backend", choices=("bounded", "dllite"), default="bounded")
    p.add_argument("--max-domain", type=_nonneg, default=4, help="domain bound for the bounded backend")
    if una:
        p.add_argument("--una", choices=("on", "off"), help="unique names (bounded default off; dllite always on)")


def _nonneg(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gsdact",
        description="Reason about actions over description-logic knowledge bases.",
        epilog=SOUNDNESS_NOTE,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    common = _common()

    def verb(name, help_text):
        return sub.add_parser(name, parents=[common], help=help_text, description=help_text,
                              epilog=SOUNDNESS_NOTE, formatter_class=argparse.RawDescriptionHelpFormatter)

    p = verb("check-sat", "finite satisfiability of a knowledge base")
    p.add_argument("--kb", required=True)
    _backend(p)
    p.add_argument("--out", help="write the witness interpretation here")
    p.set_defaults(func=cmd_check_sat)

    p = verb("model-check", "does an interpretation satisfy a knowledge base")
    p.add_argument("--interp", required=True)
    p.add_argument("--kb", required=True)
    p.set_defaults(func=cmd_model_check)

    p = verb("exec", "execute an action on an interpretation")
    p.add_argument("--interp", required=True)
    p.add_argument("--action", required=True)
    p.add_argument("--bind", action="append", metavar="?x=o", help="variable binding (repeatable)")
    p.add_argument("--out", help="write the result here instead of standard output")
    p.add_argument("--trace", action="store_true", help="print the step trace to standard error")
    p.set_defaults(func=cmd_exec)

    p = verb("regress", "regress a knowledge base through an action")
    p.add_argument("--kb", required=True)
    p.add_argument("--action", required=True)
    p.add_argument("--bind", action="append", metavar="?x=o")
    p.add_argument("--branches", nargs="?", const="neg", choices=("neg", "pos"),
                   help="list branch formulas of the negated (default) or positive regression")
    p.set_defaults(func=cmd_regress)

    p = verb("verify", "is an action knowledge-base preserving")
    p.add_argument("--action", required=True)
    p.add_argument("--kb", help="constraint knowledge base (pre and post)")
    p.add_argument("--pre")
    p.add_argument("--post")
    _backend(p)
    p.add_argument("--out", help="write the counterexample here")
    p.set_defaults(func=cmd_verify)

    p = verb("plan", "shortest plan from an interpretation")
    p.add_argument("--interp", required=True)
    p.add_argument("--action", action="append", required=True, help="action file (repeatable)")
    p.add_argument("--goal", required=True)
    p.add_argument("-k", "--extra", type=_nonneg, default=0, help="fresh elements added to the domain")
    p.add_argument("--max-length", type=_nonneg, help="plan length cap")
    p.add_argument("--out", help="write the plan as an action file")
    p.set_defaults(func=cmd_plan)

    for name, fn, text in (("plan-exists", cmd_plan_exists, "is there a model of the precondition with a plan"),
                           ("synth", cmd_synth, "find a plan that works from every model of the precondition")):
        p = verb(name, text)
        p.add_argument("--instance", help="instance file listing pre, goal, actions and length")
        p.add_argument("--action", action="append", help="action file (repeatable)")
        p.add_argument("--pre")
        p.add_argument("--goal")
        p.add_argument("--max-length", type=_nonneg, help="plan length bound (default 0)")
        _backend(p, una=False)
        p.add_argument("--out", help="write the plan as an action file")
        p.set_defaults(func=fn)

    p = verb("certify", "does a fixed plan work from every model of the precondition")
    p.add_argument("--plan", required=True, help="action file")
    p.add_argument("--pre", required=True)
    p.add_argument("--goal", required=True)
    _backend(p, una=False)
    p.set_defaults(func=cmd_certify)

    p = verb("gen", "compile 3-colouring or QBF instances")
    p.add_argument("kind", choices=("3col", "qbf"))
    p.add_argument("source", help="edge-list file (3col) or prefix-matrix file (qbf)")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_gen)
    return parser


@contextlib.contextmanager
def _budget_env(args):
    saved = {}
    for attr, var in BUDGET_ENV.items():
        val = getattr(args, attr, None)
        if val is not None:
            saved[var] = os.environ.get(var)
            os.environ[var] = str(val)
    try:
        yield
    finally:
        for var, old in saved.items():
            if old is None:
                os.environ.pop(var, None)
            else:
                os.environ[var] = old


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    rep = Report(args.command)
    start = time.perf_counter()
    outcome = "positive"
    try:
        with _budget_env(args):
            code = args.func(args, rep)
        outcome = "positive" if code == EXIT_POSITIVE else "negative"
    except BudgetExceeded as exc:
        code, outcome = EXIT_BUDGET, "budget"
        rep.message = str(exc)
        rep.details.update(getattr(exc, "detail", {}))
    except FragmentViolation as exc:
        code, outcome = EXIT_FRAGMENT, "fragment"
        rep.message = "input is outside the lightweight fragment"
        rep.diagnostics = list(exc.diagnostics)
    except (UsageError, ParseError, InterpretationSyntaxError, ReductionInputError, GsdError, ValueError) as exc:
        code, outcome = EXIT_USAGE, "error"
        rep.message = str(exc)
    elapsed = time.perf_counter() - start
    if args.json:
        print(json.dumps(rep.to_json(outcome, code, elapsed), indent=2))
    else:
        if rep.text:
            print("\n".join(rep.text))
        if outcome in ("budget", "error", "fragment"):
            print(f"gsdact {args.command}: {rep.message}", file=sys.stderr)
            for d in rep.diagnostics:
                print(f"  {d}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
