"""Acceptance gate: one test per criterion, each printing a pass/fail line."""

import random
import time
from pathlib import Path

import conftest
import differential
import oracle
import test_checker as checker_cases
import test_logic as logic_cases
from iftc.driver import main, run_bench
from iftc.interp import evaluate_call, membership
from iftc.logic import Is, IsNot, join, update
from iftc.syntax.parser import parse_source
from iftc.types import BOTTOM, STRING, union

CORPUS = Path(__file__).resolve().parent.parent / "corpus"
CORE_ITEMS = 13


def record(number, passed, message):
    conftest.ACCEPTANCE[number] = (passed, message)
    print(f"criterion {number}: {'PASS' if passed else 'FAIL'}  {message}")
    assert passed, message


def timed_bench(corpus):
    start = time.perf_counter()
    report = run_bench(corpus)
    return report, time.perf_counter() - start


def test_criterion_1_core_benchmark():
    report, seconds = timed_bench(CORPUS / "core")
    failed = [r.item for r in report.rows if not r.passed]
    ok = report.passed == CORE_ITEMS == len(report.rows) and seconds < 1.0
    record(1, ok, f"core {report.passed}/{len(report.rows)} in {seconds:.2f}s"
                  + (f"; failing {failed}" if failed else ""))


def test_criterion_2_example_programs():
    report, seconds = timed_bench(CORPUS / "examples")
    names = [r.item for r in report.rows]
    ok = (report.ok and names == ["filter", "flatten", "tree_node", "rainfall"]
          and seconds < 1.0)
    record(2, ok, f"examples {report.passed}/{len(report.rows)} in {seconds:.2f}s")


def test_criterion_3_algebra_oracle(algebra_sweep):
    n_types = len(algebra_sweep["types"])
    bad = {k: len(algebra_sweep[k]) for k in ("subtype", "intersect", "subtract", "exact")}
    ok = (len(oracle.VALUES) <= 500 and n_types <= 2000 and not any(bad.values())
          and algebra_sweep["seconds"] < 30)
    record(3, ok, f"{len(oracle.VALUES)} values x {n_types} types, "
                  f"mismatches {bad}, {algebra_sweep['seconds']:.1f}s")


def narrowing_counterexamples(n=1000):
    alg = logic_cases.ALG
    look = logic_cases.safe_lookup
    bad = {"monotone": 0, "cover": 0, "join": 0, "duality": 0}
    for rng, env, prop in logic_cases.instances(n, seed=2024):
        after = update(env, prop, alg)
        for p in logic_cases.PATHS:
            before = look(env, p)
            if before is not None and not alg.subtype(look(after, p) or BOTTOM, before):
                bad["monotone"] += 1
        p, t = rng.choice(logic_cases.PATHS), rng.choice(logic_cases.TESTABLE)
        before = look(env, p)
        if before is not None:
            pos = look(update(env, Is(p, t), alg), p) or BOTTOM
            neg = look(update(env, IsNot(p, t), alg), p) or BOTTOM
            bad["cover"] += not alg.subtype(before, alg.normalize(union(pos, neg)))
        other = update(env, logic_cases.random_prop(rng), alg)
        ab, ba, aa = join(after, other, alg), join(other, after, alg), join(after, after, alg)
        for q in logic_cases.PATHS:
            l1, l2, l3, l0 = look(ab, q), look(ba, q), look(aa, q), look(after, q)
            if (l1 is None) != (l2 is None) or (l1 is not None and not alg.equivalent(l1, l2)):
                bad["join"] += 1
            if after.live and l0 is not None and not alg.equivalent(l3, l0):
                bad["join"] += 1
    rng = random.Random(2024)
    for _ in range(n):
        plain, flipped = checker_cases.polarity_instance(rng)
        bad["duality"] += plain != flipped
    return bad


def test_criterion_4_narrowing_properties():
    bad = narrowing_counterexamples(1000)
    record(4, not any(bad.values()), f"1000 instances, counterexamples {bad}")


def predicate_witness():
    program = parse_source((CORPUS / "core/predicate_checked_failure.ift").read_text())
    for v in (0, 1, 2, -1, 0.5, 999):
        if evaluate_call(program, "f", [v]) is True and not membership(v, STRING):
            return v
    return None


def test_criterion_5_differential_soundness():
    findings = differential.run(sorted(CORPUS.glob("*/*_success.ift")), samples=60)
    fewest = min(findings.per_function.values())
    witness = predicate_witness()
    ok = (not findings.confusions and not findings.infidelities and fewest >= 50
          and witness is not None)
    record(5, ok, f"{findings.calls} calls over {len(findings.per_function)} functions "
                  f"(min {fewest} each), type-confusion {len(findings.confusions)}, "
                  f"predicate violations {len(findings.infidelities)}, witness f({witness}) = true")


def test_criterion_6_report_fidelity(capsys):
    runs = []
    for _ in range(2):
        out = {}
        for fmt in ("text", "md", "tex"):
            code = main(["bench", str(CORPUS / "core"), "-f", fmt])
            out[fmt] = (code, capsys.readouterr().out)
        runs.append(out)
    tex = runs[0]["tex"][1].splitlines()
    items = [r.item for r in run_bench(CORPUS / "core").rows]
    tex_rows = [line for line in tex[1:] if not line.startswith("%")]
    md_rows = runs[0]["md"][1].splitlines()[2:2 + len(items)]
    text_rows = runs[0]["text"][1].splitlines()[1:1 + len(items)]
    ok = (
        runs[0] == runs[1]
        and tex[0] == r"Benchmark & iftc \\"
        and tex_rows == [i.replace("_", r"\_") + r" & O \\" for i in items]
        and md_rows == [f"| {i} | O |" for i in items]
        and [r.split() for r in text_rows] == [[i, "O"] for i in items]
        and all(code == 0 for code, _ in runs[0].values())
    )
    record(6, ok, f"tex/md/text agree on {len(items)} rows, byte-identical across runs: "
                  f"{runs[0] == runs[1]}")
