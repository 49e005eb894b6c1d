import random
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from iftc.checker import FunctionChecker, SynthResult, check_file, check_source, result
from iftc.driver import parse_expectations
from iftc.logic import FF, LENGTH, TT, And, Env, Is, IsNot, lookup, var
from iftc.syntax.parser import parse_expression, parse_source
from iftc.syntax.resolve import resolve
from iftc.typealg import Algebra
from iftc.types import BOOLEAN, FALSE, NUMBER, STRING, TOP, TRUE, NumLitT, TupleT, union

CORPUS = Path(__file__).resolve().parent.parent / "corpus"
FILES = sorted(CORPUS.glob("*/*.ift"))


def diags(src):
    return [(d.line, d.code) for d in check_source(src)]


def synth_in(src, fun, expr, **bindings):
    """Synthesize ``expr`` inside ``fun`` of ``src`` with extra bindings."""
    rp = resolve(parse_source(src))
    fc = FunctionChecker(rp, fun)
    env = Env()
    for name, t in bindings.items():
        env = env.bind(name, t, mutable=True)
    return fc.synth(env, parse_expression(expr)), fc


HOST = "define h(x: Top) -> Number:\n  return 0\n"


# -- expressions --------------------------------------------------------------

def test_is_test_propositions():
    r, _ = synth_in(HOST, "h", "x is String", x=TOP)
    assert r == SynthResult(BOOLEAN, Is(var("x"), STRING), IsNot(var("x"), STRING))


def test_if_expression_conjunction():
    r, _ = synth_in(HOST, "h", "if x is Number: y is String else: false", x=TOP, y=TOP)
    assert r.pos == And(Is(var("x"), NUMBER), Is(var("y"), STRING))


def test_length_test():
    t = union(TupleT((NUMBER, NUMBER)), TupleT((STRING, STRING, STRING)))
    r, _ = synth_in(HOST, "h", "Tuple.length(x) is 2", x=t)
    assert r.pos == Is(var("x", LENGTH), NumLitT(2))
    assert r.neg == IsNot(var("x", LENGTH), NumLitT(2))


def test_literal_precision():
    r, _ = synth_in(HOST, "h", "x is Number", x=NUMBER)
    assert r.type == TRUE and r.neg == FF
    r, _ = synth_in(HOST, "h", "x is String", x=NUMBER)
    assert r.type == FALSE and r.pos == FF
    r, _ = synth_in(HOST, "h", "not (x is String)", x=NUMBER)
    assert r.type == TRUE


def test_result_invariant():
    alg = Algebra()
    assert result(alg, FALSE, TT, TT).pos == FF
    assert result(alg, TRUE, TT, TT).neg == FF


def test_not_swaps():
    r, _ = synth_in(HOST, "h", "not (x is String)", x=TOP)
    assert (r.pos, r.neg) == (IsNot(var("x"), STRING), Is(var("x"), STRING))


def test_equality_never_narrows():
    r, _ = synth_in(HOST, "h", "x == 1", x=TOP)
    assert (r.pos, r.neg) == (TT, TT)


# -- functions ------------------------------------------------------------------

def test_add_to_top():
    assert diags("define f(x: Top) -> Number:\n  return x + 1\n") == [(2, "E100")]


def test_assert_narrows():
    assert diags("define f(x: Top) -> Number:\n  assert x is Number\n  return x + 1\n") == []


def test_missing_return():
    assert diags("define f(x: Top) -> Number:\n  if x is Number:\n    return x\n") == [(2, "E111")]


def test_empty_program():
    assert diags("") == []


def test_dead_branch_skipped():
    src = "define f(x: Number) -> Number:\n  if x is String:\n    return x + \"a\"\n  return x\n"
    assert diags(src) == []


@pytest.mark.parametrize("code,src", [
    ("E101", "define f(x: Number | Tuple(Number, Number)) -> Top:\n  return x[0]\n"),
    ("E103", "define f(x: Top) -> Number:\n  if 1:\n    return 1\n  return 0\n"),
    ("E104", "define f(x: Top) -> Number:\n  if x is (y: Number) -> Number:\n    return 1\n  return 0\n"),
    ("E105", "define f(d: Object(Number)) -> Number:\n  return d[\"k\"]\n"),
    ("E106", "define f(x: Top) -> Number:\n  if x:\n    return 1\n  return 0\n"),
    ("E107", "define g(x: Number) -> Number:\n  return x\ndefine f() -> Number:\n  return g(1, 2)\n"),
    ("E108", "define g[T](x: Number) -> Number:\n  return x\ndefine f() -> Number:\n  return g(1)\n"),
    ("E109", "define f(x: Number) -> Number:\n  return x(1)\n"),
    ("E110", "define f(x: Top) -> x is String:\n  return 1\n"),
    ("E201", "define g(x: Top) -> x is Number | Boolean:\n  return x is Number\n"),
    ("E202", "define f(x: Top) -> x is String:\n  x = 1\n  return x is String\n"),
])
def test_error_codes(code, src):
    assert [c for _, c in diags(src)] == [code]


def test_has_field_guards_map_index():
    src = ("define f(d: Object(Number)) -> Number:\n"
           "  if has_field(d, \"k\"):\n    return d[\"k\"]\n  return 0\n")
    assert diags(src) == []


def test_predicate_verification():
    ok = "define f(x: Top) -> x is String:\n  return x is String\n"
    assert diags(ok) == []
    wide = "define f(x: Top) -> x is String:\n  return x is String or x is Number\n"
    assert diags(wide) == [(2, "E200")]
    asym = "define f(x: String | Number) -> implies x is Number:\n  return x is Number and x > 0\n"
    assert diags(asym) == []


def test_symmetric_call_narrows_both_ways():
    src = ("define f(x: String | Number) -> x is String:\n  return x is String\n"
           "define g(x: String | Number) -> Number:\n"
           "  if f(x):\n    return String.length(x)\n  else:\n    return x\n")
    assert diags(src) == []


def test_asymmetric_call_leaves_else_unrefined():
    src = ("define f(x: String | Number) -> implies x is Number:\n  return x is Number\n"
           "define g(x: String | Number) -> Number:\n"
           "  if f(x):\n    return x + 1\n  else:\n    return String.length(x)\n")
    assert diags(src) == [(7, "E100")]


def test_filter_generic_call():
    assert check_file(CORPUS / "examples/filter_success.ift") == []


def test_single_pass_loop():
    src = ("define f(xs: List(Number)) -> Number:\n  var t = 0\n"
           "  for v in xs:\n    t = t + v\n  return t\n")
    assert diags(src) == []
    assert diags("define f(xs: Number) -> Number:\n  for v in xs:\n    return v\n  return 0\n") == [(2, "E100")]


def test_loop_clears_assigned_refinements():
    src = ("define f(xs: List(Number), y: Top) -> Number:\n  var z: Top = 1\n"
           "  for v in xs:\n    z = z + 1\n    z = \"a\"\n  return 0\n")
    # z is Top again at the top of the body, so z + 1 is rejected
    assert diags(src) == [(4, "E100")]


def test_nesting_body_failure_single_error():
    found = check_file(CORPUS / "core/nesting_body_failure.ift")
    assert [d.code for d in found] == ["E100"]


def test_predicate_2way_failure_location():
    found = check_file(CORPUS / "core/predicate_2way_failure.ift")
    assert [(d.line, d.code) for d in found] == [(8, "E100")]


def test_diagnostic_spans_inside_file():
    for path in FILES:
        lines = path.read_text().splitlines()
        for d in check_file(path):
            assert 1 <= d.line <= len(lines)


# -- corpus -------------------------------------------------------------------------

@pytest.mark.parametrize("path", FILES, ids=lambda p: p.name)
def test_corpus_contract(path):
    exp = parse_expectations(path)
    found = check_file(path)
    if exp.verdict == "success":
        assert found == []
    else:
        assert found
        assert exp.error_lines <= {d.line for d in found}


def test_deterministic():
    for path in FILES:
        assert check_file(path) == check_file(path)


# -- desugaring -----------------------------------------------------------------------

CONNECTIVES = [
    ("x is String and y is Number", "if x is String: y is Number else: false"),
    ("x is String or y is Number", "if x is String: true else: y is Number"),
    ("not (x is String) and (y is Number or x is Number)",
     "if not (x is String): (if y is Number: true else: x is Number) else: false"),
    ("x[0] is Number or x[1] is String", "if x[0] is Number: true else: x[1] is String"),
]


@pytest.mark.parametrize("sugar,core", CONNECTIVES)
def test_and_or_desugar(sugar, core):
    env = dict(x=TupleT((TOP, TOP)), y=union(STRING, NUMBER))
    a, _ = synth_in(HOST, "h", sugar, **env)
    b, _ = synth_in(HOST, "h", core, **env)
    assert a == b


# -- polarity duality ----------------------------------------------------------------

PREDS = ("define p(v: String | Number) -> v is String:\n  return v is String\n"
         "define q(v: String | Number) -> implies v is Number:\n  return v is Number\n")
X_TYPES = ["Top", "String | Number", "Tuple(Top, Top)", "String | Number | Boolean",
           "Tuple(Number, Number) | Tuple(String, String, String)"]
TESTS = ["Number", "String", "Boolean", "Tuple(Top, Top)", "String | Number", "2"]
USES = ["String.length(x)", "x + 1", "y + 1", "String.length(y)", "x[0] + 1",
        "Tuple.length(x) + 1", "0"]


def random_cond(rng, depth=2):
    if depth == 0 or rng.random() < 0.4:
        return rng.choice([
            f"x is {rng.choice(TESTS)}", f"y is {rng.choice(TESTS)}", "p(y)", "q(y)",
            f"x[0] is {rng.choice(TESTS)}", f"Tuple.length(x) is {rng.choice(['2', '3'])}",
        ])
    a, b = random_cond(rng, depth - 1), random_cond(rng, depth - 1)
    return rng.choice([f"({a}) and ({b})", f"({a}) or ({b})", f"not ({a})"])


def polarity_program(xt, cond, first, second):
    return (PREDS + f"define f(x: {xt}, y: String | Number) -> Number:\n"
            f"  if {cond}:\n    let a = {first}\n  else:\n    let b = {second}\n  return 0\n")


def branch_diags(src, then_line=7, else_line=9):
    out = set()
    for d in check_source(src):
        tag = {then_line: "then", else_line: "else"}.get(d.line, d.line)
        out.add((tag, d.code, d.message))
    return out


def polarity_instance(rng):
    xt, cond = rng.choice(X_TYPES), random_cond(rng)
    a, b = rng.choice(USES), rng.choice(USES)
    plain = branch_diags(polarity_program(xt, cond, a, b))
    flipped = branch_diags(polarity_program(xt, f"not ({cond})", b, a))
    swap = {"then": "else", "else": "then"}
    return plain, {(swap.get(t, t), c, m) for t, c, m in flipped}


def test_polarity_duality_examples():
    plain, flipped = polarity_instance(random.Random(0))
    assert plain == flipped


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32))
def test_polarity_duality(seed):
    plain, flipped = polarity_instance(random.Random(seed))
    assert plain == flipped


# -- flow monotonicity -----------------------------------------------------------------

@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32))
def test_flow_monotone_along_asserts(seed):
    rng = random.Random(seed)
    xt = rng.choice(X_TYPES)
    body = "".join(f"  assert {random_cond(rng, 1)}\n" for _ in range(4))
    src = PREDS + f"define f(x: {xt}, y: String | Number) -> Number:\n{body}  return 0\n"
    rp = resolve(parse_source(src))
    seen = []
    FunctionChecker(rp, "f", trace=lambda s, env: seen.append(env)).check()
    for before, after in zip(seen, seen[1:]):
        for name in ("x", "y"):
            assert rp.algebra.subtype(lookup(after, var(name), rp.algebra),
                                      lookup(before, var(name), rp.algebra))
