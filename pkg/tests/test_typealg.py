import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from iftc.typealg import Algebra, arity_filter, intersect, is_empty, normalize, subtract, subtype
from iftc.types import (
    BOOLEAN, BOTTOM, FALSE, NONE, NUMBER, STRING, SYMMETRIC, ASYMMETRIC, TOP, TRUE,
    AliasRef, FuncT, LatentPred, ListT, MapT, NumLitT, RecordT, TupleT, TypeVar, UnionT,
    render, union,
)

import oracle

U = union
T2 = TupleT((NUMBER, NUMBER))
T3 = TupleT((STRING, STRING, STRING))


# -- examples -------------------------------------------------------------------

def test_normalize_examples():
    assert normalize(UnionT(frozenset({STRING, NUMBER}))) == U(STRING, NUMBER)
    assert normalize(U(NumLitT(2), NUMBER)) == NUMBER
    assert normalize(U(TRUE, FALSE)) == BOOLEAN
    assert normalize(U(TRUE, BOOLEAN)) == BOOLEAN
    assert normalize(U(STRING, BOTTOM)) == STRING


def test_union_never_contains_top_or_bottom():
    assert U(STRING, TOP) == TOP
    assert U(BOTTOM, BOTTOM) == BOTTOM


def test_subtype_examples():
    assert subtype(NUMBER, U(STRING, NUMBER))
    assert subtype(ListT(NUMBER), ListT(TOP))
    assert not subtype(T2, TupleT((NUMBER, NUMBER, NUMBER)))
    assert subtype(NumLitT(2), NUMBER)
    assert subtype(TRUE, BOOLEAN) and subtype(FALSE, BOOLEAN)
    assert subtype(BOTTOM, STRING) and subtype(STRING, TOP)
    assert not subtype(TOP, U(STRING, NUMBER))


def test_subtype_latent_predicates():
    sym = FuncT((U(STRING, NUMBER),), BOOLEAN, LatentPred(SYMMETRIC, 0, STRING))
    asym = FuncT((U(STRING, NUMBER),), BOOLEAN, LatentPred(ASYMMETRIC, 0, STRING))
    plain = FuncT((U(STRING, NUMBER),), BOOLEAN)
    assert subtype(sym, asym)
    assert not subtype(asym, sym)
    assert subtype(sym, plain) and subtype(asym, plain)
    assert not subtype(plain, asym)
    other = FuncT((U(STRING, NUMBER),), BOOLEAN, LatentPred(SYMMETRIC, 0, NUMBER))
    assert not subtype(sym, other)


def test_function_contravariance():
    wide = FuncT((TOP,), NUMBER)
    narrow = FuncT((NUMBER,), NUMBER)
    assert subtype(wide, narrow) and not subtype(narrow, wide)


def test_records_are_nominal():
    alg = Algebra(records={"A": (("a", TOP),), "B": (("a", TOP),)})
    assert alg.subtype(RecordT("A"), RecordT("A"))
    assert not alg.subtype(RecordT("A"), RecordT("B"))
    assert alg.intersect(RecordT("A"), RecordT("B")) == BOTTOM


def test_type_variables():
    assert subtype(TypeVar("T"), TypeVar("T")) and subtype(TypeVar("T"), TOP)
    assert not subtype(TypeVar("T"), TypeVar("S"))
    assert not subtype(NUMBER, TypeVar("T"))


def test_intersect_examples():
    assert intersect(TOP, NUMBER) == NUMBER
    assert intersect(U(STRING, NUMBER, BOOLEAN), U(NUMBER, BOOLEAN)) == U(NUMBER, BOOLEAN)
    assert intersect(U(T2, T3), TupleT((TOP, TOP))) == T2
    assert intersect(NUMBER, STRING) == BOTTOM
    assert intersect(NumLitT(1), NumLitT(2)) == BOTTOM
    assert intersect(TupleT((NUMBER, TOP)), TupleT((TOP, STRING))) == TupleT((NUMBER, STRING))
    assert intersect(ListT(TOP), ListT(NUMBER)) == ListT(NUMBER)


def test_subtract_examples():
    assert subtract(U(STRING, NUMBER), STRING) == NUMBER
    assert subtract(U(STRING, NUMBER, BOOLEAN), STRING) == U(NUMBER, BOOLEAN)
    assert subtract(NUMBER, NUMBER) == BOTTOM
    assert subtract(TOP, NUMBER) == TOP
    assert subtract(BOOLEAN, TRUE) == FALSE
    assert subtract(BOOLEAN, FALSE) == TRUE
    assert subtract(NUMBER, NumLitT(2)) == NUMBER


def test_nested_narrowing_step():
    # if x is String | Number: if x is Number | Boolean: ...
    outer = intersect(U(STRING, NUMBER, BOOLEAN), U(STRING, NUMBER))
    assert intersect(outer, U(NUMBER, BOOLEAN)) == NUMBER


def test_is_empty_examples():
    assert is_empty(BOTTOM)
    assert is_empty(TupleT((NUMBER, BOTTOM)))
    assert not is_empty(U(STRING, NUMBER))
    assert not is_empty(ListT(BOTTOM))  # the empty list


def test_arity_filter_examples():
    assert arity_filter(U(T2, T3), 2, True) == T2
    assert arity_filter(U(T2, T3), 2, False) == T3
    assert arity_filter(NUMBER, 2, True) == BOTTOM
    assert arity_filter(U(NUMBER, T2), 2, False) == NUMBER


def test_render_is_stable():
    t = normalize(U(ListT(NUMBER), NONE, STRING, NUMBER, T2))
    assert render(t) == "Number | String | None | List(Number) | Tuple(Number, Number)"
    assert render(MapT(TOP)) == "Object(Top)"


# -- recursive aliases ------------------------------------------------------------

NESTED = Algebra(aliases={"Nested": U(NUMBER, ListT(AliasRef("Nested")))})
TREES = Algebra(aliases={
    "TreeNode": TupleT((NUMBER, AliasRef("Forest"))),
    "Forest": U(NONE, TupleT((AliasRef("TreeNode"), AliasRef("Forest")))),
})


def test_alias_subtyping_is_coinductive():
    n = AliasRef("Nested")
    assert NESTED.subtype(ListT(n), n)
    assert NESTED.subtype(ListT(ListT(NUMBER)), n)
    assert not NESTED.subtype(ListT(STRING), n)
    assert NESTED.subtype(n, n)


def test_alias_narrowing():
    n = AliasRef("Nested")
    assert NESTED.intersect(n, NUMBER) == NUMBER
    assert NESTED.subtract(n, NUMBER) == ListT(n)
    f = AliasRef("Forest")
    assert TREES.subtract(f, NONE) == TupleT((AliasRef("TreeNode"), f))
    assert TREES.subtype(U(NONE, TupleT((AliasRef("TreeNode"), f))), f)


def test_mutually_recursive_aliases_equal_unfoldings():
    alg = Algebra(aliases={"A": ListT(AliasRef("B")), "B": ListT(AliasRef("A"))})
    assert alg.subtype(AliasRef("A"), AliasRef("B"))
    assert alg.subtype(AliasRef("B"), AliasRef("A"))


# -- oracle -----------------------------------------------------------------------

def test_universe_bounds():
    assert len(oracle.VALUES) <= 500
    assert len(oracle.type_universe()) <= 2000


def test_subtype_matches_inclusion(algebra_sweep):
    assert algebra_sweep["subtype"] == []


def test_intersect_sound(algebra_sweep):
    assert algebra_sweep["intersect"] == []


def test_subtract_sound(algebra_sweep):
    assert algebra_sweep["subtract"] == []


def test_intersect_is_lower_bound(algebra_sweep):
    assert algebra_sweep["meet_bound"] == []


def test_base_fragment_exact(algebra_sweep):
    assert algebra_sweep["exact"] == []


def test_subtype_transitive_on_sampled_triples(algebra_sweep):
    alg = Algebra()
    types = algebra_sweep["types"]
    rng = random.Random(3)
    for _ in range(5000):
        a, b, c = (rng.choice(types) for _ in range(3))
        if alg.subtype(a, b) and alg.subtype(b, c):
            assert alg.subtype(a, c), (a, b, c)


# -- hypothesis --------------------------------------------------------------------

ATOMS = st.sampled_from(oracle.ATOMS + (BOTTOM,))
TYPES = st.recursive(
    ATOMS,
    lambda inner: st.one_of(
        st.lists(inner, min_size=1, max_size=3).map(lambda ts: U(*ts)),
        st.lists(inner, min_size=1, max_size=2).map(lambda ts: TupleT(tuple(ts))),
        inner.map(ListT),
    ),
    max_leaves=6,
)


@settings(max_examples=300, deadline=None)
@given(TYPES)
def test_normalize_idempotent(t):
    n = normalize(t)
    assert normalize(n) == n


@settings(max_examples=300, deadline=None)
@given(TYPES)
def test_normalize_preserves_meaning(t):
    assert oracle.denote(normalize(t)) == oracle.denote(t)


@settings(max_examples=300, deadline=None)
@given(TYPES)
def test_subtype_reflexive(t):
    assert subtype(t, t)


@settings(max_examples=200, deadline=None)
@given(TYPES, TYPES)
def test_random_pairs_sound(a, b):
    # deeper than the value universe distinguishes, so only the sound direction
    da, db = oracle.denote(a), oracle.denote(b)
    if subtype(a, b):
        assert oracle.subset(da, db)
    assert oracle.subset(da & db, oracle.denote(intersect(a, b)))
    assert oracle.subset(da & ~db, oracle.denote(subtract(a, b)))


@settings(max_examples=200, deadline=None)
@given(TYPES)
def test_is_empty_is_sound(t):
    if is_empty(t):
        assert oracle.denote(t) == 0


@pytest.mark.parametrize("keep", [True, False])
def test_arity_filter_partitions(keep):
    t = normalize(U(T2, T3, NUMBER, TupleT((STRING, STRING))))
    kept = arity_filter(t, 2, True)
    rest = arity_filter(t, 2, False)
    assert normalize(U(kept, rest)) == t
    assert is_empty(intersect(kept, rest))
