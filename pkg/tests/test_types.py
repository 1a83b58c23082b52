import pytest
from hypothesis import given
from hypothesis import strategies as st

from strategies import iu_types
from type_oracle import closure, type_universe
from xworkbench.types import (
    BOT, TOP, Arrow, Inter, TVar, TypeSyntaxError, Union, ctx_merge_inter, ctx_merge_union,
    equiv, is_proper, leq, normalize, parse_judgement_contexts, parse_type, show_context,
    show_type,
)

ty = parse_type


@pytest.mark.parametrize("lhs, rhs, expected", [
    ("A&B", "A", True),
    ("A&B", "B", True),
    ("A", "A|B", True),
    ("A", "A&B", False),
    ("A|B", "A", False),
    ("A", "TOP", True),
    ("BOT", "A->B", True),
    ("TOP", "A", False),
    ("A|(B&C)", "(A|B)&(A|C)", True),
    ("(A|B)&(A|C)", "A|(B&C)", False),
    ("(A&B)->C", "A->C", False),
    ("A->C", "(A&B)->C", False),
    ("(A&B)->C", "(B&A)->C", True),
    ("(A->B)&(A->C)", "A->B&C", False),
])
def test_leq_examples(lhs, rhs, expected):
    assert leq(ty(lhs), ty(rhs)) is expected


@pytest.mark.parametrize("lhs, rhs", [
    ("A&B", "B&A"),
    ("(A&B)->C", "(B&A)->C"),
    ("A", "A&A"),
    ("A|A", "A"),
    ("A&TOP", "A"),
    ("A|BOT", "A"),
    ("A&(A|B)", "A"),
])
def test_equiv_examples(lhs, rhs):
    assert equiv(ty(lhs), ty(rhs))
    assert normalize(ty(lhs)) == normalize(ty(rhs))


@pytest.mark.parametrize("text, canonical", [
    ("(A&B)&A", "A&B"),
    ("B&A", "A&B"),
    ("A|BOT", "A"),
    ("TOP&TOP", "TOP"),
    ("BOT|BOT", "BOT"),
    ("A&BOT", "BOT"),
    ("A|TOP", "TOP"),
])
def test_normalize_examples(text, canonical):
    assert show_type(normalize(ty(text))) == canonical


@pytest.mark.parametrize("text", ["A->B->C", "(A->B)->C", "(A&B)|C", "(A|B)->C", "TOP", "BOT", "A&(B->C)"])
def test_parse_show_round_trip(text):
    t = ty(text)
    assert ty(show_type(t)) == t


def test_arrow_is_right_associative():
    assert ty("A->B->C") == Arrow(TVar("A"), Arrow(TVar("B"), TVar("C")))


@pytest.mark.parametrize("text", ["A &", "->", "(A", "A B", "", "A&B|C"])
def test_parse_errors(text):
    with pytest.raises(TypeSyntaxError):
        ty(text)


def test_proper_types():
    assert is_proper(ty("A")) and is_proper(ty("A&B->C"))
    assert not any(is_proper(t) for t in (ty("A&B"), ty("A|B"), TOP, BOT))


def test_context_merging():
    merged = ctx_merge_inter({"x": ty("A")}, {"x": ty("B"), "y": ty("C")})
    assert show_context(merged) == "x:A&B, y:C"
    assert ctx_merge_union({"a": ty("A")}, {"a": ty("A")}) == {"a": ty("A")}
    socket_ctx, plug_ctx = parse_judgement_contexts("x:A&B |- a:A")
    assert socket_ctx == {"x": ty("A&B")} and plug_ctx == {"a": ty("A")}


def test_leq_agrees_with_closure_oracle_on_a_slice():
    types = type_universe(600, seed=1)
    rel = closure(types)
    for i, s in enumerate(types):
        for j, t in enumerate(types):
            assert leq(s, t) == rel[i, j], (show_type(s), show_type(t))


def test_normalize_agrees_with_oracle_equivalence():
    types = type_universe(600, seed=2)
    rel = closure(types)
    normal = [normalize(t) for t in types]
    for i in range(len(types)):
        for j in range(len(types)):
            assert (normal[i] == normal[j]) == (rel[i, j] and rel[j, i])


@given(iu_types)
def test_leq_reflexive(t):
    assert leq(t, t)


@given(iu_types, iu_types, iu_types)
def test_leq_transitive(a, b, c):
    if leq(a, b) and leq(b, c):
        assert leq(a, c)


@given(iu_types, iu_types)
def test_lattice_bounds(a, b):
    assert leq(Inter(a, b), a) and leq(Inter(a, b), b)
    assert leq(a, Union(a, b)) and leq(b, Union(a, b))
    assert leq(a, TOP) and leq(BOT, a)


@given(iu_types)
def test_normalize_idempotent_and_sound(t):
    n = normalize(t)
    assert normalize(n) == n
    assert equiv(t, n)


@given(iu_types, iu_types)
def test_normalize_decides_equivalence(a, b):
    assert (normalize(a) == normalize(b)) == equiv(a, b)


@given(iu_types)
def test_parse_show_round_trip_up_to_normalize(t):
    assert normalize(ty(show_type(t))) == normalize(t)


@given(st.lists(iu_types, min_size=1, max_size=4))
def test_normal_forms_give_a_partial_order(ts):
    normal = [normalize(t) for t in ts]
    for a in normal:
        for b in normal:
            if leq(a, b) and leq(b, a):
                assert a == b
