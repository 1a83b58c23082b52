import pytest
from hypothesis import given

from strategies import seeds
from xworkbench.corpus import check_result, type_mutations
from xworkbench.demos import (
    COUNTEREXAMPLE_1, COUNTEREXAMPLE_2, PEIRCE_TYPE, peirce_derivation, unrestricted_union,
)
from xworkbench.derivation import (
    RuleError, System, check_derivation, dumps, from_json, loads, simple_to_iu, to_json, walk,
)
from xworkbench.search import search
from xworkbench.syntax import parse
from xworkbench.types import parse_judgement_contexts, parse_type


def test_peirce_derivation_checks():
    d = peirce_derivation()
    check_derivation(d)
    assert d.system is System.SIMPLE
    assert d.socket_ctx == {} and d.plug_ctx == {"g": parse_type(PEIRCE_TYPE)}


def test_json_round_trip():
    d = peirce_derivation()
    assert dumps(loads(dumps(d))) == dumps(d)
    assert from_json(to_json(d)) == d


def test_every_single_type_mutation_is_caught_near_the_edit():
    mutations = list(type_mutations(to_json(peirce_derivation())))
    assert len(mutations) >= 10
    for path, what, mutated in mutations:
        result = check_result(mutated)
        assert result.startswith("error at "), what
        reported = tuple(int(k) for k in result[len("error at ["):result.index("]")].split(",") if k.strip())
        assert reported in (path, path[:-1]), (what, result)


def test_simple_derivation_lifts_to_iu():
    lifted = simple_to_iu(peirce_derivation())
    check_derivation(lifted)
    assert all(node.system is System.IU for _, node in walk(lifted))


def test_union_at_a_non_introduced_socket():
    check_derivation(unrestricted_union(System.IU))
    check_derivation(unrestricted_union(System.CBV))
    with pytest.raises(RuleError, match="unionL in CBN needs x introduced") as err:
        check_derivation(unrestricted_union(System.CBN))
    assert err.value.path == ()


def test_rule_outside_the_system_is_rejected():
    d = unrestricted_union(System.IU).with_system(System.SIMPLE)
    with pytest.raises(RuleError, match="not part of system"):
        check_derivation(d)


@pytest.mark.parametrize("cx, system, reason", [
    (COUNTEREXAMPLE_2, System.CBN, "unionL in CBN needs z introduced"),
    (COUNTEREXAMPLE_1, System.CBV, "interR in CBV needs a introduced"),
])
def test_iu_typings_of_the_counterexamples_break_the_restrictions(cx, system, reason):
    socket_ctx, plug_ctx = cx.contexts()
    found = search(System.IU, cx.start(), socket_ctx, plug_ctx)
    assert found.found
    with pytest.raises(RuleError, match=reason):
        check_derivation(found.derivation.with_system(system))
    assert search(system, cx.start(), socket_ctx, plug_ctx).verdict() == "exhausted"


@pytest.mark.parametrize("net, contexts, system, verdict", [
    ("<x.a>", "x:A |- a:A", "IU", "found"),
    ("<x.a>", "x:A |- a:B", "IU", "exhausted"),
    ("<x.a>", "x:A&B |- a:A|C", "IU", "found"),
    ("<x.a>", "x:TOP |- a:A", "IU", "exhausted"),
    ("x^ <x.a> a^ . c", " |- c:A->A", "Simple", "found"),
    ("x^ <x.a> a^ . c", " |- c:A->B", "Simple", "exhausted"),
    ("<x.b> b^ + y^ <y.a>", "x:A|B |- a:A|B", "IU", "found"),
])
def test_search_verdicts(net, contexts, system, verdict):
    socket_ctx, plug_ctx = parse_judgement_contexts(contexts)
    res = search(System(system), parse(net, refresh=False), socket_ctx, plug_ctx)
    assert res.verdict() == verdict
    if res.found:
        check_derivation(res.derivation)
        assert res.derivation.socket_ctx == socket_ctx and res.derivation.plug_ctx == plug_ctx


@given(seeds)
def test_random_typed_derivations_check(seed):
    import random

    from xworkbench.generate import random_simple_derivation, random_typed_derivation

    rng = random.Random(seed)
    check_derivation(random_simple_derivation(rng, 4))
    for system in (System.IU, System.CBN, System.CBV):
        check_derivation(random_typed_derivation(rng, system, 4, 4))
