import random

import pytest
from hypothesis import given, settings

from strategies import seeds
from xworkbench.derivation import System, check_derivation, spine
from xworkbench.lam import (
    Abs, App, LambdaSyntaxError, LcDerivation, LcRuleError, Sub, Var, beta_step, cbv_beta_step,
    check_lc_inter, check_simulation, check_typing_preservation, curry_derivation, curry_infer,
    free_vars, parse_term, random_term, show_term, substitute, term_size, translate,
)
from xworkbench.rewrite import Regime
from xworkbench.syntax import alpha_eq, free_plugs, free_sockets, parse
from xworkbench.types import normalize, parse_type, show_type


@pytest.mark.parametrize("text, shown", [
    ("\\x y.x", "\\x.\\y.x"),
    ("λx.x", "\\x.x"),
    ("x y z", "x y z"),
    ("x (y z)", "x (y z)"),
    ("(\\x.x) y", "(\\x.x) y"),
])
def test_term_parsing(text, shown):
    assert show_term(parse_term(text)) == shown


@pytest.mark.parametrize("text", ["\\.x", "(x", "x)", "", "\\x x"])
def test_term_parse_errors(text):
    with pytest.raises(LambdaSyntaxError):
        parse_term(text)


def test_substitution_avoids_capture():
    t = substitute(parse_term("\\y.x y"), "x", Var("y"))
    assert isinstance(t, Abs) and t.var != "y"
    assert free_vars(t) == {"y"}


def test_beta_steps():
    t = parse_term("(\\x.x x)(\\y.y)")
    assert [show_term(r) for r in beta_step(t)] == ["(\\y.y) (\\y.y)"]
    assert [show_term(r) for r in cbv_beta_step(parse_term("(\\x.x) ((\\y.y) z)"))] == ["(\\x.x) z"]


@pytest.mark.parametrize("text, typing", [
    ("\\x y.x", " |- A->B->A"),
    ("\\x.x", " |- A->A"),
    ("\\f x.f (f x)", " |- (A->A)->A->A"),
    ("x y", "x:B->A, y:B |- A"),
])
def test_principal_curry_typings(text, typing):
    assert curry_infer(parse_term(text)).text() == typing


@pytest.mark.parametrize("text", ["\\x.x x", "(\\x.x x)(\\x.x x)"])
def test_untypable_in_curry(text):
    assert curry_infer(parse_term(text)) is None
    assert curry_derivation(parse_term(text)) is None


def test_translation_of_identity():
    assert alpha_eq(translate(parse_term("\\x.x")), parse("x^ <x.b> b^ . a", refresh=False))


def test_translation_of_a_variable_is_a_capsule():
    assert translate(parse_term("x"), "q") == parse("<x.q>", refresh=False)


def test_translation_interface():
    t = parse_term("x (\\y.y z)")
    n = translate(t, "out")
    assert free_sockets(n) == free_vars(t) and free_plugs(n) == {"out"}


def test_explicit_substitution_translates_to_a_right_activated_cut():
    n = translate(parse_term("x<x:=y>", explicit=True), explicit=True)
    assert alpha_eq(n, parse("<y.b> b^ +> x^ <x.a>", refresh=False))


def self_application() -> LcDerivation:
    """``\\x.x x : ((A->B) & A) -> B`` in the intersection system."""
    ctx_type = parse_type("(A->B)&A")
    socket_ctx = {"x": ctx_type}
    xx = parse_term("x x")
    ax = LcDerivation("Ax", socket_ctx, Var("x"), ctx_type)
    parts = [show_type(p) for p in _meetands(ctx_type)]
    fun = LcDerivation("interE", socket_ctx, Var("x"), parse_type("A->B"), [ax], index=parts.index("A->B"))
    arg = LcDerivation("interE", socket_ctx, Var("x"), parse_type("A"), [ax], index=parts.index("A"))
    app = LcDerivation("arrE", socket_ctx, xx, parse_type("B"), [fun, arg])
    return LcDerivation("arrI", {}, Abs("x", xx), parse_type("((A->B)&A)->B"), [app])


def _meetands(t):
    return spine(t, plug_side=True)


def test_self_application_in_the_intersection_system():
    check_lc_inter(self_application())
    with pytest.raises(LcRuleError):
        check_lc_inter(self_application(), curry=True)


def test_intersection_typing_carries_over_to_the_translation():
    d = check_typing_preservation(self_application(), "a")
    check_derivation(d)
    assert d.system is System.IU
    assert d.socket_ctx == {} and normalize(d.plug_ctx["a"]) == normalize(parse_type("((A->B)&A)->B"))


def test_broken_intersection_derivation_is_located():
    d = self_application()
    d.premises[0].premises[1].index = 7
    with pytest.raises(LcRuleError) as err:
        check_lc_inter(d)
    assert err.value.path == (0, 1)


@pytest.mark.parametrize("text", ["\\x y.x", "\\f x.f (f x)", "(\\x.x) y", "\\x.(\\y.y) x"])
def test_curry_typing_gives_a_simple_derivation(text):
    t = parse_term(text)
    d = check_typing_preservation(curry_derivation(t), "a", System.SIMPLE)
    check_derivation(d)
    assert d.system is System.SIMPLE
    assert d.net == translate(t, "a")
    assert d.plug_ctx["a"] == curry_infer(t).type


@pytest.mark.parametrize("regime", list(Regime))
@pytest.mark.parametrize("text", ["(\\x.x) y", "(\\x.x x)(\\y.y)", "(\\x y.x) z w", "(\\f.f (f z)) (\\y.y)"])
def test_simulation_examples(regime, text):
    res = check_simulation(parse_term(text), regime)
    assert res.verified, res


@settings(max_examples=30)
@given(seeds)
def test_random_typable_terms_simulate(seed):
    rng = random.Random(seed)
    t = random_term(rng, 10)
    if term_size(t) > 10 or not beta_step(t) or curry_infer(t) is None:
        return
    for regime in Regime:
        assert check_simulation(t, regime).verified


@given(seeds)
def test_curry_derivations_are_valid(seed):
    t = random_term(random.Random(seed), 10)
    d = curry_derivation(t)
    if d is None:
        return
    check_lc_inter(d, curry=True)
    assert d.socket_ctx == curry_infer(t).socket_ctx and d.type == curry_infer(t).type


def test_explicit_term_has_sub_node():
    t = parse_term("(x y)<x:=\\z.z>", explicit=True)
    assert isinstance(t, Sub) and isinstance(t.body, App)
