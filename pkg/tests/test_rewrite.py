import random

import pytest
from hypothesis import given

from strategies import nets, seeds
from xworkbench.lam import parse_term, translate
from xworkbench.rewrite import (
    ADMISSIBLE, Redex, Regime, RuleId, find_redexes, reachable, reduce, reduction_graph, step,
)
from xworkbench.syntax import alpha_eq, free_plugs, free_sockets, parse, show


def net_of(text):
    return parse(text, refresh=False)


def fired(text, regime=Regime.FULL, admissible=False):
    n = net_of(text)
    return {(r.rule.name, r.path, show(step(n, r))) for r in find_redexes(n, regime, admissible)}


def test_axiom_cut():
    assert fired("<x.b> b^ + y^ <y.a>") == {("Ax", (), "<x.a>")}


def test_exp_imp_brackets_both_ways():
    out = fired("(x^ <x.c> d^ . a) a^ + z^ (<w.e> e^ [z] v^ <v.b>)")
    assert out == {
        ("ExpImpLeftAssoc", (), "(<w.e> e^ + x^ <x.c>) d^ + v^ <v.b>"),
        ("ExpImpRightAssoc", (), "<w.e> e^ + x^ (<x.c> d^ + v^ <v.b>)"),
    }


@pytest.mark.parametrize("regime, rules", [
    (Regime.FULL, {"ActL", "ActR"}),
    (Regime.CBN, {"ActR"}),
    (Regime.CBV, {"ActL"}),
])
def test_activation_choice_at_a_critical_pair(regime, rules):
    assert {rule for rule, _, _ in fired("<x.b> a^ + y^ <z.c>", regime)} == rules


def test_admissible_rules_only_on_request():
    assert not {r.rule for r in find_redexes(net_of("<x.a> a^ + y^ <z.c>"))} & ADMISSIBLE
    with_shortcuts = {r.rule for r in find_redexes(net_of("<x.a> a^ + y^ <z.c>"), include_admissible=True)}
    assert RuleId.Ren_R in with_shortcuts


def test_capsule_propagation():
    out = fired("<x.b> a^ <+ y^ <z.c>")
    assert ("DL_cap", (), "<x.b>") in out


def test_zero_fuel_stops_at_the_start():
    trace = reduce(net_of("<x.b> a^ + y^ <z.c>"), fuel=0)
    assert trace.steps == [] and trace.out_of_fuel and trace.final == net_of("<x.b> a^ + y^ <z.c>")


def test_normal_net_is_not_out_of_fuel():
    trace = reduce(net_of("<x.a>"), fuel=0)
    assert not trace.out_of_fuel and trace.normal


def test_critical_pair_has_two_normal_forms():
    g = reduction_graph(net_of("<y.b> a^ + x^ <z.c>"))
    assert not g.truncated
    assert sorted(show(g.nodes[k]) for k in g.sinks()) == ["<y.b>", "<z.c>"]


@pytest.mark.parametrize("regime", list(Regime))
def test_figure_net_reduces_to_identity(regime):
    start = translate(parse_term("(\\x.x x)(\\y.y)"), "a")
    trace = reduce(start, regime, 200)
    assert not trace.out_of_fuel
    assert alpha_eq(trace.final, translate(parse_term("\\y.y"), "a"))


def test_reduce_is_deterministic_for_a_seed():
    start = translate(parse_term("(\\x.x x)(\\y.y)"), "a")
    a = reduce(start, fuel=50, seed=3)
    b = reduce(start, fuel=50, seed=3)
    assert a.to_json() == b.to_json()


def test_stale_redex_rejected():
    n = net_of("<x.b> b^ + y^ <y.a>")
    with pytest.raises(ValueError):
        step(n, Redex((), RuleId.ActL))


def test_reachable_finds_a_known_reduct():
    start = net_of("<x.b> b^ + y^ <y.a>")
    found, _, _ = reachable(start, net_of("<x.a>"))
    assert found


@given(nets, seeds)
def test_core_steps_never_invent_free_names(n, seed):
    rng = random.Random(seed)
    cur = n
    for _ in range(6):
        redexes = find_redexes(cur)
        if not redexes:
            break
        nxt = step(cur, rng.choice(redexes))
        assert free_sockets(nxt) <= free_sockets(cur)
        assert free_plugs(nxt) <= free_plugs(cur)
        cur = nxt


@given(nets)
def test_restricted_regimes_fire_full_steps(n):
    full = {(r.path, show(step(n, r))) for r in find_redexes(n, Regime.FULL)}
    for regime in (Regime.CBN, Regime.CBV):
        for r in find_redexes(n, regime):
            assert (r.path, show(step(n, r))) in full


@given(nets)
def test_redexes_are_reported_in_a_stable_order(n):
    assert find_redexes(n) == find_redexes(parse(show(n), refresh=False))
