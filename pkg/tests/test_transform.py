import random

import pytest
from hypothesis import given, settings

from strategies import seeds
from xworkbench.build import ax, cut
from xworkbench.derivation import System, check_derivation
from xworkbench.generate import expansion_pair, random_simple_derivation, random_typed_derivation
from xworkbench.harness import expansion_campaign, preservation_campaign, shortcut_campaign
from xworkbench.rewrite import Redex, Regime, RuleId, find_redexes, step
from xworkbench.syntax import alpha_eq, parse
from xworkbench.transform import TransformError, expand, preserve
from xworkbench.types import ctx_equiv, parse_type

SYSTEM = {Regime.FULL: System.SIMPLE, Regime.CBN: System.CBN, Regime.CBV: System.CBV}


def typed(seed, regime):
    rng = random.Random(seed)
    if regime is Regime.FULL:
        return random_simple_derivation(rng, 4)
    return random_typed_derivation(rng, SYSTEM[regime], 4, 4)


@pytest.mark.parametrize("regime", list(Regime))
@settings(max_examples=40)
@given(seed=seeds)
def test_preserve_keeps_contexts(regime, seed):
    d = typed(seed, regime)
    for r in find_redexes(d.net, regime):
        out = preserve(d.net, r, d, regime)
        check_derivation(out)
        assert out.system is SYSTEM[regime]
        assert alpha_eq(out.net, step(d.net, r))
        assert ctx_equiv(out.socket_ctx, d.socket_ctx) and ctx_equiv(out.plug_ctx, d.plug_ctx)


@settings(max_examples=40)
@given(seed=seeds)
def test_expand_keeps_contexts(seed):
    start, r, d_reduct = expansion_pair(random.Random(seed), 4, 4)
    out = expand(start, r, d_reduct)
    check_derivation(out)
    assert out.system is System.IU and out.net == start
    assert ctx_equiv(out.socket_ctx, d_reduct.socket_ctx) and ctx_equiv(out.plug_ctx, d_reduct.plug_ctx)


def test_preserve_rejects_a_mismatched_system():
    d = typed(0, Regime.FULL)
    r = find_redexes(d.net, Regime.FULL)
    if not r:
        pytest.skip("seed 0 gave a normal net")
    with pytest.raises(TransformError):
        preserve(d.net, r[0], d, Regime.CBN)


def test_preserve_rejects_a_step_outside_the_regime():
    net = parse("<x.b> a^ + y^ <z.c>", refresh=False)
    t = parse_type("A")
    d = cut(System.CBN, net, ax(System.CBN, net.left, {"x": t}, {"b": t, "a": t}),
            ax(System.CBN, net.right, {"y": t, "z": t}, {"c": t}))
    check_derivation(d)
    with pytest.raises(TransformError):
        preserve(net, Redex((), RuleId.ActL), d, Regime.CBN)


@pytest.mark.parametrize("regime", list(Regime))
def test_small_preservation_campaign(regime):
    c = preservation_campaign(regime, seed=11, cases=40)
    assert c.passed, c.failures[:3]


def test_small_expansion_campaign():
    c = expansion_campaign(seed=11, cases=60)
    assert c.passed, c.failures[:3]


def test_small_shortcut_campaign():
    c = shortcut_campaign(seed=11, cases=60)
    assert c.passed, c.failures[:3]
    assert c.cases == 60
