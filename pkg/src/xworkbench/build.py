"""Smart constructors for derivations: each computes the conclusion of its rule.

The constructors do not check side conditions; callers run
:func:`xworkbench.derivation.check_derivation` on finished trees.
"""

from __future__ import annotations

from typing import Mapping, Sequence

from .derivation import Ctx, Derivation, System, spine
from .syntax import Activation, Capsule, Cut, Export, Import, Net
from .types import (
    BOT, TOP, Arrow, IUType, ctx_merge_inter, ctx_merge_union, join, meet, normalize,
)

__all__ = [
    "ax", "cut", "imp_l", "imp_r", "inter_r", "union_l", "inter_e", "union_e",
    "cut_rule_name", "without", "add_spurious",
]


def without(ctx: Mapping[str, IUType], *names: str) -> Ctx:
    return {k: v for k, v in ctx.items() if k not in names}


def _norm(ctx: Mapping[str, IUType]) -> Ctx:
    return {k: normalize(v) for k, v in ctx.items()}


def ax(system: System, net: Capsule, socket_ctx: Mapping[str, IUType], plug_ctx: Mapping[str, IUType]) -> Derivation:
    return Derivation(system, "Ax", net, _norm(socket_ctx), _norm(plug_ctx))


def cut_rule_name(system: System, net: Cut) -> str:
    if system is System.CBN and net.act is Activation.LEFT:
        return "daggerL"
    if system is System.CBV and net.act is Activation.RIGHT:
        return "daggerR"
    return "cut"


def cut(system: System, net: Cut, left: Derivation, right: Derivation) -> Derivation:
    a_t = normalize(left.plug_ctx[net.plug])
    socket_ctx = ctx_merge_inter(left.socket_ctx, without(right.socket_ctx, net.socket))
    plug_ctx = ctx_merge_union(without(left.plug_ctx, net.plug), right.plug_ctx)
    return Derivation(system, cut_rule_name(system, net), net, socket_ctx, plug_ctx, [left, right], cut_type=a_t)


def imp_l(system: System, net: Import, left: Derivation, right: Derivation) -> Derivation:
    arrow = Arrow(left.plug_ctx[net.plug], right.socket_ctx[net.socket])
    socket_ctx = ctx_merge_inter(left.socket_ctx, without(right.socket_ctx, net.socket), {net.mid: arrow})
    plug_ctx = ctx_merge_union(without(left.plug_ctx, net.plug), right.plug_ctx)
    return Derivation(system, "impL", net, socket_ctx, plug_ctx, [left, right])


def imp_r(system: System, net: Export, body: Derivation) -> Derivation:
    arrow = Arrow(body.socket_ctx[net.socket], body.plug_ctx[net.plug])
    socket_ctx = without(body.socket_ctx, net.socket)
    plug_ctx = ctx_merge_union(without(body.plug_ctx, net.plug), {net.out: arrow})
    return Derivation(system, "impR", net, _norm(socket_ctx), plug_ctx, [body])


def inter_r(
    system: System, net: Net, subject: str, premises: Sequence[Derivation],
    socket_ctx: Mapping[str, IUType] | None = None, plug_ctx: Mapping[str, IUType] | None = None,
) -> Derivation:
    """``interR`` on plug ``subject``; ``socket_ctx``/``plug_ctx`` only for zero premises."""
    if not premises:
        return Derivation(system, "interR", net, _norm(socket_ctx or {}),
                          {**_norm(without(plug_ctx or {}, subject)), subject: TOP}, [], subject=subject)
    t = normalize(meet([p.plug_ctx[subject] for p in premises]))
    g = ctx_merge_inter(*[p.socket_ctx for p in premises])
    d = ctx_merge_union(*[without(p.plug_ctx, subject) for p in premises])
    d[subject] = t
    return Derivation(system, "interR", net, g, d, list(premises), subject=subject)


def union_l(
    system: System, net: Net, subject: str, premises: Sequence[Derivation],
    socket_ctx: Mapping[str, IUType] | None = None, plug_ctx: Mapping[str, IUType] | None = None,
) -> Derivation:
    """``unionL`` on socket ``subject``; ``socket_ctx``/``plug_ctx`` only for zero premises."""
    if not premises:
        return Derivation(system, "unionL", net, {**_norm(without(socket_ctx or {}, subject)), subject: BOT},
                          _norm(plug_ctx or {}), [], subject=subject)
    t = normalize(join([p.socket_ctx[subject] for p in premises]))
    g = ctx_merge_inter(*[without(p.socket_ctx, subject) for p in premises])
    g[subject] = t
    d = ctx_merge_union(*[p.plug_ctx for p in premises])
    return Derivation(system, "unionL", net, g, d, list(premises), subject=subject)


def inter_e(d: Derivation, subject: str, index: int) -> Derivation:
    part = spine(d.plug_ctx[subject], plug_side=True)[index]
    return Derivation(d.system, "interE", d.net, dict(d.socket_ctx), {**d.plug_ctx, subject: part}, [d],
                      subject=subject, index=index)


def union_e(d: Derivation, subject: str, index: int) -> Derivation:
    part = spine(d.socket_ctx[subject], plug_side=False)[index]
    return Derivation(d.system, "unionE", d.net, {**d.socket_ctx, subject: part}, dict(d.plug_ctx), [d],
                      subject=subject, index=index)


def add_spurious(d: Derivation, socket_ctx: Mapping[str, IUType], plug_ctx: Mapping[str, IUType]) -> Derivation:
    """Add statements whose subjects are neither free nor bound in ``d.net``.

    Such statements travel unchanged from a leaf to the root, so they are
    added along the leftmost branch.
    """
    if not socket_ctx and not plug_ctx:
        return d
    g = ctx_merge_inter(d.socket_ctx, socket_ctx)
    dd = ctx_merge_union(d.plug_ctx, plug_ctx)
    premises = list(d.premises)
    if premises:
        premises[0] = add_spurious(premises[0], socket_ctx, plug_ctx)
    return Derivation(d.system, d.rule, d.net, g, dd, premises, d.cut_type, d.subject, d.index)
