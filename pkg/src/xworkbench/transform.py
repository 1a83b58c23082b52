"""Transformers on derivations.

Admissible rules (weakening and thinning), the generation facts of a proper
derivation, renaming cuts, the elimination of an intersection or a union, and
the two transformers that follow a reduction step: :func:`expand` (a typing
of the reduct gives one of the redex, in ``IU``) and :func:`preserve` (a
typing of the redex gives one of the reduct, in ``Simple``, ``CBN`` and
``CBV``).

Both step transformers work the same way.  The derivation is followed down to
the position of the redex, applying the transformation under every wrapper
(``interR``/``unionL``/``interE``/``unionE``) met on the way.  At the redex the
wrappers are peeled off, a case construction produces a derivation of the
other side from the pieces of the pure derivation underneath, and the result
is fitted to the exact contexts with weakening and thinning.  When no case
construction applies, a bounded search over the same judgement is tried; the
:class:`TransformStats` record which route was taken.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Iterator, Mapping

from . import build
from .derivation import (
    WRAPPERS, Derivation, RuleError, System, ax_witness, check_derivation, spine,
    wrapper_allowed,
)
from .rewrite import Redex, Regime, RuleId, contract, rules_at, step
from .syntax import (
    Activation, Capsule, Cut, Export, Import, NameSupply, Net, alpha_eq, all_names,
    bound_plugs, bound_sockets, children, free_plugs, free_sockets, introduces_plug,
    introduces_socket, replace_at, subnet_at,
)
from .types import (
    BOT, TOP, Arrow, Bot, IUType, Inter, Top, Union, ctx_merge_inter, ctx_merge_union,
    equiv, join, leq, meet, normalize, subterms,
)

__all__ = [
    "TransformError", "Stuck", "TransformStats", "GenerationFacts",
    "weaken", "thin", "fit", "transport", "invert", "rename_cut_derivation",
    "elim_inter", "elim_union", "expand", "preserve",
]

I, L, R = Activation.INACTIVE, Activation.LEFT, Activation.RIGHT


class TransformError(ValueError):
    """A transformer could not produce a derivation of the requested shape."""


class Stuck(TransformError):
    """No construction and no search budget produced the required derivation."""

    def __init__(self, rule: RuleId, reason: str):
        super().__init__(f"{rule.name}: {reason}")
        self.rule = rule
        self.reason = reason


@dataclass
class TransformStats:
    """How :func:`expand` / :func:`preserve` calls were answered."""
    constructive: int = 0
    searched: int = 0
    by_rule: dict[str, list[int]] = field(default_factory=dict)

    def record(self, rule: RuleId, constructive: bool) -> None:
        slot = self.by_rule.setdefault(rule.name, [0, 0])
        if constructive:
            self.constructive += 1
            slot[0] += 1
        else:
            self.searched += 1
            slot[1] += 1


# ---------------------------------------------------------------------------
# small helpers


def _names(d: Derivation) -> set[str]:
    return set(d.socket_ctx) | set(d.plug_ctx)


def _bound(n: Net) -> set[str]:
    return set(bound_sockets(n)) | set(bound_plugs(n))


def _with(d: Derivation, **changes) -> Derivation:
    return replace(d, **changes)


def _norm(ctx: Mapping[str, IUType] | None) -> dict[str, IUType]:
    return {k: normalize(v) for k, v in (ctx or {}).items()}


# ---------------------------------------------------------------------------
# weakening


def weaken(d: Derivation, socket_ctx: Mapping[str, IUType] | None = None,
           plug_ctx: Mapping[str, IUType] | None = None) -> Derivation:
    """Merge ``socket_ctx`` into the socket context and ``plug_ctx`` into the plug context.

    Socket statements are intersected with what is there and plug statements
    joined, so a statement already implied leaves the derivation untouched.
    New statements are pushed to the leaves; where a wrapper acts on the very
    subject being weakened, a second wrapper on another connector carries the
    statement in through a premise-free companion.
    """
    socket_ctx, plug_ctx = _norm(socket_ctx), _norm(plug_ctx)
    clash = _bound(d.net) & (set(socket_ctx) | set(plug_ctx))
    if clash:
        raise TransformError(f"cannot weaken with bound connector(s) {sorted(clash)}")
    if set(socket_ctx) & set(d.plug_ctx) or set(plug_ctx) & set(d.socket_ctx) or set(socket_ctx) & set(plug_ctx):
        raise TransformError("a name cannot be both a socket and a plug")
    return _weaken(d, socket_ctx, plug_ctx)


def _weaken(d: Derivation, g: dict, dl: dict) -> Derivation:
    g = {k: v for k, v in g.items() if not (k in d.socket_ctx and leq(d.socket_ctx[k], v))}
    dl = {k: v for k, v in dl.items() if not (k in d.plug_ctx and leq(v, d.plug_ctx[k]))}
    if not g and not dl:
        return d
    new_g = ctx_merge_inter(d.socket_ctx, g)
    new_d = ctx_merge_union(d.plug_ctx, dl)
    if not d.premises:
        return _with(d, socket_ctx=new_g, plug_ctx=new_d)
    subj = d.subject
    if d.rule in ("interR", "interE") and subj in dl:
        rest = {k: v for k, v in dl.items() if k != subj}
        return _companion(_weaken(d, g, rest), {}, {subj: dl[subj]})
    if d.rule in ("unionL", "unionE") and subj in g:
        rest = {k: v for k, v in g.items() if k != subj}
        return _companion(_weaken(d, rest, dl), {subj: g[subj]}, {})
    premises = list(d.premises)
    premises[0] = _weaken(premises[0], g, dl)
    return _with(d, socket_ctx=new_g, plug_ctx=new_d, premises=premises)


def _companion(d: Derivation, g: dict, dl: dict) -> Derivation:
    """Merge statements into ``d`` by a two-premise wrapper whose second premise is empty.

    ``interR`` on a plug ``t`` over ``d`` and a premise-free ``interR`` on
    ``t`` leaves the type of ``t`` unchanged (meet with ``TOP``) while the
    companion's other statements join the conclusion; ``unionL`` works the same
    way on a socket.
    """
    system = d.system
    avoid = set(g) | set(dl)
    for t in sorted(d.plug_ctx):
        if t not in avoid and wrapper_allowed(system, "interR", d.net, t):
            empty = build.inter_r(system, d.net, t, [], socket_ctx=g, plug_ctx=dl)
            return build.inter_r(system, d.net, t, [d, empty])
    for t in sorted(d.socket_ctx):
        if t not in avoid and wrapper_allowed(system, "unionL", d.net, t):
            empty = build.union_l(system, d.net, t, [], socket_ctx=g, plug_ctx=dl)
            return build.union_l(system, d.net, t, [d, empty])
    raise TransformError("no connector is available to carry the weakening")


# ---------------------------------------------------------------------------
# thinning


def thin(d: Derivation, names: set[str] | frozenset[str] | None = None) -> Derivation:
    """Remove statements whose subjects are not free in the net.

    With ``names`` only those statements go; by default every statement about
    a connector that is not free goes.
    """
    free = free_sockets(d.net) | free_plugs(d.net)
    if names is None:
        names = _names(d) - free
    names = frozenset(names)
    if names & free:
        raise TransformError(f"cannot thin free connector(s) {sorted(names & free)}")
    return _thin(d, names)


def _thin(d: Derivation, names: frozenset[str]) -> Derivation:
    if not (names & _names(d)):
        return d
    g = {k: v for k, v in d.socket_ctx.items() if k not in names}
    dl = {k: v for k, v in d.plug_ctx.items() if k not in names}
    premises = [_thin(p, names) for p in d.premises]
    if d.rule in WRAPPERS and d.subject in names:
        if not premises:
            return _empty_like(d, g, dl)
        out = premises[0]
        for p in premises[1:]:
            out = _weaken(out, p.socket_ctx, p.plug_ctx)
        return out
    return _with(d, socket_ctx=g, plug_ctx=dl, premises=premises)


def _empty_like(d: Derivation, g: dict, dl: dict) -> Derivation:
    """A premise-free wrapper typing ``d.net`` at exactly ``g |- dl``."""
    system = d.system
    for t, ty in sorted(dl.items()):
        if isinstance(ty, Top) and wrapper_allowed(system, "interR", d.net, t):
            return build.inter_r(system, d.net, t, [], socket_ctx=g, plug_ctx=dl)
    for t, ty in sorted(g.items()):
        if isinstance(ty, Bot) and wrapper_allowed(system, "unionL", d.net, t):
            return build.union_l(system, d.net, t, [], socket_ctx=g, plug_ctx=dl)
    raise TransformError("a premise-free wrapper on a thinned connector cannot be rebuilt")


# ---------------------------------------------------------------------------
# fitting to exact contexts


def fit(d: Derivation, socket_ctx: Mapping[str, IUType], plug_ctx: Mapping[str, IUType]) -> Derivation:
    """Turn ``d`` into a derivation of the same net at exactly ``socket_ctx |- plug_ctx``.

    Possible when every socket type of ``d`` is above the wanted one and every
    plug type below it: thinning drops unwanted statements and weakening then
    lowers sockets and raises plugs.
    """
    extra = _names(d) - set(socket_ctx) - set(plug_ctx)
    if extra:
        d = thin(d, extra)
    for k, t in d.socket_ctx.items():
        if k not in socket_ctx or not leq(socket_ctx[k], t):
            raise TransformError(f"socket {k} cannot be brought to the wanted type")
    for k, t in d.plug_ctx.items():
        if k not in plug_ctx or not leq(t, plug_ctx[k]):
            raise TransformError(f"plug {k} cannot be brought to the wanted type")
    return weaken(d, socket_ctx, plug_ctx)


# ---------------------------------------------------------------------------
# alpha transport


def transport(d: Derivation, net: Net) -> Derivation:
    """Move ``d`` onto an alpha-equal net, renaming bound connectors throughout."""
    if not alpha_eq(d.net, net):
        raise TransformError("transport needs alpha-equal nets")
    return _transport(d, net, {})


def _transport(d: Derivation, tgt: Net, ren: dict[str, str]) -> Derivation:
    def r(ctx):
        return {ren.get(k, k): v for k, v in ctx.items()}

    src = d.net
    subject = ren.get(d.subject, d.subject) if d.subject is not None else None
    if d.rule in WRAPPERS:
        premises = [_transport(p, tgt, ren) for p in d.premises]
    elif isinstance(src, Capsule):
        premises = []
    elif isinstance(src, Export):
        inner = {**ren, src.socket: tgt.socket, src.plug: tgt.plug}
        premises = [_transport(d.premises[0], tgt.body, inner)]
    else:
        left = _transport(d.premises[0], tgt.left, {**ren, src.plug: tgt.plug})
        right = _transport(d.premises[1], tgt.right, {**ren, src.socket: tgt.socket})
        premises = [left, right]
    return Derivation(d.system, d.rule, tgt, r(d.socket_ctx), r(d.plug_ctx), premises,
                      d.cut_type, subject, d.index)


# ---------------------------------------------------------------------------
# retyping an introduced connector


def _retype(d: Derivation, name: str, t: IUType, plug: bool) -> Derivation:
    """Give ``name`` exactly type ``t`` in ``d``, changing nothing else.

    Intended for a connector with a single occurrence (an introduced one):
    every statement about it, spurious or not, is reset at its source.
    """
    own = d.plug_ctx if plug else d.socket_ctx
    if name not in own:
        return d
    if d.rule in WRAPPERS and d.subject == name:
        if d.rule in ("interE", "unionE") or not d.premises:
            if not d.premises and equiv(t, TOP if plug else BOT):
                return d
            raise TransformError(f"{name} is the subject of {d.rule}")
    premises = [_retype(p, name, t, plug) for p in d.premises]
    new_own = {**own, name: normalize(t)}
    out = _with(d, premises=premises, **({"plug_ctx": new_own} if plug else {"socket_ctx": new_own}))
    if d.rule == "Ax" and ax_witness(out.socket_ctx[out.net.socket], out.plug_ctx[out.net.plug]) is None:
        raise TransformError(f"Ax cannot carry {name} at the new type")
    if d.rule == "impL" and not plug and name == d.net.mid:
        arrow = Arrow(premises[0].plug_ctx[d.net.plug], premises[1].socket_ctx[d.net.socket])
        parts = [p.socket_ctx[name] for p in premises if name in p.socket_ctx] + [arrow]
        if not equiv(meet(parts), t):
            raise TransformError(f"the import arrow is not above the new type of {name}")
    if d.rule == "impR" and plug and name == d.net.out:
        arrow = Arrow(premises[0].socket_ctx[d.net.socket], premises[0].plug_ctx[d.net.plug])
        parts = [premises[0].plug_ctx[name]] if name in premises[0].plug_ctx else []
        if not equiv(join(parts + [arrow]), t):
            raise TransformError(f"the export arrow is not below the new type of {name}")
    if d.rule == "cut" or d.rule.startswith("dagger"):
        out.cut_type = normalize(premises[0].plug_ctx[d.net.plug])
    return out


def _adjust(d: Derivation, name: str, t: IUType, plug: bool) -> Derivation:
    """Give the free connector ``name`` type ``t`` at the root of ``d``.

    Where the current type is already below (a plug) or above (a socket)
    ``t``, weakening does it.  Otherwise the change is pushed into the
    premises of rules that merely pass ``name`` on, and only the rules that
    shape its type are retyped in place.
    """
    own = d.plug_ctx if plug else d.socket_ctx
    if name not in own:
        return d
    cur = own[name]
    if leq(cur, t) if plug else leq(t, cur):
        return _weaken(d, {}, {name: t}) if plug else _weaken(d, {name: t}, {})
    shapes = (d.rule in WRAPPERS and d.subject == name) or (
        isinstance(d.net, Import) and d.rule == "impL" and d.net.mid == name) or (
        isinstance(d.net, Export) and d.rule == "impR" and d.net.out == name)
    if d.premises and not shapes:
        ps = [_adjust(p, name, t, plug) for p in d.premises]
        return _rebuild(replace(d, premises=ps))
    return _retype(d, name, t, plug)


def retype_socket(d: Derivation, x: str, t: IUType) -> Derivation:
    return _adjust(d, x, t, plug=False)


def retype_plug(d: Derivation, a: str, t: IUType) -> Derivation:
    return _adjust(d, a, t, plug=True)


# ---------------------------------------------------------------------------
# rebuilding conclusions bottom-up


def _rebuild(d: Derivation) -> Derivation:
    """Recompute every conclusion from the leaves up (leaves keep their contexts)."""
    if not d.premises:
        return d
    ps = [_rebuild(p) for p in d.premises]
    s, n = d.system, d.net
    if d.rule == "impR":
        return build.imp_r(s, n, ps[0])
    if d.rule == "impL":
        return build.imp_l(s, n, ps[0], ps[1])
    if d.rule in ("cut", "daggerL", "daggerR"):
        return build.cut(s, n, ps[0], ps[1])
    if d.rule == "interR":
        return build.inter_r(s, n, d.subject, ps)
    if d.rule == "unionL":
        return build.union_l(s, n, d.subject, ps)
    if d.rule == "interE":
        return build.inter_e(ps[0], d.subject, d.index)
    return build.union_e(ps[0], d.subject, d.index)


def _rename_free(d: Derivation, old: str, new: str, plug: bool) -> Derivation:
    """Rename a free connector throughout ``d`` (nets, leaf contexts, subjects)."""
    from .syntax import rename_plug, rename_socket
    ren = rename_plug if plug else rename_socket
    merge = ctx_merge_union if plug else ctx_merge_inter

    def go(e: Derivation) -> Derivation:
        net = ren(e.net, old, new, refresh=False)
        subject = new if e.subject == old else e.subject
        own = e.plug_ctx if plug else e.socket_ctx
        if old in own:
            moved = {k: v for k, v in own.items() if k != old}
            own = merge(moved, {new: own[old]})
        ctx = {"plug_ctx": own} if plug else {"socket_ctx": own}
        return _with(e, net=net, subject=subject, premises=[go(p) for p in e.premises], **ctx)

    return _rebuild(go(d))


# ---------------------------------------------------------------------------
# generation facts


@dataclass
class GenerationFacts:
    """What a proper derivation reveals about its net.

    ``shape`` names the net form.  For a capsule ``types`` is the pair of
    connector types, for an export or import the arrow's domain and codomain
    followed by the declared type of the outer connector, and for a cut the
    cut type.  ``holds`` reports the accompanying inequality.  ``cut_form`` is
    1 when the left premise ends with ``interR`` on the cut plug, 2 when the
    right premise ends with ``unionL`` on the cut socket, and 3 otherwise.
    """
    shape: str
    types: tuple[IUType, ...]
    holds: bool
    premises: tuple[Derivation, ...] = ()
    cut_form: int | None = None


def invert(d: Derivation) -> GenerationFacts:
    if d.rule in ("interR", "unionL"):
        raise TransformError(f"a derivation ending with {d.rule} is not proper")
    core = d
    while core.rule in ("interE", "unionE"):
        core = core.premises[0]
    n = d.net
    if isinstance(n, Capsule):
        a_t, b_t = d.socket_ctx[n.socket], d.plug_ctx[n.plug]
        return GenerationFacts("capsule", (a_t, b_t), leq(a_t, b_t))
    if isinstance(n, Export):
        body = core.premises[0]
        a_t, b_t = body.socket_ctx[n.socket], body.plug_ctx[n.plug]
        c_t = d.plug_ctx[n.out]
        return GenerationFacts("export", (a_t, b_t, c_t), leq(Arrow(a_t, b_t), c_t), (body,))
    if isinstance(n, Import):
        left, right = core.premises
        a_t, b_t = left.plug_ctx[n.plug], right.socket_ctx[n.socket]
        c_t = d.socket_ctx[n.mid]
        return GenerationFacts("import", (a_t, b_t, c_t), leq(c_t, Arrow(a_t, b_t)), (left, right))
    left, right = core.premises
    form = 3
    if left.rule == "interR" and left.subject == n.plug:
        form = 1
    elif right.rule == "unionL" and right.subject == n.socket:
        form = 2
    ok = equiv(left.plug_ctx[n.plug], right.socket_ctx[n.socket])
    return GenerationFacts("cut", (core.cut_type,), ok, (left, right), form)


# ---------------------------------------------------------------------------
# renaming cuts and eliminations


def rename_cut_derivation(d: Derivation) -> Derivation:
    """From a typed renaming cut, a typing of the renamed net at the same contexts.

    ``P a^ + x^ <x.b>`` (either activation) gives ``P[b/a]``; ``<y.a> a^ + x^ Q``
    gives ``Q[y/x]``.
    """
    n = d.net
    if not isinstance(n, Cut):
        raise TransformError("renaming needs a cut")
    core = d
    if core.rule in WRAPPERS:
        raise TransformError("renaming needs a derivation ending with a cut rule")
    left, right = core.premises
    if isinstance(n.right, Capsule) and n.right.socket == n.socket:
        out = _rename_free(left, n.plug, n.right.plug, plug=True)
    elif isinstance(n.left, Capsule) and n.left.plug == n.plug:
        out = _rename_free(right, n.socket, n.left.socket, plug=False)
    else:
        raise TransformError("the cut is not a renaming cut")
    out = fit(out, d.socket_ctx, d.plug_ctx)
    check_derivation(out)
    return out


def elim_inter(d: Derivation, a: str) -> tuple[Derivation, Derivation]:
    """Split ``a : A & B`` into derivations typing ``a`` by each side."""
    return _elim(d, a, plug=True)


def elim_union(d: Derivation, x: str) -> tuple[Derivation, Derivation]:
    """Split ``x : A | B`` into derivations typing ``x`` by each side."""
    return _elim(d, x, plug=False)


def _elim(d: Derivation, name: str, plug: bool) -> tuple[Derivation, Derivation]:
    own = d.plug_ctx if plug else d.socket_ctx
    if name not in own:
        raise TransformError(f"{name} is not typed")
    parts = spine(own[name], plug_side=plug)
    if len(parts) < 2:
        kind = "an intersection" if plug else "a union"
        raise TransformError(f"the type of {name} is not {kind}")
    project = build.inter_e if plug else build.union_e
    first = project(d, name, 0)
    rest = [project(d, name, i) for i in range(1, len(parts))]
    if len(rest) == 1:
        second = rest[0]
    else:
        wrap = build.inter_r if plug else build.union_l
        second = wrap(d.system, d.net, name, rest)
    for out in (first, second):
        check_derivation(out)
    return first, second


# ---------------------------------------------------------------------------
# following a derivation to a position


def _descend(d: Derivation, path: tuple[int, ...], new_net: Net,
             at_target: Callable[[Derivation], Derivation]) -> Derivation:
    """Replace the typing of the subnet at ``path`` and retarget the nodes above.

    ``new_net`` is the whole net after replacement, at the level of ``d``.
    Wrappers are mapped over (premise-free ones are simply moved to the new
    net); ``at_target`` receives pure derivations of the old subnet and must
    return derivations of the new one with the same contexts.
    """
    if d.rule in WRAPPERS:
        if d.rule in ("interR", "unionL") and not wrapper_allowed(d.system, d.rule, new_net, d.subject):
            raise TransformError(f"{d.rule} on {d.subject} loses its side condition")
        premises = [_descend(p, path, new_net, at_target) for p in d.premises]
        return _with(d, net=new_net, premises=premises)
    if not path:
        out = at_target(d)
        if out.net != new_net:
            raise TransformError("case construction produced a different net")
        return out
    i = path[0]
    premises = list(d.premises)
    premises[i] = _descend(premises[i], path[1:], children(new_net)[i], at_target)
    return _with(d, net=new_net, premises=premises)


def _cores(d: Derivation) -> Iterator[Derivation]:
    """The pure derivations below the wrappers at the root of ``d``."""
    if d.rule in WRAPPERS:
        for p in d.premises:
            yield from _cores(p)
    else:
        yield d


def _map_cores(d: Derivation, f: Callable[[Derivation], Derivation],
               rename: Mapping[str, str]) -> Derivation:
    """Rebuild the wrappers at the root of ``d`` over ``f`` of each core, renaming subjects."""
    if d.rule not in WRAPPERS:
        return f(d)
    if not d.premises:
        raise TransformError("cannot map a wrapper without premises")
    ps = [_map_cores(p, f, rename) for p in d.premises]
    subj = rename.get(d.subject, d.subject)
    if d.rule == "interR":
        return build.inter_r(d.system, ps[0].net, subj, ps)
    if d.rule == "unionL":
        return build.union_l(d.system, ps[0].net, subj, ps)
    if d.rule == "interE":
        return build.inter_e(ps[0], subj, d.index)
    return build.union_e(ps[0], subj, d.index)


def _bound_at(d: Derivation, i: int) -> set[str]:
    n = d.net
    if isinstance(n, Export):
        return {n.socket, n.plug}
    if isinstance(n, (Import, Cut)):
        return {n.plug} if i == 0 else {n.socket}
    return set()


def hoist(d: Derivation, budget: int = 64) -> Derivation:
    """Move wrappers above the rules that use their conclusions where that is sound.

    A wrapper on a connector that the parent does not bind and that no
    sibling premise mentions commutes with the parent.  Each socket type of
    the result is at least, and each plug type at most, the original, so the
    result fits the original contexts.  ``budget`` bounds the number of
    premise copies created.
    """
    if not d.premises:
        return d
    ps = [hoist(p, budget) for p in d.premises]
    d = _rebuild(replace(d, premises=ps))
    if d.rule in WRAPPERS:
        return d
    for i, w in enumerate(d.premises):
        if w.rule not in WRAPPERS or w.subject in _bound_at(d, i):
            continue
        others = [q for j, q in enumerate(d.premises) if j != i]
        if any(w.subject in q.socket_ctx or w.subject in q.plug_ctx for q in others):
            continue
        if not w.premises:
            empty = build.inter_r if w.rule == "interR" else build.union_l
            return empty(d.system, d.net, w.subject, [],
                         socket_ctx={k: v for k, v in d.socket_ctx.items() if k != w.subject},
                         plug_ctx={k: v for k, v in d.plug_ctx.items() if k != w.subject})
        if len(w.premises) > budget:
            continue
        budget //= max(1, len(w.premises))
        subs = []
        for k in w.premises:
            nps = list(d.premises)
            nps[i] = k
            subs.append(hoist(_rebuild(replace(d, premises=nps)), budget))
        return _rewrap(w, d.net, subs)
    return d


def _differs(a: Derivation, b: Derivation) -> bool:
    return [e.rule for e in _walk(a)] != [e.rule for e in _walk(b)]


def _rewrap(d: Derivation, net: Net, premises: list[Derivation]) -> Derivation:
    """The wrapper ``d`` reapplied over ``premises`` typing ``net``."""
    if not wrapper_allowed(d.system, d.rule, net, d.subject):
        raise TransformError(f"{d.rule} on {d.subject} is not allowed on the new net")
    if d.rule == "interR":
        return build.inter_r(d.system, net, d.subject, premises)
    if d.rule == "unionL":
        return build.union_l(d.system, net, d.subject, premises)
    if d.rule == "interE":
        return build.inter_e(premises[0], d.subject, d.index)
    return build.union_e(premises[0], d.subject, d.index)


def _types_of(d: Derivation) -> list[IUType]:
    out = []
    for e in _walk(d):
        out.extend(e.socket_ctx.values())
        out.extend(e.plug_ctx.values())
        if e.cut_type is not None:
            out.append(e.cut_type)
    return out


def _walk(d: Derivation) -> Iterator[Derivation]:
    yield d
    for p in d.premises:
        yield from _walk(p)


def _local_ok(d: Derivation) -> bool:
    from .derivation import _RULE_CHECKS
    return _RULE_CHECKS[d.rule](d, d.system) is None


def _cut_variants(s: System, net: Cut, left: Derivation, right: Derivation) -> Iterator[Derivation]:
    """Cuts of ``left`` and ``right`` on ``net``, adjusting the cut connectors.

    The plug type on the left must be below the socket type on the right; the
    cut type is then either of the two (the other side is weakened).  Where an
    activated cut needs a strict cut type, an intersection (union) is split
    by projecting the plug (socket) and retyping the introduced connector on
    the other side.
    """
    a, x = net.plug, net.socket
    lt, rt = left.plug_ctx.get(a), right.socket_ctx.get(x)
    if lt is None or rt is None or not leq(lt, rt):
        return
    pairs = [(left, right)]
    if not equiv(lt, rt):
        pairs = [(left, _weaken(right, {x: lt}, {})), (_weaken(left, {}, {a: rt}), right)]
    for le, ri in pairs:
        out = build.cut(s, net, le, ri)
        if _local_ok(out):
            yield out
            continue
        t = out.cut_type
        if out.rule == "daggerL":
            for i, part in enumerate(spine(t, plug_side=True)):
                try:
                    yield build.cut(s, net, build.inter_e(le, a, i), retype_socket(ri, x, part))
                except TransformError:
                    pass
        elif out.rule == "daggerR":
            for i, part in enumerate(spine(t, plug_side=False)):
                try:
                    yield build.cut(s, net, retype_plug(le, a, part), build.union_e(ri, x, i))
                except TransformError:
                    pass


def _cut_any(s: System, net: Cut, left: Derivation, right: Derivation) -> Derivation:
    for out in _cut_variants(s, net, left, right):
        if _local_ok(out):
            return out
    raise TransformError(f"no admissible cut type on {net.plug}/{net.socket}")


def _first(cands: Iterator[Callable[[], Derivation]], socket_ctx, plug_ctx) -> Derivation:
    """The first candidate that builds, checks and fits ``socket_ctx |- plug_ctx``."""
    last = "no candidate applies"
    for make in cands:
        try:
            out = fit(make(), socket_ctx, plug_ctx)
            check_derivation(out)
            return out
        except (TransformError, RuleError, KeyError, ValueError) as exc:
            last = str(exc)
    raise TransformError(last)


# ---------------------------------------------------------------------------
# witness expansion


def _cutlike(d: Derivation) -> tuple[Derivation, Derivation]:
    if d.rule not in ("cut", "daggerL", "daggerR"):
        raise TransformError(f"expected a cut rule, found {d.rule}")
    return d.premises[0], d.premises[1]


def _only(rule: str, d: Derivation) -> list[Derivation]:
    if d.rule != rule:
        raise TransformError(f"expected {rule}, found {d.rule}")
    return d.premises


def _x_ax(d: Derivation, r: Cut) -> Iterator[Callable[[], Derivation]]:
    def make():
        s = d.system
        y, b = r.left.socket, r.right.plug
        c = ax_witness(d.socket_ctx[y], d.plug_ctx[b])
        if c is None:
            raise TransformError("no proper type between the capsule's connectors")
        left = build.ax(s, r.left, d.socket_ctx, {**d.plug_ctx, r.plug: c})
        right = build.ax(s, r.right, {**d.socket_ctx, r.socket: c}, d.plug_ctx)
        return build.cut(s, r, left, right)
    yield make


def _x_exp_r(d: Derivation, r: Cut):
    def make():
        (body,) = _only("impR", d)
        left = build.imp_r(d.system, r.left, body)
        arrow = left.plug_ctx[r.plug]
        right = build.ax(d.system, r.right, {r.socket: arrow}, {r.right.plug: arrow})
        return _cut_any(d.system, r, left, right)
    yield make


def _x_imp_l(d: Derivation, r: Cut):
    def make():
        d1, d2 = _only("impL", d)
        right = build.imp_l(d.system, r.right, d1, d2)
        arrow = right.socket_ctx[r.socket]
        left = build.ax(d.system, r.left, {r.left.socket: arrow}, {r.plug: arrow})
        return _cut_any(d.system, r, left, right)
    yield make


def _pieces(d: Derivation, key: str, plug: bool, rule: str | None = None) -> list[Derivation]:
    """The cores under the wrappers on ``key`` at the root of ``d``.

    Only ``interR``/``interE`` (``unionL``/``unionE``) on the plug (socket)
    ``key`` are looked through; their combination is recovered by joining the
    cores again on ``key``.  ``rule`` restricts the cores ("cut" admits every
    cut rule).
    """
    wrappers = ("interR", "interE") if plug else ("unionL", "unionE")
    if d.rule in WRAPPERS:
        if d.rule not in wrappers or d.subject != key or not d.premises:
            raise TransformError(f"{d.rule} on {d.subject} blocks the construction")
        return [c for p in d.premises for c in _pieces(p, key, plug, rule)]
    if rule == "cut":
        _cutlike(d)
    elif rule is not None:
        _only(rule, d)
    return [d]


def _join_on(s: System, key: str, plug: bool, ds: list[Derivation]) -> Derivation:
    """``interR`` (plug) or ``unionL`` (socket) on ``key`` over ``ds``; a single premise is kept as is."""
    if len(ds) == 1:
        return ds[0]
    wrap = build.inter_r if plug else build.union_l
    return wrap(s, ds[0].net, key, ds)


def _x_exp_imp(d: Derivation, r: Cut, right_assoc: bool):
    """Pieces of the reduct rejoined either as an intersection of exports or inside one export."""
    s = d.system
    exp, imp = r.left, r.right
    y, b = exp.socket, exp.plug

    def make(joined: bool):
        # the export's bound connector may sit spuriously in the sibling's
        # context; its statement moves to the body
        if right_assoc:
            d_right1, inner = _cutlike(d)
            bodies, q2s = [], []
            for c in _pieces(inner, y, False, "cut"):
                d_left, d_right2 = _cutlike(c)
                bodies.append(_weaken(d_left, {y: c.socket_ctx[y]}, {}) if y in d_right2.socket_ctx else d_left)
                q2s.append(thin(d_right2, {y}) if y in d_right2.socket_ctx else d_right2)
            q1, q2 = d_right1, _join_on(s, imp.socket, False, q2s)
        else:
            inner, d_right2 = _cutlike(d)
            bodies, q1s = [], []
            for c in _pieces(inner, b, True, "cut"):
                d_right1, d_left = _cutlike(c)
                bodies.append(_weaken(d_left, {}, {b: c.plug_ctx[b]}) if b in d_right1.plug_ctx else d_left)
                q1s.append(thin(d_right1, {b}) if b in d_right1.plug_ctx else d_right1)
            q1, q2 = _join_on(s, imp.plug, True, q1s), d_right2
        if joined:
            # one export whose body joins the pieces on its own binder
            body = _join_on(s, y if right_assoc else b, not right_assoc, bodies)
            left = build.imp_r(s, exp, body)
        else:
            left = _join_on(s, r.plug, True, [build.imp_r(s, exp, piece) for piece in bodies])
        return _cut_any(s, r, left, build.imp_l(s, imp, q1, q2))

    for joined in (False, True):
        yield lambda joined=joined: make(joined)



def _x_same_premises(d: Derivation, r: Cut):
    def make():
        left, right = _cutlike(d)
        return _cut_any(d.system, r, left, right)
    yield make


def _x_dl_cap(d: Derivation, r: Cut):
    def make():
        s = d.system
        left = weaken(d, {}, {r.plug: BOT})
        right = build.union_l(s, r.right, r.socket, [], socket_ctx={}, plug_ctx={})
        return build.cut(s, r, left, right)
    yield make


def _x_dr_cap(d: Derivation, r: Cut):
    def make():
        s = d.system
        right = weaken(d, {r.socket: TOP}, {})
        left = build.inter_r(s, r.left, r.plug, [], socket_ctx={}, plug_ctx={})
        return build.cut(s, r, left, right)
    yield make


def _x_dl_exp_outs(d: Derivation, r: Cut):
    def make():
        s = d.system
        d_exp, d_out = _cutlike(d)
        pieces = [_cutlike(_only("impR", c)[0]) for c in _pieces(d_exp, d.net.plug, True, "impR")]
        left = _join_on(s, r.plug, True, [build.imp_r(s, r.left, d_left) for d_left, _ in pieces])
        right = build.union_l(s, r.right, r.socket, [d_in for _, d_in in pieces] + [d_out])
        return _cut_any(s, r, left, right)
    yield make



def _x_dl_exp_ins(d: Derivation, r: Cut):
    def make():
        (inner,) = _only("impR", d)
        d_left, d_right = _cutlike(inner)
        return _cut_any(d.system, r, build.imp_r(d.system, r.left, d_left), d_right)
    yield make


def _x_dl_split(d: Derivation, r: Cut, outer: str):
    """Left propagation into an import or an inactive cut: ``unionL`` joins the copies."""
    def make():
        s = d.system
        inner = r.left
        if outer == "impL":
            c1, c2 = _only("impL", d)
        else:
            c1, c2 = _cutlike(d)
        ps1 = [_cutlike(c) for c in _pieces(c1, inner.plug, True, "cut")]
        ps2 = [_cutlike(c) for c in _pieces(c2, inner.socket, False, "cut")]
        d_left1 = _join_on(s, inner.plug, True, [d_left for d_left, _ in ps1])
        d_left2 = _join_on(s, inner.socket, False, [d_left for d_left, _ in ps2])
        if outer == "impL":
            left = build.imp_l(s, inner, d_left1, d_left2)
        else:
            left = _cut_any(s, inner, d_left1, d_left2)
        right = build.union_l(s, r.right, r.socket, [d_right for _, d_right in ps1 + ps2])
        return _cut_any(s, r, left, right)
    yield make



def _x_dr_exp(d: Derivation, r: Cut):
    def make():
        (inner,) = _only("impR", d)
        d_left, d_right = _cutlike(inner)
        return _cut_any(d.system, r, d_left, build.imp_r(d.system, r.right, d_right))
    yield make


def _x_dr_split(d: Derivation, r: Cut, outer: str):
    """Right propagation into an import or an inactive cut: ``interR`` joins the copies."""
    def make():
        s = d.system
        inner = r.right
        if outer == "impL":
            c1, c2 = _only("impL", d)
        else:
            c1, c2 = _cutlike(d)
        ps1 = [_cutlike(c) for c in _pieces(c1, inner.plug, True, "cut")]
        ps2 = [_cutlike(c) for c in _pieces(c2, inner.socket, False, "cut")]
        left = build.inter_r(s, r.left, r.plug, [d_left for d_left, _ in ps1 + ps2])
        d_right1 = _join_on(s, inner.plug, True, [d_right for _, d_right in ps1])
        d_right2 = _join_on(s, inner.socket, False, [d_right for _, d_right in ps2])
        if outer == "impL":
            right = build.imp_l(s, inner, d_right1, d_right2)
        else:
            right = _cut_any(s, inner, d_right1, d_right2)
        return _cut_any(s, r, left, right)
    yield make



def _x_dr_imp_outs(d: Derivation, r: Cut):
    def make():
        s = d.system
        imp = r.right
        d_left0, d_imp = _cutlike(d)
        cores = _pieces(d_imp, d.net.socket, False, "impL")
        ps1 = [_cutlike(c.premises[0]) for c in cores]
        ps2 = [_cutlike(c.premises[1]) for c in cores]
        left = build.inter_r(s, r.left, r.plug, [d_left0] + [d_left for d_left, _ in ps1 + ps2])
        d_right1 = _join_on(s, imp.plug, True, [d_right for _, d_right in ps1])
        d_right2 = _join_on(s, imp.socket, False, [d_right for _, d_right in ps2])
        return _cut_any(s, r, left, build.imp_l(s, imp, d_right1, d_right2))
    yield make



_EXPAND = {
    RuleId.Ax: _x_ax,
    RuleId.ExpR: _x_exp_r,
    RuleId.ImpL: _x_imp_l,
    RuleId.ExpImpRightAssoc: lambda d, r: _x_exp_imp(d, r, True),
    RuleId.ExpImpLeftAssoc: lambda d, r: _x_exp_imp(d, r, False),
    RuleId.ActL: _x_same_premises,
    RuleId.ActR: _x_same_premises,
    RuleId.DL_d: _x_same_premises,
    RuleId.DR_d: _x_same_premises,
    RuleId.DL_cap: _x_dl_cap,
    RuleId.DR_cap: _x_dr_cap,
    RuleId.DL_expOuts: _x_dl_exp_outs,
    RuleId.DL_expIns: _x_dl_exp_ins,
    RuleId.DL_imp: lambda d, r: _x_dl_split(d, r, "impL"),
    RuleId.DL_cut: lambda d, r: _x_dl_split(d, r, "cut"),
    RuleId.DR_exp: _x_dr_exp,
    RuleId.DR_impIns: lambda d, r: _x_dr_split(d, r, "impL"),
    RuleId.DR_cut: lambda d, r: _x_dr_split(d, r, "cut"),
    RuleId.DR_impOuts: _x_dr_imp_outs,
}


def _raw_step(net: Net, redex: Redex, avoid: set[str]) -> tuple[Net, Net]:
    """The redex subnet and the whole reduct before bound names are refreshed."""
    if redex.rule.admissible:
        raise TransformError("only core rules are handled")
    sub = subnet_at(net, redex.path)
    supply = NameSupply(all_names(net) | avoid)
    return sub, replace_at(net, redex.path, contract(sub, redex.rule, supply))


def _all_ctx_names(d: Derivation) -> set[str]:
    return set().union(*(_names(e) for e in _walk(d)))


def _solve(rule: RuleId, d: Derivation, target: Net, cases, stats: TransformStats | None,
           search_depth: int, search_universe: int) -> Derivation:
    """Run the case construction at the redex; fall back to bounded search.

    A wrapper at the redex is handled premise by premise and then reapplied.
    """
    if d.rule in WRAPPERS and d.premises:
        try:
            ps = [_solve(rule, p, target, cases, None, search_depth, search_universe)
                  for p in d.premises]
            out = _first(iter([lambda: _rewrap(d, target, ps)]), d.socket_ctx, d.plug_ctx)
            if stats is not None:
                stats.record(rule, True)
            return out
        except TransformError:
            pass
    try:
        out = _first(cases(d, target), d.socket_ctx, d.plug_ctx)
        if stats is not None:
            stats.record(rule, True)
        return out
    except TransformError as exc:
        reason = str(exc)
    try:
        lifted = hoist(d)
    except (TransformError, RuleError, KeyError, ValueError):
        lifted = d
    if lifted is not d and _differs(lifted, d):
        try:
            check_derivation(lifted)
            out = fit(_solve(rule, lifted, target, cases, None, search_depth, 0), d.socket_ctx, d.plug_ctx)
            check_derivation(out)
            if stats is not None:
                stats.record(rule, True)
            return out
        except (TransformError, RuleError):
            pass
    if search_universe == 0:
        raise Stuck(rule, reason)
    from .search import search
    res = search(d.system, target, d.socket_ctx, d.plug_ctx, depth=search_depth,
                 universe=search_universe, extra_types=_types_of(d), max_goals=20_000)
    if res.found:
        if stats is not None:
            stats.record(rule, False)
        return res.derivation
    raise Stuck(rule, f"case construction failed ({reason}); search {res.verdict()}")


def expand(start: Net, redex: Redex, d_reduct: Derivation, stats: TransformStats | None = None,
           search_depth: int = 6, search_universe: int = 16) -> Derivation:
    """A typing of ``start`` from a typing ``d_reduct`` of its reduct by ``redex``, at the same contexts."""
    if d_reduct.system is not System.IU:
        raise TransformError("expansion is defined for the IU system")
    sub, reduct_raw = _raw_step(start, redex, _all_ctx_names(d_reduct))
    if not alpha_eq(reduct_raw, d_reduct.net):
        raise TransformError("the derivation does not type the reduct of this step")
    d_raw = transport(d_reduct, reduct_raw)
    rule = redex.rule

    def at_target(d: Derivation) -> Derivation:
        return _solve(rule, d, sub, _EXPAND[rule], stats, search_depth, search_universe)

    out = _descend(d_raw, redex.path, start, at_target)
    check_derivation(out)
    return out


# ---------------------------------------------------------------------------
# witness reduction


def _with_plug(d: Derivation, a: str, default: IUType) -> Derivation:
    return d if a in d.plug_ctx else _weaken(d, {}, {a: default})


def _with_socket(d: Derivation, x: str, default: IUType) -> Derivation:
    return d if x in d.socket_ctx else _weaken(d, {x: default}, {})


def _p_ax(d: Derivation, r: Cut, rn: Net):
    def make():
        if ax_witness(d.socket_ctx[rn.socket], d.plug_ctx[rn.plug]) is None:
            raise TransformError("no proper type between the connectors of the reduct")
        return build.ax(d.system, rn, d.socket_ctx, d.plug_ctx)
    yield make


def _p_exp_r(d: Derivation, r: Cut, rn: Net):
    d_left, _ = _cutlike(d)
    for core in _cores(d_left):
        if core.rule == "impR":
            yield lambda core=core: build.imp_r(d.system, rn, core.premises[0])


def _p_imp_l(d: Derivation, r: Cut, rn: Net):
    _, d_right = _cutlike(d)
    for core in _cores(d_right):
        if core.rule == "impL":
            yield lambda core=core: build.imp_l(d.system, rn, *core.premises)


def _p_exp_imp(d: Derivation, r: Cut, rn: Cut, right_assoc: bool):
    s = d.system
    d_left, d_right = _cutlike(d)
    for cp in _cores(d_left):
        for cq in _cores(d_right):
            if cp.rule != "impR" or cq.rule != "impL":
                continue

            def make(cp=cp, cq=cq):
                body = cp.premises[0]
                d_right1, d_right2 = cq.premises
                if right_assoc:
                    inner = _cut_any(s, rn.right, body, d_right2)
                    return _cut_any(s, rn, d_right1, inner)
                inner = _cut_any(s, rn.left, d_right1, body)
                return _cut_any(s, rn, inner, d_right2)
            yield make


def _p_same_premises(d: Derivation, r: Cut, rn: Cut):
    d_left, d_right = _cutlike(d)
    for out in _cut_variants(d.system, rn, d_left, d_right):
        yield lambda out=out: out


def _p_dl_cap(d: Derivation, r: Cut, rn: Net):
    d_left, _ = _cutlike(d)
    yield lambda: thin(d_left, {r.plug})


def _p_dr_cap(d: Derivation, r: Cut, rn: Net):
    _, d_right = _cutlike(d)
    yield lambda: thin(d_right, {r.socket})


def _p_dl_exp_outs(d: Derivation, r: Cut, rn: Cut):
    s = d.system

    def one(core: Derivation, d_right: Derivation) -> Derivation:
        if core.rule != "impR":
            raise TransformError("expected an export")
        body = _with_plug(core.premises[0], r.plug, d.cut_type)
        return build.imp_r(s, rn.left, _cut_any(s, rn.left.body, body, d_right))

    d_left, d_right = _cutlike(d)
    for core in _cores(d_left):
        if core.rule == "impR":
            yield lambda core=core: _cut_any(s, rn, one(core, d_right), d_right)
    if d_left.rule in WRAPPERS:
        # the copies of the export keep the wrappers of the original, now on the fresh plug
        yield lambda: _cut_any(s, rn, _map_cores(d_left, lambda c: one(c, d_right), {r.plug: rn.plug}), d_right)


def _p_dl_exp_ins(d: Derivation, r: Cut, rn: Export):
    s = d.system
    d_left, d_right = _cutlike(d)
    for core in _cores(d_left):
        if core.rule != "impR":
            continue

        def make(core=core):
            body = _with_plug(core.premises[0], r.plug, d.cut_type)
            return build.imp_r(s, rn, _cut_any(s, rn.body, body, d_right))
        yield make


def _p_dl_split(d: Derivation, r: Cut, rn: Net, outer: str):
    s = d.system
    d_left, d_right = _cutlike(d)
    for core in _cores(d_left):
        if core.rule != outer and not (outer == "cut" and core.rule in ("cut", "daggerL", "daggerR")):
            continue

        def make(core=core):
            d1, d2 = (_with_plug(e, r.plug, d.cut_type) for e in core.premises)
            c1 = _cut_any(s, rn.left, d1, d_right)
            c2 = _cut_any(s, rn.right, d2, d_right)
            if outer == "impL":
                return build.imp_l(s, rn, c1, c2)
            return _cut_any(s, rn, c1, c2)
        yield make


def _p_dr_exp(d: Derivation, r: Cut, rn: Export):
    s = d.system
    d_left, d_right = _cutlike(d)
    for core in _cores(d_right):
        if core.rule != "impR":
            continue

        def make(core=core):
            body = _with_socket(core.premises[0], r.socket, d.cut_type)
            return build.imp_r(s, rn, _cut_any(s, rn.body, d_left, body))
        yield make


def _p_dr_split(d: Derivation, r: Cut, rn: Net, outer: str):
    s = d.system
    d_left, d_right = _cutlike(d)
    for core in _cores(d_right):
        if core.rule != outer and not (outer == "cut" and core.rule in ("cut", "daggerL", "daggerR")):
            continue

        def make(core=core):
            d1, d2 = (_with_socket(e, r.socket, d.cut_type) for e in core.premises)
            c1 = _cut_any(s, rn.left, d_left, d1)
            c2 = _cut_any(s, rn.right, d_left, d2)
            if outer == "impL":
                return build.imp_l(s, rn, c1, c2)
            return _cut_any(s, rn, c1, c2)
        yield make


def _p_dr_imp_outs(d: Derivation, r: Cut, rn: Cut):
    s = d.system
    imp_net = rn.right

    def one(core: Derivation, d_left: Derivation) -> Derivation:
        if core.rule != "impL":
            raise TransformError("expected an import")
        d1, d2 = (_with_socket(e, r.socket, d.cut_type) for e in core.premises)
        c1 = _cut_any(s, imp_net.left, d_left, d1)
        c2 = _cut_any(s, imp_net.right, d_left, d2)
        return build.imp_l(s, imp_net, c1, c2)

    d_left, d_right = _cutlike(d)
    for core in _cores(d_right):
        if core.rule == "impL":
            yield lambda core=core: _cut_any(s, rn, d_left, one(core, d_left))
    if d_right.rule in WRAPPERS:
        yield lambda: _cut_any(s, rn, d_left, _map_cores(d_right, lambda c: one(c, d_left), {r.socket: rn.socket}))


_PRESERVE = {
    RuleId.Ax: _p_ax,
    RuleId.ExpR: _p_exp_r,
    RuleId.ImpL: _p_imp_l,
    RuleId.ExpImpRightAssoc: lambda d, r, rn: _p_exp_imp(d, r, rn, True),
    RuleId.ExpImpLeftAssoc: lambda d, r, rn: _p_exp_imp(d, r, rn, False),
    RuleId.ActL: _p_same_premises,
    RuleId.ActR: _p_same_premises,
    RuleId.DL_d: _p_same_premises,
    RuleId.DR_d: _p_same_premises,
    RuleId.DL_cap: _p_dl_cap,
    RuleId.DR_cap: _p_dr_cap,
    RuleId.DL_expOuts: _p_dl_exp_outs,
    RuleId.DL_expIns: _p_dl_exp_ins,
    RuleId.DL_imp: lambda d, r, rn: _p_dl_split(d, r, rn, "impL"),
    RuleId.DL_cut: lambda d, r, rn: _p_dl_split(d, r, rn, "cut"),
    RuleId.DR_exp: _p_dr_exp,
    RuleId.DR_impIns: lambda d, r, rn: _p_dr_split(d, r, rn, "impL"),
    RuleId.DR_cut: lambda d, r, rn: _p_dr_split(d, r, rn, "cut"),
    RuleId.DR_impOuts: _p_dr_imp_outs,
}

_REGIME_SYSTEM = {
    Regime.FULL: System.SIMPLE,
    Regime.CBN: System.CBN,
    Regime.CBV: System.CBV,
}


def preserve(start: Net, redex: Redex, d_start: Derivation, regime: Regime,
             stats: TransformStats | None = None,
             search_depth: int = 6, search_universe: int = 16) -> Derivation:
    """A typing of the reduct of ``start`` by ``redex`` from a typing ``d_start`` of ``start``.

    ``regime`` fixes the system: the full regime goes with ``Simple``, CBN
    with ``CBN`` and CBV with ``CBV``.  The result types ``step(start, redex)`` at
    the contexts of ``d_start``.
    """
    system = _REGIME_SYSTEM[regime]
    if d_start.system is not system:
        raise TransformError(f"the {regime.value} regime pairs with {system.value}")
    if d_start.net != start:
        raise TransformError("the derivation does not type this net")
    if redex.rule not in rules_at(subnet_at(start, redex.path), regime):
        raise TransformError(f"{redex.rule.name} is not a {regime.value} step here")
    sub, reduct_raw = _raw_step(start, redex, _all_ctx_names(d_start))
    new_sub = subnet_at(reduct_raw, redex.path)
    rule = redex.rule

    def cases(d: Derivation, target: Net):
        return _PRESERVE[rule](d, sub, target)

    def at_target(d: Derivation) -> Derivation:
        return _solve(rule, d, new_sub, cases, stats, search_depth, search_universe)

    out_raw = _descend(d_start, redex.path, reduct_raw, at_target)
    out = transport(out_raw, step(start, redex))
    check_derivation(out)
    return out
