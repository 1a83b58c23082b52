"""Derivation trees for context assignment on nets, their checker and JSON form.

Four systems share one rule vocabulary:

``Simple``
    ``Ax``, ``cut``, ``impL``, ``impR`` over variable/arrow types only.
``IU``
    adds ``interR`` and ``unionL`` (any number of premises, including none)
    and the projections ``interE`` / ``unionE``.
``CBN``
    as ``IU``; left-activated cuts need ``daggerL`` (cut type not an
    intersection, cut socket introduced on the right) and ``unionL`` needs its
    socket introduced.
``CBV``
    the mirror image: right-activated cuts need ``daggerR`` (cut type not a
    union, cut plug introduced on the left) and ``interR`` needs its plug
    introduced.

Every rule combines the contexts of its premises: socket statements about a
shared subject are intersected and plug statements are joined.  ``Ax`` types
``<y.a>`` whenever some proper ``C`` sits between the socket type of ``y`` and
the plug type of ``a``, which is the combined form ``G & y:C |- a:C | D``.
With no premises ``interR`` gives its plug ``TOP`` and ``unionL`` gives its
socket ``BOT``, the other statements being arbitrary.

Contexts are compared per subject modulo type equivalence.  A context never
mentions a connector bound inside the net it types.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import Any, Mapping

from . import syntax as sx
from .syntax import Capsule, Cut, Export, Import, Net, Activation
from .types import (
    Arrow, Bot, IUType, Inter, Top, Union, ctx_merge_inter, ctx_merge_union,
    equiv, is_proper, is_simple, join, joinands, leq, meet, meetands, normalize,
    parse_type, show_type, subterms, type_size,
)

__all__ = [
    "System", "Derivation", "RuleError", "check_derivation", "RULES",
    "to_json", "from_json", "dumps", "loads", "WRAPPERS", "conclusion_text",
    "simple_to_iu", "walk", "ax_witness", "wrapper_allowed", "spine",
]


class System(enum.Enum):
    SIMPLE = "Simple"
    IU = "IU"
    CBN = "CBN"
    CBV = "CBV"


RULES = {
    System.SIMPLE: {"Ax", "cut", "impL", "impR"},
    System.IU: {"Ax", "cut", "impL", "impR", "interR", "unionL", "interE", "unionE"},
    System.CBN: {"Ax", "cut", "daggerL", "impL", "impR", "interR", "unionL", "interE", "unionE"},
    System.CBV: {"Ax", "cut", "daggerR", "impL", "impR", "interR", "unionL", "interE", "unionE"},
}

WRAPPERS = {"interR", "unionL", "interE", "unionE"}

Ctx = dict[str, IUType]


@dataclass
class Derivation:
    system: System
    rule: str
    net: Net
    socket_ctx: Ctx
    plug_ctx: Ctx
    premises: list["Derivation"] = field(default_factory=list)
    cut_type: IUType | None = None
    subject: str | None = None
    index: int | None = None

    def judgement(self) -> tuple[Net, Ctx, Ctx]:
        return self.net, self.socket_ctx, self.plug_ctx

    def size(self) -> int:
        return 1 + sum(p.size() for p in self.premises)

    def with_system(self, system: System) -> "Derivation":
        return Derivation(system, self.rule, self.net, dict(self.socket_ctx), dict(self.plug_ctx),
                          [p.with_system(system) for p in self.premises],
                          self.cut_type, self.subject, self.index)


def walk(d: Derivation, path: tuple[int, ...] = ()):
    yield path, d
    for i, p in enumerate(d.premises):
        yield from walk(p, path + (i,))


class RuleError(ValueError):
    def __init__(self, path: tuple[int, ...], reason: str):
        super().__init__(f"at {list(path)}: {reason}")
        self.path = path
        self.reason = reason


def conclusion_text(d: Derivation) -> str:
    from .types import show_context
    return f"{sx.show(d.net)} : {show_context(d.socket_ctx)} |- {show_context(d.plug_ctx)}"


# ---------------------------------------------------------------------------
# checking


def _same_ctx(a: Mapping[str, IUType], b: Mapping[str, IUType]) -> str | None:
    if set(a) != set(b):
        missing = sorted(set(a) ^ set(b))
        return f"subjects differ on {', '.join(missing)}"
    for k in a:
        if not equiv(a[k], b[k]):
            return f"statement for {k} differs: {show_type(a[k])} vs {show_type(b[k])}"
    return None


def _without(ctx: Mapping[str, IUType], name: str) -> Ctx:
    return {k: v for k, v in ctx.items() if k != name}


def check_derivation(d: Derivation, system: System | None = None) -> None:
    """Raise :class:`RuleError` at the first bad node; return ``None`` if fine."""
    _check(d, system or d.system, ())


def _check(d: Derivation, system: System, path: tuple[int, ...]) -> None:
    def fail(reason: str):
        raise RuleError(path, reason)

    if d.system is not system:
        fail(f"node belongs to system {d.system.value}, expected {system.value}")
    if d.rule not in RULES[system]:
        fail(f"rule {d.rule} is not part of system {system.value}")
    net = d.net
    bound = set(sx.bound_sockets(net)) | set(sx.bound_plugs(net))
    clash = bound & (set(d.socket_ctx) | set(d.plug_ctx))
    if clash:
        fail(f"context mentions bound connector(s) {', '.join(sorted(clash))}")
    if set(d.socket_ctx) & set(d.plug_ctx):
        fail("a name is used both as a socket and as a plug")
    if system is System.SIMPLE:
        for ctx in (d.socket_ctx, d.plug_ctx):
            for k, t in ctx.items():
                if not is_simple(t):
                    fail(f"type of {k} is not simple: {show_type(t)}")
        if d.cut_type is not None and not is_simple(d.cut_type):
            fail("cut type is not simple")

    for i, p in enumerate(d.premises):
        if p.net != net and d.rule in WRAPPERS:
            fail(f"premise {i} types a different net")
        _check(p, system, path + (i,))

    handler = _RULE_CHECKS.get(d.rule)
    if handler is None:
        fail(f"unknown rule {d.rule}")
    reason = handler(d, system)
    if reason:
        fail(reason)


def _arity(d: Derivation, n: int) -> str | None:
    if len(d.premises) != n:
        return f"{d.rule} needs {n} premise(s), got {len(d.premises)}"
    return None


def ax_witness(socket_ctx_y: IUType, plug_ctx_a: IUType) -> IUType | None:
    """A proper type ``C`` with ``socket_ctx_y <= C <= plug_ctx_a``, if one exists.

    ``C`` can always be taken among the proper subterms of ``socket_ctx_y``, since a
    proper type is above a type only through one of its atoms.
    """
    for c in sorted(subterms(normalize(socket_ctx_y)), key=lambda t: (type_size(t), show_type(t))):
        if is_proper(c) and leq(socket_ctx_y, c) and leq(c, plug_ctx_a):
            return c
    return None


def _check_ax(d: Derivation, system: System) -> str | None:
    if not isinstance(d.net, Capsule):
        return "Ax types a capsule"
    if (r := _arity(d, 0)):
        return r
    y, a = d.net.socket, d.net.plug
    if y not in d.socket_ctx or a not in d.plug_ctx:
        return "Ax needs statements for both connectors of the capsule"
    if ax_witness(d.socket_ctx[y], d.plug_ctx[a]) is None:
        return (f"Ax needs a proper type between {show_type(d.socket_ctx[y])} "
                f"and {show_type(d.plug_ctx[a])}")
    return None


def _combined(d: Derivation, want_socket_ctx: Ctx, want_plug_ctx: Ctx) -> str | None:
    if (r := _same_ctx(d.socket_ctx, want_socket_ctx)):
        return f"conclusion sockets: {r}"
    if (r := _same_ctx(d.plug_ctx, want_plug_ctx)):
        return f"conclusion plugs: {r}"
    return None


def _cut_schema(d: Derivation) -> str | None:
    if not isinstance(d.net, Cut):
        return f"{d.rule} types a cut"
    if (r := _arity(d, 2)):
        return r
    left, right = d.premises
    n = d.net
    if left.net != n.left or right.net != n.right:
        return "premise nets do not match the cut's subnets"
    if d.cut_type is None:
        return "cut type missing"
    a_t = left.plug_ctx.get(n.plug)
    x_t = right.socket_ctx.get(n.socket)
    if a_t is None or x_t is None:
        return "the cut connectors must be typed in the premises"
    if not equiv(a_t, d.cut_type) or not equiv(x_t, d.cut_type):
        return f"cut type mismatch: {show_type(a_t)} / {show_type(x_t)} vs {show_type(d.cut_type)}"
    return _combined(
        d,
        ctx_merge_inter(left.socket_ctx, _without(right.socket_ctx, n.socket)),
        ctx_merge_union(_without(left.plug_ctx, n.plug), right.plug_ctx),
    )


def _check_cut(d: Derivation, system: System) -> str | None:
    if (r := _cut_schema(d)):
        return r
    act = d.net.act
    if system is System.CBN and act is Activation.LEFT:
        return "left-activated cuts need daggerL in CBN"
    if system is System.CBV and act is Activation.RIGHT:
        return "right-activated cuts need daggerR in CBV"
    return None


def _check_dagger_l(d: Derivation, system: System) -> str | None:
    if (r := _cut_schema(d)):
        return r
    if d.net.act is not Activation.LEFT:
        return "daggerL types left-activated cuts only"
    t = normalize(d.cut_type)
    if isinstance(t, (Inter, Top)):
        return f"daggerL cut type {show_type(t)} is an intersection"
    if not sx.introduces_socket(d.net.right, d.net.socket):
        return f"daggerL needs {d.net.socket} introduced in the right subnet"
    return None


def _check_dagger_r(d: Derivation, system: System) -> str | None:
    if (r := _cut_schema(d)):
        return r
    if d.net.act is not Activation.RIGHT:
        return "daggerR types right-activated cuts only"
    t = normalize(d.cut_type)
    if isinstance(t, (Union, Bot)):
        return f"daggerR cut type {show_type(t)} is a union"
    if not sx.introduces_plug(d.net.left, d.net.plug):
        return f"daggerR needs {d.net.plug} introduced in the left subnet"
    return None


def _check_imp_l(d: Derivation, system: System) -> str | None:
    n = d.net
    if not isinstance(n, Import):
        return "impL types an import"
    if (r := _arity(d, 2)):
        return r
    left, right = d.premises
    if left.net != n.left or right.net != n.right:
        return "premise nets do not match the import's subnets"
    a_t = left.plug_ctx.get(n.plug)
    b_t = right.socket_ctx.get(n.socket)
    if a_t is None or b_t is None:
        return "the bound connectors must be typed in the premises"
    return _combined(
        d,
        ctx_merge_inter(left.socket_ctx, _without(right.socket_ctx, n.socket), {n.mid: Arrow(a_t, b_t)}),
        ctx_merge_union(_without(left.plug_ctx, n.plug), right.plug_ctx),
    )


def _check_imp_r(d: Derivation, system: System) -> str | None:
    n = d.net
    if not isinstance(n, Export):
        return "impR types an export"
    if (r := _arity(d, 1)):
        return r
    (body,) = d.premises
    if body.net != n.body:
        return "premise net does not match the export body"
    a_t = body.socket_ctx.get(n.socket)
    b_t = body.plug_ctx.get(n.plug)
    if a_t is None or b_t is None:
        return "the bound connectors must be typed in the premise"
    return _combined(
        d,
        _without(body.socket_ctx, n.socket),
        ctx_merge_union(_without(body.plug_ctx, n.plug), {n.out: Arrow(a_t, b_t)}),
    )


def wrapper_allowed(system: System, rule: str, net: Net, subject: str) -> bool:
    """Side condition of ``interR``/``unionL`` in ``system``."""
    if system is System.SIMPLE:
        return False
    if rule == "interR" and system is System.CBV:
        return sx.introduces_plug(net, subject)
    if rule == "unionL" and system is System.CBN:
        return sx.introduces_socket(net, subject)
    return True


def _check_inter_r(d: Derivation, system: System) -> str | None:
    a = d.subject
    if a is None:
        return "interR needs its subject plug"
    if not wrapper_allowed(system, "interR", d.net, a):
        return f"interR in CBV needs {a} introduced"
    return _combine(d, a, plug_side=True)


def _check_union_l(d: Derivation, system: System) -> str | None:
    x = d.subject
    if x is None:
        return "unionL needs its subject socket"
    if not wrapper_allowed(system, "unionL", d.net, x):
        return f"unionL in CBN needs {x} introduced"
    return _combine(d, x, plug_side=False)


def _combine(d: Derivation, subj: str, plug_side: bool) -> str | None:
    """Shared schema of ``interR`` (plug side) and ``unionL`` (socket side).

    Premise contexts are combined, sockets by intersection and plugs by
    union; with no premises the remaining contexts are unconstrained.
    """
    own = d.plug_ctx if plug_side else d.socket_ctx
    if subj not in own:
        return f"{d.rule} conclusion must type {subj}"
    parts = []
    for i, p in enumerate(d.premises):
        pctx = p.plug_ctx if plug_side else p.socket_ctx
        if subj not in pctx:
            return f"premise {i} does not type {subj}"
        parts.append(pctx[subj])
    combined = meet(parts) if plug_side else join(parts)
    if not equiv(own[subj], combined):
        return f"{subj} should be {show_type(normalize(combined))}, got {show_type(own[subj])}"
    if not d.premises:
        return None
    if plug_side:
        return _combined(
            d,
            ctx_merge_inter(*[p.socket_ctx for p in d.premises]),
            ctx_merge_union(*[_without(p.plug_ctx, subj) for p in d.premises], {subj: combined}),
        )
    return _combined(
        d,
        ctx_merge_inter(*[_without(p.socket_ctx, subj) for p in d.premises], {subj: combined}),
        ctx_merge_union(*[p.plug_ctx for p in d.premises]),
    )


def _check_inter_e(d: Derivation, system: System) -> str | None:
    return _project(d, plug_side=True)


def _check_union_e(d: Derivation, system: System) -> str | None:
    return _project(d, plug_side=False)


def spine(t: IUType, plug_side: bool) -> list[IUType]:
    """Components an elimination rule may project: normalized meetands or joinands."""
    t = normalize(t)
    if plug_side:
        return meetands(t) if isinstance(t, Inter) else []
    return joinands(t) if isinstance(t, Union) else []


def _project(d: Derivation, plug_side: bool) -> str | None:
    if (r := _arity(d, 1)):
        return r
    (p,) = d.premises
    subj = d.subject
    if subj is None or d.index is None:
        return f"{d.rule} needs a subject and an index"
    src = (p.plug_ctx if plug_side else p.socket_ctx).get(subj)
    if src is None:
        return f"premise does not type {subj}"
    parts = spine(src, plug_side)
    if not parts:
        return f"{subj} has no {'intersection' if plug_side else 'union'} to project"
    if not 0 <= d.index < len(parts):
        return f"index {d.index} out of range"
    own, other = (d.plug_ctx, d.socket_ctx) if plug_side else (d.socket_ctx, d.plug_ctx)
    pown, pother = (p.plug_ctx, p.socket_ctx) if plug_side else (p.socket_ctx, p.plug_ctx)
    if subj not in own or not equiv(own[subj], parts[d.index]):
        return f"{subj} should be {show_type(parts[d.index])}"
    if (r := _same_ctx(_without(own, subj), _without(pown, subj))):
        return r
    if (r := _same_ctx(other, pother)):
        return r
    return None


_RULE_CHECKS = {
    "Ax": _check_ax,
    "cut": _check_cut,
    "daggerL": _check_dagger_l,
    "daggerR": _check_dagger_r,
    "impL": _check_imp_l,
    "impR": _check_imp_r,
    "interR": _check_inter_r,
    "unionL": _check_union_l,
    "interE": _check_inter_e,
    "unionE": _check_union_e,
}


def simple_to_iu(d: Derivation, system: System = System.IU) -> Derivation:
    """A Simple derivation read in one of the larger systems.

    Only the system label changes, except that a left- (right-) activated cut
    becomes ``daggerL`` (``daggerR``) where the target system demands it.
    """
    out = d.with_system(system)
    for _, node in walk(out):
        if node.rule == "cut" and isinstance(node.net, Cut):
            if system is System.CBN and node.net.act is Activation.LEFT:
                node.rule = "daggerL"
            if system is System.CBV and node.net.act is Activation.RIGHT:
                node.rule = "daggerR"
    return out


# ---------------------------------------------------------------------------
# JSON


def _ctx_json(ctx: Mapping[str, IUType]) -> dict[str, str]:
    return {k: show_type(normalize(ctx[k])) for k in sorted(ctx)}


def to_json(d: Derivation) -> dict[str, Any]:
    data: dict[str, Any] = {}
    if d.cut_type is not None:
        data["cut_type"] = show_type(normalize(d.cut_type))
    if d.index is not None:
        data["index"] = d.index
    if d.subject is not None:
        data["subject"] = d.subject
    return {
        "system": d.system.value,
        "rule": d.rule,
        "conclusion": {"net": sx.show(d.net), "socket_ctx": _ctx_json(d.socket_ctx), "plug_ctx": _ctx_json(d.plug_ctx)},
        "rule_data": data,
        "premises": [to_json(p) for p in d.premises],
    }


def from_json(obj: Mapping[str, Any]) -> Derivation:
    concl = obj["conclusion"]
    data = obj.get("rule_data", {})
    return Derivation(
        system=System(obj["system"]),
        rule=obj["rule"],
        net=sx.parse(concl["net"], refresh=False),
        socket_ctx={k: parse_type(v) for k, v in concl.get("socket_ctx", {}).items()},
        plug_ctx={k: parse_type(v) for k, v in concl.get("plug_ctx", {}).items()},
        premises=[from_json(p) for p in obj.get("premises", [])],
        cut_type=parse_type(data["cut_type"]) if "cut_type" in data else None,
        subject=data.get("subject"),
        index=data.get("index"),
    )


def dumps(d: Derivation) -> str:
    return json.dumps(to_json(d), sort_keys=True, indent=2) + "\n"


def loads(text: str) -> Derivation:
    return from_json(json.loads(text))
