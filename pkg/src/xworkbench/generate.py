"""Random nets and random typed derivations for property runs.

Simple derivations are grown bottom-up: leaves are capsules over a pool of
free connectors whose types are fixed for the whole derivation, and every
binder gets a fresh name.  Derivations in the larger systems start from a
Simple one and are *decorated*: a node is wrapped in ``interR``/``unionL``
over itself and a copy with its type variables substituted, a cut is given an
intersection (union) type the same way, an intersection is projected, or a
capsule's statements are widened.  A decoration is kept only when the
rebuilt derivation checks.

Expansion pairs (a net one core step above a typed net) come from two
sources: an inverse step applied to a random typed net, and a forward step
from a Simple-typed net whose reduct typing is then decorated.
"""

from __future__ import annotations

import random
from dataclasses import replace
from typing import Iterator

from . import build
from .derivation import WRAPPERS, Derivation, RuleError, System, check_derivation, simple_to_iu, walk
from .rewrite import Redex, Regime, RuleId, find_redexes, rules_at, step
from .syntax import (
    Activation, Capsule, Cut, Export, Import, NameSupply, Net, alpha_eq, all_names,
    barendregt, bound_plugs, bound_sockets, children, free_plugs, free_sockets,
    introduces_plug, introduces_socket, positions, replace_at, subnet_at,
)
from .types import (
    Arrow, Bot, IUType, Inter, TVar, Top, Union, ctx_merge_inter, ctx_merge_union,
    normalize,
)

__all__ = [
    "random_net", "random_simple_type", "random_simple_derivation", "decorate",
    "random_typed_derivation", "substitute", "expansion_pair", "inverse_steps",
]

I, L, R = Activation.INACTIVE, Activation.LEFT, Activation.RIGHT
_VARS = ("A", "B", "C")


# ---------------------------------------------------------------------------
# untyped nets


def random_net(rng: random.Random, depth: int, sockets: int = 3, plugs: int = 3) -> Net:
    """A random Barendregt net over a few free names, up to ``depth`` constructors deep."""
    counter = iter(range(10**9))
    free_s = [f"x{i}" for i in range(sockets)]
    free_p = [f"a{i}" for i in range(plugs)]

    def go(d: int, ss: list[str], ps: list[str]) -> Net:
        if d == 0 or rng.random() < 0.25:
            return Capsule(rng.choice(ss), rng.choice(ps))
        kind = rng.choice(("exp", "imp", "cut"))
        k = next(counter)
        if kind == "exp":
            y, b = f"y{k}", f"b{k}"
            return Export(y, go(d - 1, ss + [y], ps + [b]), b, rng.choice(ps))
        b, w = f"b{k}", f"w{k}"
        left = go(d - 1, ss, ps + [b])
        right = go(d - 1, ss + [w], ps)
        if kind == "imp":
            return Import(left, b, rng.choice(ss), w, right)
        return Cut(left, b, w, right, rng.choice((I, I, L, R)))

    return barendregt(go(depth, free_s, free_p))


# ---------------------------------------------------------------------------
# types


def random_simple_type(rng: random.Random, depth: int = 2) -> IUType:
    if depth == 0 or rng.random() < 0.5:
        return TVar(rng.choice(_VARS))
    return Arrow(random_simple_type(rng, depth - 1), random_simple_type(rng, depth - 1))


def substitute(t: IUType, sub: dict[str, IUType]) -> IUType:
    if isinstance(t, TVar):
        return sub.get(t.name, t)
    if isinstance(t, Arrow):
        return Arrow(substitute(t.left, sub), substitute(t.right, sub))
    if isinstance(t, Inter):
        return Inter(substitute(t.left, sub), substitute(t.right, sub))
    if isinstance(t, Union):
        return Union(substitute(t.left, sub), substitute(t.right, sub))
    return t


def _subst_derivation(d: Derivation, sub: dict[str, IUType]) -> Derivation:
    def ctx(c):
        return {k: normalize(substitute(v, sub)) for k, v in c.items()}
    return replace(
        d, socket_ctx=ctx(d.socket_ctx), plug_ctx=ctx(d.plug_ctx),
        cut_type=normalize(substitute(d.cut_type, sub)) if d.cut_type is not None else None,
        premises=[_subst_derivation(p, sub) for p in d.premises],
    )


# ---------------------------------------------------------------------------
# Simple derivations


class _SimpleGen:
    def __init__(self, rng: random.Random, restrict: System, leaf_bias: float):
        self.rng = rng
        self.system = System.SIMPLE
        self.restrict = restrict
        self.leaf_bias = leaf_bias
        self.sockets: dict[str, IUType] = {}
        self.plugs: dict[str, IUType] = {}
        self.count = 0

    def fresh(self, prefix: str) -> str:
        self.count += 1
        return f"{prefix}{self.count}"

    def socket_of(self, t: IUType) -> str:
        same = [k for k, v in sorted(self.sockets.items()) if v == t]
        if same and self.rng.random() < 0.6:
            return self.rng.choice(same)
        name = self.fresh("x")
        self.sockets[name] = t
        return name

    def plug_of(self, t: IUType) -> str:
        same = [k for k, v in sorted(self.plugs.items()) if v == t]
        if same and self.rng.random() < 0.6:
            return self.rng.choice(same)
        name = self.fresh("a")
        self.plugs[name] = t
        return name

    def gen(self, depth: int) -> Derivation:
        rng = self.rng
        if depth == 0 or rng.random() < self.leaf_bias:
            t = random_simple_type(rng)
            y, a = self.socket_of(t), self.plug_of(t)
            return build.ax(self.system, Capsule(y, a), {y: t}, {a: t})
        kind = rng.choice(("exp", "imp", "cut", "cut"))
        if kind == "exp":
            return self.export(depth)
        if kind == "imp":
            return self.imp(depth)
        return self.cut(depth)

    def bind_socket(self, d: Derivation) -> tuple[Derivation, str]:
        """Pick a socket of ``d`` (or a spurious fresh one) and rename it to a fresh binder."""
        from .transform import _rename_free
        cands = sorted(k for k in d.socket_ctx if k in free_sockets(d.net))
        new = self.fresh("y")
        if cands and self.rng.random() < 0.85:
            old = self.rng.choice(cands)
            return _rename_free(d, old, new, plug=False), new
        return build.add_spurious(d, {new: random_simple_type(self.rng)}, {}), new

    def bind_plug(self, d: Derivation) -> tuple[Derivation, str]:
        from .transform import _rename_free
        cands = sorted(k for k in d.plug_ctx if k in free_plugs(d.net))
        new = self.fresh("b")
        if cands and self.rng.random() < 0.85:
            old = self.rng.choice(cands)
            return _rename_free(d, old, new, plug=True), new
        return build.add_spurious(d, {}, {new: random_simple_type(self.rng)}), new

    def export(self, depth: int) -> Derivation:
        body = self.gen(depth - 1)
        body, y = self.bind_socket(body)
        body, b = self.bind_plug(body)
        out = self.plug_of(Arrow(body.socket_ctx[y], body.plug_ctx[b]))
        return build.imp_r(self.system, Export(y, body.net, b, out), body)

    def imp(self, depth: int) -> Derivation:
        left, right = self.gen(depth - 1), self.gen(depth - 1)
        left, b = self.bind_plug(left)
        right, w = self.bind_socket(right)
        mid = self.socket_of(Arrow(left.plug_ctx[b], right.socket_ctx[w]))
        return build.imp_l(self.system, Import(left.net, b, mid, w, right.net), left, right)

    def cut(self, depth: int) -> Derivation:
        from .transform import _rename_free
        rng = self.rng
        left, right = self.gen(depth - 1), self.gen(depth - 1)
        pairs = [(a, x) for a in sorted(left.plug_ctx) if a in free_plugs(left.net)
                 for x in sorted(right.socket_ctx) if x in free_sockets(right.net)
                 and left.plug_ctx[a] == right.socket_ctx[x]]
        b, w = self.fresh("b"), self.fresh("w")
        if pairs and rng.random() < 0.9:
            a, x = rng.choice(pairs)
            left = _rename_free(left, a, b, plug=True)
            right = _rename_free(right, x, w, plug=False)
        else:
            left, b = self.bind_plug(left)
            right = build.add_spurious(right, {w: left.plug_ctx[b]}, {})
        act = rng.choice((I, I, I, L, R))
        if act is L and self.restrict is System.CBN and not introduces_socket(right.net, w):
            act = I
        if act is R and self.restrict is System.CBV and not introduces_plug(left.net, b):
            act = I
        return build.cut(self.system, Cut(left.net, b, w, right.net, act), left, right)


def random_simple_derivation(rng: random.Random, depth: int = 5, leaf_bias: float = 0.2,
                             activation_for: System = System.SIMPLE) -> Derivation:
    """A checked Simple derivation of a random Barendregt net.

    ``activation_for`` restricts activated cuts to those the named restricted
    system can type (an introduced cut socket for CBN, plug for CBV).
    """
    d = _SimpleGen(rng, activation_for, leaf_bias).gen(depth)
    check_derivation(d)
    return d


# ---------------------------------------------------------------------------
# decorations


def _ancestor_binders(d: Derivation, path: tuple[int, ...]) -> set[str]:
    out: set[str] = set()
    node = d
    for i in path:
        n = node.net
        if node.rule not in WRAPPERS:
            if isinstance(n, Export):
                out |= {n.socket, n.plug}
            elif isinstance(n, (Import, Cut)):
                out.add(n.plug if i == 0 else n.socket)
        node = node.premises[i]
    return out


def _node_at(d: Derivation, path: tuple[int, ...]) -> Derivation:
    for i in path:
        d = d.premises[i]
    return d


def _replace_node(d: Derivation, path: tuple[int, ...], new: Derivation) -> Derivation:
    if not path:
        return new
    ps = list(d.premises)
    ps[path[0]] = _replace_node(ps[path[0]], path[1:], new)
    return replace(d, premises=ps)


def _random_sub(rng: random.Random) -> dict[str, IUType]:
    v = rng.choice(_VARS)
    return {v: random_simple_type(rng, 2)}


def _widen_top(rng: random.Random, t: IUType) -> IUType:
    return Inter(t, random_simple_type(rng, 1)) if rng.random() < 0.5 else t


def _decoration(rng: random.Random, d: Derivation, system: System) -> Derivation | None:
    """One random decoration of ``d``, or ``None`` when the attempt does not type."""
    try:
        return _try_decoration(rng, d, system)
    except (RuleError, KeyError, ValueError, IndexError):
        return None


def _try_decoration(rng: random.Random, d: Derivation, system: System) -> Derivation | None:
    from .transform import _rebuild, _weaken
    nodes = [p for p, _ in walk(d)]
    path = rng.choice(nodes)
    node = _node_at(d, path)
    anc = _ancestor_binders(d, path)
    names = set(node.socket_ctx) | set(node.plug_ctx)
    kind = rng.choice(("wrap", "wrap", "cutwrap", "cutwrap", "leaf", "project", "empty"))
    if kind == "wrap" and not (names & anc):
        plugs = [a for a in sorted(node.plug_ctx) if build_allowed(system, "interR", node.net, a)]
        socks = [x for x in sorted(node.socket_ctx) if build_allowed(system, "unionL", node.net, x)]
        copy = _subst_derivation(node, _random_sub(rng))
        if plugs and (not socks or rng.random() < 0.5):
            new = build.inter_r(system, node.net, rng.choice(plugs), [node, copy])
        elif socks:
            new = build.union_l(system, node.net, rng.choice(socks), [node, copy])
        else:
            return None
    elif kind == "cutwrap" and node.rule in ("cut", "daggerL", "daggerR"):
        left, right = node.premises
        a, x = node.net.plug, node.net.socket
        sub = _random_sub(rng)
        if rng.random() < 0.5:
            if (set(left.socket_ctx) | set(left.plug_ctx)) - {a} & anc:
                return None
            if not build_allowed(system, "interR", left.net, a):
                return None
            copy = _subst_derivation(left, sub)
            left2 = build.inter_r(system, left.net, a, [left, copy])
            right2 = _weaken(right, {x: copy.plug_ctx[a]}, {})
        else:
            if (set(right.socket_ctx) | set(right.plug_ctx)) - {x} & anc:
                return None
            if not build_allowed(system, "unionL", right.net, x):
                return None
            copy = _subst_derivation(right, sub)
            right2 = build.union_l(system, right.net, x, [right, copy])
            left2 = _weaken(left, {}, {a: copy.socket_ctx[x]})
        new = build.cut(system, node.net, left2, right2)
    elif kind == "leaf" and node.rule == "Ax":
        y, a = node.net.socket, node.net.plug
        g, dl = dict(node.socket_ctx), dict(node.plug_ctx)
        if y not in anc:
            g[y] = normalize(_widen_top(rng, g[y]))
        if a not in anc and rng.random() < 0.5:
            dl[a] = normalize(Union(dl[a], random_simple_type(rng, 1)))
        new = replace(node, socket_ctx=g, plug_ctx=dl)
    elif kind == "project":
        cands = [(a, True) for a, t in node.plug_ctx.items() if isinstance(t, Inter) and a not in anc]
        cands += [(x, False) for x, t in node.socket_ctx.items() if isinstance(t, Union) and x not in anc]
        if not cands:
            return None
        subj, plug = rng.choice(sorted(cands))
        from .derivation import spine
        k = rng.randrange(len(spine(node.plug_ctx[subj] if plug else node.socket_ctx[subj], plug)))
        new = build.inter_e(node, subj, k) if plug else build.union_e(node, subj, k)
    elif kind == "empty" and not (names & anc):
        plugs = [a for a in sorted(node.plug_ctx) if build_allowed(system, "interR", node.net, a)]
        if not plugs:
            return None
        a = rng.choice(plugs)
        new = build.inter_r(system, node.net, a, [], socket_ctx=node.socket_ctx, plug_ctx=node.plug_ctx)
    else:
        return None
    try:
        out = _rebuild(_replace_node(d, path, new))
        check_derivation(out)
    except (RuleError, KeyError, ValueError, IndexError):
        return None
    return out


def build_allowed(system: System, rule: str, net: Net, subject: str) -> bool:
    from .derivation import wrapper_allowed
    return wrapper_allowed(system, rule, net, subject)


def decorate(d: Derivation, rng: random.Random, system: System, rounds: int = 3) -> Derivation:
    """Move a Simple derivation into ``system`` and apply up to ``rounds`` random decorations."""
    out = simple_to_iu(d, system) if d.system is System.SIMPLE else d
    check_derivation(out)
    for _ in range(rounds * 4):
        if rounds <= 0:
            break
        new = _decoration(rng, out, system)
        if new is not None:
            out = new
            rounds -= 1
    return out


def random_typed_derivation(rng: random.Random, system: System, depth: int = 4,
                            rounds: int = 3) -> Derivation:
    """A checked derivation in ``system`` of a random net."""
    base = random_simple_derivation(rng, depth, activation_for=system)
    if system is System.SIMPLE:
        return base
    return decorate(base, rng, system, rounds)


# ---------------------------------------------------------------------------
# expansion pairs


def inverse_steps(q: Net, path: tuple[int, ...], supply: NameSupply,
                  rng: random.Random) -> Iterator[tuple[Net, RuleId]]:
    """Redexes ``r`` that contract to the subnet of ``q`` at ``path`` by a core rule.

    Only rules whose right-hand side has no duplicated subnet are inverted;
    the caller verifies every proposal with :func:`step`.
    """
    s = subnet_at(q, path)
    a, x = supply.plug(), supply.socket()
    if isinstance(s, Capsule):
        yield Cut(Capsule(s.socket, a), a, x, Capsule(x, s.plug), I), RuleId.Ax
        junk = random_net(rng, 1)
        junk = _rename_some(junk, x, rng)
        yield Cut(s, a, x, junk, L), RuleId.DL_cap
        junk2 = random_net(rng, 1)
        junk2 = _rename_some_plug(junk2, a, rng)
        yield Cut(junk2, a, x, s, R), RuleId.DR_cap
    if isinstance(s, Export) and introduces_plug(s, s.out):
        yield Cut(Export(s.socket, s.body, s.plug, a), a, x, Capsule(x, s.out), I), RuleId.ExpR
    if isinstance(s, Import) and introduces_socket(s, s.mid):
        yield Cut(Capsule(s.mid, a), a, x, Import(s.left, s.plug, x, s.socket, s.right), I), RuleId.ImpL
    if isinstance(s, Cut):
        if s.act is L:
            yield replace_cut_act(s, I), RuleId.ActL
        if s.act is R:
            yield replace_cut_act(s, I), RuleId.ActR
        if s.act is I and isinstance(s.left, Capsule) and s.left.plug == s.plug:
            yield replace_cut_act(s, L), RuleId.DL_d
        if s.act is I and isinstance(s.right, Capsule) and s.right.socket == s.socket:
            yield replace_cut_act(s, R), RuleId.DR_d
        if s.act is I and isinstance(s.right, Cut) and s.right.act is I:
            inner = s.right
            y, g, q1 = s.socket, s.plug, s.left
            if y not in free_sockets(inner.right):
                exp = Export(y, inner.left, inner.plug, a)
                imp = Import(q1, g, x, inner.socket, inner.right)
                yield Cut(exp, a, x, imp, I), RuleId.ExpImpRightAssoc
        if s.act is I and isinstance(s.left, Cut) and s.left.act is I:
            inner = s.left
            q1, g, y, p_body = inner.left, inner.plug, inner.socket, inner.right
            if s.plug not in free_plugs(q1):
                exp = Export(y, p_body, s.plug, a)
                imp = Import(q1, g, x, s.socket, s.right)
                yield Cut(exp, a, x, imp, I), RuleId.ExpImpLeftAssoc


def replace_cut_act(c: Cut, act: Activation) -> Cut:
    return Cut(c.left, c.plug, c.socket, c.right, act)


def _rename_some(n: Net, x: str, rng: random.Random) -> Net:
    from .syntax import rename_socket
    fs = sorted(free_sockets(n))
    return rename_socket(n, rng.choice(fs), x) if fs else n


def _rename_some_plug(n: Net, a: str, rng: random.Random) -> Net:
    from .syntax import rename_plug
    fp = sorted(free_plugs(n))
    return rename_plug(n, rng.choice(fp), a) if fp else n


def _freshen(n: Net, avoid: set[str]) -> Net:
    supply = NameSupply(all_names(n) | avoid)
    return barendregt(n, supply)


def expansion_pair(rng: random.Random, depth: int = 4, rounds: int = 3,
                   attempts: int = 50) -> tuple[Net, Redex, Derivation]:
    """A net ``start``, a core redex of it, and a checked IU derivation of its reduct."""
    from .derivation import check_derivation as _check
    from .transform import _all_ctx_names, preserve
    for _ in range(attempts):
        if rng.random() < 0.5:
            d_reduct = random_typed_derivation(rng, System.IU, depth, rounds)
            reduct = d_reduct.net
            path = rng.choice([pos for pos, _ in positions(reduct)])
            avoid = all_names(reduct) | _all_ctx_names(d_reduct)
            supply = NameSupply(avoid)
            props = list(inverse_steps(reduct, path, supply, rng))
            rng.shuffle(props)
            for r, rule in props:
                start = replace_at(reduct, path, r)
                if not _is_clean(start, avoid - all_names(reduct)):
                    continue
                redex = Redex(path, rule)
                if rule not in rules_at(r, Regime.FULL):
                    continue
                if alpha_eq(step(start, redex), reduct):
                    return start, redex, d_reduct
        else:
            d_start = random_simple_derivation(rng, depth)
            start = d_start.net
            redexes = find_redexes(start, Regime.FULL)
            if not redexes:
                continue
            redex = rng.choice(redexes)
            d_reduct_simple = preserve(start, redex, d_start, Regime.FULL)
            d_reduct = decorate(d_reduct_simple, rng, System.IU, rounds)
            _check(d_reduct)
            return start, redex, d_reduct
    raise RuntimeError("no expansion pair found")


def _is_clean(p: Net, spurious: set[str]) -> bool:
    """Barendregt, and no binder reuses a name that only a context mentions."""
    from .syntax import is_barendregt
    if not is_barendregt(p):
        return False
    binders = set(bound_sockets(p)) | set(bound_plugs(p))
    return not (binders & spurious)
