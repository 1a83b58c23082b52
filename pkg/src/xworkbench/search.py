"""Bounded backward search for derivations, used both to find and to refute.

The search works goal by goal.  A goal is a net together with a socket and a
plug context.  It applies the rules backwards in a fixed order:

1. a statement ``a:TOP`` (``x:BOT``) closes the goal with a premise-free
   ``interR`` (``unionL``) wherever the system allows it there;
2. statements about connectors that are not free are set aside and put back
   on the finished derivation;
3. an intersection on a plug (union on a socket) is split with ``interR``
   (``unionL``) when the system allows it; the other statements go to the
   premises whole or divided into components, since premise contexts merge;
4. otherwise the rule fixed by the shape of the net is applied.  Arrow types
   for imports and exports come from the goal's own types.  Cut types come
   from a finite universe: subterms of the goal's types closed once under
   ``&`` and ``|``, smallest first, cut off at a budgeted count.  Shared
   statements go to both premises either whole or split into components.

The ``depth`` budget bounds the number of net-shaped rules on any branch.  A
search that returns nothing without hitting ``max_goals`` has *exhausted* the
documented space, which is how refutations are reported.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from . import build
from .derivation import Derivation, System, ax_witness, check_derivation, wrapper_allowed
from .syntax import (
    Activation, Capsule, Cut, Export, Import, Net, bound_plugs, bound_sockets,
    free_plugs, free_sockets, introduces_plug, introduces_socket,
)
from .types import (
    Arrow, Bot, IUType, Inter, TVar, Top, Union, equiv, is_simple, join, joinands,
    leq, meet, meetands, normalize, show_type, subterms, type_size,
)

__all__ = ["SearchResult", "search", "type_universe", "DEFAULT_DEPTH", "DEFAULT_UNIVERSE"]

DEFAULT_DEPTH = 6
DEFAULT_UNIVERSE = 12


class _OutOfGoals(Exception):
    pass


@dataclass
class SearchResult:
    derivation: Derivation | None
    explored: int
    exhausted: bool
    depth: int
    universe: list[IUType] = field(default_factory=list)

    @property
    def found(self) -> bool:
        return self.derivation is not None

    def verdict(self) -> str:
        if self.found:
            return "found"
        return "exhausted" if self.exhausted else "budget-hit"


def _order(ts: Iterable[IUType]) -> list[IUType]:
    return sorted(set(normalize(t) for t in ts), key=lambda t: (type_size(t), show_type(t)))


def _sibling_groups(t: IUType) -> list[list[IUType]]:
    """Domains and codomains of the arrows sharing one intersection/union spine.

    ``interR`` and ``unionL`` assemble a cut type from what the arrows of one
    spine deliver, so these groups are the first place to look for cut types.
    """
    groups: list[list[IUType]] = []

    def visit(u: IUType) -> None:
        u = normalize(u)
        if isinstance(u, (Inter, Union)):
            arrows = [a for a in _spine_atoms(u) if isinstance(a, Arrow)]
            if len(arrows) >= 2:
                groups.append([a.left for a in arrows])
                groups.append([a.right for a in arrows])
            for a in _spine_atoms(u):
                visit(a)
        elif isinstance(u, Arrow):
            visit(u.left)
            visit(u.right)

    visit(t)
    return groups


def type_universe(types: Iterable[IUType], count: int, simple: bool = False) -> list[IUType]:
    """Cut-type universe of at most ``count`` types drawn from ``types``.

    Order: the subterms of ``types`` (smallest first), then meets and joins of
    sibling groups, then the remaining pairwise meets and joins, smallest
    first.  The subterms always come first so that raising ``count`` only ever
    adds types.
    """
    types = [normalize(t) for t in types]
    base: set[IUType] = set()
    for t in types:
        base |= {normalize(s) for s in subterms(t)}
    base = {t for t in base if not isinstance(t, (Top, Bot))}
    if simple:
        return _order(t for t in base if is_simple(t))[:count]
    out = _order(base)
    seen = set(out)

    def extend(cands: Iterable[IUType]) -> None:
        for c in _order(cands):
            if c not in seen and not isinstance(c, (Top, Bot)):
                seen.add(c)
                out.append(c)

    sib: list[IUType] = []
    for t in types:
        for group in _sibling_groups(t):
            uniq = _order(group)
            if len(uniq) >= 2:
                sib.append(normalize(meet(uniq)))
                sib.append(normalize(join(uniq)))
    extend(sib)
    pairs = []
    for a, b in itertools.combinations(_order(base), 2):
        pairs.append(normalize(meet([a, b])))
        pairs.append(normalize(join([a, b])))
    extend(pairs)
    return out[:count]


def _spine_atoms(t: IUType) -> list[IUType]:
    """Atoms reachable through the intersection/union spine of ``t``."""
    t = normalize(t)
    if isinstance(t, (Inter, Union)):
        out: list[IUType] = []
        for part in (meetands(t) if isinstance(t, Inter) else joinands(t)):
            out.extend(_spine_atoms(part))
        return out
    if isinstance(t, (Top, Bot)):
        return []
    return [t]


def _splits(t: IUType, socket: bool) -> list[tuple[IUType, IUType]]:
    """Ways to give a shared statement to two premises so that they recombine to ``t``."""
    t = normalize(t)
    out = [(t, t)]
    parts = meetands(t) if socket and isinstance(t, Inter) else (
        joinands(t) if not socket and isinstance(t, Union) else [])
    if 2 <= len(parts) <= 4:
        combine = meet if socket else join
        for r in range(1, len(parts)):
            for chosen in itertools.combinations(range(len(parts)), r):
                left = combine([parts[i] for i in chosen])
                right = combine([parts[i] for i in range(len(parts)) if i not in chosen])
                out.append((normalize(left), normalize(right)))
    return out


def _statement_shares(t: IUType, socket: bool, n: int, free: bool) -> list[tuple[IUType | None, ...]]:
    """Ways to hand one statement to ``n`` premises whose contexts recombine to ``t``.

    ``None`` means the premise does not mention the name, which is only
    possible when the name is not free in the net.
    """
    t = normalize(t)
    out: list[tuple[IUType | None, ...]] = [(t,) * n]
    parts = meetands(t) if socket and isinstance(t, Inter) else (
        joinands(t) if not socket and isinstance(t, Union) else [])
    if n < 2 or not 2 <= len(parts) <= 4:
        if not free and n >= 2:
            # any single premise may carry the whole statement
            out.extend(tuple(t if i == j else None for i in range(n)) for j in range(n))
        return out
    combine = meet if socket else join
    for owners in itertools.product(range(n), repeat=len(parts)):
        shares: list[IUType | None] = []
        for i in range(n):
            mine = [parts[k] for k, o in enumerate(owners) if o == i]
            shares.append(normalize(combine(mine)) if mine else None)
        if free and None in shares:
            continue
        share = tuple(shares)
        if share not in out:
            out.append(share)
    return out


def _wrapper_contexts(g: Mapping[str, IUType], d: Mapping[str, IUType], n: int,
                      fs: frozenset | set, fp: frozenset | set):
    """Premise contexts for an ``n``-premise wrapper whose remaining contexts are ``g``/``d``.

    Keeping every statement whole in every premise is tried first.  Because
    premise contexts are merged, a premise may also carry only part of an
    intersection on a socket or of a union on a plug.
    """
    items = [("s", x, t) for x, t in sorted(g.items())] + [("p", a, t) for a, t in sorted(d.items())]
    options = [
        _statement_shares(t, kind == "s", n, (name in fs) if kind == "s" else (name in fp))
        for kind, name, t in items
    ]
    for combo in itertools.product(*options):
        gs: list[dict] = [{} for _ in range(n)]
        ds: list[dict] = [{} for _ in range(n)]
        for (kind, name, _), share in zip(items, combo):
            for i, t in enumerate(share):
                if t is not None:
                    (gs if kind == "s" else ds)[i][name] = t
        yield gs, ds


class _Searcher:
    def __init__(self, system: System, universe: list[IUType], max_goals: int):
        self.system = system
        self.universe = universe
        self.max_goals = max_goals
        self.explored = 0
        self.memo: dict = {}
        simple = system is System.SIMPLE
        self.arrows = [t for t in universe if isinstance(t, Arrow)]
        if not self.arrows:
            self.arrows = [Arrow(a, b) for a in universe[:4] for b in universe[:4]]
        if simple:
            self.arrows = [a for a in self.arrows if is_simple(a)]

    # -- entry -------------------------------------------------------------

    def derive(self, net: Net, g: Mapping[str, IUType], d: Mapping[str, IUType], depth: int) -> Derivation | None:
        g = {k: normalize(v) for k, v in g.items()}
        d = {k: normalize(v) for k, v in d.items()}
        key = (net, frozenset(g.items()), frozenset(d.items()), depth)
        if key in self.memo:
            return self.memo[key]
        self.explored += 1
        if self.explored > self.max_goals:
            raise _OutOfGoals
        self.memo[key] = None
        result = self._derive(net, g, d, depth)
        self.memo[key] = result
        return result

    def _derive(self, net: Net, g: dict, d: dict, depth: int) -> Derivation | None:
        system = self.system
        fs, fp = free_sockets(net), free_plugs(net)
        bound = set(bound_sockets(net)) | set(bound_plugs(net))
        if bound & (set(g) | set(d)) or set(g) & set(d):
            return None
        if not fs <= set(g) or not fp <= set(d):
            return None
        if system is System.SIMPLE and not all(is_simple(t) for t in (*g.values(), *d.values())):
            return None

        for a in sorted(d):
            if isinstance(d[a], Top) and wrapper_allowed(system, "interR", net, a):
                return build.inter_r(system, net, a, [], g, d)
        for x in sorted(g):
            if isinstance(g[x], Bot) and wrapper_allowed(system, "unionL", net, x):
                return build.union_l(system, net, x, [], g, d)

        extra_g = {k: v for k, v in g.items() if k not in fs}
        extra_d = {k: v for k, v in d.items() if k not in fp}
        if extra_g or extra_d:
            core = self.derive(net, build.without(g, *extra_g), build.without(d, *extra_d), depth)
            return None if core is None else build.add_spurious(core, extra_g, extra_d)

        for a in sorted(d):
            if isinstance(d[a], Inter) and wrapper_allowed(system, "interR", net, a):
                parts = meetands(d[a])
                for gs, ds in _wrapper_contexts(g, build.without(d, a), len(parts), fs, fp):
                    prem = []
                    for part, pg, pd in zip(parts, gs, ds):
                        p = self.derive(net, pg, {**pd, a: part}, depth)
                        if p is None:
                            break
                        prem.append(p)
                    else:
                        return build.inter_r(system, net, a, prem)
                return None
        for x in sorted(g):
            if isinstance(g[x], Union) and wrapper_allowed(system, "unionL", net, x):
                parts = joinands(g[x])
                for gs, ds in _wrapper_contexts(build.without(g, x), d, len(parts), fs, fp):
                    prem = []
                    for part, pg, pd in zip(parts, gs, ds):
                        p = self.derive(net, {**pg, x: part}, pd, depth)
                        if p is None:
                            break
                        prem.append(p)
                    else:
                        return build.union_l(system, net, x, prem)
                return None

        if isinstance(net, Capsule):
            if ax_witness(g[net.socket], d[net.plug]) is not None:
                return build.ax(system, net, g, d)
            return None
        if depth <= 0:
            return None
        if isinstance(net, Export):
            return self._export(net, g, d, depth)
        if isinstance(net, Import):
            return self._import(net, g, d, depth)
        return self._cut(net, g, d, depth)

    # -- net-shaped rules ---------------------------------------------------

    def _arrow_candidates(self, t: IUType, below: bool) -> list[Arrow]:
        """Arrows ``c`` with ``c <= t`` (``below``) or ``t <= c``."""
        t = normalize(t)
        if (below and isinstance(t, Top)) or (not below and isinstance(t, Bot)):
            return list(self.arrows)
        out = []
        for c in _spine_atoms(t):
            if isinstance(c, Arrow) and (leq(c, t) if below else leq(t, c)) and c not in out:
                out.append(c)
        return out

    def _export(self, net: Export, g: dict, d: dict, depth: int) -> Derivation | None:
        body = net.body
        target = d[net.out]
        out_in_body = net.out in free_plugs(body)
        for arrow in self._arrow_candidates(target, below=True):
            rests: list[IUType | None] = [None]
            if out_in_body:
                rests = [target]
                if isinstance(target, Union) and arrow in joinands(target):
                    rests.append(normalize(join([j for j in joinands(target) if j != arrow])))
            for rest in rests:
                got = arrow if rest is None else normalize(join([arrow, rest]))
                if not equiv(got, target):
                    continue
                bg = {**g, net.socket: arrow.left}
                bd = {k: v for k, v in d.items() if k != net.out}
                bd[net.plug] = arrow.right
                if rest is not None:
                    bd[net.out] = rest
                p = self.derive(body, bg, bd, depth - 1)
                if p is not None:
                    return build.imp_r(self.system, net, p)
        return None

    def _share(self, left: Net, right: Net, g: dict, d: dict,
               left_extra: tuple[str, ...], right_extra: tuple[str, ...]):
        """Enumerate context pairs for two premises recombining to ``g``/``d``."""
        ls, rs = free_sockets(left), free_sockets(right) - set(right_extra)
        lp, rp = free_plugs(left) - set(left_extra), free_plugs(right)
        options: list[list[tuple[str, str, IUType | None, IUType | None]]] = []
        for x, t in sorted(g.items()):
            in_l, in_r = x in ls, x in rs
            if in_l and in_r:
                options.append([("s", x, a, b) for a, b in _splits(t, socket=True)])
            else:
                options.append([("s", x, t if in_l else None, t if in_r else None)])
        for a, t in sorted(d.items()):
            in_l, in_r = a in lp, a in rp
            if in_l and in_r:
                options.append([("p", a, u, v) for u, v in _splits(t, socket=False)])
            else:
                options.append([("p", a, t if in_l else None, t if in_r else None)])
        for combo in itertools.product(*options):
            lg, ld, rg, rd = {}, {}, {}, {}
            for kind, name, lt, rt in combo:
                if kind == "s":
                    if lt is not None:
                        lg[name] = lt
                    if rt is not None:
                        rg[name] = rt
                else:
                    if lt is not None:
                        ld[name] = lt
                    if rt is not None:
                        rd[name] = rt
            yield lg, ld, rg, rd

    def _import(self, net: Import, g: dict, d: dict, depth: int) -> Derivation | None:
        y = net.mid
        ytype = g[y]
        in_sub = y in free_sockets(net.left) or y in free_sockets(net.right)
        for arrow in self._arrow_candidates(ytype, below=False):
            rests: list[IUType | None] = [None]
            if in_sub:
                rests = [ytype]
                if isinstance(ytype, Inter) and arrow in meetands(ytype):
                    rests.append(normalize(meet([m for m in meetands(ytype) if m != arrow])))
            for rest in rests:
                got = arrow if rest is None else normalize(meet([arrow, rest]))
                if not equiv(got, ytype):
                    continue
                g2 = dict(g)
                if rest is None:
                    del g2[y]
                else:
                    g2[y] = rest
                for lg, ld, rg, rd in self._share(net.left, net.right, g2, d, (net.plug,), (net.socket,)):
                    p = self.derive(net.left, lg, {**ld, net.plug: arrow.left}, depth - 1)
                    if p is None:
                        continue
                    q = self.derive(net.right, {**rg, net.socket: arrow.right}, rd, depth - 1)
                    if q is not None:
                        return build.imp_l(self.system, net, p, q)
        return None

    def _cut_types(self, net: Cut) -> list[IUType]:
        rule = build.cut_rule_name(self.system, net)
        if rule == "daggerL":
            if not introduces_socket(net.right, net.socket):
                return []
            return [t for t in self.universe if not isinstance(t, (Inter, Top))]
        if rule == "daggerR":
            if not introduces_plug(net.left, net.plug):
                return []
            return [t for t in self.universe if not isinstance(t, (Union, Bot))]
        return list(self.universe)

    def _cut(self, net: Cut, g: dict, d: dict, depth: int) -> Derivation | None:
        for t in self._cut_types(net):
            for lg, ld, rg, rd in self._share(net.left, net.right, g, d, (net.plug,), (net.socket,)):
                p = self.derive(net.left, lg, {**ld, net.plug: t}, depth - 1)
                if p is None:
                    continue
                q = self.derive(net.right, {**rg, net.socket: t}, rd, depth - 1)
                if q is not None:
                    return build.cut(self.system, net, p, q)
        return None


def search(
    system: System,
    net: Net,
    socket_ctx: Mapping[str, IUType],
    plug_ctx: Mapping[str, IUType],
    depth: int = DEFAULT_DEPTH,
    universe: int = DEFAULT_UNIVERSE,
    max_goals: int = 200_000,
    extra_types: Iterable[IUType] = (),
) -> SearchResult:
    """Look for a derivation of ``net : socket_ctx |- plug_ctx`` within the budget."""
    types = [*socket_ctx.values(), *plug_ctx.values(), *extra_types]
    if not types:
        types = [TVar("A")]
    uni = type_universe(types, universe, simple=system is System.SIMPLE)
    s = _Searcher(system, uni, max_goals)
    try:
        found = s.derive(net, socket_ctx, plug_ctx, depth)
    except _OutOfGoals:
        return SearchResult(None, s.explored, False, depth, uni)
    if found is not None:
        check_derivation(found)
    return SearchResult(found, s.explored, True, depth, uni)
