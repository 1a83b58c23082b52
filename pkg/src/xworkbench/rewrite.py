"""Redex enumeration and reduction for nets under the full, CBN and CBV regimes."""

from __future__ import annotations

import enum
import heapq
import itertools
import json
import random
from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Callable, Iterator

from .syntax import (
    Activation, Capsule, Cut, Export, Import, Net, NameSupply, all_names,
    barendregt, canonical_key, free_plugs, free_sockets, introduces_plug,
    introduces_socket, positions, rename_plug, rename_socket, replace_at, show,
    size, subnet_at,
)

__all__ = [
    "RuleId", "Regime", "Redex", "Trace", "ReductionGraph", "StaleRedex",
    "ADMISSIBLE", "find_redexes", "rules_at", "step", "reduce", "reduction_graph",
    "contract", "to_full_rule", "reachable",
]


class RuleId(enum.Enum):
    Ax = 0
    ExpR = 1
    ImpL = 2
    ExpImpLeftAssoc = 3
    ExpImpRightAssoc = 4
    ActL = 5
    ActR = 6
    DL_d = 7
    DL_cap = 8
    DL_expOuts = 9
    DL_expIns = 10
    DL_imp = 11
    DL_cut = 12
    DR_d = 13
    DR_cap = 14
    DR_exp = 15
    DR_impOuts = 16
    DR_impIns = 17
    DR_cut = 18
    GC_L = 19
    GC_R = 20
    Ren_L = 21
    Ren_R = 22

    @property
    def admissible(self) -> bool:
        return self in ADMISSIBLE


ADMISSIBLE = frozenset({RuleId.GC_L, RuleId.GC_R, RuleId.Ren_L, RuleId.Ren_R})
PROPAGATION = frozenset(r for r in RuleId if r.name.startswith(("DL_", "DR_")))


class Regime(enum.Enum):
    FULL = "full"
    CBN = "cbn"
    CBV = "cbv"


@dataclass(frozen=True)
class Redex:
    path: tuple[int, ...]
    rule: RuleId

    def sort_key(self) -> tuple:
        return (self.path, self.rule.value)


class StaleRedex(ValueError):
    pass


def to_full_rule(rule: RuleId) -> RuleId:
    """Every rule is also a rule of the full regime; kept for symmetry."""
    return rule


# ---------------------------------------------------------------------------
# enumeration


def rules_at(n: Net, regime: Regime = Regime.FULL, admissible: bool = False) -> list[RuleId]:
    """Rules whose left-hand side matches ``n`` itself (not its subnets)."""
    if not isinstance(n, Cut):
        return []
    out: list[RuleId] = []
    p, a, x, q = n.left, n.plug, n.socket, n.right
    if n.act is Activation.INACTIVE:
        intro_l = introduces_plug(p, a)
        intro_r = introduces_socket(q, x)
        if intro_l and intro_r:
            if isinstance(p, Capsule) and isinstance(q, Capsule):
                out.append(RuleId.Ax)
            elif isinstance(p, Export) and isinstance(q, Capsule):
                out.append(RuleId.ExpR)
            elif isinstance(p, Capsule) and isinstance(q, Import):
                out.append(RuleId.ImpL)
            else:
                if regime in (Regime.FULL, Regime.CBN):
                    out.append(RuleId.ExpImpLeftAssoc)
                if regime in (Regime.FULL, Regime.CBV):
                    out.append(RuleId.ExpImpRightAssoc)
        if not intro_l and (regime is not Regime.CBN or intro_r):
            out.append(RuleId.ActL)
        if not intro_r and (regime is not Regime.CBV or intro_l):
            out.append(RuleId.ActR)
        if admissible:
            if isinstance(q, Capsule) and q.socket == x:
                out.append(RuleId.Ren_L)
            if isinstance(p, Capsule) and p.plug == a:
                out.append(RuleId.Ren_R)
    elif n.act is Activation.LEFT:
        if isinstance(p, Capsule):
            out.append(RuleId.DL_d if p.plug == a else RuleId.DL_cap)
        elif isinstance(p, Export):
            out.append(RuleId.DL_expOuts if p.out == a else RuleId.DL_expIns)
        elif isinstance(p, Import):
            out.append(RuleId.DL_imp)
        elif p.act is Activation.INACTIVE:
            out.append(RuleId.DL_cut)
        if admissible and a not in free_plugs(p):
            out.append(RuleId.GC_L)
    else:
        if isinstance(q, Capsule):
            out.append(RuleId.DR_d if q.socket == x else RuleId.DR_cap)
        elif isinstance(q, Export):
            out.append(RuleId.DR_exp)
        elif isinstance(q, Import):
            out.append(RuleId.DR_impOuts if q.mid == x else RuleId.DR_impIns)
        elif q.act is Activation.INACTIVE:
            out.append(RuleId.DR_cut)
        if admissible and x not in free_sockets(q):
            out.append(RuleId.GC_R)
    return sorted(out, key=lambda r: r.value)


def find_redexes(n: Net, regime: Regime = Regime.FULL, include_admissible: bool = False) -> list[Redex]:
    """All redexes, outermost-leftmost first, ties by rule order."""
    out = []
    for path, sub in positions(n):
        for rule in rules_at(sub, regime, include_admissible):
            out.append(Redex(path, rule))
    return out


# ---------------------------------------------------------------------------
# contraction


def contract(n: Net, rule: RuleId, supply: NameSupply) -> Net:
    """Right-hand side of ``rule`` applied at the root of ``n``.

    Duplicated subnets keep their bound names here; the caller restores
    Barendregt form.
    """
    if rule not in rules_at(n, Regime.FULL, True):
        raise StaleRedex(f"{rule.name} does not match {show(n)}")
    assert isinstance(n, Cut)
    p, a, x, q = n.left, n.plug, n.socket, n.right
    L, R, I = Activation.LEFT, Activation.RIGHT, Activation.INACTIVE

    if rule is RuleId.Ax:
        return Capsule(p.socket, q.plug)
    if rule is RuleId.ExpR:
        return Export(p.socket, p.body, p.plug, q.plug)
    if rule is RuleId.ImpL:
        return Import(q.left, q.plug, p.socket, q.socket, q.right)
    if rule is RuleId.ExpImpRightAssoc:
        inner = Cut(p.body, p.plug, q.socket, q.right, I)
        return Cut(q.left, q.plug, p.socket, inner, I)
    if rule is RuleId.ExpImpLeftAssoc:
        inner = Cut(q.left, q.plug, p.socket, p.body, I)
        return Cut(inner, p.plug, q.socket, q.right, I)
    if rule is RuleId.ActL:
        return Cut(p, a, x, q, L)
    if rule is RuleId.ActR:
        return Cut(p, a, x, q, R)

    if rule is RuleId.DL_d:
        return Cut(p, a, x, q, I)
    if rule is RuleId.DL_cap:
        return p
    if rule is RuleId.DL_expOuts:
        g = supply.plug()
        body = Cut(p.body, a, x, q, L)
        return Cut(Export(p.socket, body, p.plug, g), g, x, q, I)
    if rule is RuleId.DL_expIns:
        return Export(p.socket, Cut(p.body, a, x, q, L), p.plug, p.out)
    if rule is RuleId.DL_imp:
        return Import(Cut(p.left, a, x, q, L), p.plug, p.mid, p.socket, Cut(p.right, a, x, q, L))
    if rule is RuleId.DL_cut:
        return Cut(Cut(p.left, a, x, q, L), p.plug, p.socket, Cut(p.right, a, x, q, L), I)

    if rule is RuleId.DR_d:
        return Cut(p, a, x, q, I)
    if rule is RuleId.DR_cap:
        return q
    if rule is RuleId.DR_exp:
        return Export(q.socket, Cut(p, a, x, q.body, R), q.plug, q.out)
    if rule is RuleId.DR_impOuts:
        z = supply.socket()
        imp = Import(Cut(p, a, x, q.left, R), q.plug, z, q.socket, Cut(p, a, x, q.right, R))
        return Cut(p, a, z, imp, I)
    if rule is RuleId.DR_impIns:
        return Import(Cut(p, a, x, q.left, R), q.plug, q.mid, q.socket, Cut(p, a, x, q.right, R))
    if rule is RuleId.DR_cut:
        return Cut(Cut(p, a, x, q.left, R), q.plug, q.socket, Cut(p, a, x, q.right, R), I)

    if rule is RuleId.GC_L:
        return p
    if rule is RuleId.GC_R:
        return q
    if rule is RuleId.Ren_L:
        return rename_plug(p, a, q.plug, refresh=False)
    if rule is RuleId.Ren_R:
        return rename_socket(q, x, p.socket, refresh=False)
    raise AssertionError(rule)


def step(n: Net, r: Redex) -> Net:
    """Fire ``r`` in ``n``; fresh names avoid every name of ``n``."""
    try:
        sub = subnet_at(n, r.path)
    except (IndexError, AttributeError) as exc:
        raise StaleRedex(f"no subnet at {list(r.path)}") from exc
    supply = NameSupply(all_names(n))
    new = contract(sub, r.rule, supply)
    return barendregt(replace_at(n, r.path, new), supply)


# ---------------------------------------------------------------------------
# multi-step reduction


@dataclass
class Trace:
    start: Net
    steps: list[tuple[Redex, Net]] = field(default_factory=list)
    out_of_fuel: bool = False

    @property
    def final(self) -> Net:
        return self.steps[-1][1] if self.steps else self.start

    @property
    def normal(self) -> bool:
        return not self.out_of_fuel

    def lines(self) -> Iterator[str]:
        for k, (r, net) in enumerate(self.steps, 1):
            yield f"STEP {k}: {r.rule.name} @ {_path_text(r.path)}  ==>  {show(net)}"

    def text(self) -> str:
        return "\n".join(self.lines())

    def records(self) -> list[dict]:
        return [
            {"step": k, "rule": r.rule.name, "path": list(r.path), "net": show(net)}
            for k, (r, net) in enumerate(self.steps, 1)
        ]

    def to_json(self) -> str:
        return json.dumps(
            {"start": show(self.start), "steps": self.records(), "out_of_fuel": self.out_of_fuel},
            sort_keys=True, indent=2,
        )


def _innermost_key(r: Redex) -> tuple:
    return (-len(r.path), r.path, _RULE_ORDER[r.rule])


_RULE_ORDER = {rule: k for k, rule in enumerate(RuleId)}


def _path_text(path: tuple[int, ...]) -> str:
    return "[" + ",".join(str(i) for i in path) + "]"


def reduce(
    n: Net,
    regime: Regime = Regime.FULL,
    fuel: int = 10_000,
    seed: int | None = None,
    include_admissible: bool = False,
    strategy: str = "innermost",
) -> Trace:
    """Reduce until normal or out of fuel.

    Without a seed the deterministic ``strategy`` picks the redex:
    ``"innermost"`` fires the deepest redex (leftmost among equals) and
    ``"outermost"`` the leftmost-outermost one, with the lowest rule ordinal
    breaking ties.  With a seed a redex is chosen uniformly from a seeded
    generator.  Innermost is the default because outermost reduction keeps
    propagating cuts into freshly created cuts on small untyped nets.
    """
    if fuel < 0:
        raise ValueError("fuel must be non-negative")
    if strategy not in ("innermost", "outermost"):
        raise ValueError(f"unknown strategy {strategy!r}")
    rng = random.Random(seed) if seed is not None else None
    trace = Trace(n)
    cur = n
    while True:
        redexes = find_redexes(cur, regime, include_admissible)
        if not redexes:
            return trace
        if len(trace.steps) >= fuel:
            trace.out_of_fuel = True
            return trace
        if rng is not None:
            r = rng.choice(redexes)
        elif strategy == "outermost":
            r = redexes[0]
        else:
            r = min(redexes, key=_innermost_key)
        cur = step(cur, r)
        trace.steps.append((r, cur))


@dataclass
class ReductionGraph:
    root: str
    nodes: dict[str, Net]
    edges: list[tuple[str, Redex, str]]
    expanded: set[str]
    truncated: bool

    def successors(self, key: str) -> list[str]:
        return [dst for src, _, dst in self.edges if src == key]

    def sinks(self) -> list[str]:
        """Explored nodes without successors (normal forms)."""
        with_out = {src for src, _, _ in self.edges}
        return sorted(k for k in self.expanded if k not in with_out)


def reduction_graph(
    n: Net,
    regime: Regime = Regime.FULL,
    node_budget: int = 5_000,
    include_admissible: bool = False,
    order: str = "bfs",
) -> ReductionGraph:
    """Closure of ``step`` with nodes identified up to alpha.

    ``order`` is ``"bfs"`` (breadth first) or ``"smallest"`` (expand the
    smallest pending net first, which finds normal forms of nets with
    divergent branches much sooner).  At most ``node_budget`` nodes are
    expanded; if unexpanded nodes remain the graph is flagged ``truncated``
    and those nodes are never reported as sinks.
    """
    if order not in ("bfs", "smallest"):
        raise ValueError(f"unknown exploration order {order!r}")
    root = canonical_key(n)
    nodes = {root: n}
    edges: list[tuple[str, Redex, str]] = []
    fifo: deque[str] = deque([root])
    heap: list[tuple[int, int, str]] = [(size(n), 0, root)]
    counter = 0
    expanded: set[str] = set()

    def pending() -> bool:
        return bool(fifo) if order == "bfs" else bool(heap)

    while pending() and len(expanded) < node_budget:
        key = fifo.popleft() if order == "bfs" else heapq.heappop(heap)[2]
        expanded.add(key)
        net = nodes[key]
        for r in find_redexes(net, regime, include_admissible):
            nxt = step(net, r)
            k2 = canonical_key(nxt)
            edges.append((key, r, k2))
            if k2 not in nodes:
                nodes[k2] = nxt
                counter += 1
                fifo.append(k2)
                heapq.heappush(heap, (size(nxt), counter, k2))
    return ReductionGraph(root, nodes, edges, expanded, truncated=pending())


# ---------------------------------------------------------------------------
# targeted reachability


def _shapes(n: Net) -> Counter[str]:
    """Multiset of the name-free shapes of all subnets of ``n``."""
    out: Counter[str] = Counter()

    def go(m: Net) -> str:
        if isinstance(m, Capsule):
            shape = "c"
        elif isinstance(m, Export):
            shape = f"e({go(m.body)})"
        elif isinstance(m, Import):
            shape = f"i({go(m.left)},{go(m.right)})"
        else:
            shape = f"k{m.act.value}({go(m.left)},{go(m.right)})"
        out[shape] += 1
        return shape

    go(n)
    return out


def _distance(a: Counter[str], b: Counter[str]) -> int:
    return sum(((a - b) + (b - a)).values())


def reachable(
    start: Net,
    target: Net,
    regime: Regime = Regime.FULL,
    budget: int = 20_000,
    skip: Callable[[Net, Redex], bool] | None = None,
    focus: str | None = None,
) -> tuple[bool, int, bool]:
    """Search the reduction graph of ``start`` for ``target`` up to alpha.

    Best first: nets whose multiset of subnet shapes (names ignored) is
    closest to the target's are expanded first, newest first among equals.
    Redexes for which ``skip`` holds are not fired.  With ``focus`` set to
    ``"first"`` or ``"innermost"``, a net with pending propagation steps
    fires only one of them (the outermost-leftmost or the deepest), which
    prunes the many orders in which independent propagations interleave;
    the pruned search is incomplete.  Returns (found, nets expanded,
    searched graph exhausted).
    """
    goal = canonical_key(target)
    tshapes = _shapes(target)
    root = canonical_key(start)
    if root == goal:
        return True, 0, False
    seen = {root}
    counter = itertools.count()
    heap = [(_distance(_shapes(start), tshapes), -next(counter), start)]
    expanded = 0
    while heap and expanded < budget:
        _, _, net = heapq.heappop(heap)
        expanded += 1
        redexes = [r for r in find_redexes(net, regime) if skip is None or not skip(net, r)]
        if focus is not None:
            moving = [r for r in redexes if r.rule in PROPAGATION]
            if moving:
                redexes = [moving[0] if focus == "first" else min(moving, key=_innermost_key)]
        for r in redexes:
            nxt = step(net, r)
            k = canonical_key(nxt)
            if k == goal:
                return True, expanded, False
            if k not in seen:
                seen.add(k)
                heapq.heappush(heap, (_distance(_shapes(nxt), tshapes), -next(counter), nxt))
    return False, expanded, not heap
