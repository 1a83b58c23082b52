"""Named nets and derivations, and the demonstrations run from the command line.

Each demonstration returns a :class:`DemoReport`: the lines to print and
whether every claim it checks came out as expected.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import build
from .derivation import Derivation, System, check_derivation, conclusion_text
from .harness import Campaign, expansion_campaign, preservation_campaign
from .rewrite import Regime, RuleId, find_redexes, reduce, step
from .search import search
from .syntax import Capsule, Cut, Export, Import, Net, alpha_eq, parse, show
from .types import IUType, parse_type, show_context

__all__ = [
    "DemoReport", "PEIRCE_NET", "PEIRCE_TYPE", "peirce_derivation", "Counterexample",
    "COUNTEREXAMPLE_1", "COUNTEREXAMPLE_2", "CBN_EXPANSION_FAILURE", "critical_pair",
    "UNRESTRICTED_UNION_NET", "unrestricted_union",
    "run_counterexample_1", "run_counterexample_2", "run_cbn_expansion_failure",
    "DEMOS", "run_demo", "STABILITY_BUDGETS",
]

# (depth, universe) pairs at which a refutation must hold
STABILITY_BUDGETS = ((6, 12), (8, 12), (6, 20), (8, 20))


@dataclass
class DemoReport:
    name: str
    lines: list[str] = field(default_factory=list)
    passed: bool = True

    def say(self, line: str) -> None:
        self.lines.append(line)

    def claim(self, ok: bool, text: str) -> bool:
        self.lines.append(f"{'PASS' if ok else 'FAIL'}: {text}")
        self.passed = self.passed and ok
        return ok

    def text(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return "\n".join([f"== {self.name} ==", *self.lines, f"verdict: {verdict}"])


# ---------------------------------------------------------------------------
# Peirce's law


PEIRCE_NET = "x^ ((w^ <w.b> e^ . h) h^ [x] z^ <z.b>) b^ . g"
PEIRCE_TYPE = "((A->B)->A)->A"


def peirce_derivation() -> Derivation:
    """A Simple derivation of ``PEIRCE_NET : |- g:((A->B)->A)->A``.

    The export of ``w`` offers ``h:A->B`` while keeping ``b:A`` open; the
    import on ``x`` feeds it to the hypothesis ``x:(A->B)->A`` and both
    occurrences of ``b`` meet at ``A``.
    """
    a, b_ = parse_type("A"), parse_type("B")
    net = parse(PEIRCE_NET, refresh=False)
    assert isinstance(net, Export) and isinstance(net.body, Import)
    imp = net.body
    inner = imp.left
    assert isinstance(inner, Export) and isinstance(inner.body, Capsule) and isinstance(imp.right, Capsule)
    s = System.SIMPLE
    ax_w = build.ax(s, inner.body, {"w": a}, {"b": a, "e": b_})
    exp_w = build.imp_r(s, inner, ax_w)
    ax_z = build.ax(s, imp.right, {"z": a}, {"b": a})
    d_imp = build.imp_l(s, imp, exp_w, ax_z)
    out = build.imp_r(s, net, d_imp)
    check_derivation(out)
    return out


# ---------------------------------------------------------------------------
# counterexamples


@dataclass(frozen=True)
class Counterexample:
    """A start net with contexts at which it is typable."""
    name: str
    net: str
    socket_ctx: dict[str, str]
    plug_ctx: dict[str, str]

    def start(self) -> Net:
        return parse(self.net, refresh=False)

    def contexts(self) -> tuple[dict[str, IUType], dict[str, IUType]]:
        return ({k: parse_type(v) for k, v in self.socket_ctx.items()},
                {k: parse_type(v) for k, v in self.plug_ctx.items()})


COUNTEREXAMPLE_1 = Counterexample(
    "counterexample-1",
    "(<x.g> g^ [x] v^ <v.a>) a^ + y^ (<y.d> d^ [y] w^ <w.b>)",
    {"x": "A & (A->C) & (A->C->D)"},
    {"b": "D"},
)

COUNTEREXAMPLE_2 = Counterexample(
    "counterexample-2",
    "(x^ <x.d> b^ . d) d^ + z^ (v^ <z.a> a^ . g)",
    {},
    {"g": "(C->A) | (C->A->B)"},
)

# A CBN-reachable pair (deactivating the inner cut) whose reduct is typable in
# the CBN system while the net before the step is not, at the same contexts.
CBN_EXPANSION_FAILURE = Counterexample(
    "cbn-expansion-failure",
    "(x^ <x.d> d^ <+ v0^ (v^ <v0.a> a^ . g) b^ . g0) g0^ + z^ (v1^ <z.g1> g1^ . g)",
    {},
    {"g": "(C->A) | (C->A->B)"},
)


UNRESTRICTED_UNION_NET = "<x.b> b^ + y^ <y.a>"


def unrestricted_union(system: System = System.CBN) -> Derivation:
    """``unionL`` on the free socket of a cut, typing ``x:A|B |- a:A|B``.

    The cut does not introduce ``x``, so the derivation is valid in IU and
    CBV and breaks the socket side condition of CBN.
    """
    net = parse(UNRESTRICTED_UNION_NET, refresh=False)
    assert isinstance(net, Cut) and isinstance(net.left, Capsule) and isinstance(net.right, Capsule)
    branches = []
    for name in ("A", "B"):
        t = parse_type(name)
        left = build.ax(system, net.left, {"x": t}, {"b": t})
        right = build.ax(system, net.right, {"y": t}, {"a": t})
        branches.append(build.cut(system, net, left, right))
    return build.union_l(system, net, "x", branches)


def critical_pair() -> Net:
    """An inactive cut whose connectors are both unused: it reduces to either side."""
    return parse("<y.b> a^ + x^ <z.c>", refresh=False)


def _ctx_text(socket_ctx, plug_ctx) -> str:
    return f"{show_context(socket_ctx)} |- {show_context(plug_ctx)}"


def _refuted(report: DemoReport, system: System, net: Net, socket_ctx, plug_ctx, what: str) -> bool:
    ok = True
    for depth, universe in STABILITY_BUDGETS:
        res = search(system, net, socket_ctx, plug_ctx, depth, universe)
        report.say(f"  search {system.value} depth {depth} universe {universe}: {res.verdict()} "
                   f"({res.explored} goals)")
        ok = ok and res.verdict() == "exhausted"
    return report.claim(ok, f"{what} is not typable at {_ctx_text(socket_ctx, plug_ctx)} (stable over budgets)")


def _typable(report: DemoReport, system: System, net: Net, socket_ctx, plug_ctx, what: str,
             depth: int = 6, universe: int = 12) -> Derivation | None:
    res = search(system, net, socket_ctx, plug_ctx, depth, universe)
    report.claim(res.found, f"{what} is typable in {system.value} at {_ctx_text(socket_ctx, plug_ctx)}")
    if res.derivation is not None:
        report.say(f"  derivation concludes {conclusion_text(res.derivation)}")
    return res.derivation


def _path_to(report: DemoReport, start: Net, regime: Regime, target: Net, fuel: int = 50) -> bool:
    """Show the default ``regime`` trace from ``start`` and whether it passes ``target``."""
    trace = reduce(start, regime, fuel)
    hit = next((k for k, (_, n) in enumerate(trace.steps, 1) if alpha_eq(n, target)), None)
    for k, (r, n) in enumerate(trace.steps[: hit or len(trace.steps)], 1):
        report.say(f"  {regime.value} step {k}: {r.rule.name} at {list(r.path)} -> {show(n)}")
    return report.claim(hit is not None, f"{regime.value} reduction reaches {show(target)}")


def run_counterexample_1() -> DemoReport:
    """Typable start; its CBV reduct is not typable at the same contexts; CBN is fine."""
    cx = COUNTEREXAMPLE_1
    report = DemoReport(cx.name)
    start = cx.start()
    socket_ctx, plug_ctx = cx.contexts()
    report.say(f"start: {show(start)}")
    _typable(report, System.IU, start, socket_ctx, plug_ctx, "start net")
    cbv_reduct = parse("<x.g> g^ [x] v^ (<v.d> d^ [v] w^ <w.b>)", refresh=False)
    _path_to(report, start, Regime.CBV, cbv_reduct)
    _refuted(report, System.IU, cbv_reduct, socket_ctx, plug_ctx, "CBV reduct")
    trace = reduce(start, Regime.CBN, 100)
    report.claim(not trace.out_of_fuel, f"CBN reduction ends in {len(trace.steps)} steps at {show(trace.final)}")
    _typable(report, System.IU, trace.final, socket_ctx, plug_ctx, "CBN normal form")
    return report


def run_counterexample_2() -> DemoReport:
    """Typable start; its CBN reduct is not typable at the same contexts; CBV is fine."""
    cx = COUNTEREXAMPLE_2
    report = DemoReport(cx.name)
    start = cx.start()
    socket_ctx, plug_ctx = cx.contexts()
    report.say(f"start: {show(start)}")
    _typable(report, System.IU, start, socket_ctx, plug_ctx, "start net")
    cbn_reduct = parse("v^ (x^ <x.a> b^ . a) a^ . g", refresh=False)
    _path_to(report, start, Regime.CBN, cbn_reduct)
    _refuted(report, System.IU, cbn_reduct, socket_ctx, plug_ctx, "CBN reduct")
    trace = reduce(start, Regime.CBV, 100)
    report.claim(not trace.out_of_fuel, f"CBV reduction ends in {len(trace.steps)} steps")
    ok = True
    for k, (r, n) in enumerate(trace.steps, 1):
        res = search(System.IU, n, socket_ctx, plug_ctx)
        report.say(f"  CBV step {k}: {r.rule.name} -> {show(n)}: {res.verdict()}")
        ok = ok and res.found
    report.claim(ok, "every CBV reduct is typable at the start contexts")
    return report


def run_cbn_expansion_failure() -> DemoReport:
    """A CBN step whose reduct is typable in the CBN system while its redex is not."""
    cx = CBN_EXPANSION_FAILURE
    report = DemoReport(cx.name)
    before = cx.start()
    socket_ctx, plug_ctx = cx.contexts()
    redexes = [r for r in find_redexes(before, Regime.CBN) if r.rule is RuleId.DL_d]
    report.claim(bool(redexes), "the net has a CBN deactivation step")
    if not redexes:
        return report
    after = step(before, redexes[0])
    report.say(f"before: {show(before)}")
    report.say(f"after:  {show(after)}  (by {redexes[0].rule.name} at {list(redexes[0].path)})")
    _typable(report, System.CBN, after, socket_ctx, plug_ctx, "the reduct")
    _refuted(report, System.CBN, before, socket_ctx, plug_ctx, "the net before the step")
    return report


def _campaign_report(c: Campaign) -> DemoReport:
    report = DemoReport(c.name)
    if c.stats is not None:
        report.say(f"constructive {c.stats.constructive}, by search {c.stats.searched}")
    for f in c.failures[:10]:
        report.say(f"  failure: {f}")
    report.claim(c.passed, c.summary())
    return report


def _run_expansion(seed: int, cases: int) -> DemoReport:
    return _campaign_report(expansion_campaign(seed, cases))


def _run_cbn(seed: int, cases: int) -> DemoReport:
    return _campaign_report(preservation_campaign(Regime.CBN, seed, cases))


def _run_cbv(seed: int, cases: int) -> DemoReport:
    return _campaign_report(preservation_campaign(Regime.CBV, seed, cases))


DEMOS = {
    "counterexample-1": lambda seed, cases: run_counterexample_1(),
    "counterexample-2": lambda seed, cases: run_counterexample_2(),
    "cbn-expansion-failure": lambda seed, cases: run_cbn_expansion_failure(),
    "expansion": _run_expansion,
    "cbn-preservation": _run_cbn,
    "cbv-preservation": _run_cbv,
}


def run_demo(name: str, seed: int = 0, cases: int = 500) -> DemoReport:
    if name not in DEMOS:
        raise KeyError(name)
    return DEMOS[name](seed, cases)
