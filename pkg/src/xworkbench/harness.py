"""Seeded property campaigns over random nets and terms.

Each campaign draws its cases from one ``random.Random(seed)`` and returns a
:class:`Campaign` listing every failure, so that a fixed seed always gives the
same report.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .derivation import Derivation, System
from .generate import expansion_pair, random_net, random_simple_derivation, random_typed_derivation
from .lam import beta_step, check_simulation, curry_infer, random_term, show_term, term_size
from .rewrite import ADMISSIBLE, Redex, Regime, RuleId, find_redexes, reachable, step
from .syntax import Activation, Cut, Net, alpha_eq, positions, show, subnet_at
from .transform import TransformStats, expand, preserve
from .types import ctx_equiv

__all__ = [
    "Campaign", "preservation_campaign", "expansion_campaign", "shortcut_campaign",
    "simulation_campaign",
]

_SYSTEM = {Regime.FULL: System.SIMPLE, Regime.CBN: System.CBN, Regime.CBV: System.CBV}


@dataclass
class Campaign:
    """Outcome of a campaign: cases drawn, checks made and failures met."""
    name: str
    seed: int
    cases: int = 0
    checks: int = 0
    skipped: int = 0
    failures: list[str] = field(default_factory=list)
    stats: TransformStats | None = None

    @property
    def passed(self) -> bool:
        return not self.failures

    def summary(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        skipped = f", {self.skipped} skipped" if self.skipped else ""
        return (f"{self.name}: seed {self.seed}, {self.cases} cases, {self.checks} checks{skipped}, "
                f"{len(self.failures)} failures: {verdict}")


def _typed(rng: random.Random, regime: Regime, depth: int, rounds: int):
    if regime is Regime.FULL:
        return random_simple_derivation(rng, depth)
    return random_typed_derivation(rng, _SYSTEM[regime], depth, rounds)


def _mismatch(out: Derivation, net: Net, like: Derivation) -> str | None:
    """Why ``out`` is not a typing of ``net`` at the contexts of ``like``, if it is not."""
    if not alpha_eq(out.net, net):
        return f"derivation types {show(out.net)}, not {show(net)}"
    if not (ctx_equiv(out.socket_ctx, like.socket_ctx) and ctx_equiv(out.plug_ctx, like.plug_ctx)):
        return "contexts changed"
    return None


def preservation_campaign(regime: Regime, seed: int = 0, cases: int = 500, depth: int = 5,
                          rounds: int = 6, path_steps: int = 4) -> Campaign:
    """Typed random nets; every step from each net, and a random path onwards, must preserve.

    The full regime uses Simple derivations, CBN and CBV their restricted
    systems (decorated with ``rounds`` random wrapper insertions).  From each
    net every available step is checked; then one seeded path of up to
    ``path_steps`` further steps is followed, carrying the derivation along.
    """
    rng = random.Random(seed)
    out = Campaign(f"preservation[{regime.value}]", seed, stats=TransformStats())
    for _ in range(cases):
        d = _typed(rng, regime, depth, rounds)
        out.cases += 1
        for r in find_redexes(d.net, regime):
            out.checks += 1
            try:
                d_reduct = preserve(d.net, r, d, regime, out.stats)
                problem = _mismatch(d_reduct, step(d.net, r), d)
            except Exception as exc:  # every failure is reported, whatever its kind
                problem = str(exc)
            if problem:
                out.failures.append(f"{r.rule.name} at {list(r.path)} in {show(d.net)}: {problem}")
        cur = d
        for _ in range(path_steps):
            redexes = find_redexes(cur.net, regime)
            if not redexes:
                break
            r = rng.choice(redexes)
            out.checks += 1
            try:
                nxt = preserve(cur.net, r, cur, regime, out.stats)
                problem = _mismatch(nxt, step(cur.net, r), cur)
            except Exception as exc:
                problem = str(exc)
            if problem:
                out.failures.append(f"{r.rule.name} at {list(r.path)} in {show(cur.net)}: {problem}")
                break
            cur = nxt
    return out


def expansion_campaign(seed: int = 0, cases: int = 500, depth: int = 5, rounds: int = 6) -> Campaign:
    """Random one-step pairs with an IU typing of the reduct; each typing must expand to the start."""
    rng = random.Random(seed)
    out = Campaign("expansion[IU]", seed, stats=TransformStats())
    for _ in range(cases):
        start, r, d_reduct = expansion_pair(rng, depth, rounds)
        out.cases += 1
        out.checks += 1
        try:
            problem = _mismatch(expand(start, r, d_reduct, out.stats), start, d_reduct)
        except Exception as exc:
            problem = str(exc)
        if problem:
            out.failures.append(f"{r.rule.name} at {list(r.path)} in {show(start)}: {problem}")
    return out


def _has_active_cut(n: Net) -> bool:
    return any(isinstance(s, Cut) and s.act is not Activation.INACTIVE for _, s in positions(n))


def shortcut_campaign(seed: int = 0, cases: int = 500, depth: int = 4, budget: int = 20_000) -> Campaign:
    """Garbage-collection and renaming shortcuts are reachable by the core rules.

    Random nets are drawn until ``cases`` shortcut redexes have been met; for
    each, the shortcut's result at the redex is sought from the redex subnet
    with the core rules of the full regime.  A shortcut whose kept side
    holds an activated cut is skipped (and counted): an activated cut is
    propagated only through inactive ones, so that side cannot be kept
    intact by the core rules.
    """
    rng = random.Random(seed)
    out = Campaign("shortcuts[GC/Ren]", seed)
    while out.cases < cases:
        n = random_net(rng, depth)
        for r in find_redexes(n, Regime.FULL, include_admissible=True):
            if r.rule not in ADMISSIBLE or out.cases >= cases:
                continue
            sub = subnet_at(n, r.path)
            kept = sub.left if r.rule in (RuleId.GC_L, RuleId.Ren_L) else sub.right
            if _has_active_cut(kept):
                out.skipped += 1
                continue
            out.cases += 1
            out.checks += 1
            target = step(sub, Redex((), r.rule))
            found, _, _ = reachable(sub, target, Regime.FULL, budget, focus="first")
            if not found:
                found, _, _ = reachable(sub, target, Regime.FULL, budget)
            if not found:
                out.failures.append(f"{r.rule.name} at {list(r.path)} in {show(n)}")
    return out


def simulation_campaign(regime: Regime, seed: int = 0, cases: int = 100, max_size: int = 12,
                        budget: int = 20_000) -> Campaign:
    """Random Curry-typable terms with a redex; every beta step must be simulated."""
    rng = random.Random(seed)
    out = Campaign(f"simulation[{regime.value}]", seed)
    while out.cases < cases:
        t = random_term(rng, max_size)
        if term_size(t) > max_size or not beta_step(t) or curry_infer(t) is None:
            continue
        out.cases += 1
        res = check_simulation(t, regime, budget)
        out.checks += res.steps
        if not res.verified:
            out.failures.append(f"{show_term(t)}: {res.verdict}")
    return out
