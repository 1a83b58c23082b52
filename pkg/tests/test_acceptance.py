"""One test per acceptance criterion; each prints a single PASS/FAIL line."""

import random
import time

from conftest import ACCEPTANCE_LINES
from type_oracle import closure, type_universe
from xworkbench.corpus import check_result, type_mutations
from xworkbench.demos import (
    COUNTEREXAMPLE_1, COUNTEREXAMPLE_2, peirce_derivation, run_cbn_expansion_failure,
    run_counterexample_1, run_counterexample_2, unrestricted_union,
)
from xworkbench.derivation import RuleError, System, check_derivation, to_json
from xworkbench.harness import (
    expansion_campaign, preservation_campaign, shortcut_campaign, simulation_campaign,
)
from xworkbench.lam import parse_term, translate
from xworkbench.rewrite import Regime, reduce, reduction_graph
from xworkbench.search import search
from xworkbench.syntax import alpha_eq
from xworkbench.types import BOT, TOP, Arrow, Inter, TVar, Union, equiv, leq, normalize, parse_type


def verdict(number: int, ok: bool, detail: str) -> None:
    line = f"CRITERION {number}: {'PASS' if ok else 'FAIL'} ({detail})"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def test_criterion_01_figure_reduction():
    start = translate(parse_term("(\\x.x x)(\\y.y)"), "a")
    target = translate(parse_term("\\y.y"), "a")
    trace = reduce(start, Regime.FULL, 200)
    full_ok = not trace.out_of_fuel and alpha_eq(trace.final, target)
    details = [f"full: {len(trace.steps)} steps, reaches target {full_ok}"]
    ok = full_ok
    for regime in (Regime.CBN, Regime.CBV):
        g = reduction_graph(start, regime, node_budget=5000, order="smallest")
        sinks = [g.nodes[k] for k in g.sinks()]
        unique = len(sinks) == 1 and alpha_eq(sinks[0], target)
        details.append(f"{regime.value}: {len(g.nodes)} nodes, truncated {g.truncated}, "
                       f"{len(sinks)} sink(s), unique target {unique}")
        ok = ok and unique and not g.truncated
    verdict(1, ok, "; ".join(details))


def test_criterion_02_peirce():
    check_derivation(peirce_derivation())
    mutations = list(type_mutations(to_json(peirce_derivation())))
    missed = []
    for path, what, mutated in mutations:
        result = check_result(mutated)
        if not result.startswith("error at "):
            missed.append(what)
            continue
        reported = tuple(int(k) for k in result[len("error at ["):result.index("]")].split(",") if k.strip())
        if reported not in (path, path[:-1]):
            missed.append(f"{what} reported at {list(reported)}")
    verdict(2, not missed, f"derivation checks; {len(mutations)} mutations, {len(missed)} not localized")


def test_criterion_03_simple_witness_reduction():
    c = preservation_campaign(Regime.FULL, seed=0, cases=500, depth=5)
    verdict(3, c.passed, c.summary())


def test_criterion_04_witness_expansion():
    c = expansion_campaign(seed=0, cases=500, depth=5)
    verdict(4, c.passed, c.summary())


def test_criterion_05_first_counterexample():
    t0 = time.perf_counter()
    report = run_counterexample_1()
    elapsed = time.perf_counter() - t0
    failed = [line for line in report.lines if line.startswith("FAIL")]
    verdict(5, report.passed and elapsed < 60, f"{len(report.lines)} report lines, {len(failed)} failed claims, "
                                               f"{elapsed:.1f}s")


def test_criterion_06_second_counterexample():
    report = run_counterexample_2()
    failed = [line for line in report.lines if line.startswith("FAIL")]
    verdict(6, report.passed, f"{len(failed)} failed claims")


def _rejected(d, system) -> bool:
    try:
        check_derivation(d.with_system(system))
    except RuleError:
        return True
    return False


def test_criterion_07_restricted_systems_recover_preservation():
    cbn = preservation_campaign(Regime.CBN, seed=0, cases=300, depth=5)
    cbv = preservation_campaign(Regime.CBV, seed=0, cases=300, depth=5)
    g2, d2 = COUNTEREXAMPLE_2.contexts()
    iu2 = search(System.IU, COUNTEREXAMPLE_2.start(), g2, d2).derivation
    g1, d1 = COUNTEREXAMPLE_1.contexts()
    iu1 = search(System.IU, COUNTEREXAMPLE_1.start(), g1, d1).derivation
    rejections = {
        "union on a non-introduced socket under CBN": _rejected(unrestricted_union(System.IU), System.CBN),
        "second start typing under CBN": iu2 is not None and _rejected(iu2, System.CBN),
        "first start typing under CBV": iu1 is not None and _rejected(iu1, System.CBV),
    }
    ok = cbn.passed and cbv.passed and all(rejections.values())
    verdict(7, ok, f"{cbn.summary()}; {cbv.summary()}; rejected {sum(rejections.values())}/{len(rejections)}")


def test_criterion_08_cbn_expansion_failure():
    report = run_cbn_expansion_failure()
    verdict(8, report.passed, "; ".join(line for line in report.lines if line.startswith(("PASS", "FAIL"))))


def _random_type(rng: random.Random, depth: int):
    if depth == 0 or rng.random() < 0.3:
        return rng.choice([TVar("A"), TVar("B"), TVar("C"), TOP, BOT])
    kind = rng.choice([Arrow, Inter, Union])
    return kind(_random_type(rng, depth - 1), _random_type(rng, depth - 1))


def test_criterion_09_type_relations():
    types = type_universe(2000, seed=0)
    rel = closure(types)
    disagreements = sum(leq(s, t) != rel[i, j] for i, s in enumerate(types) for j, t in enumerate(types))
    forward = leq(parse_type("A|(B&C)"), parse_type("(A|B)&(A|C)"))
    converse = leq(parse_type("(A|B)&(A|C)"), parse_type("A|(B&C)"))
    rng = random.Random(0)
    sample = [_random_type(rng, 4) for _ in range(5000)]
    bad_norm = sum(not (normalize(normalize(t)) == normalize(t) and equiv(t, normalize(t))) for t in sample)
    ok = disagreements == 0 and forward and not converse and bad_norm == 0
    verdict(9, ok, f"{len(types)} types, {len(types) ** 2} pairs, {disagreements} disagreements; "
                   f"distributive direction {forward}, converse {converse}; "
                   f"normalize failures {bad_norm}/5000")


def test_criterion_10_simulation():
    t0 = time.perf_counter()
    runs = [simulation_campaign(regime, seed=0, cases=100, max_size=12, budget=20_000) for regime in Regime]
    elapsed = time.perf_counter() - t0
    ok = all(c.passed for c in runs) and elapsed <= 120
    verdict(10, ok, "; ".join(c.summary() for c in runs) + f"; {elapsed:.1f}s")


def test_criterion_11_admissible_shortcuts():
    c = shortcut_campaign(seed=0, cases=500)
    verdict(11, c.passed, c.summary())
