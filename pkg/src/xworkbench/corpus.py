"""The example corpus: entries on disk, their recomputation and type mutations.

Each entry is a directory holding ``expected.json`` (a name, a kind, inputs
and a list of artifacts, each with a ``tag`` saying where its value comes
from) and any input files the kind needs.  :func:`recompute` derives every
artifact afresh so that a test can compare it with the stored value.
"""

from __future__ import annotations

import copy
import json
from pathlib import Path
from typing import Any, Iterator

from .demos import (
    CBN_EXPANSION_FAILURE, COUNTEREXAMPLE_1, COUNTEREXAMPLE_2, Counterexample, STABILITY_BUDGETS,
)
from .derivation import RuleError, System, check_derivation, conclusion_text, from_json
from .lam import parse_term, translate
from .rewrite import Regime, RuleId, find_redexes, reduce, reduction_graph, step
from .search import search
from .syntax import alpha_eq, parse, show
from .types import Arrow, parse_type, show_type

__all__ = ["CORPUS_DIR", "entries", "load", "recompute", "type_mutations", "check_result"]

CORPUS_DIR = Path(__file__).resolve().parents[2] / "corpus"

_COUNTEREXAMPLES = {cx.name: cx for cx in (COUNTEREXAMPLE_1, COUNTEREXAMPLE_2, CBN_EXPANSION_FAILURE)}


def entries(root: Path = CORPUS_DIR) -> list[Path]:
    return sorted(p for p in root.iterdir() if (p / "expected.json").is_file())


def load(entry: Path) -> dict[str, Any]:
    return json.loads((entry / "expected.json").read_text(encoding="utf-8"))


def check_result(obj: dict[str, Any]) -> str:
    """``"ok"`` or ``"error at [path]: reason"`` for a JSON derivation."""
    try:
        check_derivation(from_json(obj))
    except RuleError as exc:
        return f"error {exc}"
    return "ok"


def type_mutations(obj: dict[str, Any], path: tuple[int, ...] = ()) -> Iterator[tuple[tuple[int, ...], str, dict]]:
    """Every copy of a JSON derivation with exactly one type replaced.

    Yields ``(node path, description, mutated copy)``.  A type is replaced by
    a fresh atom and, when it is an arrow, also by its result and by the arrow
    with its sides swapped.
    """
    concl = obj["conclusion"]
    slots = [(side, name) for side in ("socket_ctx", "plug_ctx") for name in sorted(concl.get(side, {}))]
    for side, name in slots:
        for new in _replacements(concl[side][name]):
            mutated = copy.deepcopy(obj)
            mutated["conclusion"][side][name] = new
            yield path, f"{side}.{name}: {concl[side][name]} -> {new}", mutated
    cut_type = obj.get("rule_data", {}).get("cut_type")
    if cut_type is not None:
        for new in _replacements(cut_type):
            mutated = copy.deepcopy(obj)
            mutated["rule_data"]["cut_type"] = new
            yield path, f"cut_type: {cut_type} -> {new}", mutated
    for i, premise in enumerate(obj.get("premises", [])):
        for sub_path, what, sub in type_mutations(premise, path + (i,)):
            mutated = copy.deepcopy(obj)
            mutated["premises"][i] = sub
            yield sub_path, what, mutated


def _replacements(text: str) -> list[str]:
    t = parse_type(text)
    out = ["Z"]
    if isinstance(t, Arrow):
        out += [show_type(t.cod), show_type(Arrow(t.cod, t.dom))]
    return [r for r in dict.fromkeys(out) if parse_type(r) != t]


# ---------------------------------------------------------------------------
# recomputation per entry kind


def _derivation(entry: Path, data: dict) -> dict[str, Any]:
    obj = json.loads((entry / data["inputs"]["derivation"]).read_text(encoding="utf-8"))
    out = {"check": check_result(obj)}
    if out["check"] == "ok":
        out["conclusion"] = conclusion_text(from_json(obj))
    return out


def _figure(entry: Path, data: dict) -> dict[str, Any]:
    inputs = data["inputs"]
    start = translate(parse_term(inputs["term"]), inputs["plug"])
    target = translate(parse_term(inputs["normal_form_term"]), inputs["plug"])
    trace = reduce(start, Regime.FULL, inputs["fuel"])
    return {
        "translation": show(start),
        "full_reaches_normal_form": alpha_eq(trace.final, target) and not trace.out_of_fuel,
        "full_steps": len(trace.steps),
    }


def _counterexample(entry: Path, data: dict) -> dict[str, Any]:
    cx: Counterexample = _COUNTEREXAMPLES[data["name"]]
    inputs = data["inputs"]
    assert inputs["net"] == cx.net
    socket_ctx, plug_ctx = cx.contexts()
    system = System(inputs["system"])
    out: dict[str, Any] = {"start": search(system, cx.start(), socket_ctx, plug_ctx).verdict()}
    regime = Regime(inputs["regime"])
    target = parse(inputs["reduct"], refresh=False)
    if data["name"] == CBN_EXPANSION_FAILURE.name:
        r = next(r for r in find_redexes(cx.start(), regime) if r.rule is RuleId.DL_d)
        out["reached"] = alpha_eq(step(cx.start(), r), target)
    else:
        trace = reduce(cx.start(), regime, 50)
        out["reached"] = any(alpha_eq(n, target) for _, n in trace.steps)
    out["reduct"] = sorted({search(system, target, socket_ctx, plug_ctx, d, u).verdict() for d, u in STABILITY_BUDGETS})
    return out


def _critical_pair(entry: Path, data: dict) -> dict[str, Any]:
    g = reduction_graph(parse(data["inputs"]["net"], refresh=False), Regime.FULL)
    return {"truncated": g.truncated, "sinks": sorted(show(g.nodes[k]) for k in g.sinks())}


_KINDS = {
    "derivation": _derivation,
    "figure": _figure,
    "counterexample": _counterexample,
    "critical-pair": _critical_pair,
}


def recompute(entry: Path) -> dict[str, Any]:
    """Fresh values for every artifact named in the entry's ``expected.json``."""
    data = load(entry)
    values = _KINDS[data["kind"]](entry, data)
    return {a["name"]: values[a["name"]] for a in data["artifacts"]}
