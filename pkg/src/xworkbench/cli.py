"""Command-line entry point ``xwb``.

Exit codes: 0 when everything checked out, 1 when a checked claim failed
(an invalid derivation, a refutation that did not hold, a failing property
run) and 2 for usage, parse and file-format errors.
"""

from __future__ import annotations

import sys

import click

from .demos import DEMOS, run_demo
from .derivation import RuleError, System, check_derivation, conclusion_text, dumps, loads
from .harness import (
    expansion_campaign, preservation_campaign, shortcut_campaign, simulation_campaign,
)
from .lam import (
    LambdaSyntaxError, check_typing_preservation, curry_derivation, curry_infer, parse_term,
    translate,
)
from .rewrite import Regime, reduce, reduction_graph
from .syntax import NetSyntaxError, parse, show

__all__ = ["main"]

_REGIMES = click.Choice([r.value for r in Regime])


def _usage_error(message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(2)


def _read(source: str) -> str:
    if source == "-":
        return sys.stdin.read()
    try:
        with open(source, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        _usage_error(f"cannot read {source}: {exc.strerror}")
    raise AssertionError("unreachable")


def _parse_net(text: str):
    try:
        return parse(text.strip(), refresh=False)
    except NetSyntaxError as exc:
        _usage_error(str(exc))


@click.group()
def main() -> None:
    """Nets, their reduction and their typing."""


@main.command("parse")
@click.argument("source", default="-")
def cmd_parse(source: str) -> None:
    """Print the canonical text of the net in SOURCE (a file, or - for stdin)."""
    click.echo(show(_parse_net(_read(source))))


@main.command("reduce")
@click.argument("net")
@click.option("--regime", type=_REGIMES, default="full", show_default=True)
@click.option("--fuel", type=click.IntRange(min=0), default=1000, show_default=True,
              help="Maximum number of steps.")
@click.option("--trace", "show_trace", is_flag=True, help="Print every step.")
@click.option("--graph", "show_graph", is_flag=True, help="Explore all reducts and list the normal forms.")
@click.option("--budget", type=click.IntRange(min=1), default=5000, show_default=True,
              help="Node budget for --graph.")
@click.option("--seed", type=int, default=None, help="Pick redexes at random from this seed.")
def cmd_reduce(net: str, regime: str, fuel: int, show_trace: bool, show_graph: bool,
               budget: int, seed: int | None) -> None:
    """Reduce NET (net text, or - for stdin)."""
    start = _parse_net(_read("-") if net == "-" else net)
    reg = Regime(regime)
    if show_graph:
        g = reduction_graph(start, reg, node_budget=budget)
        click.echo(f"nodes: {len(g.nodes)}")
        click.echo(f"truncated: {str(g.truncated).lower()}")
        sinks = g.sinks()
        click.echo(f"sinks: {len(sinks)}")
        for key in sinks:
            click.echo(f"  {show(g.nodes[key])}")
        return
    trace = reduce(start, reg, fuel, seed=seed)
    click.echo(f"START: {show(start)}")
    if show_trace:
        for line in trace.lines():
            click.echo(line)
    click.echo(f"RESULT: {show(trace.final)}")
    click.echo(f"steps: {len(trace.steps)}")
    click.echo(f"truncated: {str(trace.out_of_fuel).lower()}")


@main.command("check")
@click.argument("source", default="-")
def cmd_check(source: str) -> None:
    """Check the JSON derivation in SOURCE (a file, or - for stdin)."""
    try:
        d = loads(_read(source))
    except (ValueError, KeyError, TypeError) as exc:
        _usage_error(f"malformed derivation: {exc}")
    try:
        check_derivation(d)
    except RuleError as exc:
        click.echo(f"error {exc}")
        sys.exit(1)
    click.echo("ok")
    click.echo(conclusion_text(d))


@main.command("translate")
@click.argument("term")
@click.option("--plug", default="a", show_default=True, help="Output plug of the translation.")
@click.option("--explicit", is_flag=True, help="Accept and translate explicit substitutions.")
@click.option("--derive", is_flag=True, help="Print a Simple derivation built from the principal Curry typing.")
def cmd_translate(term: str, plug: str, explicit: bool, derive: bool) -> None:
    """Translate the lambda term TERM into a net."""
    try:
        t = parse_term(term, explicit=explicit)
    except LambdaSyntaxError as exc:
        _usage_error(str(exc))
    if not derive:
        click.echo(show(translate(t, plug, explicit=explicit)))
        return
    lc = curry_derivation(t)
    if lc is None:
        click.echo("not typable in the Curry system")
        sys.exit(1)
    click.echo(f"# {curry_infer(t).text()}")
    click.echo(dumps(check_typing_preservation(lc, plug, System.SIMPLE)))


@main.command("demo")
@click.argument("name", type=click.Choice(sorted(DEMOS)))
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--cases", type=click.IntRange(min=1), default=500, show_default=True)
def cmd_demo(name: str, seed: int, cases: int) -> None:
    """Run one demonstration and print its report."""
    report = run_demo(name, seed, cases)
    click.echo(report.text())
    sys.exit(0 if report.passed else 1)


@main.command("proptest")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--cases", type=click.IntRange(min=1), default=500, show_default=True)
def cmd_proptest(seed: int, cases: int) -> None:
    """Run every seeded property campaign with CASES cases each."""
    campaigns = [
        lambda: preservation_campaign(Regime.FULL, seed, cases),
        lambda: preservation_campaign(Regime.CBN, seed, cases),
        lambda: preservation_campaign(Regime.CBV, seed, cases),
        lambda: expansion_campaign(seed, cases),
        lambda: shortcut_campaign(seed, cases),
        lambda: simulation_campaign(Regime.FULL, seed, cases),
        lambda: simulation_campaign(Regime.CBN, seed, cases),
        lambda: simulation_campaign(Regime.CBV, seed, cases),
    ]
    ok = True
    for run in campaigns:
        c = run()
        click.echo(c.summary())
        for f in c.failures[:5]:
            click.echo(f"  failure: {f}")
        ok = ok and c.passed
    sys.exit(0 if ok else 1)


if __name__ == "__main__":
    main()
