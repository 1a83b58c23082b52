"""Lambda terms and their bridge into nets.

Covers parsing and printing, full beta reduction, principal Curry typing by
unification, a checker for the strict intersection system of the lambda
calculus, the plug-directed translation into nets, the check that each beta
step is simulated by net reduction, and the construction that turns an
intersection typing of a term into an IU derivation of its translation.
"""

from __future__ import annotations

import itertools
import random
import re
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Union as TUnion

from . import build
from .derivation import Derivation, System, check_derivation, spine
from .rewrite import Redex, Regime, reachable
from .syntax import (
    Activation, Capsule, Cut, Export, Import, NameSupply, Net, all_names, alpha_eq, canonical_key,
    free_plugs, replace_at, size, subnet_at,
)
from .types import (
    Arrow, Inter, IUType, TVar, Top, equiv, is_proper, meet, meetands, normalize, show_type,
)

__all__ = [
    "Var", "Abs", "App", "Sub", "Term", "LambdaSyntaxError", "parse_term", "show_term",
    "free_vars", "term_size", "substitute", "beta_step", "is_value", "cbv_beta_step",
    "CurryTyping", "curry_infer", "curry_derivation", "LcDerivation", "LcRuleError",
    "check_lc_inter", "translate", "SimulationResult", "check_simulation",
    "check_typing_preservation", "random_term",
]


# ---------------------------------------------------------------------------
# terms


@dataclass(frozen=True, slots=True)
class Var:
    name: str


@dataclass(frozen=True, slots=True)
class Abs:
    var: str
    body: "Term"


@dataclass(frozen=True, slots=True)
class App:
    fun: "Term"
    arg: "Term"


@dataclass(frozen=True, slots=True)
class Sub:
    """Explicit substitution ``body<var:=arg>``; only produced with ``explicit=True``."""
    body: "Term"
    var: str
    arg: "Term"


Term = TUnion[Var, Abs, App, Sub]


class LambdaSyntaxError(ValueError):
    def __init__(self, message: str, offset: int | None = None):
        super().__init__(message if offset is None else f"{message} (at offset {offset})")
        self.offset = offset


_LTOKEN = re.compile(r"\s*(:=|[\\λ.()<>]|[A-Za-z][A-Za-z0-9_']*)")


def _lex(text: str) -> list[tuple[str, int]]:
    out, pos, end = [], 0, len(text.rstrip())
    while pos < end:
        m = _LTOKEN.match(text, pos)
        if not m:
            raise LambdaSyntaxError(f"unexpected character {text[pos:].lstrip()[:1]!r}", pos)
        out.append((m.group(1), m.start(1)))
        pos = m.end()
    return out


def parse_term(text: str, explicit: bool = False) -> Term:
    """Parse ``term := ident | "\\" ident "." term | term term | "(" term ")"``.

    Application associates to the left and an abstraction body extends as far
    right as possible; ``\\x y.M`` abbreviates ``\\x.\\y.M``.  With ``explicit``
    the postfix form ``term<x:=term>`` denotes an explicit substitution.
    """
    toks = _lex(text)
    i = 0

    def peek() -> str | None:
        return toks[i][0] if i < len(toks) else None

    def where() -> int:
        return toks[i][1] if i < len(toks) else len(text)

    def take(want: str | None = None) -> str:
        nonlocal i
        tok = peek()
        if tok is None or (want is not None and tok != want):
            raise LambdaSyntaxError(f"expected {want or 'a token'}, found {tok!r}", where())
        i += 1
        return tok

    def ident() -> str:
        tok = peek()
        if tok is None or not tok[0].isalpha() or tok == "λ":
            raise LambdaSyntaxError(f"expected a variable, found {tok!r}", where())
        return take()

    def term() -> Term:
        items: list[Term] = []
        while True:
            tok = peek()
            if tok in ("\\", "λ"):
                take()
                xs = [ident()]
                while peek() != ".":
                    xs.append(ident())
                take(".")
                body = term()
                for x in reversed(xs):
                    body = Abs(x, body)
                items.append(body)
                break
            if tok == "(":
                take()
                t = term()
                take(")")
                items.append(postfix(t))
            elif tok is not None and tok[0].isalpha() and tok != "λ":
                items.append(postfix(Var(take())))
            else:
                break
        if not items:
            raise LambdaSyntaxError(f"expected a term, found {peek()!r}", where())
        out = items[0]
        for t in items[1:]:
            out = App(out, t)
        return out

    def postfix(t: Term) -> Term:
        while explicit and peek() == "<":
            take("<")
            x = ident()
            take(":=")
            arg = term()
            take(">")
            t = Sub(t, x, arg)
        return t

    out = term()
    if peek() is not None:
        raise LambdaSyntaxError(f"trailing input {peek()!r}", where())
    return out


def show_term(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Abs):
        return f"\\{t.var}.{show_term(t.body)}"
    if isinstance(t, Sub):
        return f"{_atom(t.body)}<{t.var}:={show_term(t.arg)}>"
    fun = show_term(t.fun) if isinstance(t.fun, (Var, App)) else f"({show_term(t.fun)})"
    return f"{fun} {_atom(t.arg)}"


def _atom(t: Term) -> str:
    return t.name if isinstance(t, Var) else f"({show_term(t)})"


def free_vars(t: Term) -> frozenset[str]:
    if isinstance(t, Var):
        return frozenset({t.name})
    if isinstance(t, Abs):
        return free_vars(t.body) - {t.var}
    if isinstance(t, Sub):
        return (free_vars(t.body) - {t.var}) | free_vars(t.arg)
    return free_vars(t.fun) | free_vars(t.arg)


def _all_vars(t: Term) -> set[str]:
    if isinstance(t, Var):
        return {t.name}
    if isinstance(t, Abs):
        return {t.var} | _all_vars(t.body)
    if isinstance(t, Sub):
        return {t.var} | _all_vars(t.body) | _all_vars(t.arg)
    return _all_vars(t.fun) | _all_vars(t.arg)


def term_size(t: Term) -> int:
    if isinstance(t, Var):
        return 1
    if isinstance(t, Abs):
        return 1 + term_size(t.body)
    if isinstance(t, Sub):
        return 1 + term_size(t.body) + term_size(t.arg)
    return 1 + term_size(t.fun) + term_size(t.arg)


def _fresh_var(base: str, avoid: set[str]) -> str:
    stem = base.rstrip("0123456789'") or "v"
    for k in itertools.count(1):
        cand = f"{stem}{k}"
        if cand not in avoid:
            return cand
    raise AssertionError("unreachable")


def substitute(t: Term, x: str, n: Term) -> Term:
    """Capture-avoiding ``t[n/x]``."""
    if isinstance(t, Var):
        return n if t.name == x else t
    if isinstance(t, App):
        return App(substitute(t.fun, x, n), substitute(t.arg, x, n))
    if isinstance(t, Sub):
        raise ValueError("substitution under an explicit substitution is not supported")
    if t.var == x:
        return t
    if t.var in free_vars(n):
        new = _fresh_var(t.var, _all_vars(t) | _all_vars(n) | {x})
        return Abs(new, substitute(substitute(t.body, t.var, Var(new)), x, n))
    return Abs(t.var, substitute(t.body, x, n))


def beta_step(t: Term) -> list[Term]:
    """Every one-step beta contraction of ``t``, outermost-leftmost first."""
    return [r for _, r in _beta(t, value_only=False)]


def is_value(t: Term) -> bool:
    return isinstance(t, (Var, Abs))


def cbv_beta_step(t: Term) -> list[Term]:
    """One-step contractions of redexes whose argument is a value (anywhere in ``t``)."""
    return [r for _, r in _beta(t, value_only=True)]


def _beta(t: Term, value_only: bool) -> Iterator[tuple[tuple[str, ...], Term]]:
    """Pairs (redex position, reduct); positions step through ``body``, ``fun`` and ``arg``."""
    if isinstance(t, Abs):
        for k, r in _beta(t.body, value_only):
            yield ("body",) + k, Abs(t.var, r)
        return
    if not isinstance(t, App):
        return
    if isinstance(t.fun, Abs) and (not value_only or is_value(t.arg)):
        yield (), substitute(t.fun.body, t.fun.var, t.arg)
    for k, r in _beta(t.fun, value_only):
        yield ("fun",) + k, App(r, t.arg)
    for k, r in _beta(t.arg, value_only):
        yield ("arg",) + k, App(t.fun, r)


def _subterm(t: Term, pos: tuple[str, ...]) -> Term:
    for step_ in pos:
        t = getattr(t, step_)
    return t


def random_term(rng: random.Random, max_size: int, free: tuple[str, ...] = ("x", "y")) -> Term:
    """A random term of at most ``max_size`` nodes over a few free variables."""
    counter = itertools.count()

    def go(budget: int, scope: list[str]) -> Term:
        if budget <= 1:
            return Var(rng.choice(scope))
        kind = rng.choice(("var", "abs", "app", "app"))
        if kind == "var":
            return Var(rng.choice(scope))
        if kind == "abs":
            v = f"z{next(counter)}"
            return Abs(v, go(budget - 1, scope + [v]))
        if budget < 3:
            return Var(rng.choice(scope))
        k = rng.randint(1, budget - 2)
        return App(go(k, scope), go(budget - 1 - k, scope))

    return go(rng.randint(1, max_size), list(free))


# ---------------------------------------------------------------------------
# Curry typing


@dataclass(frozen=True)
class CurryTyping:
    socket_ctx: dict[str, IUType]
    type: IUType

    def text(self) -> str:
        ctx = ", ".join(f"{k}:{show_type(v)}" for k, v in sorted(self.socket_ctx.items()))
        return f"{ctx} |- {show_type(self.type)}"


class _Unifier:
    def __init__(self) -> None:
        self.sub: dict[str, IUType] = {}
        self.count = itertools.count()

    def fresh(self) -> TVar:
        return TVar(f"_{next(self.count)}")

    def resolve(self, t: IUType) -> IUType:
        while isinstance(t, TVar) and t.name in self.sub:
            t = self.sub[t.name]
        return t

    def apply(self, t: IUType) -> IUType:
        t = self.resolve(t)
        if isinstance(t, Arrow):
            return Arrow(self.apply(t.left), self.apply(t.right))
        return t

    def occurs(self, v: str, t: IUType) -> bool:
        t = self.resolve(t)
        if isinstance(t, TVar):
            return t.name == v
        return isinstance(t, Arrow) and (self.occurs(v, t.left) or self.occurs(v, t.right))

    def unify(self, s: IUType, t: IUType) -> bool:
        s, t = self.resolve(s), self.resolve(t)
        if isinstance(s, TVar) and isinstance(t, TVar) and s.name == t.name:
            return True
        if isinstance(s, TVar):
            if self.occurs(s.name, t):
                return False
            self.sub[s.name] = t
            return True
        if isinstance(t, TVar):
            return self.unify(t, s)
        return self.unify(s.left, t.left) and self.unify(s.right, t.right)


def _curry(t: Term) -> tuple[_Unifier, dict[str, IUType], "_Node"] | None:
    u = _Unifier()
    socket_ctx = {v: u.fresh() for v in sorted(free_vars(t))}

    def go(m: Term, env: dict[str, IUType]) -> "_Node | None":
        if isinstance(m, Var):
            return _Node("Ax", m, env, env[m.name], [])
        if isinstance(m, Abs):
            a = u.fresh()
            body = go(m.body, {**env, m.var: a})
            if body is None:
                return None
            return _Node("arrI", m, env, Arrow(a, body.type), [body])
        if isinstance(m, Sub):
            raise ValueError("Curry typing of explicit substitutions is not supported")
        f, x = go(m.fun, env), go(m.arg, env)
        if f is None or x is None:
            return None
        res = u.fresh()
        if not u.unify(f.type, Arrow(x.type, res)):
            return None
        return _Node("arrE", m, env, res, [f, x])

    root = go(t, socket_ctx)
    return None if root is None else (u, socket_ctx, root)


@dataclass
class _Node:
    rule: str
    term: Term
    env: dict[str, IUType]
    type: IUType
    premises: list["_Node"]


def _pretty_names(types: list[IUType]) -> dict[str, IUType]:
    names: dict[str, IUType] = {}

    def visit(t: IUType) -> None:
        if isinstance(t, TVar) and t.name not in names:
            k = len(names)
            names[t.name] = TVar(chr(ord("A") + k) if k < 26 else f"T{k}")
        elif isinstance(t, Arrow):
            visit(t.left)
            visit(t.right)

    for t in types:
        visit(t)
    return names


def _rename_tvars(t: IUType, names: Mapping[str, IUType]) -> IUType:
    if isinstance(t, TVar):
        return names.get(t.name, t)
    if isinstance(t, Arrow):
        return Arrow(_rename_tvars(t.left, names), _rename_tvars(t.right, names))
    return t


def curry_infer(t: Term) -> CurryTyping | None:
    """The principal Curry typing of ``t``, or ``None`` when ``t`` is untypable.

    Type variables are named A, B, C, ... in order of first occurrence in the
    result type and then in the context (sorted by variable).
    """
    res = _curry(t)
    if res is None:
        return None
    u, socket_ctx, root = res
    ty = u.apply(root.type)
    ctx = {k: u.apply(v) for k, v in socket_ctx.items()}
    names = _pretty_names([ty] + [ctx[k] for k in sorted(ctx)])
    return CurryTyping({k: _rename_tvars(v, names) for k, v in ctx.items()}, _rename_tvars(ty, names))


def curry_derivation(t: Term) -> "LcDerivation | None":
    """A Curry derivation (rules Ax, arrI, arrE) of the principal typing of ``t``."""
    res = _curry(t)
    if res is None:
        return None
    u, socket_ctx, root = res
    ty = u.apply(root.type)
    names = _pretty_names([ty] + [u.apply(socket_ctx[k]) for k in sorted(socket_ctx)])

    def fin(x: IUType) -> IUType:
        x = u.apply(x)
        extra = _pretty_names([x])
        for k in extra:
            if k not in names:
                names[k] = TVar(f"T{len(names)}")
        return _rename_tvars(x, names)

    def conv(n: _Node) -> LcDerivation:
        return LcDerivation(n.rule, {k: fin(v) for k, v in n.env.items()}, n.term, fin(n.type),
                            [conv(p) for p in n.premises])

    return conv(root)


# ---------------------------------------------------------------------------
# strict intersection system for the lambda calculus


@dataclass
class LcDerivation:
    """A natural-deduction derivation ``socket_ctx |- term : type``.

    Rules: ``Ax``, ``arrI``, ``arrE``, ``interI`` (any number of premises,
    none giving TOP) and ``interE`` (``index`` selects a meetand of the
    normalized premise type).
    """
    rule: str
    socket_ctx: dict[str, IUType]
    term: Term
    type: IUType
    premises: list["LcDerivation"] = field(default_factory=list)
    index: int | None = None


class LcRuleError(ValueError):
    def __init__(self, path: tuple[int, ...], reason: str):
        super().__init__(f"at {list(path)}: {reason}")
        self.path = path
        self.reason = reason


def _ctx_same(a: Mapping[str, IUType], b: Mapping[str, IUType]) -> bool:
    return set(a) == set(b) and all(equiv(a[k], b[k]) for k in a)


def check_lc_inter(d: LcDerivation, curry: bool = False) -> None:
    """Validate ``d`` node by node; ``curry`` restricts to Ax/arrI/arrE over simple types."""
    _check_lc(d, (), curry)


def _check_lc(d: LcDerivation, path: tuple[int, ...], curry: bool) -> None:
    def fail(reason: str) -> None:
        raise LcRuleError(path, reason)

    allowed = ("Ax", "arrI", "arrE") if curry else ("Ax", "arrI", "arrE", "interI", "interE")
    if d.rule not in allowed:
        fail(f"unknown rule {d.rule}")
    if curry and any(isinstance(x, (Inter, Top)) for x in _type_nodes(d.type)):
        fail("Curry derivations use simple types only")
    t, ps = d.term, d.premises
    if d.rule == "Ax":
        if ps:
            fail("Ax has no premises")
        if not isinstance(t, Var):
            fail("Ax types a variable")
        if t.name not in d.socket_ctx:
            fail(f"{t.name} is not in the context")
        if not equiv(d.socket_ctx[t.name], d.type):
            fail(f"{t.name} has type {show_type(d.socket_ctx[t.name])} in the context, not {show_type(d.type)}")
    elif d.rule == "arrI":
        if len(ps) != 1:
            fail("arrI has one premise")
        if not isinstance(t, Abs):
            fail("arrI types an abstraction")
        (p,) = ps
        if not isinstance(normalize(d.type), Arrow):
            fail("arrI concludes an arrow type")
        ty = normalize(d.type)
        if p.term != t.body:
            fail("premise term is not the abstraction body")
        if t.var in d.socket_ctx:
            fail(f"bound variable {t.var} already in the context")
        if not _ctx_same(p.socket_ctx, {**d.socket_ctx, t.var: ty.left}):
            fail("premise context must extend the conclusion's by the bound variable")
        if not equiv(p.type, ty.right):
            fail("premise type is not the arrow's result")
    elif d.rule == "arrE":
        if len(ps) != 2:
            fail("arrE has two premises")
        if not isinstance(t, App):
            fail("arrE types an application")
        f, x = ps
        if f.term != t.fun or x.term != t.arg:
            fail("premise terms do not match the application")
        if not (_ctx_same(f.socket_ctx, d.socket_ctx) and _ctx_same(x.socket_ctx, d.socket_ctx)):
            fail("premise contexts differ from the conclusion's")
        fty = normalize(f.type)
        if not isinstance(fty, Arrow):
            fail("function premise does not have an arrow type")
        if not equiv(fty.left, x.type):
            fail("argument type does not match the arrow's domain")
        if not equiv(fty.right, d.type):
            fail("conclusion type is not the arrow's result")
    elif d.rule == "interI":
        for p in ps:
            if p.term != t or not _ctx_same(p.socket_ctx, d.socket_ctx):
                fail("interI premises type the same term in the same context")
        if not equiv(meet([p.type for p in ps]), d.type):
            fail("conclusion is not the intersection of the premise types")
    else:
        if len(ps) != 1:
            fail("interE has one premise")
        (p,) = ps
        if p.term != t or not _ctx_same(p.socket_ctx, d.socket_ctx):
            fail("interE premise types the same term in the same context")
        parts = spine(p.type, plug_side=True)
        if d.index is None or not 0 <= d.index < len(parts):
            fail("interE index out of range")
        if not equiv(parts[d.index], d.type):
            fail(f"conclusion should be {show_type(parts[d.index])}")
    for i, p in enumerate(ps):
        _check_lc(p, path + (i,), curry)


def _type_nodes(t: IUType) -> Iterator[IUType]:
    yield t
    for attr in ("left", "right"):
        sub = getattr(t, attr, None)
        if sub is not None:
            yield from _type_nodes(sub)


# ---------------------------------------------------------------------------
# translation


def translate(t: Term, plug: str = "a", explicit: bool = False) -> Net:
    """The net interpreting ``t`` with result plug ``plug``.

    Variables become sockets of the same name where the name is still free to
    use; other binders and every internal plug get fresh names, so the result
    is in Barendregt form.  Explicit substitutions are accepted only when
    ``explicit`` is set.
    """
    return _Translator(t, plug, explicit).go(t, plug, {v: v for v in free_vars(t)})


class _Translator:
    def __init__(self, t: Term, plug: str, explicit: bool, taken: set[str] | None = None):
        fv = free_vars(t)
        if plug in fv:
            raise ValueError(f"plug {plug} clashes with a free variable")
        self.explicit = explicit
        self.supply = NameSupply(_all_vars(t) | {plug} | (taken or set()))
        self.claimed = set(fv) | {plug} | (taken or set())

    def bind(self, x: str) -> str:
        if x not in self.claimed:
            self.claimed.add(x)
            return x
        return self.supply.socket()

    def go(self, t: Term, a: str, env: dict[str, str]) -> Net:
        if isinstance(t, Var):
            return Capsule(env[t.name], a)
        if isinstance(t, Abs):
            x = self.bind(t.var)
            b = self.supply.plug()
            return Export(x, self.go(t.body, b, {**env, t.var: x}), b, a)
        if isinstance(t, Sub):
            if not self.explicit:
                raise ValueError("explicit substitution needs explicit=True")
            g = self.supply.plug()
            arg = self.go(t.arg, g, env)
            x = self.bind(t.var)
            return Cut(arg, g, x, self.go(t.body, a, {**env, t.var: x}), Activation.RIGHT)
        g = self.supply.plug()
        fun = self.go(t.fun, g, env)
        x = self.supply.socket()
        b = self.supply.plug()
        arg = self.go(t.arg, b, env)
        y = self.supply.socket()
        return Cut(fun, g, x, Import(arg, b, x, y, Capsule(y, a)))


# ---------------------------------------------------------------------------
# simulation


@dataclass
class SimulationResult:
    """Outcome of :func:`check_simulation`.

    ``verdict`` is ``"verified"`` when every beta step was matched,
    ``"truncated"`` when some target was not found within the node budget,
    and ``"failed"`` when the graph was exhausted without meeting a target.
    """
    term: Term
    regime: Regime
    steps: int
    matched: int
    explored: int
    verdict: str
    missing: list[Term] = field(default_factory=list)

    @property
    def verified(self) -> bool:
        return self.verdict == "verified"


def _is_application(n: Net) -> bool:
    """An inactive cut of the shape the translation gives applications."""
    return (isinstance(n, Cut) and n.act is Activation.INACTIVE and isinstance(n.right, Import)
            and n.right.mid == n.socket)


def _reachable(start: Net, target: Net, regime: Regime, budget: int,
               redex: tuple[int, ...] | None = None, focus: str | None = None) -> tuple[bool, int, bool]:
    """:func:`reachable`, leaving alone application cuts other than the one at ``redex``.

    A beta step contracts one application and keeps the others, so only the
    cut being simulated and the cuts it spawns need to fire.
    """
    if redex is None:
        return reachable(start, target, regime, budget, focus=focus)

    def skip(net: Net, r: Redex) -> bool:
        return r.path != redex and _is_application(subnet_at(net, r.path))

    return reachable(start, target, regime, budget, skip, focus)


def _locate(start: Net, t: Term, pos: tuple[str, ...]) -> tuple[tuple[int, ...], Net, dict[str, str]]:
    """Net path, subnet and variable-to-socket map for the subterm of ``t`` at ``pos``."""
    path: tuple[int, ...] = ()
    env = {v: v for v in free_vars(t)}
    net = start
    for step_ in pos:
        if step_ == "body":
            assert isinstance(t, Abs) and isinstance(net, Export)
            env = {**env, t.var: net.socket}
            t, net, path = t.body, net.body, path + (0,)
        elif step_ == "fun":
            assert isinstance(t, App) and isinstance(net, Cut)
            t, net, path = t.fun, net.left, path + (0,)
        else:
            assert isinstance(t, App) and isinstance(net, Cut) and isinstance(net.right, Import)
            t, net, path = t.arg, net.right.left, path + (1, 0)
    return path, net, env


# Every CBN or CBV reduction is also a full one, so a full-regime target is
# first sought in those smaller graphs, each given a share of the budget left.
_SEARCH_PLAN = {
    Regime.FULL: ((Regime.CBN, 1 / 3), (Regime.CBV, 1 / 2), (Regime.FULL, 1.0)),
    Regime.CBN: ((Regime.CBN, 1.0),),
    Regime.CBV: ((Regime.CBV, 1.0),),
}


def check_simulation(t: Term, regime: Regime = Regime.FULL, budget: int = 20_000,
                     plug: str = "a") -> SimulationResult:
    """Check that each one-step beta reduct of ``t`` is reachable from its translation.

    The full and CBN regimes are checked against every beta step; CBV
    against the steps whose argument is a value.  Reduction is contextual,
    so each redex is first searched for locally: from the subnet translating
    the redex towards the translation of its contractum, after which the
    whole reached net is compared with the translation of the reduct.  Each
    search first fires one propagation step at a time and leaves the other
    applications alone, then drops those restrictions; if the local search
    fails the whole net is searched the same way.  ``budget`` bounds the number of
    expanded nets over all steps.
    """
    start = translate(t, plug)
    taken = all_names(start)
    steps = list(_beta(t, value_only=regime is Regime.CBV))
    matched, explored, missing, exhausted_any = 0, 0, [], False
    for pos, reduct in steps:
        target = translate(reduct, plug)
        path, sub, env = _locate(start, t, pos)
        redex = _subterm(t, pos)
        assert isinstance(redex, App) and isinstance(redex.fun, Abs)
        contractum = substitute(redex.fun.body, redex.fun.var, redex.arg)
        (sub_plug,) = free_plugs(sub)
        local_target = _Translator(contractum, sub_plug, False, taken | set(env.values())).go(
            contractum, sub_plug, env)
        tries = [(start, target, path, "first", 0.25), (start, target, None, None, 1.0)]
        if alpha_eq(replace_at(start, path, local_target), target):
            tries[:0] = [(sub, local_target, (), "first", 0.25), (sub, local_target, (), None, 0.5)]
        found, exhausted = False, False
        for src, dst, pinned, focus, part in tries:
            for reg, share in _SEARCH_PLAN[regime]:
                cap = max(1, int((budget - explored) * share * part))
                found, used, exhausted = _reachable(src, dst, reg, cap, pinned, focus)
                explored += used
                if found:
                    break
            if found:
                break
        if found:
            matched += 1
        else:
            missing.append(reduct)
            exhausted_any = exhausted_any or exhausted
    if not missing:
        verdict = "verified"
    else:
        verdict = "failed" if exhausted_any else "truncated"
    return SimulationResult(t, regime, len(steps), matched, explored, verdict, missing)


# ---------------------------------------------------------------------------
# typing preservation


def check_typing_preservation(d: LcDerivation, plug: str = "a",
                              system: System = System.IU) -> Derivation:
    """An IU derivation of ``translate(d.term, plug)`` at ``d.socket_ctx |- plug:d.type``.

    Built by induction on ``d``: capsules by ``Ax`` (``interR`` over the
    meetands of a non-proper type), abstractions by ``impR``, applications by
    a cut against an import, ``interI`` by ``interR`` and ``interE`` by
    projecting the plug.  With ``system=System.SIMPLE`` a Curry derivation
    yields a Simple derivation.
    """
    check_lc_inter(d, curry=system is System.SIMPLE)
    net = translate(d.term, plug)
    env = {v: v for v in free_vars(d.term)}
    out = _preserve(d, net, plug, env, system)
    check_derivation(out)
    return out


def _ctx_x(socket_ctx: Mapping[str, IUType], env: Mapping[str, str]) -> dict[str, IUType]:
    return {env[k]: normalize(v) for k, v in socket_ctx.items() if k in env}


def _capsule_at(system: System, net: Capsule, socket_ctx: dict[str, IUType], ty: IUType) -> Derivation:
    """``<y.a>`` typed with ``a`` at ``ty`` and the socket as ``socket_ctx`` says."""
    ty = normalize(ty)
    a = net.plug
    if is_proper(ty):
        return build.ax(system, net, socket_ctx, {a: ty})
    parts = meetands(ty) if isinstance(ty, Inter) else []
    if not parts:
        return build.inter_r(system, net, a, [], socket_ctx=socket_ctx)
    return build.inter_r(system, net, a, [build.ax(system, net, socket_ctx, {a: p}) for p in parts])


def _preserve(d: LcDerivation, net: Net, a: str, env: dict[str, str], system: System) -> Derivation:
    socket_ctx = _ctx_x(d.socket_ctx, env)
    if d.rule == "interI":
        ps = [_preserve(p, net, a, env, system) for p in d.premises]
        if not ps:
            return build.inter_r(system, net, a, [], socket_ctx=socket_ctx)
        return ps[0] if len(ps) == 1 else build.inter_r(system, net, a, ps)
    if d.rule == "interE":
        inner = _preserve(d.premises[0], net, a, env, system)
        parts = spine(inner.plug_ctx[a], plug_side=True)
        idx = next(i for i, p in enumerate(parts) if equiv(p, d.type))
        return build.inter_e(inner, a, idx)
    if d.rule == "Ax":
        assert isinstance(net, Capsule)
        return _capsule_at(system, net, socket_ctx, d.type)
    if d.rule == "arrI":
        assert isinstance(net, Export) and isinstance(d.term, Abs)
        body = _preserve(d.premises[0], net.body, net.plug, {**env, d.term.var: net.socket}, system)
        return build.imp_r(system, net, body)
    assert isinstance(net, Cut) and isinstance(net.right, Import)
    f, x = d.premises
    imp = net.right
    df = _preserve(f, net.left, net.plug, env, system)
    dx = _preserve(x, imp.left, imp.plug, env, system)
    res = _capsule_at(system, imp.right, {imp.socket: normalize(d.type)}, d.type)
    return build.cut(system, net, df, build.imp_l(system, imp, dx, res))
