"""Intersection/union types, the subtype preorder, canonical forms and contexts.

The preorder is the free bounded lattice generated by type variables and
arrow types, where two arrows are related only when their components are
equivalent.  It is decided by Whitman's procedure over flattened
intersection/union spines; :func:`normalize` returns the lattice's
canonical form, so two types are equivalent exactly when their normal forms
are syntactically equal.
"""

from __future__ import annotations

import re
from functools import reduce
from typing import Iterable, Mapping

__all__ = [
    "IUType", "TVar", "Top", "Bot", "Arrow", "Inter", "Union", "TOP", "BOT",
    "is_simple", "is_proper", "meet", "join", "meetands", "joinands",
    "leq", "equiv", "normalize", "parse_type", "show_type", "TypeSyntaxError",
    "ctx_merge_inter", "ctx_merge_union", "ctx_compatible_union",
    "ctx_equiv", "Incompatible", "parse_judgement_contexts", "show_context",
    "subterms", "type_size",
]


class IUType:
    __slots__ = ("_hash", "_text")

    def __repr__(self) -> str:
        return f"IUType({show_type(self)!r})"

    def __str__(self) -> str:
        return show_type(self)

    def __lt__(self, other: "IUType") -> bool:
        return show_type(self) < show_type(other)


class TVar(IUType):
    __slots__ = ("name",)

    def __init__(self, name: str):
        self.name = name
        self._hash = hash(("var", name))
        self._text = None

    def __eq__(self, other):
        return isinstance(other, TVar) and other.name == self.name

    def __hash__(self):
        return self._hash


class _Const(IUType):
    __slots__ = ("tag",)

    def __init__(self, tag: str):
        self.tag = tag
        self._hash = hash(("const", tag))
        self._text = None

    def __eq__(self, other):
        return isinstance(other, _Const) and other.tag == self.tag

    def __hash__(self):
        return self._hash


class Top(_Const):
    __slots__ = ()

    def __init__(self):
        super().__init__("TOP")


class Bot(_Const):
    __slots__ = ()

    def __init__(self):
        super().__init__("BOT")


TOP = Top()
BOT = Bot()


class _Binary(IUType):
    __slots__ = ("left", "right")
    _tag = ""

    def __init__(self, left: IUType, right: IUType):
        self.left = left
        self.right = right
        self._hash = hash((self._tag, left._hash, right._hash))
        self._text = None

    def __eq__(self, other):
        if self is other:
            return True
        return (type(other) is type(self) and other._hash == self._hash
                and other.left == self.left and other.right == self.right)

    def __hash__(self):
        return self._hash


class Arrow(_Binary):
    __slots__ = ()
    _tag = "->"

    @property
    def dom(self) -> IUType:
        return self.left

    @property
    def cod(self) -> IUType:
        return self.right


class Inter(_Binary):
    __slots__ = ()
    _tag = "&"


class Union(_Binary):
    __slots__ = ()
    _tag = "|"


# ---------------------------------------------------------------------------
# predicates and spines


def is_simple(t: IUType) -> bool:
    """Built from variables and arrows only."""
    if isinstance(t, TVar):
        return True
    if isinstance(t, Arrow):
        return is_simple(t.left) and is_simple(t.right)
    return False


def is_proper(t: IUType) -> bool:
    """A variable or an arrow at the root."""
    return isinstance(t, (TVar, Arrow))


def is_atom(t: IUType) -> bool:
    return isinstance(t, (TVar, Arrow))


def meetands(t: IUType) -> list[IUType]:
    """Flattened intersection spine; TOP is the empty intersection."""
    if isinstance(t, Inter):
        return meetands(t.left) + meetands(t.right)
    if isinstance(t, Top):
        return []
    return [t]


def joinands(t: IUType) -> list[IUType]:
    """Flattened union spine; BOT is the empty union."""
    if isinstance(t, Union):
        return joinands(t.left) + joinands(t.right)
    if isinstance(t, Bot):
        return []
    return [t]


def meet(ts: Iterable[IUType]) -> IUType:
    items = list(ts)
    if not items:
        return TOP
    return reduce(lambda acc, t: Inter(t, acc), reversed(items[:-1]), items[-1])


def join(ts: Iterable[IUType]) -> IUType:
    items = list(ts)
    if not items:
        return BOT
    return reduce(lambda acc, t: Union(t, acc), reversed(items[:-1]), items[-1])


def type_size(t: IUType) -> int:
    if isinstance(t, _Binary):
        return 1 + type_size(t.left) + type_size(t.right)
    return 1


def subterms(t: IUType) -> set[IUType]:
    out = {t}
    if isinstance(t, _Binary):
        out |= subterms(t.left)
        out |= subterms(t.right)
    return out


# ---------------------------------------------------------------------------
# the preorder

_LEQ_CACHE: dict[tuple[IUType, IUType], bool] = {}


def leq(s: IUType, t: IUType) -> bool:
    """Decide ``s <= t`` by Whitman's procedure."""
    if s is t or s == t:
        return True
    key = (s, t)
    hit = _LEQ_CACHE.get(key)
    if hit is not None:
        return hit
    res = _leq(s, t)
    if len(_LEQ_CACHE) > 2_000_000:
        _LEQ_CACHE.clear()
    _LEQ_CACHE[key] = res
    return res


def _leq(s: IUType, t: IUType) -> bool:
    if isinstance(t, Top) or isinstance(s, Bot):
        return True
    if isinstance(s, Union):
        return all(leq(x, t) for x in joinands(s))
    if isinstance(t, Inter):
        return all(leq(s, y) for y in meetands(t))
    # s is an atom, TOP or an intersection; t is an atom, BOT or a union
    if is_atom(s) and is_atom(t):
        return _atom_equiv(s, t)
    if isinstance(s, Inter) and any(leq(x, t) for x in meetands(s)):
        return True
    if isinstance(t, Union) and any(leq(s, y) for y in joinands(t)):
        return True
    return False


def _atom_equiv(s: IUType, t: IUType) -> bool:
    if isinstance(s, TVar) and isinstance(t, TVar):
        return s.name == t.name
    if isinstance(s, Arrow) and isinstance(t, Arrow):
        return equiv(s.left, t.left) and equiv(s.right, t.right)
    return False


def equiv(s: IUType, t: IUType) -> bool:
    return leq(s, t) and leq(t, s)


# ---------------------------------------------------------------------------
# canonical forms

_NORM_CACHE: dict[IUType, IUType] = {}


def normalize(t: IUType) -> IUType:
    """Canonical representative of the equivalence class of ``t``.

    Spines are flattened, units dropped, redundant members removed (only
    minimal meetands / maximal joinands survive), members that can be
    replaced by one of their own components without changing the whole are
    replaced, and members are sorted by printed form.
    """
    hit = _NORM_CACHE.get(t)
    if hit is not None:
        return hit
    if isinstance(t, (TVar, _Const)):
        res = t
    elif isinstance(t, Arrow):
        res = Arrow(normalize(t.left), normalize(t.right))
    else:
        res = _canon(isinstance(t, Inter), [normalize(p) for p in (t.left, t.right)])
    if len(_NORM_CACHE) > 500_000:
        _NORM_CACHE.clear()
    _NORM_CACHE[t] = res
    _NORM_CACHE[res] = res
    return res


def _canon(is_meet: bool, parts: list[IUType]) -> IUType:
    spine = meetands if is_meet else joinands
    dual_spine = joinands if is_meet else meetands
    same = Inter if is_meet else Union
    dual = Union if is_meet else Inter
    absorbing = BOT if is_meet else TOP
    build = meet if is_meet else join

    items = parts
    while True:
        flat: list[IUType] = []
        for p in items:
            if p == absorbing:
                return absorbing
            if isinstance(p, same) or isinstance(p, _Const):
                flat.extend(spine(p))
            else:
                flat.append(p)
        uniq = sorted(set(flat), key=show_type)
        # keep minimal meetands / maximal joinands
        kept = []
        for i, a in enumerate(uniq):
            redundant = False
            for j, b in enumerate(uniq):
                if i == j:
                    continue
                if (leq(b, a) if is_meet else leq(a, b)):
                    redundant = True
                    break
            if not redundant:
                kept.append(a)
        whole = build(kept)
        changed = False
        for i, a in enumerate(kept):
            if isinstance(a, dual):
                for sub in dual_spine(a):
                    if (leq(whole, sub) if is_meet else leq(sub, whole)):
                        kept[i] = sub
                        changed = True
                        break
            if changed:
                break
        items = kept
        if not changed:
            break
    items = sorted(items, key=show_type)
    if not items:
        return TOP if is_meet else BOT
    return build(items)


# ---------------------------------------------------------------------------
# text syntax:  A -> B  (right assoc, loosest), A & B, A | B, TOP, BOT


class TypeSyntaxError(ValueError):
    pass


_TOKEN = re.compile(r"\s*(->|&|\||\(|\)|[A-Za-z][A-Za-z0-9_]*)")


def _tokenize(text: str) -> list[str]:
    pos = 0
    toks = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise TypeSyntaxError(f"unexpected character at {pos}: {text[pos:pos + 10]!r}")
        toks.append(m.group(1))
        pos = m.end()
    return toks


def parse_type(text: str) -> IUType:
    toks = _tokenize(text)
    pos = 0

    def peek():
        return toks[pos] if pos < len(toks) else None

    def take(expected=None):
        nonlocal pos
        tok = peek()
        if tok is None or (expected is not None and tok != expected):
            raise TypeSyntaxError(f"expected {expected or 'a token'} at token {pos}, got {tok!r}")
        pos += 1
        return tok

    def arrow():
        left = lattice()
        if peek() == "->":
            take("->")
            return Arrow(left, arrow())
        return left

    def lattice():
        left = primary()
        op = peek()
        if op not in ("&", "|"):
            return left
        items = [left]
        while peek() == op:
            take(op)
            items.append(primary())
        if peek() in ("&", "|"):
            raise TypeSyntaxError("mixing '&' and '|' needs parentheses")
        return meet(items) if op == "&" else join(items)

    def primary():
        tok = take()
        if tok == "(":
            inner = arrow()
            take(")")
            return inner
        if tok == "TOP":
            return TOP
        if tok == "BOT":
            return BOT
        if tok in ("->", "&", "|", ")"):
            raise TypeSyntaxError(f"unexpected {tok!r}")
        return TVar(tok)

    result = arrow()
    if pos != len(toks):
        raise TypeSyntaxError(f"trailing input at token {pos}: {toks[pos]!r}")
    return result


def show_type(t: IUType) -> str:
    cached = t._text
    if cached is not None:
        return cached
    if isinstance(t, TVar):
        s = t.name
    elif isinstance(t, _Const):
        s = t.tag
    elif isinstance(t, Arrow):
        left = show_type(t.left)
        if isinstance(t.left, Arrow):
            left = f"({left})"
        s = f"{left}->{show_type(t.right)}"
    else:
        op = "&" if isinstance(t, Inter) else "|"
        parts = _same_op_spine(t, type(t))
        rendered = []
        for p in parts:
            text = show_type(p)
            if isinstance(p, (Arrow, Inter, Union)):
                text = f"({text})"
            rendered.append(text)
        s = op.join(rendered)
    t._text = s
    return s


def _same_op_spine(t: IUType, kind: type) -> list[IUType]:
    """Members of nested ``kind`` nodes; unlike the spines, TOP and BOT stay."""
    if isinstance(t, kind):
        return _same_op_spine(t.left, kind) + _same_op_spine(t.right, kind)
    return [t]


# ---------------------------------------------------------------------------
# contexts: plain dicts from connector names to types


class Incompatible(ValueError):
    def __init__(self, subject: str, first: IUType, second: IUType):
        super().__init__(f"incompatible statements for {subject}: {first} vs {second}")
        self.subject = subject
        self.first = first
        self.second = second


def _merge(ctxs: Iterable[Mapping[str, IUType]], combine) -> dict[str, IUType]:
    out: dict[str, list[IUType]] = {}
    for ctx in ctxs:
        for name, ty in ctx.items():
            out.setdefault(name, []).append(ty)
    return {name: normalize(combine(tys)) for name, tys in out.items()}


def ctx_merge_inter(*ctxs: Mapping[str, IUType]) -> dict[str, IUType]:
    """Pointwise intersection of socket contexts."""
    return _merge(ctxs, meet)


def ctx_merge_union(*ctxs: Mapping[str, IUType]) -> dict[str, IUType]:
    """Pointwise union of plug contexts."""
    return _merge(ctxs, join)


def ctx_compatible_union(*ctxs: Mapping[str, IUType]) -> dict[str, IUType]:
    out: dict[str, IUType] = {}
    for ctx in ctxs:
        for name, ty in ctx.items():
            if name in out and not equiv(out[name], ty):
                raise Incompatible(name, out[name], ty)
            out.setdefault(name, ty)
    return out


def ctx_equiv(a: Mapping[str, IUType], b: Mapping[str, IUType]) -> bool:
    if set(a) != set(b):
        return False
    return all(equiv(a[k], b[k]) for k in a)


def show_context(ctx: Mapping[str, IUType]) -> str:
    return ", ".join(f"{k}:{show_type(ctx[k])}" for k in sorted(ctx))


def _parse_context(text: str) -> dict[str, IUType]:
    text = text.strip()
    if not text:
        return {}
    out: dict[str, IUType] = {}
    depth = 0
    start = 0
    pieces = []
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "," and depth == 0:
            pieces.append(text[start:i])
            start = i + 1
    pieces.append(text[start:])
    for piece in pieces:
        name, sep, ty = piece.partition(":")
        name = name.strip()
        if not sep or not re.fullmatch(r"[A-Za-z][A-Za-z0-9_]*", name):
            raise TypeSyntaxError(f"bad statement {piece.strip()!r}")
        if name in out:
            raise TypeSyntaxError(f"duplicate subject {name}")
        out[name] = parse_type(ty)
    return out


def parse_judgement_contexts(text: str) -> tuple[dict[str, IUType], dict[str, IUType]]:
    """Parse ``x:A, y:B |- a:C`` into (sockets, plugs)."""
    left, sep, right = text.partition("|-")
    if not sep:
        raise TypeSyntaxError("missing '|-'")
    return _parse_context(left), _parse_context(right)
