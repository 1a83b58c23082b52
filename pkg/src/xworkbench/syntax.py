"""Nets of the X calculus: AST, connector bookkeeping, renaming, text syntax.

Sockets and plugs are plain strings; which namespace a name lives in is
determined by where it occurs.  A net is kept in *Barendregt form*: every
bound name differs from every free name and from every other bound name, and
no identifier is used both as a socket and as a plug.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple, Union as TUnion

__all__ = [
    "Kind", "Connector", "Activation", "Capsule", "Export", "Import", "Cut", "Net",
    "free_sockets", "free_plugs", "bound_sockets", "bound_plugs", "all_names",
    "introduces_socket", "introduces_plug", "rename_plug", "rename_socket",
    "alpha_eq", "canonical", "canonical_key", "parse", "show", "NetSyntaxError",
    "NameSupply", "barendregt", "is_barendregt", "subnet_at", "replace_at",
    "positions", "size", "RenameError",
]


class Kind(enum.Enum):
    SOCKET = "socket"
    PLUG = "plug"


class Connector(NamedTuple):
    name: str
    kind: Kind


class Activation(enum.Enum):
    INACTIVE = "+"
    LEFT = "<+"
    RIGHT = "+>"


@dataclass(frozen=True, slots=True)
class Capsule:
    socket: str
    plug: str


@dataclass(frozen=True, slots=True)
class Export:
    """``x^ body a^ . out``: ``x`` and ``a`` are bound in ``body``."""
    socket: str
    body: "Net"
    plug: str
    out: str


@dataclass(frozen=True, slots=True)
class Import:
    """``left a^ [mid] x^ right``: ``a`` bound in ``left``, ``x`` in ``right``."""
    left: "Net"
    plug: str
    mid: str
    socket: str
    right: "Net"


@dataclass(frozen=True, slots=True)
class Cut:
    """``left a^ + x^ right`` with an activation flag."""
    left: "Net"
    plug: str
    socket: str
    right: "Net"
    act: Activation = Activation.INACTIVE


Net = TUnion[Capsule, Export, Import, Cut]


# ---------------------------------------------------------------------------
# connectors


def free_sockets(n: Net) -> frozenset[str]:
    if isinstance(n, Capsule):
        return frozenset({n.socket})
    if isinstance(n, Export):
        return free_sockets(n.body) - {n.socket}
    if isinstance(n, Import):
        return free_sockets(n.left) | (free_sockets(n.right) - {n.socket}) | {n.mid}
    return free_sockets(n.left) | (free_sockets(n.right) - {n.socket})


def free_plugs(n: Net) -> frozenset[str]:
    if isinstance(n, Capsule):
        return frozenset({n.plug})
    if isinstance(n, Export):
        return (free_plugs(n.body) - {n.plug}) | {n.out}
    if isinstance(n, Import):
        return (free_plugs(n.left) - {n.plug}) | free_plugs(n.right)
    return (free_plugs(n.left) - {n.plug}) | free_plugs(n.right)


def _binders(n: Net) -> Iterator[tuple[Kind, str]]:
    if isinstance(n, Capsule):
        return
    if isinstance(n, Export):
        yield Kind.SOCKET, n.socket
        yield Kind.PLUG, n.plug
        yield from _binders(n.body)
    else:
        yield Kind.PLUG, n.plug
        yield Kind.SOCKET, n.socket
        yield from _binders(n.left)
        yield from _binders(n.right)


def bound_sockets(n: Net) -> list[str]:
    """Bound socket names in traversal order (duplicates kept)."""
    return [name for kind, name in _binders(n) if kind is Kind.SOCKET]


def bound_plugs(n: Net) -> list[str]:
    return [name for kind, name in _binders(n) if kind is Kind.PLUG]


def _occurrences(n: Net) -> Iterator[tuple[Kind, str]]:
    if isinstance(n, Capsule):
        yield Kind.SOCKET, n.socket
        yield Kind.PLUG, n.plug
    elif isinstance(n, Export):
        yield Kind.SOCKET, n.socket
        yield Kind.PLUG, n.plug
        yield Kind.PLUG, n.out
        yield from _occurrences(n.body)
    else:
        yield Kind.PLUG, n.plug
        yield Kind.SOCKET, n.socket
        if isinstance(n, Import):
            yield Kind.SOCKET, n.mid
        yield from _occurrences(n.left)
        yield from _occurrences(n.right)


def all_names(n: Net) -> set[str]:
    return {name for _, name in _occurrences(n)}


def introduces_socket(n: Net, x: str) -> bool:
    if isinstance(n, Capsule):
        return n.socket == x
    if isinstance(n, Import):
        return n.mid == x and x not in free_sockets(n.left) and x not in free_sockets(n.right)
    return False


def introduces_plug(n: Net, a: str) -> bool:
    if isinstance(n, Capsule):
        return n.plug == a
    if isinstance(n, Export):
        return n.out == a and a not in free_plugs(n.body)
    return False


def size(n: Net) -> int:
    if isinstance(n, Capsule):
        return 1
    if isinstance(n, Export):
        return 1 + size(n.body)
    return 1 + size(n.left) + size(n.right)


# ---------------------------------------------------------------------------
# positions


def children(n: Net) -> tuple[Net, ...]:
    if isinstance(n, Capsule):
        return ()
    if isinstance(n, Export):
        return (n.body,)
    return (n.left, n.right)


def subnet_at(n: Net, path: Iterable[int]) -> Net:
    for i in path:
        n = children(n)[i]
    return n


def replace_at(n: Net, path: tuple[int, ...], new: Net) -> Net:
    if not path:
        return new
    i, rest = path[0], path[1:]
    if isinstance(n, Export) and i == 0:
        return Export(n.socket, replace_at(n.body, rest, new), n.plug, n.out)
    if isinstance(n, Import) and i in (0, 1):
        if i == 0:
            return Import(replace_at(n.left, rest, new), n.plug, n.mid, n.socket, n.right)
        return Import(n.left, n.plug, n.mid, n.socket, replace_at(n.right, rest, new))
    if isinstance(n, Cut) and i in (0, 1):
        if i == 0:
            return Cut(replace_at(n.left, rest, new), n.plug, n.socket, n.right, n.act)
        return Cut(n.left, n.plug, n.socket, replace_at(n.right, rest, new), n.act)
    raise IndexError(f"no child {i} at this position")


def positions(n: Net, prefix: tuple[int, ...] = ()) -> Iterator[tuple[tuple[int, ...], Net]]:
    """Pre-order (outermost first, then left to right) walk of all subnets."""
    yield prefix, n
    for i, c in enumerate(children(n)):
        yield from positions(c, prefix + (i,))


# ---------------------------------------------------------------------------
# fresh names and Barendregt form


class NameSupply:
    """Deterministic fresh names ``g<k>`` (plugs) and ``v<k>`` (sockets).

    Each request returns the lowest-numbered name not yet handed out and not
    in the avoid set, so results depend only on the avoid set and the order
    of requests.
    """

    def __init__(self, avoid: Iterable[str] = ()):
        self.used = set(avoid)
        self._next = {"g": 0, "v": 0}

    def _fresh(self, prefix: str) -> str:
        k = self._next[prefix]
        while f"{prefix}{k}" in self.used:
            k += 1
        name = f"{prefix}{k}"
        self._next[prefix] = k + 1
        self.used.add(name)
        return name

    def plug(self) -> str:
        return self._fresh("g")

    def socket(self) -> str:
        return self._fresh("v")

    def avoid(self, names: Iterable[str]) -> None:
        self.used.update(names)


def is_barendregt(n: Net) -> bool:
    binders = [name for _, name in _binders(n)]
    if len(binders) != len(set(binders)):
        return False
    free = free_sockets(n) | free_plugs(n)
    if free & set(binders):
        return False
    sockets = {name for kind, name in _occurrences(n) if kind is Kind.SOCKET}
    plugs = {name for kind, name in _occurrences(n) if kind is Kind.PLUG}
    return not (sockets & plugs)


def barendregt(n: Net, supply: NameSupply | None = None) -> Net:
    """Rename bound connectors so that ``n`` is in Barendregt form.

    Binders are kept when their name is still unclaimed (in pre-order); a
    clashing binder gets a fresh name.  Free names never change.
    """
    if supply is None:
        supply = NameSupply(all_names(n))
    else:
        supply.avoid(all_names(n))
    claimed = set(free_sockets(n)) | set(free_plugs(n))
    return _refresh(n, {}, {}, claimed, supply)


def _claim(name: str, claimed: set[str], fresh) -> str:
    if name in claimed:
        name = fresh()
    claimed.add(name)
    return name


def _refresh(n: Net, sren: dict, pren: dict, claimed: set[str], supply: NameSupply) -> Net:
    if isinstance(n, Capsule):
        return Capsule(sren.get(n.socket, n.socket), pren.get(n.plug, n.plug))
    if isinstance(n, Export):
        x = _claim(n.socket, claimed, supply.socket)
        a = _claim(n.plug, claimed, supply.plug)
        body = _refresh(n.body, {**sren, n.socket: x}, {**pren, n.plug: a}, claimed, supply)
        return Export(x, body, a, pren.get(n.out, n.out))
    a = _claim(n.plug, claimed, supply.plug)
    x = _claim(n.socket, claimed, supply.socket)
    left = _refresh(n.left, sren, {**pren, n.plug: a}, claimed, supply)
    right = _refresh(n.right, {**sren, n.socket: x}, pren, claimed, supply)
    if isinstance(n, Import):
        return Import(left, a, sren.get(n.mid, n.mid), x, right)
    return Cut(left, a, x, right, n.act)


# ---------------------------------------------------------------------------
# renaming free connectors


class RenameError(ValueError):
    pass


def rename_plug(n: Net, old: str, new: str, refresh: bool = True) -> Net:
    """Replace free occurrences of plug ``old`` by ``new``."""
    return _rename(n, old, new, Kind.PLUG, refresh)


def rename_socket(n: Net, old: str, new: str, refresh: bool = True) -> Net:
    """Replace free occurrences of socket ``old`` by ``new``."""
    return _rename(n, old, new, Kind.SOCKET, refresh)


def _rename(n: Net, old: str, new: str, kind: Kind, refresh: bool) -> Net:
    if old == new:
        return n
    if new in {name for k, name in _binders(n)}:
        if not refresh:
            raise RenameError(f"{new} is bound in the net and would be captured")
        supply = NameSupply(all_names(n) | {new, old})
        n = _rename_binders_away(n, new, supply)
    out = _subst(n, old, new, kind)
    return barendregt(out) if refresh else out


def _rename_binders_away(n: Net, name: str, supply: NameSupply) -> Net:
    """Rename every binder called ``name`` to a fresh one."""
    claimed = set(free_sockets(n)) | set(free_plugs(n)) | {name}
    return _refresh(n, {}, {}, claimed, supply)


def _subst(n: Net, old: str, new: str, kind: Kind) -> Net:
    s = kind is Kind.SOCKET
    if isinstance(n, Capsule):
        if s and n.socket == old:
            return Capsule(new, n.plug)
        if not s and n.plug == old:
            return Capsule(n.socket, new)
        return n
    if isinstance(n, Export):
        shadow = (n.socket == old) if s else (n.plug == old)
        body = n.body if shadow else _subst(n.body, old, new, kind)
        out = new if (not s and n.out == old) else n.out
        return Export(n.socket, body, n.plug, out)
    left = n.left if (not s and n.plug == old) else _subst(n.left, old, new, kind)
    right = n.right if (s and n.socket == old) else _subst(n.right, old, new, kind)
    if isinstance(n, Import):
        mid = new if (s and n.mid == old) else n.mid
        return Import(left, n.plug, mid, n.socket, right)
    return Cut(left, n.plug, n.socket, right, n.act)


# ---------------------------------------------------------------------------
# alpha equivalence


def canonical(n: Net) -> Net:
    """Rename bound connectors to ``#s<k>`` / ``#p<k>`` in traversal order."""
    counter = {"s": 0, "p": 0}

    def fresh(kind: str) -> str:
        k = counter[kind]
        counter[kind] += 1
        return f"#{kind}{k}"

    def go(n: Net, sren: dict, pren: dict) -> Net:
        if isinstance(n, Capsule):
            return Capsule(sren.get(n.socket, n.socket), pren.get(n.plug, n.plug))
        if isinstance(n, Export):
            x, a = fresh("s"), fresh("p")
            body = go(n.body, {**sren, n.socket: x}, {**pren, n.plug: a})
            return Export(x, body, a, pren.get(n.out, n.out))
        a, x = fresh("p"), fresh("s")
        left = go(n.left, sren, {**pren, n.plug: a})
        right = go(n.right, {**sren, n.socket: x}, pren)
        if isinstance(n, Import):
            return Import(left, a, sren.get(n.mid, n.mid), x, right)
        return Cut(left, a, x, right, n.act)

    return go(n, {}, {})


def canonical_key(n: Net) -> str:
    return show(canonical(n))


def alpha_eq(a: Net, b: Net) -> bool:
    return canonical(a) == canonical(b)


# ---------------------------------------------------------------------------
# text syntax


class NetSyntaxError(ValueError):
    def __init__(self, message: str, position: int | None = None):
        if position is not None:
            message = f"{message} (at offset {position})"
        super().__init__(message)
        self.position = position


_TOKEN = re.compile(r"\s*(<\+|\+>|[<>.()\[\]^+]|[A-Za-z][A-Za-z0-9_]*)")
_IDENT = re.compile(r"[A-Za-z][A-Za-z0-9_]*")


def _tokenize(text: str) -> list[tuple[str, int]]:
    toks = []
    pos = 0
    end = len(text.rstrip())
    while pos < end:
        m = _TOKEN.match(text, pos)
        if not m:
            stripped = len(text[pos:]) - len(text[pos:].lstrip())
            raise NetSyntaxError(f"unexpected character {text[pos + stripped]!r}", pos + stripped)
        toks.append((m.group(1), m.start(1)))
        pos = m.end()
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0
        self.text = text

    def peek(self, k: int = 0) -> str | None:
        j = self.i + k
        return self.toks[j][0] if j < len(self.toks) else None

    def offset(self) -> int:
        return self.toks[self.i][1] if self.i < len(self.toks) else len(self.text)

    def take(self, expected: str | None = None) -> str:
        tok = self.peek()
        if tok is None:
            raise NetSyntaxError(f"unexpected end of input, expected {expected or 'a token'}", self.offset())
        if expected is not None and tok != expected:
            raise NetSyntaxError(f"expected {expected!r}, found {tok!r}", self.offset())
        self.i += 1
        return tok

    def ident(self) -> str:
        tok = self.peek()
        if tok is None or not _IDENT.fullmatch(tok):
            raise NetSyntaxError(f"expected an identifier, found {tok!r}", self.offset())
        self.i += 1
        return tok

    def hat(self) -> None:
        if self.peek() == "^":
            self.i += 1

    def binder(self) -> str:
        name = self.ident()
        self.hat()
        return name

    def net(self, in_export: bool = False) -> Net:
        if self.peek() is not None and _IDENT.fullmatch(self.peek()):
            return self.export()
        left = self.primary()
        if in_export and self._at_export_end():
            return left
        if self.peek() is None or not _IDENT.fullmatch(self.peek()):
            return left
        a = self.binder()
        tok = self.peek()
        if tok == "[":
            self.take("[")
            mid = self.ident()
            self.take("]")
            x = self.binder()
            return Import(left, a, mid, x, self.primary())
        if tok in ("+", "<+", "+>"):
            self.take()
            x = self.binder()
            return Cut(left, a, x, self.primary(), Activation(tok))
        raise NetSyntaxError(f"expected '[' or a cut operator, found {tok!r}", self.offset())

    def export(self) -> Net:
        x = self.binder()
        body = self.net(in_export=True)
        a = self.binder()
        self.take(".")
        return Export(x, body, a, self.ident())

    def _at_export_end(self) -> bool:
        if self.peek() is None or not _IDENT.fullmatch(self.peek()):
            return False
        return self.peek(1) == "." or (self.peek(1) == "^" and self.peek(2) == ".")

    def primary(self) -> Net:
        tok = self.peek()
        if tok == "<":
            self.take("<")
            x = self.ident()
            self.take(".")
            a = self.ident()
            self.take(">")
            return Capsule(x, a)
        if tok == "(":
            self.take("(")
            inner = self.net()
            self.take(")")
            return inner
        raise NetSyntaxError(f"expected '<' or '(', found {tok!r}", self.offset())


def _check_namespaces(n: Net) -> None:
    sockets = {name for kind, name in _occurrences(n) if kind is Kind.SOCKET}
    plugs = {name for kind, name in _occurrences(n) if kind is Kind.PLUG}
    clash = sockets & plugs
    if clash:
        raise NetSyntaxError(f"identifier used both as socket and plug: {', '.join(sorted(clash))}")


def parse(text: str, refresh: bool = True) -> Net:
    """Parse net text; bound names are refreshed into Barendregt form."""
    p = _Parser(text)
    n = p.net()
    if p.peek() is not None:
        raise NetSyntaxError(f"trailing input {p.peek()!r}", p.offset())
    _check_namespaces(n)
    return barendregt(n) if refresh else n


def show(n: Net) -> str:
    if isinstance(n, Capsule):
        return f"<{n.socket}.{n.plug}>"
    if isinstance(n, Export):
        return f"{n.socket}^ {show(n.body)} {n.plug}^ . {n.out}"
    left, right = _operand(n.left), _operand(n.right)
    if isinstance(n, Import):
        return f"{left} {n.plug}^ [{n.mid}] {n.socket}^ {right}"
    return f"{left} {n.plug}^ {n.act.value} {n.socket}^ {right}"


def _operand(n: Net) -> str:
    return show(n) if isinstance(n, Capsule) else f"({show(n)})"
