"""Least-fixpoint oracle for the subtype preorder on a finite set of types.

The preorder is generated by reflexivity, transitivity, the lattice bounds of
intersections and unions, the two glb/lub introduction rules, TOP and BOT,
and arrow congruence (arrows related only when both sides are equivalent).
Every rule relates a type to its immediate subterms, so on a subterm-closed
set the closure computed here is the preorder itself restricted to that set.

The closure is computed by saturating a boolean matrix; it shares no code
with the decision procedure under test.
"""

from __future__ import annotations

import random

import numpy as np

from xworkbench.types import BOT, TOP, Arrow, Bot, Inter, IUType, Top, TVar, Union


def depth(t: IUType) -> int:
    if isinstance(t, (Arrow, Inter, Union)):
        return 1 + max(depth(t.left), depth(t.right))
    return 0


def _grow(layer: list[IUType], base: list[IUType]) -> list[IUType]:
    return [k(a, b) for k in (Arrow, Inter, Union) for a in layer for b in layer if a in base or b in base]


def type_universe(size: int = 2000, seed: int = 0) -> list[IUType]:
    """A subterm-closed list of ``size`` distinct types of depth at most 3.

    It holds every type of depth at most 2 over ``A`` and ``B``, every type of
    depth at most 1 over ``A``, ``B``, ``TOP`` and ``BOT``, and seeded random
    depth-3 types built from those.
    """
    a, b = TVar("A"), TVar("B")
    out: list[IUType] = []
    seen: set[IUType] = set()

    def add(t: IUType) -> None:
        if t not in seen:
            seen.add(t)
            out.append(t)

    d0 = [a, b]
    d1 = d0 + [k(x, y) for k in (Arrow, Inter, Union) for x in d0 for y in d0]
    d2 = d1 + [k(x, y) for k in (Arrow, Inter, Union) for x in d1 for y in d1]
    for t in d2:
        add(t)
    e0 = [a, b, TOP, BOT]
    for t in e0 + [k(x, y) for k in (Arrow, Inter, Union) for x in e0 for y in e0]:
        add(t)
    pool = list(out)
    rng = random.Random(seed)
    while len(out) < size:
        x, y = rng.choice(pool), rng.choice(pool)
        t = rng.choice((Arrow, Inter, Union))(x, y)
        if depth(t) <= 3:
            add(t)
    return out


def closure(types: list[IUType]) -> np.ndarray:
    """``R[i, j]`` is true exactly when ``types[i] <= types[j]``."""
    index = {t: k for k, t in enumerate(types)}
    n = len(types)
    rel = np.eye(n, dtype=bool)
    inter, union, arrow = [], [], []
    for k, t in enumerate(types):
        if isinstance(t, Top):
            rel[:, k] = True
        elif isinstance(t, Bot):
            rel[k, :] = True
        elif isinstance(t, (Inter, Union, Arrow)):
            parts = (k, index[t.left], index[t.right])
            {Inter: inter, Union: union, Arrow: arrow}[type(t)].append(parts)
    inter_a, union_a, arrow_a = (np.array(x, dtype=int).reshape(-1, 3) for x in (inter, union, arrow))
    for i, l, r in inter_a:
        rel[i, l] = rel[i, r] = True
    for i, l, r in union_a:
        rel[l, i] = rel[r, i] = True
    while True:
        before = rel.copy()
        # greatest lower bound: c <= l and c <= r gives c <= l & r
        rel[:, inter_a[:, 0]] |= rel[:, inter_a[:, 1]] & rel[:, inter_a[:, 2]]
        # least upper bound: l <= c and r <= c gives l | r <= c
        rel[union_a[:, 0], :] |= rel[union_a[:, 1], :] & rel[union_a[:, 2], :]
        # arrows: related when domains and codomains are equivalent
        eq = rel & rel.T
        dom, cod = arrow_a[:, 1], arrow_a[:, 2]
        rel[np.ix_(arrow_a[:, 0], arrow_a[:, 0])] |= eq[np.ix_(dom, dom)] & eq[np.ix_(cod, cod)]
        # transitivity, by squaring until stable
        while True:
            sq = (rel.astype(np.float32) @ rel.astype(np.float32)) > 0
            if (sq == rel).all():
                break
            rel = sq
        if (rel == before).all():
            return rel
