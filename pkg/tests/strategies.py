"""Hypothesis strategies shared by the test modules."""

from hypothesis import strategies as st

from xworkbench.types import BOT, TOP, Arrow, Inter, TVar, Union

atoms = st.sampled_from([TVar("A"), TVar("B"), TVar("C")])

iu_types = st.recursive(
    atoms | st.sampled_from([TOP, BOT]),
    lambda inner: st.builds(Arrow, inner, inner) | st.builds(Inter, inner, inner) | st.builds(Union, inner, inner),
    max_leaves=8,
)

simple_types = st.recursive(atoms, lambda inner: st.builds(Arrow, inner, inner), max_leaves=6)


def _net(seed: int, depth: int = 4):
    import random

    from xworkbench.generate import random_net

    return random_net(random.Random(seed), depth)


nets = st.integers(0, 10**6).map(_net)
seeds = st.integers(0, 10**6)
