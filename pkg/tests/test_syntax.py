import pytest
from hypothesis import given

from strategies import nets
from xworkbench.syntax import (
    Activation, Capsule, Cut, NetSyntaxError, alpha_eq, barendregt, bound_plugs, bound_sockets,
    canonical_key, free_plugs, free_sockets, introduces_plug, introduces_socket, is_barendregt,
    parse, positions, rename_plug, replace_at, show, size, subnet_at,
)


def net_of(text):
    return parse(text, refresh=False)


@pytest.mark.parametrize("text, canonical", [
    ("<x.a>", "<x.a>"),
    ("  (  <x.a>  ) ", "<x.a>"),
    ("x^<x.a>b^.c", "x^ <x.a> b^ . c"),
    ("<x.a> a^ <+ y^ <y.b>", "<x.a> a^ <+ y^ <y.b>"),
    ("<x.a> a^ +> y^ <y.b>", "<x.a> a^ +> y^ <y.b>"),
    ("(<x.a>) a^ [z] y^ (<y.b>)", "<x.a> a^ [z] y^ <y.b>"),
    ("((<x.a>) a^ + y^ <y.b>) b^ + z^ <z.c>", "(<x.a> a^ + y^ <y.b>) b^ + z^ <z.c>"),
])
def test_canonical_printing(text, canonical):
    assert show(net_of(text)) == canonical


@pytest.mark.parametrize("text", ["<x.a", "<x.x>", "x^", "<x.a> a^ ++ y^ <y.b>", "<x.a> <y.b>", ""])
def test_parse_errors(text):
    with pytest.raises(NetSyntaxError):
        parse(text)


def test_free_and_bound_names():
    n = net_of("x^ <x.a> b^ . c")
    assert free_sockets(n) == frozenset() and free_plugs(n) == {"a", "c"}
    assert bound_sockets(n) == ["x"] and bound_plugs(n) == ["b"]


def test_introduction():
    assert introduces_socket(net_of("<x.a>"), "x") and introduces_plug(net_of("<x.a>"), "a")
    assert introduces_plug(net_of("x^ <x.a> a^ . c"), "c")
    assert introduces_socket(net_of("<y.a> a^ [x] z^ <z.b>"), "x")
    assert not introduces_socket(net_of("<x.b> b^ + y^ <y.a>"), "x")
    assert not introduces_plug(net_of("x^ <x.a> b^ . a"), "a")


def test_positions_and_replacement():
    n = net_of("<x.b> b^ + y^ <y.a>")
    assert size(n) == 3
    assert [path for path, _ in positions(n)] == [(), (0,), (1,)]
    assert subnet_at(n, (1,)) == Capsule("y", "a")
    assert show(replace_at(n, (1,), Capsule("y", "q"))) == "<x.b> b^ + y^ <y.q>"


def test_alpha_equivalence_examples():
    assert alpha_eq(net_of("x^ <x.a> a^ . c"), net_of("y^ <y.d> d^ . c"))
    assert not alpha_eq(net_of("<x.a>"), net_of("<y.a>"))
    assert not alpha_eq(net_of("<x.a> a^ + y^ <y.b>"), net_of("<x.a> a^ <+ y^ <y.b>"))


def test_barendregt_form():
    n = net_of("(x^ <x.a> a^ . c) c^ + x^ <x.d>")
    assert not is_barendregt(n)
    m = barendregt(n)
    assert is_barendregt(m) and alpha_eq(m, n)


def test_rename_plug_avoids_capture():
    n = net_of("x^ <x.a> b^ . c")
    renamed = rename_plug(n, "a", "b")
    assert free_plugs(renamed) == {"b", "c"}


@given(nets)
def test_print_parse_round_trip(n):
    again = parse(show(n), refresh=False)
    assert again == n
    assert show(again) == show(n)


@given(nets)
def test_refreshing_preserves_alpha_class(n):
    m = barendregt(n)
    assert is_barendregt(m)
    assert alpha_eq(m, n)
    assert canonical_key(m) == canonical_key(n)


@given(nets, nets)
def test_canonical_key_decides_alpha(a, b):
    assert (canonical_key(a) == canonical_key(b)) == alpha_eq(a, b)


@given(nets)
def test_no_name_is_both_socket_and_plug(n):
    assert not (set(free_sockets(n)) | set(bound_sockets(n))) & (set(free_plugs(n)) | set(bound_plugs(n)))


def test_cut_activation_values():
    n = net_of("<x.a> a^ <+ y^ <y.b>")
    assert isinstance(n, Cut) and n.act is Activation.LEFT
