import itertools

import pytest
from hypothesis import given, strategies as st

from polyfib.finset import (
    FinMap,
    FinSet,
    StructureError,
    all_maps,
    compose,
    constant,
    finmap,
    identity,
    inverse,
    is_epi,
    is_iso,
    is_mono,
    is_pullback_square,
    pairing,
    product,
    product_map,
    pullback,
    terminal,
    unique_from_initial,
    unique_to_terminal,
)
from strategies import finsets, maps


def test_compose_by_hand():
    f = finmap(2, 1, [0, 0])
    g = finmap(1, 3, [2])
    assert compose(g, f).table == (2, 2)


def test_compose_mismatch_names_both_signatures():
    with pytest.raises(StructureError, match="FinSet\\(2\\).*FinSet\\(3\\)"):
        compose(finmap(2, 2, [0, 1]), finmap(1, 3, [0]))


def test_labels_must_be_distinct_and_counted():
    with pytest.raises(StructureError):
        FinSet(2, ("a", "a"))
    with pytest.raises(StructureError):
        FinSet(2, ("a",))
    assert FinSet(2, ("x", "y")).name(1) == "y"


def test_labelled_sets_are_not_silently_identified():
    with pytest.raises(StructureError):
        compose(identity(FinSet(1, ("a",))), identity(FinSet(1)))


def test_table_range_checked():
    with pytest.raises(StructureError):
        finmap(2, 2, [0, 2])
    with pytest.raises(StructureError):
        finmap(2, 2, [0])


def test_terminal_and_initial():
    assert terminal().size == 1
    assert unique_to_terminal(FinSet(0)).table == ()
    assert unique_to_terminal(FinSet(3)).table == (0, 0, 0)
    assert unique_from_initial(FinSet(2)).dom.size == 0


def test_product_lexicographic():
    P, pr1, pr2 = product(FinSet(2), FinSet(3))
    assert P.size == 6
    assert pr1.table == (0, 0, 0, 1, 1, 1)
    assert pr2.table == (0, 1, 2, 0, 1, 2)
    assert product(FinSet(0), FinSet(4))[0].size == 0
    assert is_iso(product(FinSet(3), terminal())[1])


def test_pullback_along_identity_and_over_terminal():
    g = finmap(3, 2, [1, 0, 1])
    P, pr1, pr2 = pullback(identity(FinSet(2)), g)
    assert P.size == 3 and is_iso(pr2)
    A, B = FinSet(2), FinSet(3)
    Q, q1, q2 = pullback(unique_to_terminal(A), unique_to_terminal(B))
    R, r1, r2 = product(A, B)
    assert (Q, q1, q2) == (R, r1, r2)


def test_pullback_codomain_mismatch():
    with pytest.raises(StructureError):
        pullback(finmap(1, 2, [0]), finmap(1, 3, [0]))


def test_mono_and_iso_examples():
    assert is_iso(identity(FinSet(3)))
    assert not is_mono(constant(FinSet(2), FinSet(1), 0))
    assert is_mono(unique_from_initial(FinSet(3)))
    assert not is_epi(unique_from_initial(FinSet(1)))
    f = finmap(3, 3, [2, 0, 1])
    assert compose(inverse(f), f) == identity(FinSet(3))


def test_json_round_trip():
    f = FinMap(FinSet(2, ("a", "b")), FinSet(3), (2, 0))
    assert FinMap.from_json(f.to_json()) == f
    assert FinSet.from_json(3) == FinSet(3)


@given(st.data())
def test_compose_associative_and_unital(data):
    f = data.draw(maps())
    g = data.draw(maps(dom=f.cod))
    h = data.draw(maps(dom=g.cod))
    assert compose(h, compose(g, f)) == compose(compose(h, g), f)
    assert compose(f, identity(f.dom)) == f == compose(identity(f.cod), f)


@given(st.data())
def test_pullback_size_is_fiber_product(data):
    C = data.draw(finsets())
    f = data.draw(maps(cod=C))
    g = data.draw(maps(cod=f.cod))
    P, pr1, pr2 = pullback(f, g)
    ff, gf = f.fiber_sizes(), g.fiber_sizes()
    assert P.size == sum(a * b for a, b in zip(ff, gf))
    assert compose(f, pr1) == compose(g, pr2)
    pairs = list(zip(pr1.table, pr2.table))
    assert pairs == sorted(pairs)


def _pullback_universal(f, g, max_apex):
    P, pr1, pr2 = pullback(f, g)
    for n in range(max_apex + 1):
        X = FinSet(n)
        for x in all_maps(X, f.dom):
            for y in all_maps(X, g.dom):
                if compose(f, x) != compose(g, y):
                    continue
                mediating = [m for m in all_maps(X, P) if compose(pr1, m) == x and compose(pr2, m) == y]
                if len(mediating) != 1:
                    return False
    return True


def test_pullback_universal_property_exhaustive():
    for nA, nB, nC in itertools.product(range(3), repeat=3):
        for f in all_maps(FinSet(nA), FinSet(nC)):
            for g in all_maps(FinSet(nB), FinSet(nC)):
                assert _pullback_universal(f, g, 2)


def test_pullback_universal_property_size_four():
    f = finmap(2, 2, [0, 1])
    g = finmap(2, 2, [1, 1])
    assert _pullback_universal(f, g, 4)


@given(st.data())
def test_pairing_and_product_map(data):
    f = data.draw(maps())
    g = data.draw(maps(dom=f.dom))
    P, pr1, pr2 = product(f.cod, g.cod)
    h = pairing(f, g)
    assert compose(pr1, h) == f and compose(pr2, h) == g
    f2 = data.draw(maps(dom=f.cod))
    g2 = data.draw(maps(dom=g.cod))
    assert compose(product_map(f2, g2), h) == pairing(compose(f2, f), compose(g2, g))


def test_is_pullback_square_rejects_duplicated_apex():
    a = finmap(1, 1, [0])
    v = finmap(1, 1, [0])
    assert is_pullback_square(identity(FinSet(1)), identity(FinSet(1)), v, a)
    assert not is_pullback_square(finmap(2, 1, [0, 0]), finmap(2, 1, [0, 0]), v, a)
