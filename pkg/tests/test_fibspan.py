import itertools
import random

import pytest
from hypothesis import given, strategies as st

from polyfib.examples import DropWBox, NonFiberedBox
from polyfib.fibspan import (
    Budget,
    IdentityBox,
    Span,
    SpanBox,
    SpanMap,
    all_spans,
    audit_fibered,
    audit_sums,
    cartesian_factor,
    cartesian_lift,
    delta,
    from_fiber,
    is_cartesian,
    is_vertical,
    opcartesian_lift,
    span,
    span_compose,
    span_identity,
    span_iso,
    spans_isomorphic,
    strength,
    strength_natural,
    tensor,
    terminal_span,
    to_fiber,
)
from polyfib.finset import FinMap, FinSet, StructureError, all_maps, compose, finmap, identity, is_iso, is_mono, is_pullback_square, pairing, product_map
from polyfib.laws import maps_over
from polyfib.poly import PolynomialBox, polynomial
from polyfib.slice import all_slices, base_change, fiberwise_isomorphic, homs, is_slice_iso, slice_obj
from strategies import maps, spans


def test_delta():
    I = FinSet(3)
    D = delta(I)
    assert D.M == I and D.K == I
    X = to_fiber(D)
    assert X.proj == pairing(identity(I), identity(I))
    assert is_mono(X.proj)
    assert delta(FinSet(1)).cell_counts() == (1,)
    assert terminal_span(I).K.size == 1


def test_span_map_validation():
    S = span(1, 1, [0], [0])
    with pytest.raises(StructureError):
        SpanMap(S, span(1, 2, [0], [1]), finmap(1, 1, [0]), finmap(1, 2, [0]))


@given(spans(max_apex=4))
def test_to_fiber_counts_and_round_trip(S):
    X = to_fiber(S)
    nK = S.K.size
    for i, k in itertools.product(range(S.I.size), range(nK)):
        expected = sum(1 for m in range(S.M.size) if S.p(m) == i and S.q(m) == k)
        assert X.fiber_sizes()[i * nK + k] == expected
    assert from_fiber(X, S.I, S.K) == S


def test_terminal_fiber_is_plain_slice():
    X = slice_obj(2, [1, 0, 1])
    S = from_fiber(X, FinSet(2), FinSet(1))
    assert S.p == X.proj and S.K.size == 1


def test_lift_edge_cases():
    S = span(2, 2, [0, 1, 1], [1, 0, 1])
    T, c = cartesian_lift(identity(S.K), S)
    assert spans_isomorphic(T, S) and is_iso(c.v)
    T, c = cartesian_lift(finmap(0, 2, []), S)
    assert T.M.size == 0
    T, o = opcartesian_lift(identity(S.K), S)
    assert o == span_identity(S)
    with pytest.raises(StructureError):
        cartesian_lift(finmap(1, 3, [0]), S)


@given(st.data())
def test_cartesian_lift_is_fiberwise_base_change(data):
    S = data.draw(spans())
    a = data.draw(maps(cod=S.K))
    T, c = cartesian_lift(a, S)
    assert is_cartesian(c)
    X = base_change(product_map(identity(S.I), a), to_fiber(S))
    assert fiberwise_isomorphic(to_fiber(T), X)


def test_cartesian_universal_property_exhaustive():
    """Every map into S over a.d factors uniquely through the lift along a."""
    for nI, nK, nK2, nL in itertools.product(range(3), repeat=4):
        I, K, K2, L = FinSet(nI), FinSet(nK), FinSet(nK2), FinSet(nL)
        for S in all_spans(I, K, 2):
            for a in all_maps(K2, K):
                T, c = cartesian_lift(a, S)
                for d in all_maps(L, K2):
                    for Z in all_spans(I, L, 2):
                        through = [compose(c.v, u.v).table for u in maps_over(Z, T, d)]
                        direct = [f.v.table for f in maps_over(Z, S, compose(a, d))]
                        assert sorted(through) == sorted(direct)
                        assert len(set(through)) == len(through)


def test_cobase_change_left_adjoint_to_base_change():
    for nI, nK, nK2 in itertools.product(range(3), repeat=3):
        I, K, K2 = FinSet(nI), FinSet(nK), FinSet(nK2)
        for w in all_maps(K, K2):
            for T in all_spans(I, K, 2):
                for X in all_spans(I, K2, 2):
                    pushed, _ = opcartesian_lift(w, T)
                    pulled, _ = cartesian_lift(w, X)
                    left = sum(1 for _ in homs(to_fiber(pushed), to_fiber(X)))
                    right = sum(1 for _ in homs(to_fiber(T), to_fiber(pulled)))
                    assert left == right


@given(st.data())
def test_cartesian_maps_go_to_pullback_squares(data):
    S = data.draw(spans())
    a = data.draw(maps(cod=S.K))
    T, c = cartesian_lift(a, S)
    assert is_pullback_square(to_fiber(T).proj, c.v, to_fiber(S).proj, product_map(identity(S.I), a))


def test_cartesian_factor():
    rng = random.Random(1)
    for _ in range(100):
        S = span(2, 2, [0, 1, 1], [0, 1, 1])
        a = FinMap(FinSet(3), S.K, tuple(rng.randrange(2) for _ in range(3)))
        T, c = cartesian_lift(a, S)
        if not T.M.size:
            continue
        n = rng.randint(0, 3)
        v = FinMap(FinSet(n), T.M, tuple(rng.randrange(T.M.size) for _ in range(n)))
        U = Span(T.I, v.dom, T.K, compose(T.p, v), compose(T.q, v))
        f = span_compose(c, SpanMap(U, T, v, identity(T.K)))
        c2, u = cartesian_factor(f)
        assert is_vertical(u) and is_cartesian(c2)
        assert span_compose(c2, u) == f


def test_span_iso():
    S = span(2, 2, [0, 1, 1], [1, 0, 1])
    T = span(2, 2, [1, 1, 0], [1, 0, 1])
    f = span_iso(S, T)
    assert is_vertical(f) and is_iso(f.v)


def test_audits_pass_for_honest_boxes():
    I = FinSet(2)
    assert audit_sums(IdentityBox(I)).verdict
    assert audit_sums(SpanBox(finmap(3, 2, [0, 1, 1]), finmap(3, 2, [1, 1, 0]))).verdict
    P = polynomial(2, 1, [0, 1, 1], [0, 0, 1], [0, 0])
    assert audit_fibered(PolynomialBox(P), Budget(max_morphisms=100)).verdict
    assert audit_fibered(PolynomialBox(P), workers=4).verdict


def test_audit_rejects_broken_boxes_with_witness():
    for box in (DropWBox(FinSet(2)), NonFiberedBox(FinSet(2))):
        report = audit_fibered(box)
        assert not report.verdict
        assert report.witness["message"] and report.witness["morphism"]
        assert report.to_json()["verdict"] == "fail"


def test_audit_is_deterministic():
    box = NonFiberedBox(FinSet(2))
    assert audit_fibered(box).to_json() == audit_fibered(box).to_json()


def test_strength_unit_and_iso_for_left_adjoints():
    box = SpanBox(finmap(3, 2, [0, 1, 1]), finmap(3, 2, [1, 1, 0]))
    xi = slice_obj(2, [0, 1, 1])
    assert is_slice_iso(strength(box, FinSet(1), xi))
    for n in range(4):
        for X in all_slices(FinSet(2), 3):
            assert is_slice_iso(strength(box, FinSet(n), X))


def test_strength_of_polynomial_natural():
    P = polynomial(1, 1, [0, 0], [1, 1], [0, 0])  # 1 + X^2
    F = PolynomialBox(P)
    rng = random.Random(0)
    for _ in range(40):
        S, S2 = FinSet(rng.randint(0, 3)), FinSet(rng.randint(1, 3))
        f = FinMap(S, S2, tuple(rng.randrange(S2.size) for _ in range(S.size)))
        xi = slice_obj(1, [0] * rng.randint(0, 3))
        xi2 = slice_obj(1, [0] * rng.randint(1, 3))
        g = next(homs(xi, xi2))
        assert strength_natural(F, f, g)
    # strength is not invertible here: 2 (x) P(1) has 4 elements, P(2 (x) 1) has 5
    st_ = strength(F, FinSet(2), slice_obj(1, [0]))
    assert (st_.src.total.size, st_.dst.total.size) == (4, 5)
    assert tensor(FinSet(2), slice_obj(1, [0])).total.size == 2
