"""Sum-preserving fibered functors are determined by their value at delta.

For ``X`` in the I-fiber of E|J (a slice over J x I) the pseudo-inverse
``h(X)`` sends a span I <-p- M -q-> K to q_! p* X, computed in E|J as
(id_J x q)_! (id_J x p)* X.  :func:`extract_span` goes the other way: it reads
a span off L(delta) and checks, within a budget, that h(L(delta)) and L agree
together with the comparison isomorphisms from the proof.
"""

from __future__ import annotations

import random

from .fibspan import (
    Budget,
    FiberedFunctorBox,
    Span,
    SpanMap,
    all_spans,
    audit_sums,
    cartesian_factor,
    cartesian_lift,
    delta,
    from_fiber,
    is_cartesian,
    is_vertical,
    opcartesian_lift,
    random_map,
    span_compose,
    terminal_span,
    to_fiber,
)
from .finset import (
    FinMap,
    FinSet,
    StructureError,
    compose,
    identity,
    inverse,
    is_iso,
    product,
    product_map,
    pullback_index,
    pullback_pairs,
)
from .report import FAIL, PASS, ExtractionError, Report
from .slice import (
    SliceMap,
    SliceObj,
    Square,
    base_change,
    beck_chevalley,
    dep_sum,
    sum_counit,
)


def _split(X: SliceObj, I: FinSet) -> FinSet:
    """Recover J from a slice over J x I."""
    if I.size == 0:
        raise StructureError("cannot recover J from a slice over J x 0; pass J explicitly")
    if X.base.size % I.size:
        raise StructureError(f"slice base {X.base!r} is not of the form J x {I!r}")
    return FinSet(X.base.size // I.size)


def _J(X: SliceObj, I: FinSet, J: FinSet | None) -> FinSet:
    J = J if J is not None else _split(X, I)
    if X.base != product(J, I)[0]:
        raise StructureError(f"slice base {X.base!r} is not J x I for J={J!r}, I={I!r}")
    return J


def h_apply(X: SliceObj, S: Span, J: FinSet | None = None) -> SliceObj:
    """q_! p* X for X over J x I and S = (I <-p- M -q-> K); a slice over J x K."""
    J = _J(X, S.I, J)
    Jp = product_map(identity(J), S.p)
    Jq = product_map(identity(J), S.q)
    return dep_sum(Jq, base_change(Jp, X))


def h_span(X: SliceObj, S: Span, J: FinSet | None = None) -> Span:
    J = _J(X, S.I, J)
    return from_fiber(h_apply(X, S, J), J, S.K)


def _restrict_iso(X: SliceObj, J: FinSet, p_outer: FinMap, v: FinMap) -> SliceMap:
    """The canonical iso (p v)* X -> v* p* X over J x M'."""
    Jpv = product_map(identity(J), compose(p_outer, v))
    Jp = product_map(identity(J), p_outer)
    Jv = product_map(identity(J), v)
    A = base_change(Jpv, X)
    Z = base_change(Jp, X)
    VZ = base_change(Jv, Z)
    zidx = pullback_index(X.proj, Jp)
    vzidx = pullback_index(Z.proj, Jv)
    nM, nM2 = v.dom.size, v.cod.size
    table = []
    for x, jm in pullback_pairs(X.proj, Jpv):
        j, m = divmod(jm, nM)
        z = zidx[(x, j * nM2 + v.table[m])]
        table.append(vzidx[(z, jm)])
    return SliceMap(A, VZ, FinMap(A.total, VZ.total, tuple(table)))


def _h_vertical_like(X: SliceObj, J: FinSet, f: SpanMap) -> FinMap:
    """q'_! p'* X = q_! v_! v* p* X --counit--> q_! p* X, on apexes.  Used for
    vertical arrows and, unchanged, for opcartesian ones."""
    iso = _restrict_iso(X, J, f.dst.p, f.v)
    Jp = product_map(identity(J), f.dst.p)
    Jv = product_map(identity(J), f.v)
    counit = sum_counit(Jv, base_change(Jp, X))
    return compose(counit.map, iso.map)


def _h_cartesian(X: SliceObj, J: FinSet, f: SpanMap) -> FinMap:
    """q'_! p'* X = q'_! v* p* X --BC--> w* q_! p* X --lift--> q_! p* X."""
    iso = _restrict_iso(X, J, f.dst.p, f.v)
    idJ = identity(J)
    Jp = product_map(idJ, f.dst.p)
    Z = base_change(Jp, X)
    square = Square(
        u=product_map(idJ, f.src.q),
        b=product_map(idJ, f.v),
        v=product_map(idJ, f.dst.q),
        a=product_map(idJ, f.w),
    )
    bc, ok = beck_chevalley(square, Z)
    if not ok:
        raise StructureError("Beck-Chevalley comparison is not invertible")
    target = h_span(X, f.dst, J)
    lifted, lift = cartesian_lift(f.w, target)
    # re-read w* (q_! p* X) from its slice encoding as the fibered lift
    Y = to_fiber(target)
    Jw = square.a
    lidx = pullback_index(target.q, f.w)
    nK2 = f.src.K.size
    relabel = tuple(lidx[(y, jk % nK2)] for y, jk in pullback_pairs(Y.proj, Jw))
    return compose(lift.v, compose(FinMap(bc.dst.total, lifted.M, relabel), compose(bc.map, iso.map)))


def h_on_morphisms(X: SliceObj, f: SpanMap, J: FinSet | None = None) -> SpanMap:
    """h(X) on a morphism of E|I, built from the counit, Beck-Chevalley and
    lift composites; general morphisms are split as cartesian after vertical."""
    J = _J(X, f.src.I, J)
    src, dst = h_span(X, f.src, J), h_span(X, f.dst, J)
    if is_vertical(f) or is_iso(f.v):
        v = _h_vertical_like(X, J, f)
    elif is_cartesian(f):
        v = _h_cartesian(X, J, f)
    else:
        c, u = cartesian_factor(f)
        return span_compose(h_on_morphisms(X, c, J), h_on_morphisms(X, u, J))
    return SpanMap(src, dst, v, f.w)


def h_on_morphisms_direct(X: SliceObj, f: SpanMap, J: FinSet | None = None) -> SpanMap:
    """Elementwise formula (x, (j, m')) -> (x, (j, v m')); an independent
    check on :func:`h_on_morphisms`."""
    J = _J(X, f.src.I, J)
    src, dst = h_span(X, f.src, J), h_span(X, f.dst, J)
    Jp2 = product_map(identity(J), f.src.p)
    Jp = product_map(identity(J), f.dst.p)
    idx = pullback_index(X.proj, Jp)
    nM, nM2 = f.src.M.size, f.dst.M.size
    table = []
    for x, jm in pullback_pairs(X.proj, Jp2):
        j, m = divmod(jm, nM)
        table.append(idx[(x, j * nM2 + f.v.table[m])])
    return SpanMap(src, dst, FinMap(src.M, dst.M, tuple(table)), f.w)


# --- the comparison h(L(delta)) -> L ---------------------------------------------


def comparison(L: FiberedFunctorBox, S: Span) -> SpanMap:
    """The isomorphism q_! p* L(delta) -> L(S) obtained by going around the
    diagram: L on the cartesian lift of delta along p, then on the opcartesian
    lift along q.  Raises StructureError if the pieces do not glue."""
    I, J = L.dom_base, L.cod_base
    D = L.obj(delta(I))
    X = to_fiber(D)
    lifted, cart = cartesian_lift(S.p, delta(I))
    pushed, opc = opcartesian_lift(S.q, lifted)
    back = SpanMap(pushed, S, compose(lifted.q, identity(lifted.M)), identity(S.K))
    Lcart, Lopc, Lback = L.arrow(cart), L.arrow(opc), L.arrow(back)
    Z = Lcart.src
    find: dict[tuple[int, int], int] = {}
    for z in range(Z.M.size):
        key = (Lcart.v.table[z], Z.q.table[z])
        if key in find:
            raise StructureError("L does not preserve the cartesian lift of delta")
        find[key] = z
    src = h_span(X, S, J)
    nN = S.M.size
    table = []
    for y, jn in pullback_pairs(X.proj, product_map(identity(J), S.p)):
        n = jn % nN
        if (y, n) not in find:
            raise StructureError("L does not preserve the cartesian lift of delta")
        table.append(Lback.v.table[Lopc.v.table[find[(y, n)]]])
    dst = L.obj(S)
    phi = SpanMap(src, dst, FinMap(src.M, dst.M, tuple(table)), identity(S.K))
    if not is_iso(phi.v):
        raise StructureError("comparison h(L(delta)) -> L is not invertible")
    return phi


def extract_span(L: FiberedFunctorBox, budget: Budget = Budget(), verify: bool = True) -> tuple[Span, Report]:
    """Read the representing span I <-p- M -q-> J off L(delta)."""
    I, J = L.dom_base, L.cod_base
    bounds = budget.to_json()
    audit = audit_sums(L, budget)
    if not audit.verdict:
        report = Report("extract_span", FAIL, bounds, audit.witness,
                        {"reason": "not a sum-preserving fibered functor"})
        raise ExtractionError("not a sum-preserving fibered functor", report)
    D = L.obj(delta(I))
    result = Span(I, D.M, J, D.q, D.p)
    report = Report("extract_span", PASS, bounds, None, {"span": result.to_json(), "checked_spans": 0})
    if not verify:
        return result, report
    X = to_fiber(D)
    checked = 0
    rng = random.Random(budget.seed)
    for nK in range(budget.max_size + 1):
        K = FinSet(nK)
        for S in all_spans(I, K, budget.max_size):
            checked += 1
            try:
                phi = comparison(L, S)
            except StructureError as exc:
                report.verdict, report.witness = FAIL, {"span": S.to_json(), "message": str(exc)}
                raise ExtractionError("verification failed", report)
            # naturality against a cartesian lift into S
            K2 = FinSet(rng.randint(0, budget.max_size) if nK else 0)
            a = random_map(rng, K2, K)
            T, c = cartesian_lift(a, S)
            lhs = compose(phi.v, h_on_morphisms_direct(X, c, J).v)
            rhs = compose(L.arrow(c).v, comparison(L, T).v)
            if lhs != rhs:
                report.verdict = FAIL
                report.witness = {"morphism": c.to_json(), "message": "comparison is not natural"}
                raise ExtractionError("verification failed", report)
    report.details["checked_spans"] = checked
    return result, report


def extract_basechange(L: FiberedFunctorBox, budget: Budget = Budget()) -> FinMap:
    """For L preserving sums and terminal objects, the a: J -> I with L = a*."""
    S, report = extract_span(L, budget)
    if not is_iso(S.q):
        report.verdict = FAIL
        report.witness = {"span": S.to_json(), "L(1_I)": L.obj(terminal_span(L.dom_base)).to_json()}
        report.details["reason"] = "terminal objects not preserved"
        raise ExtractionError("terminal objects not preserved", report)
    return compose(S.p, inverse(S.q))


def spans_equivalent(S: Span, T: Span) -> bool:
    """Isomorphism of spans I <- M -> J (an iso of apexes over both legs)."""
    return S.I == T.I and S.K == T.K and S.cell_counts() == T.cell_counts()
