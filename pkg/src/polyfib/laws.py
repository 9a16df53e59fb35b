"""Law suites for the slice functors and the fibered slice.

Each suite is exhaustive up to isomorphism of objects within its bound and
returns a :class:`Report`.  ``inject_fault`` swaps in a deliberately wrong
construction so that the suite has something to reject.
"""

from __future__ import annotations

import itertools
import random

from .fibspan import (
    Span,
    SpanMap,
    all_spans,
    cartesian_lift,
    is_cartesian,
    is_opcartesian,
    opcartesian_lift,
    spans_isomorphic,
)
from .finset import (
    FinMap,
    FinSet,
    StructureError,
    all_bijections,
    all_maps,
    compose,
    is_iso,
    pullback,
)
from .report import FAIL, PASS, Report
from .slice import (
    SliceMap,
    SliceObj,
    Square,
    all_slices,
    base_change,
    base_change_map,
    beck_chevalley,
    dep_prod,
    dep_prod_map,
    dep_sum,
    dep_sum_map,
    hom_count,
    homs,
    prod_counit,
    prod_transpose,
    prod_unit,
    prod_untranspose,
    slice_compose,
    slice_identity,
    sum_counit,
    sum_transpose,
    sum_unit,
    sum_untranspose,
)


def _maps_upto(bound: int):
    for nJ in range(bound + 1):
        for nI in range(bound + 1):
            yield from all_maps(FinSet(nJ), FinSet(nI))


def _dep_prod_dropping(a: FinMap, X: SliceObj) -> SliceObj:
    """Broken a_*: loses its last section."""
    Y = dep_prod(a, X)
    if not Y.total.size:
        return Y
    n = Y.total.size - 1
    return SliceObj(Y.base, FinSet(n), FinMap(FinSet(n), Y.base, Y.proj.table[:n]))


def _sample(rng, items, k):
    return items if len(items) <= k else rng.sample(items, k)


def adjoint_triple_suite(bound: int = 3, max_total: int | None = None, seed: int = 0,
                         inject_fault: bool = False, transpose_samples: int = 4) -> Report:
    """a_! -| a* -| a_* for every a: J -> I with |I|, |J| <= bound and objects
    of total size <= max_total (default bound + 1): hom counts agree, triangle
    identities hold, and transposition is a bijection on sampled hom-sets."""
    max_total = bound + 1 if max_total is None else max_total
    rng = random.Random(seed)
    pi = _dep_prod_dropping if inject_fault else dep_prod
    bounds = {"bound": bound, "max_total": max_total, "seed": seed}
    checks = 0

    def fail(law, a, **objs):
        witness = {"law": law, "a": a.to_json()}
        witness.update({k: v.to_json() for k, v in objs.items()})
        return Report("adjoint_triple", FAIL, bounds, witness, {"checks": checks})

    for a in _maps_upto(bound):
        J, I = a.dom, a.cod
        over_J = list(all_slices(J, max_total))
        over_I = list(all_slices(I, max_total))
        sums = [dep_sum(a, X) for X in over_J]
        pulls = [base_change(a, Y) for Y in over_I]
        prods = [pi(a, X) for X in over_J]
        for X, SX in zip(over_J, sums):
            for Y, AY in zip(over_I, pulls):
                checks += 1
                if hom_count(SX, Y) != hom_count(X, AY):
                    return fail("a_! -| a* hom count", a, X=X, Y=Y)
        for Y, AY in zip(over_I, pulls):
            for X, PX in zip(over_J, prods):
                checks += 1
                if hom_count(AY, X) != hom_count(Y, PX):
                    return fail("a* -| a_* hom count", a, Y=Y, X=X)
        # triangle identities
        for X, SX in zip(over_J, sums):
            checks += 1
            if slice_compose(sum_counit(a, SX), dep_sum_map(a, sum_unit(a, X))) != slice_identity(SX):
                return fail("a_! triangle", a, X=X)
            checks += 1
            PX = dep_prod(a, X)
            if slice_compose(dep_prod_map(a, prod_counit(a, X)), prod_unit(a, PX)) != slice_identity(PX):
                return fail("a_* triangle", a, X=X)
        for Y, AY in zip(over_I, pulls):
            checks += 1
            if slice_compose(base_change_map(a, sum_counit(a, Y)), sum_unit(a, AY)) != slice_identity(AY):
                return fail("a* triangle (sum side)", a, Y=Y)
            checks += 1
            if slice_compose(prod_counit(a, AY), base_change_map(a, prod_unit(a, Y))) != slice_identity(AY):
                return fail("a* triangle (product side)", a, Y=Y)
        # transposition round trips on sampled pairs
        pairs = list(itertools.product(range(len(over_J)), range(len(over_I))))
        for x, y in _sample(rng, pairs, transpose_samples):
            X, Y = over_J[x], over_I[y]
            seen = set()
            for g in homs(sums[x], Y):
                checks += 1
                f = sum_transpose(a, X, Y, g)
                if sum_untranspose(a, X, Y, f) != g or f.map.table in seen:
                    return fail("a_! -| a* transposition", a, X=X, Y=Y)
                seen.add(f.map.table)
            seen = set()
            for g in homs(pulls[y], X):
                checks += 1
                f = prod_transpose(a, Y, X, g)
                if prod_untranspose(a, Y, X, f) != g or f.map.table in seen:
                    return fail("a* -| a_* transposition", a, Y=Y, X=X)
                seen.add(f.map.table)
    return Report("adjoint_triple", PASS, bounds, None, {"checks": checks})


def _collapse(f: SliceMap) -> SliceMap:
    fib = f.dst.fibers()
    return SliceMap(f.src, f.dst, FinMap(f.src.total, f.dst.total,
                                         tuple(fib[i][0] for i in f.src.proj.table)))


def pullback_squares(bound: int):
    """Every pullback square with all four sets of size <= bound, the apex
    taken up to relabelling by all its permutations."""
    for nA, nC, nD in itertools.product(range(bound + 1), repeat=3):
        A, C, D = FinSet(nA), FinSet(nC), FinSet(nD)
        for a in all_maps(A, D):
            for v in all_maps(C, D):
                P, u, b = pullback(a, v)
                if P.size > bound:
                    continue
                for perm in all_bijections(P, P):
                    yield Square(compose(u, perm), compose(b, perm), v, a)


def beck_chevalley_suite(bound: int = 3, seed: int = 0, inject_fault: bool = False) -> Report:
    """The comparison u_! b* Y -> a* v_! Y is invertible on every pullback
    square within bound and every Y of total <= bound; every commuting square
    made by doubling an apex element is rejected."""
    bounds = {"bound": bound, "seed": seed}
    squares = rejected = 0
    for sq in pullback_squares(bound):
        squares += 1
        for Y in all_slices(sq.b.cod, bound):
            f, ok = beck_chevalley(sq, Y)
            if inject_fault:
                f = _collapse(f)
                ok = is_iso(f.map)
            if not ok:
                return Report("beck_chevalley", FAIL, bounds, {"square": sq.to_json(), "Y": Y.to_json()},
                              {"squares": squares})
        if sq.u.dom.size:
            # non-pullback control: duplicate the first apex element
            P2 = FinSet(sq.u.dom.size + 1)
            dup = FinMap(P2, sq.u.dom, (0,) + tuple(range(sq.u.dom.size)))
            bad = Square(compose(sq.u, dup), compose(sq.b, dup), sq.v, sq.a)
            try:
                beck_chevalley(bad, SliceObj(sq.b.cod, FinSet(0), FinMap(FinSet(0), sq.b.cod, ())))
            except StructureError:
                rejected += 1
            else:
                return Report("beck_chevalley", FAIL, bounds, {"non_pullback_square": bad.to_json()},
                              {"squares": squares})
    return Report("beck_chevalley", PASS, bounds, None,
                  {"squares": squares, "non_pullback_controls_rejected": rejected})


def maps_over(T: Span, S: Span, w: FinMap):
    """Every morphism T -> S of E|I lying over w: T.K -> S.K."""
    cells: dict[tuple[int, int], list[int]] = {}
    for m in range(S.M.size):
        cells.setdefault((S.p.table[m], S.q.table[m]), []).append(m)
    choices = [cells.get((T.p.table[m], w.table[T.q.table[m]]), []) for m in range(T.M.size)]
    for table in itertools.product(*choices):
        yield SpanMap(T, S, FinMap(T.M, S.M, table), w)


def _doubling_lift(a: FinMap, S: Span):
    """Broken cartesian lift: repeats the first apex element."""
    T, c = cartesian_lift(a, S)
    if not T.M.size:
        return T, c
    n = T.M.size + 1
    M = FinSet(n)
    d = (0,) + tuple(range(T.M.size))
    T2 = Span(T.I, M, T.K, FinMap(M, T.I, tuple(T.p.table[k] for k in d)),
              FinMap(M, T.K, tuple(T.q.table[k] for k in d)))
    return T2, SpanMap(T2, S, FinMap(M, S.M, tuple(c.v.table[k] for k in d)), a)


def _universal(lift: SpanMap, T: Span, S: Span, over_lift: FinMap, over_total: FinMap, before: bool) -> bool:
    """Composition with ``lift`` is a bijection between maps lying over
    ``over_lift`` and maps lying over ``over_total``."""
    if before:  # cartesian: T -> lift.src over c, then lift
        targets = list(maps_over(T, S, over_total))
        composites = [compose(lift.v, u.v).table for u in maps_over(T, lift.src, over_lift)]
    else:  # opcartesian: lift, then lift.dst -> T over c
        targets = list(maps_over(S, T, over_total))
        composites = [compose(u.v, lift.v).table for u in maps_over(lift.dst, T, over_lift)]
    return sorted(composites) == sorted(f.v.table for f in targets)


def bifibration_suite(bound: int = 2, seed: int = 0, inject_fault: bool = False, samples: int = 3) -> Report:
    """E|I -> E is a bifibration satisfying Beck-Chevalley: chosen lifts are
    (op)cartesian and universal against sampled test objects, and cobase
    change commutes with base change along pullback squares."""
    rng = random.Random(seed)
    lift = _doubling_lift if inject_fault else cartesian_lift
    bounds = {"bound": bound, "seed": seed, "samples": samples}
    checks = 0

    def fail(law, **data):
        return Report("bifibration", FAIL, bounds,
                      {"law": law, **{k: v.to_json() for k, v in data.items()}}, {"checks": checks})

    for nI, nK in itertools.product(range(bound + 1), repeat=2):
        I, K = FinSet(nI), FinSet(nK)
        for S in all_spans(I, K, bound):
            for nK2 in range(bound + 1):
                K2 = FinSet(nK2)
                for a in all_maps(K2, K):
                    T, c = lift(a, S)
                    checks += 1
                    if not is_cartesian(c):
                        return fail("cartesian lift", S=S, a=a)
                    for nL in range(bound + 1):
                        L = FinSet(nL)
                        for d in _sample(rng, list(all_maps(L, K2)), samples):
                            for Z in _sample(rng, list(all_spans(I, L, bound)), samples):
                                checks += 1
                                if not _universal(c, Z, S, d, compose(a, d), True):
                                    return fail("cartesian universality", S=S, a=a, Z=Z)
                for w in all_maps(K, K2):
                    T, o = opcartesian_lift(w, S)
                    checks += 1
                    if not is_opcartesian(o):
                        return fail("opcartesian lift", S=S, w=w)
                    for nL in range(bound + 1):
                        L = FinSet(nL)
                        for e in _sample(rng, list(all_maps(K2, L)), samples):
                            for Z in _sample(rng, list(all_spans(I, L, bound)), samples):
                                checks += 1
                                if not _universal(o, Z, S, e, compose(e, w), False):
                                    return fail("opcartesian universality", S=S, w=w, Z=Z)
                    # Beck-Chevalley: a* w_! S ~ u_! b* S on the chosen pullback of w and a
                    for nA in range(bound + 1):
                        for a in _sample(rng, list(all_maps(FinSet(nA), K2)), samples):
                            P, u, b = pullback(a, w)
                            lhs = lift(a, opcartesian_lift(w, S)[0])[0]
                            rhs = opcartesian_lift(u, lift(b, S)[0])[0]
                            checks += 1
                            if not spans_isomorphic(lhs, rhs):
                                return fail("Beck-Chevalley for spans", S=S, w=w, a=a)
    return Report("bifibration", PASS, bounds, None, {"checks": checks})


def laws_suite(bound: int = 3, seed: int = 0, inject_fault: bool = False) -> Report:
    """All three suites; the bifibration suite runs at min(bound, 2)."""
    parts = [
        adjoint_triple_suite(bound, seed=seed, inject_fault=inject_fault),
        beck_chevalley_suite(bound, seed=seed, inject_fault=inject_fault),
        bifibration_suite(min(bound, 2), seed=seed, inject_fault=inject_fault),
    ]
    verdict = PASS if all(r.ok for r in parts) else FAIL
    witness = next((r.to_json() for r in parts if not r.ok), None)
    return Report("laws", verdict, {"bound": bound, "seed": seed, "inject_fault": inject_fault}, witness,
                  {"suites": [r.to_json() for r in parts]})
