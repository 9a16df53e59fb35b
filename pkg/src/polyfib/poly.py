"""Polynomials I <-s- E -p-> B -t-> J and their evaluation.

Two evaluation routes are kept deliberately separate: the composite
t_! p_* s* of slice functors, and the closed-form cardinality formula
``sum over b in t^-1(j) of prod over e in p^-1(b) of |X over s(e)|``.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from math import prod
from typing import Optional

from .fibspan import (
    FiberedFunctorBox,
    memoized,
    Span,
    SpanBox,
    SpanMap,
    from_fiber,
    to_fiber,
)
from .finset import (
    FinMap,
    FinSet,
    StructureError,
    compose,
    identity,
    product_map,
)
from .slice import (
    SliceObj,
    base_change,
    dep_prod,
    dep_sum,
    pullback_index,
    pullback_pairs,
    sections,
    sections_index,
)


@dataclass(frozen=True)
class Polynomial:
    I: FinSet
    E: FinSet
    B: FinSet
    J: FinSet
    s: FinMap
    p: FinMap
    t: FinMap

    def __post_init__(self):
        for name, f, dom, cod in (
            ("s", self.s, self.E, self.I),
            ("p", self.p, self.E, self.B),
            ("t", self.t, self.B, self.J),
        ):
            if f.dom != dom or f.cod != cod:
                raise StructureError(f"{name} has signature {f.signature()}, expected {dom!r} -> {cod!r}")

    def to_json(self) -> dict:
        return {
            "I": self.I.to_json(),
            "E": self.E.to_json(),
            "B": self.B.to_json(),
            "J": self.J.to_json(),
            "s": self.s.to_json(),
            "p": self.p.to_json(),
            "t": self.t.to_json(),
        }

    @classmethod
    def from_json(cls, data) -> "Polynomial":
        sets = {k: FinSet.from_json(data[k]) for k in ("I", "E", "B", "J")}
        maps = {k: FinMap.from_json(data[k]) for k in ("s", "p", "t")}
        return cls(**sets, **maps)

    def __repr__(self):
        return (
            f"Polynomial({self.I.size} <-{list(self.s.table)}- {self.E.size} "
            f"-{list(self.p.table)}-> {self.B.size} -{list(self.t.table)}-> {self.J.size})"
        )


def polynomial(I: int, J: int, s, p, t) -> Polynomial:
    """Build from sizes of I, J and tables; E and B sizes are read off."""
    E, B = FinSet(len(s)), FinSet(len(t))
    If, Jf = FinSet(I), FinSet(J)
    return Polynomial(If, E, B, Jf, FinMap(E, If, s), FinMap(E, B, p), FinMap(B, Jf, t))


def identity_polynomial(I: FinSet) -> Polynomial:
    return Polynomial(I, I, I, I, identity(I), identity(I), identity(I))


def random_polynomial(rng: random.Random, max_size: int = 3) -> Polynomial:
    """Sizes uniform in 0..max_size subject to the existence of the maps."""
    while True:
        nI, nE, nB, nJ = (rng.randint(0, max_size) for _ in range(4))
        if (nE and not (nI and nB)) or (nB and not nJ):
            continue
        return polynomial(
            nI,
            nJ,
            [rng.randrange(nI) for _ in range(nE)],
            [rng.randrange(nB) for _ in range(nE)],
            [rng.randrange(nJ) for _ in range(nB)],
        )


# --- plain evaluation -------------------------------------------------------


def eval_plain(P: Polynomial, X: SliceObj) -> SliceObj:
    """t_! p_* s* X."""
    if X.base != P.I:
        raise StructureError(f"polynomial expects a slice over {P.I!r}, got one over {X.base!r}")
    return dep_sum(P.t, dep_prod(P.p, base_change(P.s, X)))


def formula_counts(P: Polynomial, counts) -> tuple[int, ...]:
    """Fiber sizes of P(X) over J from the fiber sizes of X over I."""
    out = [0] * P.J.size
    efib = P.p.fibers()
    for b in range(P.B.size):
        out[P.t.table[b]] += prod(counts[P.s.table[e]] for e in efib[b])
    return tuple(out)


def fibered_formula_counts(P: Polynomial, S: Span) -> tuple[int, ...]:
    """Cell counts over J x K of the fibered evaluation, straight from the
    formula in each K-fiber."""
    cells = S.cell_counts()
    nK = S.K.size
    out = [0] * (P.J.size * nK)
    efib = P.p.fibers()
    for k in range(nK):
        for b in range(P.B.size):
            out[P.t.table[b] * nK + k] += prod(cells[P.s.table[e] * nK + k] for e in efib[b])
    return tuple(out)


# --- fibered evaluation -----------------------------------------------------


class PolynomialBox(FiberedFunctorBox):
    """The fibered polynomial functor; in the K-fiber it is
    (t x id)_! (p x id)_* (s x id)* on E/(I x K)."""

    name = "polynomial"

    def __init__(self, P: Polynomial):
        self.P = P
        self.dom_base, self.cod_base = P.I, P.J

    @memoized
    def _stages(self, S: Span):
        if S.I != self.P.I:
            raise StructureError(f"{self!r} applied to a span over {S.I!r}")
        K = S.K
        idK = identity(K)
        sK, pK, tK = (product_map(f, idK) for f in (self.P.s, self.P.p, self.P.t))
        X = to_fiber(S)
        Y = base_change(sK, X)
        return X, Y, sK, pK, tK

    @memoized
    def obj(self, S):
        X, Y, sK, pK, tK = self._stages(S)
        return from_fiber(dep_sum(tK, dep_prod(pK, Y)), self.P.J, S.K)

    def arrow(self, f):
        src, dst = self.obj(f.src), self.obj(f.dst)
        Xs, Ys, sKs, pKs, _ = self._stages(f.src)
        Xd, Yd, sKd, pKd, _ = self._stages(f.dst)
        ys = pullback_pairs(Xs.proj, sKs)
        yidx = pullback_index(Xd.proj, sKd)
        zidx = sections_index(pKd, Yd)
        nK, nK2 = f.src.K.size, f.dst.K.size
        v, w = f.v.table, f.w.table
        table = []
        for bk, sec in sections(pKs, Ys):
            b, k = divmod(bk, nK)
            k2 = w[k]
            new = []
            for y in sec:
                x, ek = ys[y]
                new.append(yidx[(v[x], (ek // nK) * nK2 + k2)])
            table.append(zidx[(b * nK2 + k2, tuple(new))])
        return SpanMap(src, dst, FinMap(src.M, dst.M, tuple(table)), f.w)


def eval_fibered(P: Polynomial) -> PolynomialBox:
    return PolynomialBox(P)


def left_part_box(s: FinMap, p: FinMap) -> SpanBox:
    """The fibered left adjoint s_! p*: E|B -> E|I of p_* s*."""
    box = SpanBox(p, s)
    box.name = "left-part"
    return box


# --- essential uniqueness -----------------------------------------------------


@dataclass(frozen=True)
class BridgeIso:
    on_E: FinMap
    on_B: FinMap

    def to_json(self) -> dict:
        return {"E": list(self.on_E.table), "B": list(self.on_B.table)}


def bridge_equivalent(P: Polynomial, Q: Polynomial) -> tuple[bool, Optional[BridgeIso]]:
    """Search for isos beta: B -> B', epsilon: E -> E' with t' beta = t,
    s' epsilon = s and p' epsilon = beta p."""
    if P.I != Q.I or P.J != Q.J:
        raise StructureError("bridge equivalence compares polynomials with the same I and J")
    if P.E.size != Q.E.size or P.B.size != Q.B.size:
        return False, None
    nI = P.I.size

    def cells(R: Polynomial):
        out: dict[tuple[int, int], list[int]] = {}
        for e in range(R.E.size):
            out.setdefault((R.s.table[e], R.p.table[e]), []).append(e)
        return out

    cP, cQ = cells(P), cells(Q)
    # candidate images for b are restricted to the same t-value
    groups = {}
    for b in range(P.B.size):
        groups.setdefault(P.t.table[b], []).append(b)
    qgroups = {}
    for b in range(Q.B.size):
        qgroups.setdefault(Q.t.table[b], []).append(b)
    if {j: len(v) for j, v in groups.items()} != {j: len(v) for j, v in qgroups.items()}:
        return False, None

    def signature(cells_of, b):
        return tuple(len(cells_of.get((i, b), ())) for i in range(nI))

    js = sorted(groups)
    per_group = [
        [perm for perm in itertools.permutations(qgroups[j])
         if all(signature(cP, b) == signature(cQ, b2) for b, b2 in zip(groups[j], perm))]
        for j in js
    ]
    for choice in itertools.product(*per_group):
        beta = [0] * P.B.size
        for j, perm in zip(js, choice):
            for b, b2 in zip(groups[j], perm):
                beta[b] = b2
        eps = [0] * P.E.size
        for (i, b), es in cP.items():
            for e, e2 in zip(es, cQ[(i, beta[b])]):
                eps[e] = e2
        on_B = FinMap(P.B, Q.B, tuple(beta))
        on_E = FinMap(P.E, Q.E, tuple(eps))
        assert compose(Q.t, on_B) == P.t
        assert compose(Q.s, on_E) == P.s
        assert compose(Q.p, on_E) == compose(on_B, P.p)
        return True, BridgeIso(on_E, on_B)
    return False, None


def relabel(P: Polynomial, on_E, on_B) -> Polynomial:
    """Transport P along bijections given as tables E -> E', B -> B'."""
    invE = [0] * len(on_E)
    for e, e2 in enumerate(on_E):
        invE[e2] = e
    invB = [0] * len(on_B)
    for b, b2 in enumerate(on_B):
        invB[b2] = b
    s = [P.s.table[invE[e2]] for e2 in range(P.E.size)]
    p = [on_B[P.p.table[invE[e2]]] for e2 in range(P.E.size)]
    t = [P.t.table[invB[b2]] for b2 in range(P.B.size)]
    return Polynomial(P.I, P.E, P.B, P.J, FinMap(P.E, P.I, s), FinMap(P.E, P.B, p), FinMap(P.B, P.J, t))
