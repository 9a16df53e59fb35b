"""Recover the polynomial behind a local fibered right adjoint.

Pipeline: :func:`factor` splits R as t_! . rbar through R(1_I); the left
adjoint of rbar is either supplied or found by :func:`adjoint_search`; its
value at delta_B is the span I <-s- E -p-> B.  Every verdict is bounded:
the universal property quantifies over infinitely many objects, so a pass
means "certified up to the stated sizes".
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .fibspan import (
    Budget,
    FiberedFunctorBox,
    Span,
    SpanBox,
    SpanMap,
    all_spans,
    audit_fibered,
    cartesian_lift,
    delta,
    from_fiber,
    memoized,
    plain_map,
    slice_to_vertical,
    span_iso,
    terminal_span,
    to_fiber,
    unplain,
)
from .finset import (
    FinMap,
    FinSet,
    StructureError,
    compose,
    identity,
    product,
    sorted_tables,
    unique_to_terminal,
)
from .poly import Polynomial, PolynomialBox, eval_fibered, left_part_box
from .report import EXHAUSTED, FAIL, PASS, ExtractionError, Report
from .slice import all_slices, hom_count, homs, slice_obj

UNDECIDABLE_NOTE = (
    "being a local fibered right adjoint is only certified or refuted within the stated bounds"
)


class CachedBox(FiberedFunctorBox):
    """Memoizes obj on an underlying box; invisible apart from speed."""

    def __init__(self, box: FiberedFunctorBox):
        self.box = box
        self.dom_base, self.cod_base = box.dom_base, box.cod_base
        self.name = box.name
        self.thread_safe = box.thread_safe

    @memoized
    def obj(self, S):
        return self.box.obj(S)

    def arrow(self, f):
        return self.box.arrow(f)


# --- factorization through R(1_I) ----------------------------------------------


class FactorBox(FiberedFunctorBox):
    """rbar: E|I -> E|B; rbar(X) is R(X) with left leg R(X -> 1_I)."""

    name = "rbar"

    def __init__(self, R: FiberedFunctorBox):
        self.R = R
        self.one = terminal_span(R.dom_base)
        Q = R.obj(self.one)
        self.t = Q.p
        self.dom_base, self.cod_base = R.dom_base, Q.M
        self.thread_safe = R.thread_safe

    def _bang(self, S: Span) -> SpanMap:
        return SpanMap(S, self.one, S.p, unique_to_terminal(S.K))

    @memoized
    def obj(self, S):
        RS = self.R.obj(S)
        u = self.R.arrow(self._bang(S))
        if u.src != RS:
            raise StructureError("R(X -> 1_I) does not start at R(X)")
        return Span(self.cod_base, RS.M, S.K, u.v, RS.q)

    def arrow(self, f):
        Rf = self.R.arrow(f)
        return SpanMap(self.obj(f.src), self.obj(f.dst), Rf.v, f.w)


def post_sum(t: FinMap, S: Span) -> Span:
    """t_! on a span: post-compose the left leg."""
    return Span(t.cod, S.M, S.K, compose(t, S.p), S.q)


@dataclass
class Factorization:
    t: FinMap
    rbar: FiberedFunctorBox

    @property
    def B(self) -> FinSet:
        return self.t.dom

    def check(self, R: FiberedFunctorBox, budget: Budget = Budget()) -> Optional[Span]:
        """First test span where t_! rbar differs from R, or None."""
        for nK in range(budget.max_size + 1):
            for S in all_spans(R.dom_base, FinSet(nK), budget.max_size):
                if post_sum(self.t, self.rbar.obj(S)) != R.obj(S):
                    return S
        return None


def factor(R: FiberedFunctorBox) -> Factorization:
    box = FactorBox(R)
    return Factorization(box.t, box)


# --- bounded search for the left adjoint at delta_B ------------------------------


@dataclass
class Column:
    """Universal arrow from the point b to rbar^1, with W_b over I."""

    b: int
    table: tuple[int, ...]
    unit: int
    checked: int


@dataclass
class Certificate:
    W: Span  # I <- W -> B, in the B-fiber of E|I
    unit: SpanMap  # delta_B -> rbar^B(W)
    columns: list[Column]
    size_bound: int
    notes: list = field(default_factory=lambda: [UNDECIDABLE_NOTE])

    def box(self) -> SpanBox:
        """s_! p* with (I <-s- W -p-> B) = W."""
        return left_part_box(self.W.p, self.W.q)

    def to_json(self) -> dict:
        return {
            "W": self.W.to_json(),
            "unit": list(self.unit.v.table),
            "columns": [{"b": c.b, "W_b": list(c.table), "unit": c.unit, "checked": c.checked} for c in self.columns],
            "certified_up_to": self.size_bound,
        }


class _Column:
    """Search state for one point b of B."""

    def __init__(self, rbar: FiberedFunctorBox, b: int, size_bound: int):
        self.rbar, self.b, self.bound = rbar, b, size_bound
        self.I = rbar.dom_base
        self.tests = list(all_slices(self.I, size_bound))
        self._over_b: dict = {}

    def over_b(self, Z) -> list[int]:
        out = self._over_b.get(Z)
        if out is None:
            RZ = self.rbar.obj(unplain(Z))
            out = self._over_b[Z] = [y for y in range(RZ.M.size) if RZ.p.table[y] == self.b]
        return out

    def check(self, W, eta: int):
        """Check the universal property of (W, eta) against every test object.
        Returns (None, n) on success or ((kind, Z), n) at the first failure."""
        for n, Z in enumerate(self.tests):
            target = self.over_b(Z)
            if hom_count(W, Z) != len(target):
                return ("existence", Z), n
            seen = set()
            for g in homs(W, Z):
                y = self.rbar.arrow(plain_map(g)).v.table[eta]
                if y in seen:
                    return ("uniqueness", Z), n
                seen.add(y)
        return None, len(self.tests)

    def search(self):
        best = None
        for n in range(self.bound + 1):
            for table in sorted_tables(n, self.I.size):
                W = slice_obj(self.I, table)
                for eta in self.over_b(W):
                    failure, passed = self.check(W, eta)
                    if failure is None:
                        return Column(self.b, tuple(table), eta, passed), None
                    if best is None or passed > best[0]:
                        best = (passed, table, eta, failure)
        return None, best


def adjoint_search(rbar: FiberedFunctorBox, size_bound: int = 9) -> Certificate:
    """Find L^B(delta_B) for rbar: E|I -> E|B within ``size_bound``.

    The search runs one point b of B at a time, in the 1-fiber: b* delta_B is
    the point b, and a fibered left adjoint must send it to b* L^B(delta_B).
    Candidates W_b over I go by increasing size, then lexicographic
    structure map, then unit; the first one whose unit is universal against
    every object over I of size <= size_bound wins.  The columns are then
    assembled into W over I x B with a unit delta_B -> rbar^B(W)."""
    I, B = rbar.dom_base, rbar.cod_base
    rbar = rbar if isinstance(rbar, CachedBox) else CachedBox(rbar)
    bounds = {"size_bound": size_bound}
    columns = []
    for b in range(B.size):
        col, best = _Column(rbar, b, size_bound).search()
        if col is None:
            witness = {"b": b}
            reason = "no candidate with a unit"
            if best is not None:
                passed, table, eta, (kind, Z) = best
                reason = "uniqueness violated" if kind == "uniqueness" else "bound exhausted"
                witness.update({
                    "closest_candidate": list(table),
                    "unit": eta,
                    "failing_test_object": list(Z.proj.table),
                    "failure": kind,
                })
            report = Report("adjoint_search", EXHAUSTED, bounds, witness,
                            {"reason": reason, "note": UNDECIDABLE_NOTE})
            raise ExtractionError(f"no certified left adjoint value within size {size_bound}: {reason}", report)
        columns.append(col)

    p_table = [i for c in columns for i in c.table]
    q_table = [c.b for c in columns for _ in c.table]
    M = FinSet(len(p_table))
    W = Span(I, M, B, FinMap(M, I, tuple(p_table)), FinMap(M, B, tuple(q_table)))
    RW = rbar.obj(W)
    unit = []
    for c in columns:
        point = FinMap(FinSet(1), B, (c.b,))
        lifted, lift = cartesian_lift(point, W)
        Wb = unplain(slice_obj(I, c.table))
        iso = span_iso(Wb, lifted)
        image = rbar.arrow(lift).v.table[rbar.arrow(iso).v.table[c.unit]]
        unit.append(image)
    eta = SpanMap(delta(B), RW, FinMap(B, RW.M, tuple(unit)), identity(B))
    return Certificate(W, eta, columns, size_bound)


def verify_certificate(rbar: FiberedFunctorBox, cert: Certificate, bound: int = 2) -> Report:
    """Independent re-check in the B-fiber: for every Z over I x B with at
    most ``bound`` elements, g -> rbar(g) . eta is a bijection
    Hom(W, Z) -> Hom(delta_B, rbar(Z))."""
    I, B = rbar.dom_base, rbar.cod_base
    W = cert.W
    XW = to_fiber(W)
    P, _, _ = product(I, B)
    checked = 0
    for Z in all_slices(P, bound):
        checked += 1
        ZS = from_fiber(Z, I, B)
        RZ = rbar.obj(ZS)
        over = [[y for y in range(RZ.M.size) if RZ.p.table[y] == b and RZ.q.table[y] == b] for b in range(B.size)]
        expected = 1
        for ys in over:
            expected *= len(ys)
        seen = set()
        for g in homs(XW, Z):
            image = rbar.arrow(slice_to_vertical(g, I, B)).v
            key = tuple(image.table[u] for u in cert.unit.v.table)
            seen.add(key)
        count = hom_count(XW, Z)
        if len(seen) != count or count != expected:
            return Report("verify_certificate", FAIL, {"bound": bound},
                          {"test_object": Z.to_json(), "homs": count, "images": len(seen), "expected": expected})
    return Report("verify_certificate", PASS, {"bound": bound}, None, {"checked": checked})


# --- the theorem -----------------------------------------------------------------


def _agreement(R: FiberedFunctorBox, P: Polynomial, budget: Budget) -> Optional[Span]:
    F = eval_fibered(P)
    for nK in range(budget.max_size + 1):
        for S in all_spans(R.dom_base, FinSet(nK), budget.max_size):
            if F.obj(S).cell_counts() != R.obj(S).cell_counts():
                return S
    return None


def extract_polynomial(
    R: FiberedFunctorBox,
    L: Optional[FiberedFunctorBox] = None,
    size_bound: int = 9,
    budget: Budget = Budget(),
    certificate_bound: int = 2,
) -> tuple[Polynomial, Report]:
    """The bridge I <-s- E -p-> B -t-> J representing R, with a report."""
    I, J = R.dom_base, R.cod_base
    bounds = {"size_bound": size_bound, "verification": budget.to_json()}
    audit = audit_fibered(R, budget)
    if not audit.verdict:
        report = Report("extract_polynomial", FAIL, bounds, audit.witness,
                        {"reason": "not a fibered functor", "note": UNDECIDABLE_NOTE})
        raise ExtractionError("R failed the fibered audit", report)
    R = CachedBox(R)
    fac = factor(R)
    B = fac.B
    details: dict = {"note": UNDECIDABLE_NOTE}
    if L is not None:
        if L.dom_base != B or L.cod_base != I:
            raise StructureError(f"supplied left adjoint must go E|{B.size} -> E|{I.size}")
        W = L.obj(delta(B))
        details["left_adjoint"] = "supplied"
    else:
        try:
            cert = adjoint_search(fac.rbar, size_bound)
        except ExtractionError as exc:
            exc.report.bounds.update(bounds)
            exc.report.name = "extract_polynomial"
            raise
        recheck = verify_certificate(fac.rbar, cert, certificate_bound)
        if not recheck.ok:
            report = Report("extract_polynomial", FAIL, bounds, recheck.witness,
                            {"reason": "certificate re-check failed", **details})
            raise ExtractionError("certificate re-check failed", report)
        W = cert.W
        details["left_adjoint"] = "searched"
        details["certificate"] = cert.to_json()
    P = Polynomial(I, W.M, B, J, W.p, W.q, fac.t)
    details["polynomial"] = P.to_json()
    bad = _agreement(R, P, budget)
    if bad is not None:
        report = Report("extract_polynomial", FAIL, bounds, {"span": bad.to_json()},
                        {"reason": "extracted polynomial disagrees with R", **details})
        raise ExtractionError("extracted polynomial disagrees with R", report)
    return P, Report("extract_polynomial", PASS, bounds, None, details)


# --- converse: every polynomial is a local fibered right adjoint ---------------


def _counts_matrix(objs, cells: int) -> np.ndarray:
    out = np.zeros((len(objs), cells), dtype=np.int64)
    for n, X in enumerate(objs):
        out[n] = X.fiber_sizes()
    return out


def _hom_counts(sources: np.ndarray, targets: np.ndarray) -> np.ndarray:
    """|Hom(A, C)| = prod over cells of |C_c| ** |A_c|, for all pairs."""
    out = np.ones((sources.shape[0], targets.shape[0]), dtype=np.int64)
    for c in range(sources.shape[1]):
        out *= targets[None, :, c] ** sources[:, None, c]
    return out


def converse_check(P: Polynomial, bound: int = 3, left: Optional[FiberedFunctorBox] = None) -> Report:
    """Hom-count check that s_! p* -| p_* s* in every K-fiber, |K| <= bound,
    for all objects with at most ``bound`` elements (up to isomorphism)."""
    I, B = P.I, P.B
    Rbar = PolynomialBox(Polynomial(I, P.E, B, B, P.s, P.p, identity(B)))
    L = left if left is not None else left_part_box(P.s, P.p)
    checked = 0
    for nK in range(bound + 1):
        K = FinSet(nK)
        IK, _, _ = product(I, K)
        BK, _, _ = product(B, K)
        Xs = list(all_slices(IK, bound))
        Ys = list(all_slices(BK, bound))
        LYs = [to_fiber(L.obj(from_fiber(Y, B, K))) for Y in Ys]
        RXs = [to_fiber(Rbar.obj(from_fiber(X, I, K))) for X in Xs]
        left_counts = _hom_counts(_counts_matrix(LYs, IK.size), _counts_matrix(Xs, IK.size))
        right_counts = _hom_counts(_counts_matrix(Ys, BK.size), _counts_matrix(RXs, BK.size))
        checked += left_counts.size
        bad = np.argwhere(left_counts != right_counts)
        if len(bad):
            y, x = bad[0]
            return Report("converse_check", FAIL, {"bound": bound},
                          {"K": nK, "Y": Ys[y].to_json(), "X": Xs[x].to_json(),
                           "hom_left": int(left_counts[y, x]), "hom_right": int(right_counts[y, x])},
                          {"polynomial": P.to_json()})
    return Report("converse_check", PASS, {"bound": bound}, None,
                  {"polynomial": P.to_json(), "pairs_checked": checked})
