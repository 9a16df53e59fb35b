"""The fibered slice E|I as spans I <- M -> K over their right leg.

A morphism ``SpanMap(src, dst, v, w)`` goes from ``I <-p'- M' -q'-> K'`` to
``I <-p- M -q-> K``: ``p v = p'`` and ``q v = w q'``.  Cartesian morphisms are
those whose square is a pullback, opcartesian ones have ``v`` invertible and
vertical ones have ``w`` an identity.

Fibered functors are handled as black boxes (:class:`FiberedFunctorBox`)
evaluated span by span.  Nothing about a box is trusted: :func:`audit_fibered`
samples morphisms and checks what it can.
"""

from __future__ import annotations

import functools
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, Optional

from .finset import (
    FinMap,
    FinSet,
    StructureError,
    compose,
    identity,
    is_iso,
    is_pullback_square,
    pairing,
    product,
    product_map,
    pullback,
    pullback_index,
    pullback_pairs,
    terminal,
    unique_to_terminal,
)
from .slice import SliceMap, SliceObj, base_change, dep_sum


@dataclass(frozen=True)
class Span:
    I: FinSet
    M: FinSet
    K: FinSet
    p: FinMap
    q: FinMap

    def __post_init__(self):
        if self.p.dom != self.M or self.p.cod != self.I:
            raise StructureError(f"left leg {self.p.signature()} is not M -> I")
        if self.q.dom != self.M or self.q.cod != self.K:
            raise StructureError(f"right leg {self.q.signature()} is not M -> K")

    def cell_counts(self) -> tuple[int, ...]:
        """Number of apex elements over each (i, k), i-major."""
        return to_fiber(self).fiber_sizes()

    def to_json(self) -> dict:
        return {
            "I": self.I.to_json(),
            "M": self.M.to_json(),
            "K": self.K.to_json(),
            "p": self.p.to_json(),
            "q": self.q.to_json(),
        }

    @classmethod
    def from_json(cls, data) -> "Span":
        return cls(
            FinSet.from_json(data["I"]),
            FinSet.from_json(data["M"]),
            FinSet.from_json(data["K"]),
            FinMap.from_json(data["p"]),
            FinMap.from_json(data["q"]),
        )


def span(I, K, p_table, q_table) -> Span:
    if isinstance(I, int):
        I = FinSet(I)
    if isinstance(K, int):
        K = FinSet(K)
    M = FinSet(len(p_table))
    return Span(I, M, K, FinMap(M, I, tuple(p_table)), FinMap(M, K, tuple(q_table)))


@dataclass(frozen=True)
class SpanMap:
    src: Span
    dst: Span
    v: FinMap
    w: FinMap

    def __post_init__(self):
        s, d = self.src, self.dst
        if s.I != d.I:
            raise StructureError(f"spans over different bases {s.I!r} and {d.I!r}")
        if self.v.dom != s.M or self.v.cod != d.M:
            raise StructureError(f"apex map {self.v.signature()} does not fit")
        if self.w.dom != s.K or self.w.cod != d.K:
            raise StructureError(f"base map {self.w.signature()} does not fit")
        if compose(d.p, self.v) != s.p:
            raise StructureError("triangle over I does not commute")
        if compose(d.q, self.v) != compose(self.w, s.q):
            raise StructureError("square over the base map does not commute")

    def to_json(self) -> dict:
        return {"src": self.src.to_json(), "dst": self.dst.to_json(), "v": self.v.to_json(), "w": self.w.to_json()}


def span_identity(S: Span) -> SpanMap:
    return SpanMap(S, S, identity(S.M), identity(S.K))


def span_compose(g: SpanMap, f: SpanMap) -> SpanMap:
    if f.dst != g.src:
        raise StructureError("span maps are not composable")
    return SpanMap(f.src, g.dst, compose(g.v, f.v), compose(g.w, f.w))


def is_vertical(f: SpanMap) -> bool:
    return f.src.K == f.dst.K and f.w == identity(f.dst.K)


def is_cartesian(f: SpanMap) -> bool:
    return is_pullback_square(f.src.q, f.v, f.dst.q, f.w)


def is_opcartesian(f: SpanMap) -> bool:
    return is_iso(f.v)


def is_span_iso(f: SpanMap) -> bool:
    return is_iso(f.v) and is_iso(f.w)


def spans_isomorphic(S: Span, T: Span) -> bool:
    """Isomorphic in a fiber: same bases and same cell counts."""
    return S.I == T.I and S.K == T.K and S.cell_counts() == T.cell_counts()


def span_iso(S: Span, T: Span) -> SpanMap:
    """A vertical isomorphism S -> T, matching apex elements cell by cell in
    increasing order.  Raises if the cell counts differ."""
    if not spans_isomorphic(S, T):
        raise StructureError("spans are not isomorphic")
    XS, XT = to_fiber(S), to_fiber(T)
    tfib = XT.fibers()
    used = [0] * XT.base.size
    table = []
    for c in XS.proj.table:
        table.append(tfib[c][used[c]])
        used[c] += 1
    return SpanMap(S, T, FinMap(S.M, T.M, tuple(table)), identity(S.K))


# --- the fiber identification (E|I)^K = E/(I x K) -----------------------------


def delta(I: FinSet) -> Span:
    """The identity span I <- I -> I."""
    return Span(I, I, I, identity(I), identity(I))


def terminal_span(I: FinSet) -> Span:
    """The terminal object 1_I = (I <- I -> 1) of E|I."""
    return Span(I, I, terminal(), identity(I), unique_to_terminal(I))


def to_fiber(S: Span) -> SliceObj:
    P, _, _ = product(S.I, S.K)
    return SliceObj(P, S.M, pairing(S.p, S.q))


def from_fiber(X: SliceObj, I: FinSet, K: FinSet) -> Span:
    P, pr1, pr2 = product(I, K)
    if X.base != P:
        raise StructureError(f"slice base {X.base!r} is not I x K = {P!r}")
    return Span(I, X.total, K, compose(pr1, X.proj), compose(pr2, X.proj))


def vertical_to_slice(f: SpanMap) -> SliceMap:
    if not is_vertical(f):
        raise StructureError("only vertical span maps live in a single fiber")
    return SliceMap(to_fiber(f.src), to_fiber(f.dst), f.v)


def slice_to_vertical(g: SliceMap, I: FinSet, K: FinSet) -> SpanMap:
    return SpanMap(from_fiber(g.src, I, K), from_fiber(g.dst, I, K), g.map, identity(K))


def plain(S: Span) -> SliceObj:
    """A span in the 1-fiber read as an object of E/I."""
    if S.K.size != 1:
        raise StructureError("only spans over the terminal object are plain slice objects")
    return SliceObj(S.I, S.M, S.p)


def unplain(X: SliceObj) -> Span:
    return Span(X.base, X.total, terminal(), X.proj, unique_to_terminal(X.total))


def plain_map(f: SliceMap) -> SpanMap:
    return SpanMap(unplain(f.src), unplain(f.dst), f.map, identity(terminal()))


# --- lifts ----------------------------------------------------------------


def cartesian_lift(a: FinMap, S: Span) -> tuple[Span, SpanMap]:
    """a* S for a: K' -> K; apex elements are pairs (m, k') with q(m) = a(k')."""
    if a.cod != S.K:
        raise StructureError(f"cannot lift {a.signature()} to a span over {S.K!r}")
    P, pr1, pr2 = pullback(S.q, a)
    T = Span(S.I, P, a.dom, compose(S.p, pr1), pr2)
    return T, SpanMap(T, S, pr1, a)


def opcartesian_lift(w: FinMap, S: Span) -> tuple[Span, SpanMap]:
    """w_! S for w: K -> K''; same apex, right leg post-composed with w."""
    if w.dom != S.K:
        raise StructureError(f"cannot lift {w.signature()} from a span over {S.K!r}")
    T = Span(S.I, S.M, w.cod, S.p, compose(w, S.q))
    return T, SpanMap(S, T, identity(S.M), w)


def cartesian_factor(f: SpanMap) -> tuple[SpanMap, SpanMap]:
    """Split f = c . u with u vertical and c the chosen cartesian lift of w."""
    T, c = cartesian_lift(f.w, f.dst)
    idx = pullback_index(f.dst.q, f.w)
    table = tuple(idx[(f.v.table[m], f.src.q.table[m])] for m in range(f.src.M.size))
    u = SpanMap(f.src, T, FinMap(f.src.M, T.M, table), identity(f.src.K))
    return c, u


# --- black boxes ----------------------------------------------------------


def memoized(method):
    """Per-instance memo for a method of one hashable argument.  Box values
    are pure functions of their input, so the cache is invisible."""

    @functools.wraps(method)
    def wrapper(self, arg):
        cache = self.__dict__.setdefault("_memo_" + method.__name__, {})
        out = cache.get(arg)
        if out is None:
            out = cache[arg] = method(self, arg)
        return out

    return wrapper


class FiberedFunctorBox:
    """A fibered functor E|I -> E|J given by code.

    Subclasses implement :meth:`obj` and :meth:`arrow`.  ``thread_safe``
    declares whether concurrent evaluation is allowed."""

    dom_base: FinSet
    cod_base: FinSet
    name = "box"
    thread_safe = True

    def obj(self, S: Span) -> Span:
        raise NotImplementedError

    def arrow(self, f: SpanMap) -> SpanMap:
        raise NotImplementedError

    def fiber_obj(self, X: SliceObj, K: FinSet) -> SliceObj:
        return to_fiber(self.obj(from_fiber(X, self.dom_base, K)))

    def plain_obj(self, X: SliceObj) -> SliceObj:
        """The 1-fiber functor E/I -> E/J."""
        return plain(self.obj(unplain(X)))

    def plain_arrow(self, f: SliceMap) -> SliceMap:
        g = self.arrow(plain_map(f))
        return SliceMap(plain(g.src), plain(g.dst), g.v)

    def __repr__(self):
        return f"<{self.name}: E|{self.dom_base.size} -> E|{self.cod_base.size}>"


class IdentityBox(FiberedFunctorBox):
    name = "identity"

    def __init__(self, I: FinSet):
        self.dom_base = self.cod_base = I

    def obj(self, S):
        return S

    def arrow(self, f):
        return f


class SpanBox(FiberedFunctorBox):
    """q_! p* for a span I <-p- M -q-> J, computed in each fiber as
    (q x id_K)_! (p x id_K)* on E/(I x K).

    Output apex elements are pairs (x, (m, k)) with x in the input apex."""

    name = "span"

    def __init__(self, p: FinMap, q: FinMap):
        if p.dom != q.dom:
            raise StructureError("span legs need a common apex")
        self.p, self.q = p, q
        self.dom_base, self.cod_base = p.cod, q.cod

    def _parts(self, S: Span):
        if S.I != self.dom_base:
            raise StructureError(f"{self!r} applied to a span over {S.I!r}")
        X = to_fiber(S)
        pk = _times_id(self.p, S.K)
        return X, pk

    @memoized
    def obj(self, S):
        X, pk = self._parts(S)
        Y = dep_sum(_times_id(self.q, S.K), base_change(pk, X))
        return from_fiber(Y, self.cod_base, S.K)

    def arrow(self, f):
        src, dst = self.obj(f.src), self.obj(f.dst)
        Xs, pks = self._parts(f.src)
        Xd, pkd = self._parts(f.dst)
        idx = pullback_index(Xd.proj, pkd)
        nK, nK2 = f.src.K.size, f.dst.K.size
        table = []
        for x, mk in pullback_pairs(Xs.proj, pks):
            m, k = divmod(mk, nK)
            table.append(idx[(f.v.table[x], m * nK2 + f.w.table[k])])
        return SpanMap(src, dst, FinMap(src.M, dst.M, tuple(table)), f.w)


def _times_id(a: FinMap, K: FinSet) -> FinMap:
    """a x id_K."""
    return product_map(a, identity(K))


def base_change_box(a: FinMap) -> SpanBox:
    """a*: E|I -> E|J for a: J -> I."""
    box = SpanBox(a, identity(a.dom))
    box.name = "base-change"
    return box


def sum_box(t: FinMap) -> SpanBox:
    """t_!: E|B -> E|J for t: B -> J."""
    box = SpanBox(identity(t.dom), t)
    box.name = "sum"
    return box


class ComposedBox(FiberedFunctorBox):
    name = "composite"

    def __init__(self, second: FiberedFunctorBox, first: FiberedFunctorBox):
        if first.cod_base != second.dom_base:
            raise StructureError("boxes are not composable")
        self.first, self.second = first, second
        self.dom_base, self.cod_base = first.dom_base, second.cod_base
        self.thread_safe = first.thread_safe and second.thread_safe

    def obj(self, S):
        return self.second.obj(self.first.obj(S))

    def arrow(self, f):
        return self.second.arrow(self.first.arrow(f))


# --- sampling helpers -----------------------------------------------------


@dataclass(frozen=True)
class Budget:
    """Sizes of sampled sets (all <= max_size), number of sampled morphisms
    and the PRNG seed."""

    max_size: int = 3
    max_morphisms: int = 200
    seed: int = 0

    def to_json(self) -> dict:
        return {"max_size": self.max_size, "max_morphisms": self.max_morphisms, "seed": self.seed}


def random_map(rng: random.Random, A: FinSet, B: FinSet) -> FinMap:
    if A.size and not B.size:
        raise StructureError("no map from a nonempty set to the empty set")
    return FinMap(A, B, tuple(rng.randrange(B.size) for _ in range(A.size)))


def random_span(rng: random.Random, I: FinSet, K: FinSet, max_apex: int) -> Span:
    n = rng.randint(0, max_apex) if I.size and K.size else 0
    M = FinSet(n)
    return Span(I, M, K, random_map(rng, M, I), random_map(rng, M, K))


def all_spans(I: FinSet, K: FinSet, max_apex: int, canonical: bool = True) -> Iterator[Span]:
    """Spans over I with right leg into K and apex <= max_apex.  With
    ``canonical`` one span per isomorphism class."""
    from .slice import all_slices

    P, _, _ = product(I, K)
    for X in all_slices(P, max_apex, canonical=canonical):
        yield from_fiber(X, I, K)


# --- audits ---------------------------------------------------------------


@dataclass
class AuditReport:
    verdict: bool
    checks: int
    budget: Budget
    witness: Optional[dict] = None
    failures: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "verdict": "pass" if self.verdict else "fail",
            "checks": self.checks,
            "budget": self.budget.to_json(),
            "witness": self.witness,
        }


def _audit_one(F: FiberedFunctorBox, kind: str, f: SpanMap) -> Optional[str]:
    """Check F on one lifted morphism.  Returns a message on violation."""
    try:
        Fs, Fd = F.obj(f.src), F.obj(f.dst)
        Ff = F.arrow(f)
    except (StructureError, KeyError, IndexError) as exc:
        return f"box raised {type(exc).__name__}: {exc}"
    for S, FS in ((f.src, Fs), (f.dst, Fd)):
        if FS.I != F.cod_base:
            return "output span is over the wrong base"
        if FS.K != S.K:
            return "output span lives in a different fiber"
    if Ff.src != Fs or Ff.dst != Fd:
        return "image of a morphism does not connect the images of its ends"
    if Ff.w != f.w:
        return "base component of a morphism was not preserved"
    if kind == "cartesian" and not is_cartesian(Ff):
        return "cartesian morphism sent to a non-cartesian one (comparison cell not invertible)"
    if kind == "opcartesian" and not is_opcartesian(Ff):
        return "opcartesian morphism sent to a non-opcartesian one (cobase-change cell not invertible)"
    if kind == "identity" and Ff != span_identity(Fs):
        return "identity not preserved"
    return None


def _audit_composite(F: FiberedFunctorBox, g: SpanMap, f: SpanMap) -> Optional[str]:
    try:
        lhs = F.arrow(span_compose(g, f))
        rhs = span_compose(F.arrow(g), F.arrow(f))
    except (StructureError, KeyError, IndexError) as exc:
        return f"box raised {type(exc).__name__}: {exc}"
    if lhs != rhs:
        return "composition not preserved"
    return None


def _random_vertical_into(rng: random.Random, S: Span, max_apex: int) -> Optional[SpanMap]:
    """A random vertical map T -> S."""
    n = rng.randint(0, max_apex)
    if S.M.size == 0:
        n = 0
    v = FinMap(FinSet(n), S.M, tuple(rng.randrange(S.M.size) for _ in range(n)))
    T = Span(S.I, v.dom, S.K, compose(S.p, v), compose(S.q, v))
    return SpanMap(T, S, v, identity(S.K))


def sample_lifts(F: FiberedFunctorBox, budget: Budget, kinds=("cartesian",)) -> list[tuple[str, object]]:
    """Deterministic list of (kind, morphism) test cases."""
    rng = random.Random(budget.seed)
    I = F.dom_base
    N = budget.max_size
    cases: list[tuple[str, object]] = []
    for n in range(budget.max_morphisms):
        kind = kinds[n % len(kinds)]
        K = FinSet(rng.randint(0, N))
        S = random_span(rng, I, K, N)
        if kind == "opcartesian":
            K2 = FinSet(rng.randint(1 if K.size else 0, max(N, 1)))
            cases.append((kind, opcartesian_lift(random_map(rng, K, K2), S)[1]))
            continue
        K2 = FinSet(rng.randint(0, N) if K.size else 0)
        if kind == "cartesian":
            cases.append((kind, cartesian_lift(random_map(rng, K2, K), S)[1]))
        elif kind == "identity":
            cases.append((kind, span_identity(S)))
        elif kind == "composite":
            T, c = cartesian_lift(random_map(rng, K2, K), S)
            cases.append((kind, (c, _random_vertical_into(rng, T, N))))
    return cases


def _run_audit(F: FiberedFunctorBox, budget: Budget, kinds, workers: int) -> AuditReport:
    cases = sample_lifts(F, budget, kinds)

    def check(case):
        kind, f = case
        if kind == "composite":
            return _audit_composite(F, *f)
        return _audit_one(F, kind, f)

    if workers > 1 and F.thread_safe:
        with ThreadPoolExecutor(workers) as ex:
            results = list(ex.map(check, cases))
    else:
        results = [check(c) for c in cases]

    report = AuditReport(True, len(cases), budget)
    for (kind, f), msg in zip(cases, results):
        if msg is not None:
            morph = [g.to_json() for g in f] if kind == "composite" else f.to_json()
            report.failures.append({"kind": kind, "message": msg, "morphism": morph})
    if report.failures:
        report.verdict = False
        report.witness = report.failures[0]
    return report


def audit_fibered(F: FiberedFunctorBox, budget: Budget = Budget(), workers: int = 1) -> AuditReport:
    """Sample cartesian lifts, identities and composites; check that F keeps
    fibers, preserves cartesian morphisms (so each comparison cell L^a is
    invertible) and is functorial on the samples."""
    return _run_audit(F, budget, ("cartesian", "identity", "composite"), workers)


def audit_sums(F: FiberedFunctorBox, budget: Budget = Budget(), workers: int = 1) -> AuditReport:
    """Additionally require opcartesian lifts to be preserved, i.e. the
    cobase-change cells are invertible."""
    return _run_audit(F, budget, ("cartesian", "opcartesian", "identity", "composite"), workers)


# --- tensoring and strength ------------------------------------------------


def tensor(S: FinSet, xi: SliceObj) -> SliceObj:
    """S (x) xi = pr_! pr* xi for pr: S x I -> I.  Elements (m, (s, i))."""
    _, _, pr = product(S, xi.base)
    return dep_sum(pr, base_change(pr, xi))


def tensor_map(f: FinMap, g: SliceMap) -> SliceMap:
    """f (x) g : S (x) xi -> S' (x) xi'."""
    I = g.base
    src, dst = tensor(f.dom, g.src), tensor(f.cod, g.dst)
    _, _, pr = product(f.dom, I)
    _, _, pr2 = product(f.cod, I)
    idx = pullback_index(g.dst.proj, pr2)
    nI = I.size
    table = []
    for m, si in pullback_pairs(g.src.proj, pr):
        s, i = divmod(si, nI)
        table.append(idx[(g.map.table[m], f.table[s] * nI + i)])
    return SliceMap(src, dst, FinMap(src.total, dst.total, tuple(table)))


def strength(F: FiberedFunctorBox, S: FinSet, xi: SliceObj) -> SliceMap:
    """The strength S (x) F^1(xi) -> F^1(S (x) xi) of a fibered functor.

    S (x) F^1(xi) is rewritten through the cartesian cell as pr_! F^S(pr* xi);
    the map into F^1(pr_! pr* xi) is the image under F of the opcartesian
    lift of pr: S -> 1.  Raises StructureError if F does not preserve the
    cartesian lift it is given."""
    I, J = F.dom_base, F.cod_base
    if xi.base != I:
        raise StructureError("strength: xi is not over the domain base of the box")
    X1 = unplain(xi)
    pr = unique_to_terminal(S)
    lifted, cart = cartesian_lift(pr, X1)
    pushed, opc = opcartesian_lift(pr, lifted)
    Fx = F.obj(X1)
    Fcart = F.arrow(cart)
    Fopc = F.arrow(opc)

    # the apex of pushed and the total of S (x) xi are both pairs over xi x S
    T = tensor(S, xi)
    Tspan = unplain(T)
    _, _, prI = product(S, I)
    tidx = pullback_index(xi.proj, prI)
    nI = I.size
    table = tuple(tidx[(m, s * nI + xi.proj.table[m])] for m, s in pullback_pairs(X1.q, pr))
    Fiso = F.arrow(SpanMap(pushed, Tspan, FinMap(pushed.M, Tspan.M, table), identity(terminal())))

    # invert the cartesian comparison of F on the lift
    Flift = Fcart.src
    back: dict[tuple[int, int], int] = {}
    for z in range(Flift.M.size):
        key = (Fcart.v.table[z], Flift.q.table[z])
        if key in back:
            raise StructureError("box does not preserve the cartesian lift along S -> 1")
        back[key] = z

    src = tensor(S, plain(Fx))
    dst = plain(F.obj(Tspan))
    _, _, prJ = product(S, J)
    nJ = J.size
    out = []
    for y, sj in pullback_pairs(Fx.p, prJ):
        s = sj // nJ
        if (y, s) not in back:
            raise StructureError("box does not preserve the cartesian lift along S -> 1")
        out.append(Fiso.v.table[Fopc.v.table[back[(y, s)]]])
    return SliceMap(src, dst, FinMap(src.total, dst.total, tuple(out)))


def strength_natural(F: FiberedFunctorBox, f: FinMap, g: SliceMap) -> bool:
    """Naturality square of the strength for f: S -> S' and g: xi -> xi'."""
    top = strength(F, f.cod, g.dst)
    left = tensor_map(f, F.plain_arrow(g))
    bottom = strength(F, f.dom, g.src)
    right = F.plain_arrow(tensor_map(f, g))
    return compose(top.map, left.map) == compose(right.map, bottom.map)
