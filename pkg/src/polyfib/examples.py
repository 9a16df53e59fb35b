"""Counterexamples and controls.

* Graph subdivision: the finitary left adjoint behind the free-category
  monad on graphs.  A length-0 edge glues its endpoints, so a mono can be
  sent to a non-mono, whereas every s_! p* preserves monos.  The witness
  graphs here are built independently for this package.
* G-sets: fixed points R = p* p_* have the left adjoint orbits = p* p_!, yet
  no strength I x R(1) -> R(I) exists when I is nonempty without fixed points.
* Boxes that are deliberately not local fibered right adjoints, used as
  negative controls for the audits and the extraction pipeline.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable

from scipy.cluster.hierarchy import DisjointSet

from .fibspan import FiberedFunctorBox, Span, SpanMap, memoized
from .finset import FinMap, FinSet, StructureError, compose, identity, is_mono, sorted_tables
from .poly import left_part_box
from .report import FAIL, PASS, Report
from .slice import SliceMap, all_slices, slice_obj


class PreconditionError(ValueError):
    pass


# --- graphs and subdivision -----------------------------------------------------


@dataclass(frozen=True)
class FinGraph:
    vertices: FinSet
    edges: FinSet
    src: FinMap
    tgt: FinMap

    def __post_init__(self):
        for f in (self.src, self.tgt):
            if f.dom != self.edges or f.cod != self.vertices:
                raise StructureError("source/target maps must go edges -> vertices")

    def to_json(self) -> dict:
        return {"V": self.vertices.size, "E": self.edges.size,
                "src": list(self.src.table), "tgt": list(self.tgt.table)}

    @classmethod
    def from_json(cls, data) -> "FinGraph":
        return graph(data["V"], data["src"], data["tgt"])


def graph(n_vertices: int, src, tgt) -> FinGraph:
    V, E = FinSet(n_vertices), FinSet(len(src))
    return FinGraph(V, E, FinMap(E, V, tuple(src)), FinMap(E, V, tuple(tgt)))


@dataclass(frozen=True)
class GraphMap:
    src: FinGraph
    dst: FinGraph
    on_vertices: FinMap
    on_edges: FinMap

    def __post_init__(self):
        f, g = self.on_vertices, self.on_edges
        if compose(self.dst.src, g) != compose(f, self.src.src):
            raise StructureError("graph map does not respect sources")
        if compose(self.dst.tgt, g) != compose(f, self.src.tgt):
            raise StructureError("graph map does not respect targets")

    def is_mono(self) -> bool:
        return is_mono(self.on_vertices) and is_mono(self.on_edges)


def _subdivision_layout(X: FinGraph, length: FinMap):
    """Vertex numbering of the subdivided graph: glued original vertices
    (ordered by least member), then interior vertices (e, r) in order."""
    ds = DisjointSet(range(X.vertices.size))
    for e in range(X.edges.size):
        if length.table[e] == 0:
            ds.merge(X.src.table[e], X.tgt.table[e])
    classes = sorted((min(c) for c in ds.subsets()))
    cls = {v: classes.index(min(ds.subset(v))) for v in range(X.vertices.size)}
    interior = {}
    n = len(classes)
    for e in range(X.edges.size):
        for r in range(1, length.table[e]):
            interior[(e, r)] = n
            n += 1
    return cls, interior, n


def subdivide(X: FinGraph, length: FinMap) -> FinGraph:
    """Replace each edge of length l >= 1 by a path of l edges; edges of
    length 0 glue their endpoints."""
    if length.dom != X.edges:
        raise StructureError("length must be a map on the edges")
    cls, interior, n = _subdivision_layout(X, length)
    src, tgt = [], []
    for e in range(X.edges.size):
        ell = length.table[e]

        def node(r):
            if r == 0:
                return cls[X.src.table[e]]
            if r == ell:
                return cls[X.tgt.table[e]]
            return interior[(e, r)]

        for r in range(ell):
            src.append(node(r))
            tgt.append(node(r + 1))
    return graph(n, src, tgt)


def subdivide_map(f: GraphMap, length_src: FinMap, length_dst: FinMap) -> GraphMap:
    """The induced map on subdivisions of a length-preserving graph map."""
    if compose(length_dst, f.on_edges) != length_src:
        raise StructureError("graph map does not preserve lengths")
    X, Y = f.src, f.dst
    SX, SY = subdivide(X, length_src), subdivide(Y, length_dst)
    cx, ix, _ = _subdivision_layout(X, length_src)
    cy, iy, _ = _subdivision_layout(Y, length_dst)
    vmap = [0] * SX.vertices.size
    for v in range(X.vertices.size):
        vmap[cx[v]] = cy[f.on_vertices.table[v]]
    for (e, r), k in ix.items():
        vmap[k] = iy[(f.on_edges.table[e], r)]

    def edge_offsets(G, length):
        out, n = {}, 0
        for e in range(G.edges.size):
            out[e] = n
            n += length.table[e]
        return out

    ox, oy = edge_offsets(X, length_src), edge_offsets(Y, length_dst)
    emap = [0] * SX.edges.size
    for e in range(X.edges.size):
        for r in range(length_src.table[e]):
            emap[ox[e] + r] = oy[f.on_edges.table[e]] + r
    return GraphMap(SX, SY, FinMap(SX.vertices, SY.vertices, tuple(vmap)),
                    FinMap(SX.edges, SY.edges, tuple(emap)))


def weber_witness() -> dict:
    """Two discrete vertices included into the same two vertices joined by an
    edge of length 0.  The inclusion is mono; its subdivision is not."""
    X = graph(2, [], [])
    Y = graph(2, [0], [1])
    lx = FinMap(X.edges, FinSet(1), ())
    ly = FinMap(Y.edges, FinSet(1), (0,))
    inc = GraphMap(X, Y, identity(X.vertices), FinMap(X.edges, Y.edges, ()))
    sub = subdivide_map(inc, lx, ly)
    return {
        "source": X.to_json(),
        "target": Y.to_json(),
        "lengths": {"source": [], "target": [0]},
        "inclusion_is_mono": inc.is_mono(),
        "subdivided_vertex_map": list(sub.on_vertices.table),
        "subdivided_is_mono": sub.is_mono(),
    }


# --- monos under s_! p* ------------------------------------------------------


LeftPart = Callable[[FinMap, FinMap, SliceMap], SliceMap]


def left_part_on_maps(s: FinMap, p: FinMap, f: SliceMap) -> SliceMap:
    """s_! p* on a map of E/B, via the fibered box in the 1-fiber."""
    return left_part_box(s, p).plain_arrow(f)


def collapsing_left_part(s: FinMap, p: FinMap, f: SliceMap) -> SliceMap:
    """A broken s_! p*: sends every element to the first element of its fiber."""
    g = left_part_on_maps(s, p, f)
    fibers = g.dst.fibers()
    table = tuple(fibers[i][0] for i in g.src.proj.table)
    return SliceMap(g.src, g.dst, FinMap(g.map.dom, g.map.cod, table))


def _monos(B: FinSet, bound: int):
    """Every subobject inclusion into every object over B of size <= bound,
    up to isomorphism of the target."""
    for Y in all_slices(B, bound):
        for r in range(Y.total.size + 1):
            for sub in itertools.combinations(range(Y.total.size), r):
                U = slice_obj(B, [Y.proj.table[u] for u in sub])
                yield SliceMap(U, Y, FinMap(U.total, Y.total, sub))


def mono_preservation_suite(bound: int = 3, impl: LeftPart = left_part_on_maps) -> Report:
    """(a) s_! p* preserves every mono for every span B <-p- E -s-> I with all
    sets of size <= bound; (b) subdivision sends a mono to a non-mono."""
    checked = 0
    failure = None
    for nB in range(bound + 1):
        B = FinSet(nB)
        monos = list(_monos(B, bound))
        for nI in range(bound + 1):
            I = FinSet(nI)
            for nE in range(bound + 1):
                if nE and not (nB and nI):
                    continue
                for cells in sorted_tables(nE, nB * nI):
                    E = FinSet(nE)
                    p = FinMap(E, B, tuple(c // nI for c in cells))
                    s = FinMap(E, I, tuple(c % nI for c in cells))
                    for f in monos:
                        checked += 1
                        if not is_mono(impl(s, p, f).map):
                            failure = {"s": list(s.table), "p": list(p.table), "I": nI, "B": nB,
                                       "mono": {"src": list(f.src.proj.table), "dst": list(f.dst.proj.table),
                                                "map": list(f.map.table)}}
                            break
                    if failure:
                        break
                if failure:
                    break
            if failure:
                break
        if failure:
            break
    witness = weber_witness()
    part_a = failure is None
    part_b = witness["inclusion_is_mono"] and not witness["subdivided_is_mono"]
    verdict = PASS if part_a and part_b else FAIL
    return Report(
        "mono_preservation",
        verdict,
        {"bound": bound},
        failure if failure else witness,
        {
            "left_parts_preserve_monos": part_a,
            "cases_checked": checked,
            "subdivision_breaks_monos": part_b,
            "subdivision_witness": witness,
            "conclusion": "subdivision is not of the form s_! p*" if verdict == PASS else None,
        },
    )


# --- G-sets --------------------------------------------------------------------


@dataclass(frozen=True)
class Group:
    """A finite group as a multiplication table on {0..n-1}."""

    table: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        t = tuple(tuple(row) for row in self.table)
        object.__setattr__(self, "table", t)
        n = len(t)
        if n == 0 or any(len(row) != n or not all(0 <= x < n for x in row) for row in t):
            raise StructureError("multiplication table must be a nonempty n x n table into n")
        for a, b, c in itertools.product(range(n), repeat=3):
            if t[t[a][b]][c] != t[a][t[b][c]]:
                raise StructureError(f"not associative at {(a, b, c)}")
        units = [e for e in range(n) if all(t[e][x] == x == t[x][e] for x in range(n))]
        if not units:
            raise StructureError("no identity element")
        e = units[0]
        for a in range(n):
            if not any(t[a][b] == e for b in range(n)):
                raise StructureError(f"{a} has no inverse")
        object.__setattr__(self, "unit", e)

    @property
    def order(self) -> int:
        return len(self.table)

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]


def cyclic_group(n: int) -> Group:
    return Group(tuple(tuple((a + b) % n for b in range(n)) for a in range(n)))


@dataclass(frozen=True)
class GSet:
    group: Group
    carrier: FinSet
    action: FinMap  # G x X -> X, (g, x) at index g*|X| + x

    def __post_init__(self):
        n, G = self.carrier.size, self.group
        if self.action.dom.size != G.order * n or self.action.cod != self.carrier:
            raise StructureError("action must be a map G x X -> X")
        for x in range(n):
            if self.act(G.unit, x) != x:
                raise StructureError(f"unit does not act trivially on {x}")
        for g, h, x in itertools.product(range(G.order), range(G.order), range(n)):
            if self.act(G.mul(g, h), x) != self.act(g, self.act(h, x)):
                raise StructureError(f"action not compatible with multiplication at {(g, h, x)}")

    def act(self, g: int, x: int) -> int:
        return self.action.table[g * self.carrier.size + x]

    def to_json(self) -> dict:
        return {"table": [list(r) for r in self.group.table], "carrier": self.carrier.size,
                "action": list(self.action.table)}

    @classmethod
    def from_json(cls, data) -> "GSet":
        return gset(Group(data["table"]), data["carrier"], data["action"])


def gset(G: Group, n: int, action) -> GSet:
    X = FinSet(n)
    return GSet(G, X, FinMap(FinSet(G.order * n), X, tuple(action)))


def trivial_gset(G: Group, n: int) -> GSet:
    return gset(G, n, [x for _ in range(G.order) for x in range(n)])


def regular_gset(G: Group) -> GSet:
    return gset(G, G.order, [G.mul(g, x) for g in range(G.order) for x in range(G.order)])


def disjoint_union(X: GSet, Y: GSet) -> GSet:
    if X.group != Y.group:
        raise StructureError("G-sets over different groups")
    nx, ny = X.carrier.size, Y.carrier.size
    table = []
    for g in range(X.group.order):
        table += [X.act(g, x) for x in range(nx)]
        table += [nx + Y.act(g, y) for y in range(ny)]
    return gset(X.group, nx + ny, table)


def all_gsets(G: Group, max_carrier: int):
    """Every G-set structure on {0..n-1}, n <= max_carrier."""
    for n in range(max_carrier + 1):
        for table in itertools.product(range(n), repeat=G.order * n):
            try:
                yield gset(G, n, table)
            except StructureError:
                continue


def equivariant_maps(X: GSet, Y: GSet):
    G = X.group
    for table in itertools.product(range(Y.carrier.size), repeat=X.carrier.size):
        if all(table[X.act(g, x)] == Y.act(g, table[x]) for g in range(G.order) for x in range(X.carrier.size)):
            yield FinMap(X.carrier, Y.carrier, table)


def fixed_point_inclusion(X: GSet) -> FinMap:
    fixed = [x for x in range(X.carrier.size) if all(X.act(g, x) == x for g in range(X.group.order))]
    return FinMap(FinSet(len(fixed)), X.carrier, tuple(fixed))


def gset_fixed_points(X: GSet) -> GSet:
    """R(X) = p* p_* X: the fixed points, acted on trivially."""
    return trivial_gset(X.group, fixed_point_inclusion(X).dom.size)


def orbit_quotient(X: GSet) -> FinMap:
    """X -> orbits, with orbits numbered by their least element."""
    ds = DisjointSet(range(X.carrier.size))
    for g in range(X.group.order):
        for x in range(X.carrier.size):
            ds.merge(x, X.act(g, x))
    reps = sorted(min(c) for c in ds.subsets())
    return FinMap(X.carrier, FinSet(len(reps)), tuple(reps.index(min(ds.subset(x))) for x in range(X.carrier.size)))


def gset_orbits(X: GSet) -> GSet:
    """p* p_! X: the orbits, acted on trivially."""
    return trivial_gset(X.group, orbit_quotient(X).cod.size)


def adjunction_counts(X: GSet, Y: GSet) -> tuple[int, int]:
    """|Hom(orbits X, Y)| and |Hom(X, fixed Y)|, by enumerating equivariant maps."""
    O, F = gset_orbits(X), gset_fixed_points(Y)
    return sum(1 for _ in equivariant_maps(O, Y)), sum(1 for _ in equivariant_maps(X, F))


def orbit_fixed_adjunction_suite(G: Group, max_carrier: int = 3) -> Report:
    sets = list(all_gsets(G, max_carrier))
    checked = 0
    for X in sets:
        for Y in sets:
            checked += 1
            left, right = adjunction_counts(X, Y)
            if left != right:
                return Report("orbits_fixed_points_adjunction", FAIL, {"max_carrier": max_carrier},
                              {"X": X.to_json(), "Y": Y.to_json(), "left": left, "right": right})
    return Report("orbits_fixed_points_adjunction", PASS, {"max_carrier": max_carrier}, None,
                  {"pairs_checked": checked, "gsets": len(sets)})


def strength_impossible(I: GSet) -> Report:
    """For I nonempty without fixed points, no map I x R(1) -> R(I) exists."""
    R1 = gset_fixed_points(trivial_gset(I.group, 1))
    RI = gset_fixed_points(I)
    source = I.carrier.size * R1.carrier.size
    if I.carrier.size == 0:
        raise PreconditionError("I is empty")
    if RI.carrier.size:
        raise PreconditionError(
            f"I has {RI.carrier.size} fixed point(s); a strength component I x R(1) -> R(I) exists"
        )
    return Report("strength_impossible", PASS, {}, {"I": I.to_json()},
                  {"size_I_times_R1": source, "size_R_of_I": RI.carrier.size,
                   "conclusion": "no strength component at X = 1"})


# --- boxes that must be rejected ------------------------------------------------


class DropWBox(FiberedFunctorBox):
    """Identity on objects, but forgets to transport along w: every morphism
    is returned with its apex map, re-based over the identity of its
    source fiber.  Fails as soon as w is not an identity."""

    name = "broken-dropw"

    def __init__(self, I: FinSet):
        self.dom_base = self.cod_base = I

    def obj(self, S):
        return S

    def arrow(self, f):
        return SpanMap(f.src, f.dst, f.v, identity(f.src.K))


class NonFiberedBox(FiberedFunctorBox):
    """Identity in fibers over sets with at most one element, empty over
    larger ones.  Its 1-fiber is the identity (a right adjoint) but it does
    not commute with base change; a finite stand-in for the fixed-point
    functor on G-sets."""

    name = "broken-nonfibered"

    def __init__(self, I: FinSet):
        self.dom_base = self.cod_base = I

    def obj(self, S):
        if S.K.size <= 1:
            return S
        M = FinSet(0)
        return Span(S.I, M, S.K, FinMap(M, S.I, ()), FinMap(M, S.K, ()))

    def arrow(self, f):
        src, dst = self.obj(f.src), self.obj(f.dst)
        if src.M.size and not dst.M.size:
            raise StructureError("no morphism into the empty image")
        v = f.v if dst is f.dst and src is f.src else FinMap(src.M, dst.M, ())
        return SpanMap(src, dst, v, f.w)


class SymmetricSquareBox(FiberedFunctorBox):
    """Unordered pairs within each cell of E/(I x K).  Fibered, but not a
    local right adjoint: the left adjoint would need Hom(W, Z) = |Z|(|Z|+1)/2."""

    name = "broken-nonlocal"

    def __init__(self, I: FinSet):
        self.dom_base = self.cod_base = I

    @memoized
    def _pairs(self, S):
        from .fibspan import to_fiber

        out = []
        for cell in to_fiber(S).fibers():
            out += [(a, b) for a, b in itertools.combinations_with_replacement(cell, 2)]
        return out, {pr: k for k, pr in enumerate(out)}

    @memoized
    def obj(self, S):
        pairs, _ = self._pairs(S)
        M = FinSet(len(pairs))
        return Span(S.I, M, S.K, FinMap(M, S.I, tuple(S.p.table[a] for a, _ in pairs)),
                    FinMap(M, S.K, tuple(S.q.table[a] for a, _ in pairs)))

    def arrow(self, f):
        src, dst = self.obj(f.src), self.obj(f.dst)
        pairs, _ = self._pairs(f.src)
        _, idx = self._pairs(f.dst)
        v = f.v.table
        table = tuple(idx[tuple(sorted((v[a], v[b])))] for a, b in pairs)
        return SpanMap(src, dst, FinMap(src.M, dst.M, table), f.w)
