"""Plain slices E/I and the adjoint triple a_! -| a* -| a_*.

Encodings:

* ``base_change(a, X)`` has the chosen pullback X x_I J as total set, elements
  are pairs ``(x, j)`` in x-major order.
* ``dep_sum(a, X)`` keeps the total set and post-composes the projection.
* ``dep_prod(a, X)`` has, over each i (in increasing order), the sections of X
  over a^-1(i).  A section is a tuple indexed by a^-1(i) in increasing j-order,
  enumerated lexicographically with the last coordinate varying fastest.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import prod
from typing import Iterator

from .finset import (
    FinMap,
    FinSet,
    StructureError,
    compose,
    identity,
    is_iso,
    is_pullback_square,
    pullback,
    pullback_index,
    pullback_pairs,
    sorted_tables,
)


@dataclass(frozen=True)
class SliceObj:
    base: FinSet
    total: FinSet
    proj: FinMap

    def __post_init__(self):
        if self.proj.dom != self.total or self.proj.cod != self.base:
            raise StructureError(
                f"structure map {self.proj.signature()} does not go from "
                f"{self.total!r} to {self.base!r}"
            )

    def fiber(self, i: int) -> list[int]:
        return self.proj.fiber(i)

    def fibers(self) -> list[list[int]]:
        return self.proj.fibers()

    def fiber_sizes(self) -> tuple[int, ...]:
        return self.proj.fiber_sizes()

    def to_json(self) -> dict:
        return {"base": self.base.to_json(), "total": self.total.to_json(), "proj": self.proj.to_json()}

    @classmethod
    def from_json(cls, data) -> "SliceObj":
        proj = FinMap.from_json(data["proj"])
        base = FinSet.from_json(data["base"]) if "base" in data else proj.cod
        total = FinSet.from_json(data["total"]) if "total" in data else proj.dom
        return cls(base, total, proj)


def slice_obj(base, table) -> SliceObj:
    """Convenience constructor from a base (set or size) and a table."""
    if isinstance(base, int):
        base = FinSet(base)
    total = FinSet(len(table))
    return SliceObj(base, total, FinMap(total, base, tuple(table)))


def from_counts(base: FinSet, counts) -> SliceObj:
    """The canonical object with ``counts[i]`` elements over i, sorted by i."""
    table = [i for i, n in enumerate(counts) for _ in range(n)]
    return slice_obj(base, table)


@dataclass(frozen=True)
class SliceMap:
    src: SliceObj
    dst: SliceObj
    map: FinMap

    def __post_init__(self):
        if self.src.base != self.dst.base:
            raise StructureError(f"slice map between different bases {self.src.base!r}, {self.dst.base!r}")
        if self.map.dom != self.src.total or self.map.cod != self.dst.total:
            raise StructureError(f"underlying map {self.map.signature()} does not fit the slice objects")
        if compose(self.dst.proj, self.map) != self.src.proj:
            raise StructureError(f"triangle over the base does not commute for {self.map!r}")

    @property
    def base(self) -> FinSet:
        return self.src.base


def slice_identity(X: SliceObj) -> SliceMap:
    return SliceMap(X, X, identity(X.total))


def slice_compose(g: SliceMap, f: SliceMap) -> SliceMap:
    if f.dst != g.src:
        raise StructureError("slice maps are not composable")
    return SliceMap(f.src, g.dst, compose(g.map, f.map))


def is_slice_iso(f: SliceMap) -> bool:
    return is_iso(f.map)


def fiberwise_isomorphic(X: SliceObj, Y: SliceObj) -> bool:
    """Isomorphism over a common base; for finite sets this is equality of
    fiber cardinalities."""
    return X.base == Y.base and X.fiber_sizes() == Y.fiber_sizes()


def homs(X: SliceObj, Y: SliceObj) -> Iterator[SliceMap]:
    """Every map X -> Y over the common base."""
    if X.base != Y.base:
        raise StructureError("hom-set between slices over different bases")
    fib = Y.fibers()
    choices = [fib[i] for i in X.proj.table]
    for table in itertools.product(*choices):
        yield SliceMap(X, Y, FinMap(X.total, Y.total, table))


def hom_count(X: SliceObj, Y: SliceObj) -> int:
    if X.base != Y.base:
        raise StructureError("hom-set between slices over different bases")
    sizes = Y.fiber_sizes()
    return prod(sizes[i] for i in X.proj.table)


def all_slices(base: FinSet, max_total: int, canonical: bool = True) -> Iterator[SliceObj]:
    """Objects over ``base`` with total size <= max_total.

    With ``canonical`` only one representative per isomorphism class is
    produced (sorted structure map); otherwise every structure map is."""
    for n in range(max_total + 1):
        if canonical:
            tables = sorted_tables(n, base.size)
        else:
            tables = itertools.product(range(base.size), repeat=n)
        for table in tables:
            yield slice_obj(base, table)


# --- base change a* -------------------------------------------------------


def _check_base(a_end: FinSet, X: SliceObj, what: str):
    if a_end != X.base:
        raise StructureError(f"{what}: map end {a_end!r} does not match slice base {X.base!r}")


def base_change(a: FinMap, X: SliceObj) -> SliceObj:
    """a* X for a: J -> I and X over I."""
    _check_base(a.cod, X, "base_change")
    P, _, pr2 = pullback(X.proj, a)
    return SliceObj(a.dom, P, pr2)


def base_change_pairs(a: FinMap, X: SliceObj) -> tuple[tuple[int, int], ...]:
    return pullback_pairs(X.proj, a)


def base_change_map(a: FinMap, f: SliceMap) -> SliceMap:
    src, dst = base_change(a, f.src), base_change(a, f.dst)
    idx = pullback_index(f.dst.proj, a)
    m = f.map.table
    table = tuple(idx[(m[x], j)] for x, j in pullback_pairs(f.src.proj, a))
    return SliceMap(src, dst, FinMap(src.total, dst.total, table))


# --- dependent sum a_! ----------------------------------------------------


def dep_sum(a: FinMap, X: SliceObj) -> SliceObj:
    """a_! X for a: J -> I and X over J."""
    _check_base(a.dom, X, "dep_sum")
    return SliceObj(a.cod, X.total, compose(a, X.proj))


def dep_sum_map(a: FinMap, f: SliceMap) -> SliceMap:
    return SliceMap(dep_sum(a, f.src), dep_sum(a, f.dst), f.map)


# --- dependent product a_* ------------------------------------------------


@lru_cache(maxsize=16384)
def sections(a: FinMap, X: SliceObj) -> tuple[tuple[int, tuple[int, ...]], ...]:
    """Elements of a_* X as (i, section) in the documented order."""
    _check_base(a.dom, X, "dep_prod")
    afib = a.fibers()
    xfib = X.fibers()
    out = []
    for i in range(a.cod.size):
        for sec in itertools.product(*(xfib[j] for j in afib[i])):
            out.append((i, sec))
    return tuple(out)


@lru_cache(maxsize=16384)
def sections_index(a: FinMap, X: SliceObj) -> dict[tuple[int, tuple[int, ...]], int]:
    return {el: k for k, el in enumerate(sections(a, X))}


def dep_prod(a: FinMap, X: SliceObj) -> SliceObj:
    """a_* X for a: J -> I and X over J."""
    secs = sections(a, X)
    total = FinSet(len(secs))
    return SliceObj(a.cod, total, FinMap(total, a.cod, tuple(i for i, _ in secs)))


def dep_prod_map(a: FinMap, f: SliceMap) -> SliceMap:
    src, dst = dep_prod(a, f.src), dep_prod(a, f.dst)
    idx = sections_index(a, f.dst)
    m = f.map.table
    table = tuple(idx[(i, tuple(m[x] for x in sec))] for i, sec in sections(a, f.src))
    return SliceMap(src, dst, FinMap(src.total, dst.total, table))


# --- units and counits ----------------------------------------------------


def sum_unit(a: FinMap, Y: SliceObj) -> SliceMap:
    """Y -> a* a_! Y  (unit of a_! -| a*), Y over J."""
    SY = dep_sum(a, Y)
    dst = base_change(a, SY)
    idx = pullback_index(SY.proj, a)
    table = tuple(idx[(y, Y.proj.table[y])] for y in range(Y.total.size))
    return SliceMap(Y, dst, FinMap(Y.total, dst.total, table))


def sum_counit(a: FinMap, X: SliceObj) -> SliceMap:
    """a_! a* X -> X  (counit of a_! -| a*), X over I."""
    src = dep_sum(a, base_change(a, X))
    table = tuple(x for x, _ in pullback_pairs(X.proj, a))
    return SliceMap(src, X, FinMap(src.total, X.total, table))


def prod_unit(a: FinMap, X: SliceObj) -> SliceMap:
    """X -> a_* a* X  (unit of a* -| a_*), X over I."""
    BX = base_change(a, X)
    dst = dep_prod(a, BX)
    idx_pb = pullback_index(X.proj, a)
    idx = sections_index(a, BX)
    afib = a.fibers()
    table = []
    for x in range(X.total.size):
        i = X.proj.table[x]
        sec = tuple(idx_pb[(x, j)] for j in afib[i])
        table.append(idx[(i, sec)])
    return SliceMap(X, dst, FinMap(X.total, dst.total, tuple(table)))


def prod_counit(a: FinMap, Y: SliceObj) -> SliceMap:
    """a* a_* Y -> Y  (counit of a* -| a_*), Y over J."""
    PY = dep_prod(a, Y)
    src = base_change(a, PY)
    secs = sections(a, Y)
    afib = a.fibers()
    pos = {}
    for i, js in enumerate(afib):
        for n, j in enumerate(js):
            pos[j] = n
    table = tuple(secs[s][1][pos[j]] for s, j in pullback_pairs(PY.proj, a))
    return SliceMap(src, Y, FinMap(src.total, Y.total, table))


def sum_transpose(a: FinMap, Y: SliceObj, X: SliceObj, g: SliceMap) -> SliceMap:
    """Hom(a_! Y, X) -> Hom(Y, a* X)."""
    return slice_compose(base_change_map(a, g), sum_unit(a, Y))


def sum_untranspose(a: FinMap, Y: SliceObj, X: SliceObj, f: SliceMap) -> SliceMap:
    """Hom(Y, a* X) -> Hom(a_! Y, X)."""
    return slice_compose(sum_counit(a, X), dep_sum_map(a, f))


def prod_transpose(a: FinMap, X: SliceObj, Y: SliceObj, g: SliceMap) -> SliceMap:
    """Hom(a* X, Y) -> Hom(X, a_* Y)."""
    return slice_compose(dep_prod_map(a, g), prod_unit(a, X))


def prod_untranspose(a: FinMap, X: SliceObj, Y: SliceObj, f: SliceMap) -> SliceMap:
    """Hom(X, a_* Y) -> Hom(a* X, Y)."""
    return slice_compose(prod_counit(a, Y), base_change_map(a, f))


# --- Beck-Chevalley -------------------------------------------------------


@dataclass(frozen=True)
class Square:
    """P -b-> C, P -u-> A, C -v-> D, A -a-> D."""

    u: FinMap
    b: FinMap
    v: FinMap
    a: FinMap

    def to_json(self) -> dict:
        return {k: getattr(self, k).to_json() for k in ("u", "b", "v", "a")}

    @classmethod
    def from_json(cls, data) -> "Square":
        return cls(*(FinMap.from_json(data[k]) for k in ("u", "b", "v", "a")))


def chosen_square(a: FinMap, v: FinMap) -> Square:
    P, u, b = pullback(a, v)
    return Square(u, b, v, a)


def beck_chevalley(square: Square, Y: SliceObj) -> tuple[SliceMap, bool]:
    """The comparison u_! b* Y -> a* v_! Y for Y over C, and whether it is
    invertible.  Rejects squares that are not pullbacks."""
    u, b, v, a = square.u, square.b, square.v, square.a
    if b.dom != u.dom or v.dom != b.cod or a.dom != u.cod or a.cod != v.cod:
        raise StructureError("square maps do not fit together")
    if compose(v, b) != compose(a, u):
        raise StructureError("square does not commute")
    if not is_pullback_square(u, b, v, a):
        raise StructureError("square commutes but is not a pullback")
    _check_base(b.cod, Y, "beck_chevalley")
    src = dep_sum(u, base_change(b, Y))
    vY = dep_sum(v, Y)
    dst = base_change(a, vY)
    idx = pullback_index(vY.proj, a)
    table = tuple(idx[(y, u.table[x])] for y, x in pullback_pairs(Y.proj, b))
    f = SliceMap(src, dst, FinMap(src.total, dst.total, table))
    return f, is_iso(f.map)
