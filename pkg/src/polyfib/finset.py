"""Finite sets {0..n-1} and total functions between them.

This is the ambient category of everything else in the package.  Elements are
always indices; labels are carried along for display only.  Products and
pullbacks are chosen once and for all with lexicographic (first-factor-major)
element order.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Optional, Sequence


class StructureError(ValueError):
    """Raised when maps or objects do not fit together (domain/codomain mismatch)."""


@dataclass(frozen=True)
class FinSet:
    size: int
    labels: Optional[tuple[str, ...]] = None

    def __post_init__(self):
        if self.size < 0:
            raise StructureError(f"negative size {self.size}")
        if self.labels is not None:
            labels = tuple(self.labels)
            object.__setattr__(self, "labels", labels)
            if len(labels) != self.size:
                raise StructureError(
                    f"{len(labels)} labels given for a set of size {self.size}"
                )
            if len(set(labels)) != len(labels):
                raise StructureError(f"labels are not distinct: {labels}")

    def __len__(self):
        return self.size

    def __iter__(self):
        return iter(range(self.size))

    def name(self, i: int) -> str:
        return self.labels[i] if self.labels is not None else str(i)

    def __repr__(self):
        if self.labels is None:
            return f"FinSet({self.size})"
        return f"FinSet({self.size}, {list(self.labels)})"

    def to_json(self) -> dict:
        out: dict = {"size": self.size}
        if self.labels is not None:
            out["labels"] = list(self.labels)
        return out

    @classmethod
    def from_json(cls, data) -> "FinSet":
        if isinstance(data, int):
            return cls(data)
        labels = data.get("labels")
        return cls(int(data["size"]), tuple(labels) if labels is not None else None)


@dataclass(frozen=True)
class FinMap:
    dom: FinSet
    cod: FinSet
    table: tuple[int, ...]

    def __post_init__(self):
        table = self.table
        if type(table) is not tuple:
            table = tuple(int(x) for x in table)
            object.__setattr__(self, "table", table)
        if len(table) != self.dom.size:
            raise StructureError(
                f"table has length {len(table)} but domain has size {self.dom.size}"
            )
        if table and (min(table) < 0 or max(table) >= self.cod.size):
            bad = next(x for x in table if not 0 <= x < self.cod.size)
            raise StructureError(f"table entry {bad} outside codomain {self.cod}")

    def __call__(self, i: int) -> int:
        return self.table[i]

    def __repr__(self):
        return f"FinMap({self.dom.size}->{self.cod.size}, {list(self.table)})"

    def signature(self) -> str:
        return f"{self.dom!r} -> {self.cod!r}"

    def fiber(self, c: int) -> list[int]:
        return [i for i, x in enumerate(self.table) if x == c]

    def fibers(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.cod.size)]
        for i, x in enumerate(self.table):
            out[x].append(i)
        return out

    def fiber_sizes(self) -> tuple[int, ...]:
        counts = [0] * self.cod.size
        for x in self.table:
            counts[x] += 1
        return tuple(counts)

    def to_json(self) -> dict:
        return {"dom": self.dom.to_json(), "cod": self.cod.to_json(), "table": list(self.table)}

    @classmethod
    def from_json(cls, data) -> "FinMap":
        return cls(FinSet.from_json(data["dom"]), FinSet.from_json(data["cod"]), tuple(data["table"]))


def finset(n: int) -> FinSet:
    return FinSet(n)


def finmap(dom, cod, table: Sequence[int]) -> FinMap:
    """Build a map; ``dom``/``cod`` may be given as sizes."""
    if isinstance(dom, int):
        dom = FinSet(dom)
    if isinstance(cod, int):
        cod = FinSet(cod)
    return FinMap(dom, cod, tuple(table))


def identity(A: FinSet) -> FinMap:
    return FinMap(A, A, tuple(range(A.size)))


def compose(g: FinMap, f: FinMap) -> FinMap:
    """g after f."""
    if f.cod != g.dom:
        raise StructureError(
            f"cannot compose g: {g.signature()} after f: {f.signature()}"
        )
    gt = g.table
    return FinMap(f.dom, g.cod, tuple(gt[x] for x in f.table))


def terminal() -> FinSet:
    return FinSet(1)


def unique_to_terminal(A: FinSet) -> FinMap:
    return FinMap(A, terminal(), (0,) * A.size)


def initial() -> FinSet:
    return FinSet(0)


def unique_from_initial(A: FinSet) -> FinMap:
    return FinMap(FinSet(0), A, ())


def constant(A: FinSet, B: FinSet, b: int) -> FinMap:
    return FinMap(A, B, (b,) * A.size)


@lru_cache(maxsize=4096)
def product(A: FinSet, B: FinSet) -> tuple[FinSet, FinMap, FinMap]:
    """A x B with element (a, b) at index a*|B| + b, and its two projections."""
    P = FinSet(A.size * B.size)
    n = B.size
    pr1 = FinMap(P, A, tuple(k // n for k in range(P.size)) if n else ())
    pr2 = FinMap(P, B, tuple(k % n for k in range(P.size)) if n else ())
    return P, pr1, pr2


def pair_index(a: int, b: int, B: FinSet) -> int:
    return a * B.size + b


def pairing(f: FinMap, g: FinMap) -> FinMap:
    """<f, g> : X -> A x B."""
    if f.dom != g.dom:
        raise StructureError(f"pairing needs a common domain: {f.signature()} vs {g.signature()}")
    P, _, _ = product(f.cod, g.cod)
    n = g.cod.size
    return FinMap(f.dom, P, tuple(a * n + b for a, b in zip(f.table, g.table)))


@lru_cache(maxsize=65536)
def product_map(f: FinMap, g: FinMap) -> FinMap:
    """f x g : A x B -> A' x B'."""
    P, _, _ = product(f.dom, g.dom)
    Q, _, _ = product(f.cod, g.cod)
    n, n2 = g.dom.size, g.cod.size
    table = []
    for k in range(P.size):
        a, b = divmod(k, n)
        table.append(f.table[a] * n2 + g.table[b])
    return FinMap(P, Q, tuple(table))


@lru_cache(maxsize=65536)
def pullback_pairs(f: FinMap, g: FinMap) -> tuple[tuple[int, int], ...]:
    """Elements of the chosen pullback as (a, b) pairs in a-major order."""
    if f.cod != g.cod:
        raise StructureError(
            f"pullback needs a common codomain: {f.signature()} vs {g.signature()}"
        )
    by_value = g.fibers()
    return tuple((a, b) for a, c in enumerate(f.table) for b in by_value[c])


@lru_cache(maxsize=65536)
def pullback_index(f: FinMap, g: FinMap) -> dict[tuple[int, int], int]:
    return {pr: k for k, pr in enumerate(pullback_pairs(f, g))}


def pullback(f: FinMap, g: FinMap) -> tuple[FinSet, FinMap, FinMap]:
    """A x_C B for f: A -> C, g: B -> C, with its two projections."""
    pairs = pullback_pairs(f, g)
    P = FinSet(len(pairs))
    pr1 = FinMap(P, f.dom, tuple(a for a, _ in pairs))
    pr2 = FinMap(P, g.dom, tuple(b for _, b in pairs))
    return P, pr1, pr2


def is_mono(f: FinMap) -> bool:
    return len(set(f.table)) == len(f.table)


def is_epi(f: FinMap) -> bool:
    return len(set(f.table)) == f.cod.size


def is_iso(f: FinMap) -> bool:
    return f.dom.size == f.cod.size and is_mono(f)


def inverse(f: FinMap) -> FinMap:
    if not is_iso(f):
        raise StructureError(f"{f!r} is not invertible")
    inv = [0] * f.cod.size
    for i, x in enumerate(f.table):
        inv[x] = i
    return FinMap(f.cod, f.dom, tuple(inv))


def all_maps(A: FinSet, B: FinSet) -> Iterator[FinMap]:
    """Every map A -> B, lexicographically with the last entry varying fastest."""
    for table in itertools.product(range(B.size), repeat=A.size):
        yield FinMap(A, B, table)


def all_bijections(A: FinSet, B: FinSet) -> Iterator[FinMap]:
    if A.size != B.size:
        return
    for perm in itertools.permutations(range(B.size)):
        yield FinMap(A, B, perm)


def sorted_tables(n: int, c: int) -> Iterator[tuple[int, ...]]:
    """Non-decreasing tables of length n into c: one representative per
    isomorphism class of objects of size n over a c-element base."""
    return itertools.combinations_with_replacement(range(c), n)


def is_pullback_square(u: FinMap, b: FinMap, v: FinMap, a: FinMap) -> bool:
    """Square P -b-> C, P -u-> A, C -v-> D, A -a-> D.

    True when it commutes and P -> A x_D C is a bijection."""
    if b.dom != u.dom or v.dom != b.cod or a.dom != u.cod or a.cod != v.cod:
        return False
    if compose(v, b) != compose(a, u):
        return False
    idx = pullback_index(a, v)
    seen = set()
    for x in range(u.dom.size):
        k = idx[(u.table[x], b.table[x])]
        if k in seen:
            return False
        seen.add(k)
    return len(seen) == len(idx)
