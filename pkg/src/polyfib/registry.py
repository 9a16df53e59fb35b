"""Named box families, so that a functor can be chosen from a JSON file.

A box spec is ``{"family": name, ...parameters}``:

* ``polynomial``: ``{"polynomial": <Polynomial JSON>}``
* ``base-change``: ``{"a": <FinMap JSON>}`` for a: J -> I, giving a*: E|I -> E|J
* ``identity``, ``broken-dropw``, ``broken-nonfibered``, ``broken-nonlocal``:
  ``{"I": n}``
"""

from __future__ import annotations

from .examples import DropWBox, NonFiberedBox, SymmetricSquareBox
from .fibspan import FiberedFunctorBox, IdentityBox, base_change_box
from .finset import FinMap, FinSet, StructureError
from .poly import Polynomial, PolynomialBox


def _sized(cls):
    return lambda spec: cls(FinSet.from_json(spec["I"]))


FAMILIES = {
    "polynomial": lambda spec: PolynomialBox(Polynomial.from_json(spec["polynomial"])),
    "base-change": lambda spec: base_change_box(FinMap.from_json(spec["a"])),
    "identity": _sized(IdentityBox),
    "broken-dropw": _sized(DropWBox),
    "broken-nonfibered": _sized(NonFiberedBox),
    "broken-nonlocal": _sized(SymmetricSquareBox),
}


def build_box(spec: dict) -> FiberedFunctorBox:
    family = spec.get("family")
    if family not in FAMILIES:
        raise StructureError(f"unknown box family {family!r}; known: {', '.join(sorted(FAMILIES))}")
    try:
        return FAMILIES[family](spec)
    except KeyError as exc:
        raise StructureError(f"box spec for {family!r} is missing {exc}") from None
