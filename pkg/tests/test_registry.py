import pytest

from polyfib.examples import DropWBox
from polyfib.fibspan import IdentityBox
from polyfib.finset import StructureError, finmap
from polyfib.poly import polynomial
from polyfib.registry import FAMILIES, build_box


def test_every_family_builds():
    P = polynomial(1, 1, [0], [0], [0])
    specs = {
        "polynomial": {"polynomial": P.to_json()},
        "base-change": {"a": finmap(1, 2, [1]).to_json()},
    }
    for family in FAMILIES:
        spec = {"family": family, **specs.get(family, {"I": 2})}
        box = build_box(spec)
        assert box.dom_base.size in (1, 2)
    assert isinstance(build_box({"family": "identity", "I": 1}), IdentityBox)
    assert isinstance(build_box({"family": "broken-dropw", "I": 1}), DropWBox)


def test_unknown_family():
    with pytest.raises(StructureError, match="unknown box family"):
        build_box({"family": "free-category"})
