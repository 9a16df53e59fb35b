"""Hypothesis strategies for small finite data."""

from hypothesis import strategies as st

from polyfib.finset import FinMap, FinSet
from polyfib.fibspan import Span
from polyfib.poly import polynomial
from polyfib.slice import slice_obj

sizes = st.integers(min_value=0, max_value=3)


@st.composite
def finsets(draw, max_size=3):
    return FinSet(draw(st.integers(0, max_size)))


@st.composite
def maps(draw, dom=None, cod=None, max_size=3):
    if dom is not None:
        A = dom
    elif cod is not None and not cod.size:
        A = FinSet(0)
    else:
        A = draw(finsets(max_size))
    if cod is None:
        cod = FinSet(draw(st.integers(1 if A.size else 0, max_size)))
    if A.size and not cod.size:
        cod = FinSet(1)
    table = draw(st.lists(st.integers(0, max(cod.size - 1, 0)), min_size=A.size, max_size=A.size))
    return FinMap(A, cod, tuple(table))


@st.composite
def slices(draw, base=None, max_total=3, max_base=3):
    B = base if base is not None else draw(finsets(max_base))
    if not B.size:
        return slice_obj(B, [])
    table = draw(st.lists(st.integers(0, B.size - 1), max_size=max_total))
    return slice_obj(B, table)


@st.composite
def spans(draw, I=None, K=None, max_apex=3):
    I = I if I is not None else draw(finsets())
    K = K if K is not None else draw(finsets())
    n = draw(st.integers(0, max_apex)) if I.size and K.size else 0
    M = FinSet(n)
    p = draw(st.lists(st.integers(0, max(I.size - 1, 0)), min_size=n, max_size=n))
    q = draw(st.lists(st.integers(0, max(K.size - 1, 0)), min_size=n, max_size=n))
    return Span(I, M, K, FinMap(M, I, tuple(p)), FinMap(M, K, tuple(q)))


@st.composite
def polynomials(draw, max_size=3):
    nI, nJ = draw(sizes), draw(sizes)
    nB = draw(st.integers(0, max_size)) if nJ else 0
    nE = draw(st.integers(0, max_size)) if nI and nB else 0
    s = draw(st.lists(st.integers(0, max(nI - 1, 0)), min_size=nE, max_size=nE))
    p = draw(st.lists(st.integers(0, max(nB - 1, 0)), min_size=nE, max_size=nE))
    t = draw(st.lists(st.integers(0, max(nJ - 1, 0)), min_size=nB, max_size=nB))
    return polynomial(nI, nJ, s, p, t)
