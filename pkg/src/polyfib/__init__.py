"""Polynomial functors over finite sets as local fibered right adjoints."""

from .extract import converse_check, extract_polynomial, adjoint_search, verify_certificate, factor
from .fibspan import (
    Budget,
    IdentityBox,
    Span,
    SpanBox,
    SpanMap,
    audit_fibered,
    audit_sums,
    base_change_box,
    cartesian_lift,
    delta,
    opcartesian_lift,
    strength,
    sum_box,
)
from .finset import FinMap, FinSet, StructureError, compose, finmap, identity, pullback
from .mainlemma import extract_basechange, extract_span, h_apply, h_on_morphisms
from .poly import Polynomial, PolynomialBox, bridge_equivalent, eval_fibered, eval_plain, polynomial
from .report import ExtractionError, Report
from .slice import SliceMap, SliceObj, base_change, beck_chevalley, dep_prod, dep_sum, slice_obj

__all__ = [
    "Budget",
    "ExtractionError",
    "FinMap",
    "FinSet",
    "IdentityBox",
    "Polynomial",
    "PolynomialBox",
    "Report",
    "SliceMap",
    "SliceObj",
    "Span",
    "SpanBox",
    "SpanMap",
    "StructureError",
    "adjoint_search",
    "audit_fibered",
    "audit_sums",
    "base_change",
    "base_change_box",
    "beck_chevalley",
    "bridge_equivalent",
    "cartesian_lift",
    "compose",
    "converse_check",
    "delta",
    "dep_prod",
    "dep_sum",
    "eval_fibered",
    "eval_plain",
    "extract_basechange",
    "extract_polynomial",
    "extract_span",
    "factor",
    "finmap",
    "h_apply",
    "h_on_morphisms",
    "identity",
    "opcartesian_lift",
    "polynomial",
    "pullback",
    "slice_obj",
    "strength",
    "sum_box",
    "verify_certificate",
]

__version__ = "0.1.0"
