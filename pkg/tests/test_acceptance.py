"""Acceptance criteria, one test each.  Every test prints a single
``criterion N: PASS|FAIL`` line to the terminal, even under output capture."""

import itertools
import random
import subprocess
import sys
import time

import pytest

from polyfib.examples import (
    cyclic_group,
    gset_fixed_points,
    mono_preservation_suite,
    orbit_fixed_adjunction_suite,
    regular_gset,
    strength_impossible,
)
from polyfib.extract import converse_check, extract_polynomial
from polyfib.fibspan import IdentityBox, SpanBox, all_spans, base_change_box, delta, strength, strength_natural
from polyfib.finset import FinMap, FinSet, product
from polyfib.laws import adjoint_triple_suite, beck_chevalley_suite
from polyfib.mainlemma import extract_span, h_apply, spans_equivalent
from polyfib.poly import bridge_equivalent, eval_fibered, left_part_box, random_polynomial
from polyfib.slice import all_slices, fiberwise_isomorphic, homs, is_slice_iso, slice_obj

SEED = 0


@pytest.fixture
def verdict(pytestconfig):
    """Call with (number, ok, detail); prints the line and returns ok."""
    capman = pytestconfig.pluginmanager.getplugin("capturemanager")

    def report(n, ok, detail=""):
        with capman.global_and_fixture_disabled():
            print(f"\ncriterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
        return ok

    return report


@pytest.fixture(scope="module")
def polynomials():
    rng = random.Random(SEED)
    return [random_polynomial(rng, 3) for _ in range(200)]


def test_criterion_1_adjoint_triple(verdict):
    start = time.perf_counter()
    report = adjoint_triple_suite(bound=3, max_total=4, seed=SEED)
    elapsed = time.perf_counter() - start
    ok = report.ok and elapsed < 60
    assert verdict(1, ok, f"adjoint triple, |I|,|J|<=3, total<=4, {report.details['checks']} checks, {elapsed:.1f}s")


def test_criterion_2_beck_chevalley(verdict):
    report = beck_chevalley_suite(bound=3, seed=SEED)
    ok = report.ok and report.details["non_pullback_controls_rejected"] > 0
    assert verdict(2, ok, f"{report.details['squares']} pullback squares, "
                          f"{report.details['non_pullback_controls_rejected']} non-pullback squares rejected")


def test_criterion_3_main_lemma_round_trip(verdict):
    ok = True
    objects = spans = 0
    for nJ, nI in itertools.product(range(4), range(1, 4)):
        J, I = FinSet(nJ), FinSet(nI)
        for X in all_slices(product(J, I)[0], 4):
            objects += 1
            ok &= fiberwise_isomorphic(h_apply(X, delta(I), J), X)
    for nI, nJ in itertools.product(range(1, 4), range(4)):
        for S in all_spans(FinSet(nI), FinSet(nJ), 3):
            spans += 1
            got, report = extract_span(SpanBox(S.p, S.q))
            ok &= report.ok and spans_equivalent(got, S)
    assert verdict(3, ok, f"h(X, delta) ~ X on {objects} objects; extract_span round trip on {spans} spans")


def test_criterion_4_main_theorem_round_trip(verdict, polynomials):
    start = time.perf_counter()
    failures = []
    for n, P in enumerate(polynomials):
        Q, report = extract_polynomial(eval_fibered(P), size_bound=9)
        if not (report.ok and bridge_equivalent(P, Q)[0]):
            failures.append(n)
    elapsed = time.perf_counter() - start
    ok = not failures and elapsed < 600
    assert verdict(4, ok, f"{len(polynomials) - len(failures)}/{len(polynomials)} bridge equivalent, {elapsed:.1f}s")


def test_criterion_5_converse(verdict, polynomials):
    bad = [n for n, P in enumerate(polynomials) if not converse_check(P, bound=3).ok]
    assert verdict(5, not bad, f"{len(polynomials) - len(bad)}/{len(polynomials)} polynomials")


def test_criterion_6_weber_separation(verdict):
    report = mono_preservation_suite(3)
    w = report.details["subdivision_witness"]
    ok = report.ok and w["inclusion_is_mono"] and not w["subdivided_is_mono"] and w["subdivided_vertex_map"] == [0, 0]
    assert verdict(6, ok, f"{report.details['cases_checked']} monos preserved; subdivision witness 2 -> 1")


def test_criterion_7_gset_impossibility(verdict):
    G = cyclic_group(2)
    I = regular_gset(G)
    report = strength_impossible(I)
    adj = orbit_fixed_adjunction_suite(G, 3)
    ok = (gset_fixed_points(I).carrier.size == 0
          and report.details["size_I_times_R1"] == 2
          and report.ok and adj.ok)
    assert verdict(7, ok, f"|R(I)|=0, |I x R(1)|=2; adjunction on {adj.details['pairs_checked']} pairs")


def _left_adjoint_boxes():
    I = FinSet(2)
    yield IdentityBox(I)
    yield base_change_box(FinMap(FinSet(3), I, (0, 1, 1)))
    yield SpanBox(FinMap(FinSet(3), I, (0, 1, 1)), FinMap(FinSet(3), FinSet(2), (1, 1, 0)))
    yield left_part_box(FinMap(FinSet(2), I, (1, 1)), FinMap(FinSet(2), FinSet(1), (0, 0)))


def test_criterion_8_strength(verdict, polynomials):
    rng = random.Random(SEED)
    ok, isos, squares = True, 0, 0
    for box in _left_adjoint_boxes():
        for nS in range(4):
            for xi in all_slices(box.dom_base, 3):
                isos += 1
                ok &= is_slice_iso(strength(box, FinSet(nS), xi))
    for P in polynomials[:50]:
        F = eval_fibered(P)
        for _ in range(4):
            S, S2 = FinSet(rng.randint(0, 3)), FinSet(rng.randint(1, 3))
            f = FinMap(S, S2, tuple(rng.randrange(S2.size) for _ in range(S.size)))
            xi2 = slice_obj(P.I, [rng.randrange(P.I.size) for _ in range(rng.randint(0, 3))] if P.I.size else [])
            xi = slice_obj(P.I, sorted(rng.choice(xi2.proj.table) for _ in range(rng.randint(0, 3))) if xi2.total.size else [])
            g = next(homs(xi, xi2))
            squares += 1
            ok &= strength_natural(F, f, g)
    assert verdict(8, ok, f"{isos} strength maps invertible; {squares} naturality squares commute")


def _cli(*args):
    return subprocess.run([sys.executable, "-m", "polyfib.cli", *args], capture_output=True, check=False).stdout


def test_criterion_9_determinism(verdict, tmp_path):
    spec = tmp_path / "box.json"
    spec.write_text('{"family": "broken-nonlocal", "I": 1}')
    runs = [
        ("laws", "--bound", "2", "--seed", "17", "--json"),
        ("examples", "gset", "--seed", "17", "--json"),
        ("extract", str(spec), "--seed", "17", "--size-bound", "4", "--json"),
    ]
    ok = all(_cli(*r) == _cli(*r) and _cli(*r) for r in runs)
    assert verdict(9, ok, "identical --seed gives byte-identical JSON for laws, examples, extract")
