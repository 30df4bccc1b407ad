"""The acceptance criteria, each at its stated size and time limit.

Every test records one pass/fail line, shown in the terminal summary.
"""
import random
import time
from contextlib import contextmanager
from importlib import resources

import pytest

from conftest import ACCEPTANCE
from test_modcon import coend

from framedkit import catalog
from framedkit.cli import canonical, run
from framedkit.duality import (base_change_arrow, check_base_change_pairs, check_mates,
                               search_dual_pairs)
from framedkit.fibcon import ARR, FAM, check_bc_pullbacks
from framedkit.finkit import FinSet
from framedkit.functors import cartesian_witness_fixture
from framedkit.lawsuite import (cartesian_comparison, check_double_axioms, check_equivalence, check_framed_adjunction,
                                check_framed_functor, check_framed_structure)
from framedkit.matinst import MatInstance
from framedkit.modcon import (ModInstance, bimodule_to_profunctor, check_category_roundtrip,
                              fincat_to_monoid, profunctors_isomorphic, random_category)
from framedkit.spaninst import SpanInstance

FIXTURES = resources.files("framedkit") / "fixtures"


@contextmanager
def criterion(label, limit=None):
    start = time.perf_counter()
    ok = False
    try:
        yield
        ok = True
    finally:
        took = time.perf_counter() - start
        if ok and limit is not None and took >= limit:
            ok = False
        bound = f", limit {limit} s" if limit is not None else ""
        ACCEPTANCE.append(f"{'PASS' if ok else 'FAIL'}  {label}  ({took:.1f} s{bound})")
    assert took < (limit or float("inf")), f"{label} took {took:.1f} s"


@pytest.mark.parametrize("inst", [SpanInstance(), MatInstance()], ids=["span", "mat"])
def test_1_framed_axiom_suite(inst):
    with criterion(f"1 double axioms on {inst.name}", 60):
        report = check_double_axioms(inst, seed=0, samples=200, cap=5)
        assert report.ok, report.witness
    with criterion(f"1 framed structure on {inst.name}", 60):
        report = check_framed_structure(inst, seed=0, samples=200, cap=5)
        assert report.ok, report.witness


@pytest.mark.parametrize("name", ["compare-arr", "compare-fam"])
def test_2_construction_cross_check(name):
    with criterion(f"2 {name} comparison is strong"):
        F = catalog.lookup(catalog.FUNCTORS, "functor", name)
        report = check_framed_functor(F, seed=0, samples=100)
        assert report.ok, report.witness
        assert report.facts["certified"].endswith("strong")
    with criterion(f"2 {name} equivalence, 100 samples", 120):
        F, choices = catalog.lookup(catalog.EQUIVALENCES, "equivalence", name)
        report = check_equivalence(F, choices, seed=0, samples=100)
        assert report.ok, report.witness


def test_3_mod_round_trips():
    for base in (SpanInstance(), MatInstance()):
        with criterion(f"3 category roundtrip over {base.name}, ≤2 objects, ≤4 morphisms"):
            assert check_category_roundtrip(base, 2, 4).ok
    with criterion("3 tensor against the coend oracle, 60 pairs, ≤3 objects"):
        base = SpanInstance()
        mod = ModInstance(base)
        for i in range(60):
            rng = random.Random(f"acceptance-coend:{i}")
            A, B, C = (fincat_to_monoid(base, random_category(rng, 3, p)) for p in "xyz")
            M, N = mod.random_cell(rng, A, B), mod.random_cell(rng, B, C)
            oracle = coend(bimodule_to_profunctor(base, M), bimodule_to_profunctor(base, N))
            assert profunctors_isomorphic(bimodule_to_profunctor(base, mod.compose(M, N)), oracle)


@pytest.mark.parametrize("inst", [SpanInstance(), MatInstance()], ids=["span", "mat"])
def test_4_duality(inst):
    with criterion(f"4 base change pairs on {inst.name}, sets ≤5"):
        report = check_base_change_pairs(inst, 5)
        assert report.ok, report.witness
    with criterion(f"4 mates on {inst.name}, 100 samples"):
        report = check_mates(inst, seed=0, samples=100)
        assert report.ok, report.witness


def test_4_span_search_finds_graphs():
    with criterion("4 span dual pair search at cap 2 finds only graphs"):
        span = SpanInstance()
        sets = [FinSet(p, tuple(f"{p}{i}" for i in range(n))) for p in "xy" for n in (1, 2)]
        for X in sets[:2]:
            for Y in sets[2:]:
                found = search_dual_pairs(span, X, Y, 2)
                assert not found.partial
                arrows = [base_change_arrow(span, d) for d in found.pairs]
                assert None not in arrows
                assert len(set(arrows)) == len(Y) ** len(X)


def test_5_beck_chevalley():
    for phi in (ARR, FAM):
        with criterion(f"5 BC on 100 random pullbacks in {phi.name}, sets ≤6"):
            report = check_bc_pullbacks(phi, seed=0, samples=100, cap=6)
            assert report.ok, report.witness
    for module in ("arr", "fam"):
        with criterion(f"5 badSquare gives 2 against 1 in {module}"):
            code, report, _ = run(["bc-check", "--input", str(FIXTURES / "bad_square.json"),
                                   "--module", module, "--square", "badSquare"])
            assert code == 1
            w = report["witness"]
            assert (w["source_size"], w["target_size"]) == (2, 1)


def test_6_span_powerset():
    with criterion("6 Span(P) normal oplax, opcartesian kept, cartesian 16 against 10"):
        P = catalog.lookup(catalog.FUNCTORS, "functor", "span-powerset")
        report = check_framed_functor(P)
        assert report.ok, report.witness
        assert report.facts["certified"] == "normal oplax"
        opcart = [d for d in report.details if d.law == "opcartesian_preservation"]
        assert opcart and opcart[0].ok
        cart = report.facts["cartesian_preservation"]
        assert cart["verdict"] == "fail"
        assert "16 elements" in cart["witness"]["message"]
        assert "has 10" in cart["witness"]["message"]
        f, U, g = cartesian_witness_fixture()
        cmp = cartesian_comparison(P, f, U, g)
        assert (cmp["iso"], cmp["source_size"], cmp["target_size"]) == (False, 16, 10)
    with criterion("6 relFunctor certified strong"):
        report = check_framed_functor(catalog.lookup(catalog.FUNCTORS, "functor", "rel"))
        assert report.ok and report.facts["certified"] == "strong"


def test_7_adjunction():
    with criterion("7 Span(×S) ⊣ Span(^S), |S| = 2, with strongness"):
        F, G, eta, eps = catalog.lookup(catalog.ADJUNCTIONS, "adjunction", "exponential")
        assert F.name and len(catalog.S2) == 2
        report = check_framed_adjunction(F, G, eta, eps)
        assert report.ok, report.witness
        strong = [d for d in report.details if d.law.startswith("left_adjoint_strong")]
        assert len(strong) == 2 and all(d.ok for d in strong)


FAULTS = sorted(p.name for p in FIXTURES.iterdir() if p.name.startswith("fault_"))


def test_8_fault_injection(tmp_path):
    with criterion(f"8 {len(FAULTS)} corrupted fixtures fail and replay byte for byte"):
        assert len(FAULTS) >= 5
        for name in FAULTS:
            code, report, _ = run(["--input", str(FIXTURES / name)])
            assert code == 1, name
            replay = tmp_path / name
            replay.write_text(canonical(report["replay"]))
            code2, again, _ = run(["--input", str(replay)])
            assert code2 == 1, name
            assert again["replay_identical"] is True, name
            assert canonical(again["witness"]) == canonical(report["witness"])
