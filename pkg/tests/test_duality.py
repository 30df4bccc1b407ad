import pytest

from framedkit.duality import (DualPairData, base_change_arrow, base_change_dual_pair,
                               check_base_change_pairs, check_dual_pair, check_mates, mate,
                               mate_inverse, pair_isomorphism, search_dual_pairs, unit_dual_pair)
from framedkit.finkit import FinFn, FinSet
from framedkit.matinst import MatInstance
from framedkit.modcon import ModInstance, cyclic_two, fincat_to_monoid
from framedkit.spaninst import SpanInstance

SPAN, MAT = SpanInstance(), MatInstance()
A = FinSet("A", ("a1", "a2", "a3"))
B = FinSet("B", ("b1", "b2"))
f = FinFn(A, B, ("b1", "b1", "b2"))


@pytest.mark.parametrize("inst", [SPAN, MAT], ids=["span", "mat"])
def test_base_change_pairs_small(inst):
    report = check_base_change_pairs(inst, max_size=3)
    assert report.ok, report.witness
    triangles = next(d for d in report.details if d.law == "base_change_triangles")
    assert triangles.samples == sum(
        (n ** m) for m in range(4) for n in range(4))


@pytest.mark.parametrize("inst", [SPAN, MAT], ids=["span", "mat"])
def test_unit_pair_and_identity_base_change_agree(inst):
    d = unit_dual_pair(inst, A)
    assert check_dual_pair(inst, d).ok
    assert pair_isomorphism(inst, base_change_dual_pair(inst, inst.v_id(A)), d) is not None


@pytest.mark.parametrize("inst", [SPAN, MAT], ids=["span", "mat"])
def test_base_change_arrow_recovers_the_function(inst):
    d = base_change_dual_pair(inst, f)
    assert base_change_arrow(inst, d) == f


def test_span_search_finds_only_graphs():
    X, Y = FinSet("X", ("x1", "x2")), FinSet("Y", ("y1", "y2"))
    found = search_dual_pairs(SPAN, X, Y, 2)
    assert not found.partial
    arrows = [base_change_arrow(SPAN, d) for d in found.pairs]
    assert None not in arrows
    # one pair per function X → Y, up to iso
    assert len(set(arrows)) == len(arrows) == 4


@pytest.mark.parametrize("inst", [SPAN, MAT], ids=["span", "mat"])
def test_mate_laws_sampled(inst):
    report = check_mates(inst, seed=3, samples=15, cap=3)
    assert report.ok, report.witness


def test_framed_mate_roundtrip_on_a_concrete_square():
    d = base_change_dual_pair(SPAN, f)
    alpha = SPAN.sq_id(d.M)
    beta = mate(SPAN, alpha, d, d)
    assert SPAN.same_square(beta, SPAN.sq_id(d.N))
    assert SPAN.same_square(mate_inverse(SPAN, beta, d, d), alpha)


def test_perturbed_ev_names_the_first_triangle():
    mod = ModInstance(SPAN)
    M = fincat_to_monoid(SPAN, cyclic_two())
    d = unit_dual_pair(mod, M)
    U, i = mod.unit(M), mod.v_id(M)
    twist = next(s for s in mod.squares(U, U, i, i) if not mod.same_square(s, mod.sq_id(U)))
    bad = DualPairData(d.M, d.N, mod.vcomp(d.ev, twist), d.coev)
    report = check_dual_pair(mod, bad)
    assert not report.ok
    assert report.witness["side"] == "triangle_M"
    assert "triangle_M" in report.witness["message"]
