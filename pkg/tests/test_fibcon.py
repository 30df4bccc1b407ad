import json
import random
from pathlib import Path

import pytest
from hypothesis import assume, given, strategies as st

from conftest import finfns, finsets, matrices, spans
from framedkit.fibcon import (ARR, FAM, ArrObject, FamObject, FrInstance, bc_check,
                              check_bc_pullbacks, random_pullback_square)
from framedkit.finkit import FinError, FinFn, FinSet
from framedkit.functors import comparison_choices, comparison_functor
from framedkit.lawsuite import check_framed_functor
from framedkit.workspace import Workspace

FIXTURES = Path(__file__).resolve().parents[1] / "src" / "framedkit" / "fixtures"


def size(phi, M):
    return len(M.total) if phi is ARR else sum(len(F) for F in M.fibers)


def fiber_size(phi, M, b):
    if phi is ARR:
        return sum(1 for x in M.total if M.proj(x) == b)
    return len(M.fiber(b))


@st.composite
def commuting_squares(draw):
    """h: A → B, k: A → C, g: B → D, f: C → D with h;g = k;f."""
    g = draw(finfns(dom=draw(finsets("b", 0, 3)), cod=draw(finsets("d", 1, 3))))
    f = draw(finfns(dom=draw(finsets("c", 0, 3)), cod=g.cod))
    A = draw(finsets("a", 0, 3))
    k = draw(finfns(dom=A, cod=f.dom)) if len(f.dom) else FinFn(FinSet("a", ()), f.dom, ())
    A = k.dom
    fib = g.fibers()
    assume(all(fib[f(k(a))] for a in A))
    h = FinFn(A, g.dom, tuple(draw(st.sampled_from(fib[f(k(a))])) for a in A))
    return h, k, g, f


def test_bad_square_gives_two_against_one():
    ws = Workspace.load(FIXTURES / "bad_square.json")
    h, k, g, f, _ = ws.base_square("badSquare")
    for phi, M in ((ARR, ws.arr_objects["M"]), (FAM, ws.fam_objects["M"])):
        verdict = bc_check(phi, h, k, g, f, M)
        assert not verdict.ok
        assert (verdict.witness["source_size"], verdict.witness["target_size"]) == (2, 1)


@pytest.mark.parametrize("phi", [ARR, FAM], ids=["arr", "fam"])
@given(sq=commuting_squares(), seed=st.integers(0, 10**6))
def test_comparison_sizes_match_the_counting_formula(phi, sq, seed):
    h, k, g, f = sq
    M = phi.random_object(random.Random(seed), h.cod, 4)
    source = sum(fiber_size(phi, M, h(a)) for a in h.dom)
    target = sum(fiber_size(phi, M, b) for c in f.dom for b in g.dom if g(b) == f(c))
    verdict = bc_check(phi, h, k, g, f, M)
    if verdict.ok:
        assert source == target
    else:
        assert (verdict.witness["source_size"], verdict.witness["target_size"]) == (source, target)


@pytest.mark.parametrize("phi", [ARR, FAM], ids=["arr", "fam"])
def test_pullback_squares_satisfy_beck_chevalley(phi):
    assert check_bc_pullbacks(phi, seed=3, samples=40, cap=5).ok


def test_random_pullback_respects_the_cap():
    rng = random.Random(0)
    for _ in range(30):
        h, k, g, f = random_pullback_square(rng, cap=4)
        assert len(h.dom) <= 4 and h.then(g) == k.then(f)


def test_non_commuting_square_is_rejected():
    A, B = FinSet("A", ("a",)), FinSet("B", ("b1", "b2"))
    h, k = FinFn(A, B, ("b1",)), FinFn(A, B, ("b2",))
    idB = FinFn.identity(B)
    with pytest.raises(FinError):
        bc_check(ARR, h, k, idB, idB, ArrObject(B, B, idB))


def test_family_fibers_must_be_indexed():
    with pytest.raises(FinError):
        FAM.decode_object({"index": ["i"], "fibers": {"i": ["x"], "j": ["y"]}})


@pytest.mark.parametrize("phi", [ARR, FAM], ids=["arr", "fam"])
def test_cartesian_lift_is_reindexing(phi):
    B = FinSet("B", ("b1", "b2"))
    u = FinFn(FinSet("X", ("x1", "x2", "x3")), B, ("b1", "b1", "b2"))
    M = phi.random_object(random.Random(1), B, 5)
    lifted, _ = phi.cart_lift(u, M)
    assert size(phi, lifted) == sum(fiber_size(phi, M, u(x)) for x in u.dom)
    pushed, _ = phi.opcart_lift(u, lifted)
    assert size(phi, pushed) == size(phi, lifted)


@given(finsets("a", 1, 3), finsets("b", 1, 3), finsets("c", 1, 2), st.data())
def test_fr_arr_composite_is_the_span_composite(A, B, C, data):
    fr = FrInstance(ARR)
    F, choose = comparison_functor(fr), comparison_choices(fr)
    M, N = data.draw(spans(A, B, 3)), data.draw(spans(B, C, 3))
    built = F.on_cell(fr.compose(choose.cell(M), choose.cell(N)))
    assert F.cod.cell_iso(built, F.cod.compose(M, N)) is not None


@given(finsets("a", 1, 2), finsets("b", 1, 2), finsets("c", 1, 2), st.data())
def test_fr_fam_composite_is_the_matrix_composite(A, B, C, data):
    fr = FrInstance(FAM)
    F, choose = comparison_functor(fr), comparison_choices(fr)
    M, N = data.draw(matrices(A, B, 2)), data.draw(matrices(B, C, 2))
    built = F.on_cell(fr.compose(choose.cell(M), choose.cell(N)))
    assert F.cod.cell_iso(built, F.cod.compose(M, N)) is not None


@pytest.mark.parametrize("phi", [ARR, FAM], ids=["arr", "fam"])
def test_comparison_functor_is_strong(phi):
    report = check_framed_functor(comparison_functor(FrInstance(phi)), seed=2, samples=15, cap=3)
    assert report.ok and report.facts["certified"] == "strong"
