from math import comb

import pytest
from hypothesis import given, strategies as st

from conftest import finfns, finsets, spans
from framedkit.finkit import FinError, FinFn, FinSet
from framedkit.spaninst import RelInstance, Span, SpanInstance, graph_span, to_relation

S = SpanInstance()
A = FinSet("A", ("a1", "a2"))
B = FinSet("B", ("b1", "b2"))
C = FinSet("C", ("c",))


def test_composite_of_small_spans():
    M = Span.make(A, B, {"m1": ("a1", "b1"), "m2": ("a1", "b2"), "m3": ("a2", "b2")})
    N = Span.make(B, C, {"n1": ("b1", "c"), "n2": ("b2", "c"), "n3": ("b2", "c")})
    P = S.compose(M, N)
    legs = sorted(P.legs(x) for x in P.apex)
    assert legs == [("a1", "c")] * 3 + [("a2", "c")] * 2


def test_composable_frames_required():
    M = Span.make(A, B, {})
    with pytest.raises(FinError):
        S.compose(M, M)


@given(finsets("a", 0, 3), finsets("b", 0, 3), finsets("c", 0, 3), st.data())
def test_composite_counts_matching_pairs(A, B, C, data):
    M, N = data.draw(spans(A, B)), data.draw(spans(B, C))
    P = S.compose(M, N)
    brute = sorted((M.l(m), N.r(n)) for m in M.apex for n in N.apex if M.r(m) == N.l(n))
    assert sorted(P.legs(x) for x in P.apex) == brute


@given(finsets("a", 0, 3), finsets("b", 0, 3), finsets("c", 0, 2), finsets("d", 0, 2), st.data())
def test_associator_and_unitors_are_invertible(A, B, C, D, data):
    M, N, P = data.draw(spans(A, B)), data.draw(spans(B, C)), data.draw(spans(C, D))
    for sq in (S.assoc(M, N, P), S.lunitor(M), S.runitor(M)):
        assert S.invert(sq) is not None


@given(finsets("a", 1, 3), finsets("b", 1, 3), st.data())
def test_restriction_is_a_pullback(A, B, data):
    M = data.draw(spans(A, B))
    f = data.draw(finfns(cod=A))
    g = data.draw(finfns(cod=B))
    cell, witness = S.restrict(f, M, g)
    brute = sorted((x, y) for x in f.dom for y in g.dom for m in M.apex
                   if M.legs(m) == (f(x), g(y)))
    assert sorted(cell.legs(z) for z in cell.apex) == brute
    assert witness.square.left_arrow == f and witness.square.right_arrow == g


@pytest.mark.parametrize("n,m,cap", [(1, 1, 3), (2, 1, 2), (2, 2, 2), (1, 3, 3)])
def test_enumerate_cells_gives_one_span_per_iso_class(n, m, cap):
    A = FinSet("A", tuple(f"a{i}" for i in range(n)))
    B = FinSet("B", tuple(f"b{i}" for i in range(m)))
    cells = list(S.enumerate_cells(A, B, cap))
    # a span up to iso is a multiset of leg pairs
    assert len(cells) == sum(comb(n * m + k - 1, k) for k in range(cap + 1))
    for i, M in enumerate(cells):
        for N in cells[:i]:
            assert S.cell_iso(M, N) is None


def test_graph_span_is_the_companion():
    f = FinFn(A, B, ("b2", "b2"))
    G = graph_span(f)
    assert [G.legs(x) for x in G.apex] == [("a1", "b2"), ("a2", "b2")]


def test_relation_of_a_span_forgets_multiplicity():
    M = Span.make(A, B, {"m1": ("a1", "b1"), "m2": ("a1", "b1")})
    R = to_relation(M)
    assert R.sorted_pairs() == [("a1", "b1")]
    rel = RelInstance()
    assert rel.compose(R, rel.unit(B)) == R


@given(finsets("a", 0, 3), finsets("b", 0, 3), st.data())
def test_cell_json_roundtrip(A, B, data):
    M = data.draw(spans(A, B))
    assert S.decode_cell(S.encode_cell(M)) == M
