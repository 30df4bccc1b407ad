from math import comb

import pytest
from hypothesis import given, strategies as st

from conftest import finfns, finsets, matrices
from framedkit.finkit import FinFn, FinSet
from framedkit.matinst import MatInstance, SetMatrix

T = MatInstance()
A = FinSet("A", ("a1", "a2"))
B = FinSet("B", ("b1", "b2"))
C = FinSet("C", ("c",))


def sizes(M):
    return [[len(M.entry(a, b)) for b in M.cols] for a in M.rows]


def product_of(X, Y):
    return [[sum(X[i][k] * Y[k][j] for k in range(len(Y))) for j in range(len(Y[0]))]
            for i in range(len(X))]


def test_composite_labels_name_the_middle_index():
    M = SetMatrix.from_table(A, B, {("a1", "b1"): ["x"], ("a1", "b2"): ["y", "z"]})
    N = SetMatrix.from_table(B, C, {("b1", "c"): ["u"], ("b2", "c"): ["v"]})
    P = T.compose(M, N)
    assert P.entry("a1", "c").elements == ("inl_b1(pair(x,u))", "inl_b2(pair(y,v))",
                                           "inl_b2(pair(z,v))")
    assert P.entry("a2", "c").elements == ()


@given(finsets("a", 1, 3), finsets("b", 1, 3), finsets("c", 1, 3), st.data())
def test_composite_sizes_are_the_matrix_product(A, B, C, data):
    M, N = data.draw(matrices(A, B)), data.draw(matrices(B, C))
    assert sizes(T.compose(M, N)) == product_of(sizes(M), sizes(N))


@given(finsets("a", 1, 3), finsets("b", 1, 2), finsets("c", 1, 2), finsets("d", 1, 2), st.data())
def test_associator_and_unitors_are_invertible(A, B, C, D, data):
    M, N, P = data.draw(matrices(A, B)), data.draw(matrices(B, C)), data.draw(matrices(C, D))
    for sq in (T.assoc(M, N, P), T.lunitor(M), T.runitor(M)):
        assert T.invert(sq) is not None


@given(finsets("a", 1, 3), finsets("b", 1, 3), st.data())
def test_restriction_reindexes_entries(A, B, data):
    M = data.draw(matrices(A, B))
    f, g = data.draw(finfns(cod=A)), data.draw(finfns(cod=B))
    cell, _ = T.restrict(f, M, g)
    for x in f.dom:
        for y in g.dom:
            assert len(cell.entry(x, y)) == len(M.entry(f(x), g(y)))


@given(finsets("a", 1, 3), finsets("b", 1, 3), st.data())
def test_extension_sums_over_fibers(A, B, data):
    M = data.draw(matrices(A, B))
    f, g = data.draw(finfns(dom=A)), data.draw(finfns(dom=B))
    cell, _ = T.extend(f, M, g)
    for x in f.cod:
        for y in g.cod:
            expected = sum(len(M.entry(a, b)) for a in A for b in B if f(a) == x and g(b) == y)
            assert len(cell.entry(x, y)) == expected


@pytest.mark.parametrize("n,m,cap", [(1, 1, 3), (2, 1, 2), (2, 2, 2)])
def test_enumerate_cells_gives_one_matrix_per_iso_class(n, m, cap):
    A = FinSet("A", tuple(f"a{i}" for i in range(n)))
    B = FinSet("B", tuple(f"b{i}" for i in range(m)))
    cells = list(T.enumerate_cells(A, B, cap))
    assert len(cells) == sum(comb(n * m + k - 1, k) for k in range(cap + 1))


@given(finsets("a", 1, 3), finsets("b", 1, 3), st.data())
def test_cell_json_roundtrip(A, B, data):
    M = data.draw(matrices(A, B))
    back = T.decode_cell(T.encode_cell(M))
    assert sizes(back) == sizes(M)
    assert all(back.entry(a, b).elements == M.entry(a, b).elements for a, b in M.indices())
