from itertools import product

import pytest
from hypothesis import given, strategies as st

from conftest import finfns, finsets
from framedkit.finkit import (FinError, FinFn, FinSet, all_functions, coequalizer,
                              decode_fn, encode_fn, find_bijection, image_factorization,
                              pullback)

A = FinSet("A", ("a1", "a2", "a3"))
B = FinSet("B", ("b1", "b2"))


def test_duplicate_labels_rejected():
    with pytest.raises(FinError):
        FinSet("X", ("x", "x"))


def test_function_must_land_in_codomain():
    with pytest.raises(FinError):
        FinFn(B, A, ("a1", "zz"))
    with pytest.raises(FinError):
        FinFn.from_dict(B, A, {"b1": "a1"})


def test_all_functions_counts():
    assert len(list(all_functions(A, B))) == 8
    assert len(list(all_functions(B, A))) == 9
    assert len(list(all_functions(FinSet("0", ()), A))) == 1
    assert list(all_functions(A, FinSet("0", ()))) == []


@given(finfns(), st.data())
def test_pullback_is_the_set_of_matching_pairs(f, data):
    g = data.draw(finfns(cod=f.cod))
    apex, p, q = pullback(f, g)
    brute = sorted((x, y) for x, y in product(f.dom, g.dom) if f(x) == g(y))
    assert sorted(zip(p.images, q.images)) == brute
    assert p.then(f) == q.then(g)


@given(finfns(), st.data())
def test_coequalizer_identifies_exactly_the_generated_pairs(f, data):
    g = data.draw(finfns(dom=f.dom, cod=f.cod))
    q = coequalizer(f, g).as_fn()
    assert f.then(q) == g.then(q)
    # brute force: the equivalence closure of {(f x, g x)}
    cls = {y: {y} for y in f.cod}
    for x in f.dom:
        merged = cls[f(x)] | cls[g(x)]
        for y in merged:
            cls[y] = merged
    for y, z in product(f.cod, f.cod):
        assert (q(y) == q(z)) == (z in cls[y])


@given(finfns())
def test_image_factorization(f):
    e, m = image_factorization(f)
    assert e.then(m) == f
    assert e.is_surjective() and m.is_injective()


@given(finfns())
def test_function_json_roundtrip(f):
    assert decode_fn(encode_fn(f)) == f


@given(finsets("x", 0, 4), st.data())
def test_find_bijection_with_a_permutation(X, data):
    perm = data.draw(st.permutations(X.elements))
    Y = FinSet("Y", tuple(perm))
    phi = find_bijection(X, Y)
    assert phi is not None and phi.is_bijective()
