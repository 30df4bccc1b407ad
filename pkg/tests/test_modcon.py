import random

import networkx as nx
import pytest

from framedkit.finkit import FinError, FinFn
from framedkit.matinst import MatInstance
from framedkit.modcon import (FinCat, ModInstance, Profunctor, bimodule_to_profunctor,
                              categories_isomorphic, check_bimodule, check_category_roundtrip,
                              enumerate_categories, fincat_to_monoid, monoid_to_fincat,
                              profunctor_to_bimodule, profunctors_isomorphic, random_category,
                              same_category, walking_arrow)
from framedkit.spaninst import SpanInstance

BASES = [SpanInstance(), MatInstance()]


def coend(P: Profunctor, Q: Profunctor) -> Profunctor:
    """P ⊗ Q by brute force: components of the graph joining (p·g, q) to (p, g·q)."""
    C, D, E = P.left, P.right, Q.right
    G = nx.Graph()
    for x in C.objects:
        for z in E.objects:
            for y in D.objects:
                for p in P.elements(x, y):
                    for q in Q.elements(y, z):
                        G.add_node((x, z, y, p, q))
    pr, ql = P.right_table(), Q.left_table()
    for g in D.morphisms:
        y, y2 = D.src(g), D.tgt(g)
        for x in C.objects:
            for z in E.objects:
                for p in P.elements(x, y):
                    for q in Q.elements(y2, z):
                        G.add_edge((x, z, y2, pr[(x, p, g)], q), (x, z, y, p, ql[(g, z, q)]))
    label = {}
    for comp in nx.connected_components(G):
        rep = min(comp)
        for node in comp:
            label[node] = f"[{rep[2]}|{rep[3]}|{rep[4]}]"
    sets = tuple((x, z, tuple(sorted({label[n] for n in G if n[:2] == (x, z)})))
                 for x in C.objects for z in E.objects)
    pl, qr = P.left_table(), Q.right_table()
    act_left, act_right = [], []
    for (x, z, y, p, q), cls in label.items():
        for f in C.morphisms:
            if C.tgt(f) == x:
                act_left.append((f, z, cls, label[(C.src(f), z, y, pl[(f, y, p)], q)]))
        for h in E.morphisms:
            if E.src(h) == z:
                act_right.append((x, cls, h, label[(x, E.tgt(h), y, p, qr[(y, q, h)])]))
    return Profunctor(C, E, sets, tuple(sorted(set(act_left))), tuple(sorted(set(act_right))))


@pytest.mark.parametrize("D", BASES, ids=["span", "mat"])
def test_tensor_matches_the_coend_oracle(D):
    mod = ModInstance(D)
    checked = 0
    for i in range(60):
        rng = random.Random(f"coend:{i}")
        A, B, C = (fincat_to_monoid(D, random_category(rng, 3, p)) for p in "xyz")
        M, N = mod.random_cell(rng, A, B), mod.random_cell(rng, B, C)
        P, Q = bimodule_to_profunctor(D, M), bimodule_to_profunctor(D, N)
        computed = bimodule_to_profunctor(D, mod.compose(M, N))
        oracle = coend(P, Q)
        assert [len(e) for _, _, e in computed.sets] == [len(e) for _, _, e in oracle.sets]
        assert profunctors_isomorphic(computed, oracle)
        checked += 1
    assert checked >= 50


@pytest.mark.parametrize("D", BASES, ids=["span", "mat"])
def test_category_monoid_roundtrip_is_exhaustive(D):
    report = check_category_roundtrip(D, max_objects=2, max_morphisms=4)
    assert report.ok
    assert report.samples == sum(1 for _ in enumerate_categories(2, 4))


def test_enumeration_covers_the_small_monoids():
    one_object = [C for C in enumerate_categories(1, 3) if len(C.objects) == 1]
    # monoids of order 1, 2 and 3 up to iso: 1 + 2 + 7
    classes = []
    for C in one_object:
        if not any(categories_isomorphic(C, E) for E in classes):
            classes.append(C)
    assert len(classes) == 10


@pytest.mark.parametrize("D", BASES, ids=["span", "mat"])
def test_profunctor_presentation_roundtrip(D):
    mod = ModInstance(D)
    for i in range(15):
        rng = random.Random(f"prof:{i}")
        A, B = (fincat_to_monoid(D, random_category(rng, 3, p)) for p in "xy")
        M = mod.random_cell(rng, A, B)
        assert check_bimodule(D, M).ok
        P = bimodule_to_profunctor(D, M)
        back = profunctor_to_bimodule(D, P)
        assert check_bimodule(D, back).ok
        assert profunctors_isomorphic(bimodule_to_profunctor(D, back), P)


def test_non_associative_table_names_the_triple():
    with pytest.raises(FinError, match=r"not associative at \("):
        FinCat.build(["x"], {"i": ("x", "x"), "e": ("x", "x"), "a": ("x", "x")}, {"x": "i"},
                     {("i", "i"): "i", ("i", "e"): "e", ("e", "i"): "e", ("i", "a"): "a",
                      ("a", "i"): "a", ("e", "e"): "e", ("e", "a"): "a", ("a", "e"): "e",
                      ("a", "a"): "e"})


def test_walking_arrow_survives_both_encodings():
    C = walking_arrow()
    for D in BASES:
        assert same_category(monoid_to_fincat(D, fincat_to_monoid(D, C)), C)


def test_unit_bimodule_is_the_hom_profunctor():
    C = walking_arrow()
    for D in BASES:
        mod = ModInstance(D)
        P = bimodule_to_profunctor(D, mod.unit(fincat_to_monoid(D, C)))
        assert sorted((x, y, len(e)) for x, y, e in P.sets) == sorted(
            (x, y, len(C.hom(x, y))) for x in C.objects for y in C.objects)
