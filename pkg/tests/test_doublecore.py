import pytest
from hypothesis import given, strategies as st

from conftest import finfns, finsets, matrices, spans
from framedkit.doublecore import (BudgetExceeded, CartesianWitness, LawReport, combine,
                                  companion_conjoint, companion_equations,
                                  enumerate_factorizations, globularize, search_budget,
                                  unglobularize)
from framedkit.finkit import FinFn, FinSet
from framedkit.functors import cartesian_witness_fixture
from framedkit.matinst import MatInstance
from framedkit.spaninst import Span, SpanInstance

S, T = SpanInstance(), MatInstance()


def test_report_json_and_first_failure():
    bad = LawReport("inner", False, 3, {"message": "boom"})
    top = combine("outer", [LawReport("ok", True, 5), bad], seed=7)
    assert not top.ok and top.samples == 8
    assert top.first_failure() is bad
    data = top.to_json()
    assert data["verdict"] == "fail" and data["seed"] == 7
    assert [d["law"] for d in data["details"]] == ["ok", "inner"]


def test_budget_comes_from_the_environment(monkeypatch):
    monkeypatch.setenv("FRAMEDKIT_BUDGET", "17")
    assert search_budget() == 17
    monkeypatch.setenv("FRAMEDKIT_BUDGET", "junk")
    assert search_budget() > 17


def test_exhaustive_factorization_respects_the_budget(monkeypatch):
    f, U, g = cartesian_witness_fixture()
    _, witness = S.restrict(f, U, g)
    cand = witness.square
    assert len(enumerate_factorizations(S, witness, cand, S.v_id(f.dom), S.v_id(g.dom))) == 1
    # three parallel elements: 27 candidate squares
    one = FinSet("1", ("*",))
    M = Span.make(one, one, {x: ("*", "*") for x in ("m1", "m2", "m3")})
    idM = S.sq_id(M)
    witness = CartesianWitness(idM, "cartesian")
    assert len(enumerate_factorizations(S, witness, idM, S.v_id(one), S.v_id(one))) == 1
    monkeypatch.setenv("FRAMEDKIT_BUDGET", "26")
    with pytest.raises(BudgetExceeded):
        enumerate_factorizations(S, witness, idM, S.v_id(one), S.v_id(one))


@pytest.mark.parametrize("inst", [S, T], ids=["span", "mat"])
@given(f=finfns(max_size=3))
def test_companion_equations_hold(inst, f):
    data = companion_conjoint(inst, f)
    for name, lhs, rhs in companion_equations(inst, data):
        assert inst.same_square(lhs, rhs), name


@given(finsets("a", 1, 3), finsets("b", 1, 3), st.data())
def test_globularize_roundtrip_in_spans(A, B, data):
    M = data.draw(spans(A, B, 3))
    f, g = data.draw(finfns(dom=A, max_size=3)), data.draw(finfns(dom=B, max_size=3))
    _, witness = S.extend(f, M, g)
    alpha = witness.square
    gamma = globularize(S, alpha)
    assert S.is_globular(gamma)
    back = unglobularize(S, gamma, alpha.src, alpha.tgt, f, g)
    assert S.same_square(back, alpha)


@given(finsets("a", 1, 2), finsets("b", 1, 2), st.data())
def test_globularize_roundtrip_in_matrices(A, B, data):
    M = data.draw(matrices(A, B, 2))
    f, g = data.draw(finfns(dom=A, max_size=2)), data.draw(finfns(dom=B, max_size=2))
    _, witness = T.extend(f, M, g)
    alpha = witness.square
    back = unglobularize(T, globularize(T, alpha), alpha.src, alpha.tgt, f, g)
    assert T.same_square(back, alpha)
