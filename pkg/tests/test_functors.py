import pytest

from framedkit import catalog
from framedkit.lawsuite import (build_inverse, check_equivalence, check_framed_adjunction,
                                check_framed_functor, check_framed_transformation, check_inverse)


def functor(name):
    return catalog.lookup(catalog.FUNCTORS, "functor", name)


def test_powerset_is_normal_oplax_and_not_cartesian():
    report = check_framed_functor(functor("span-powerset"))
    assert report.ok
    assert [d.law for d in report.details if d.law == "opcartesian_preservation"]
    assert report.facts["certified"] == "normal oplax"
    cart = report.facts["cartesian_preservation"]
    assert cart["verdict"] == "fail"
    assert "16 elements" in cart["witness"]["message"]
    assert "has 10" in cart["witness"]["message"]


@pytest.mark.parametrize("name", ["rel", "span-times-strong", "span-power", "span-plus-one",
                                  "span-identity"])
def test_strong_functors(name):
    report = check_framed_functor(functor(name), samples=20)
    assert report.ok, report.witness
    assert report.facts["certified"].endswith("strong")


def test_rel_is_not_faithful():
    F, choices = catalog.EQUIVALENCES["rel"]()
    report = check_equivalence(F, choices, samples=20)
    verdicts = {d.law: d.ok for d in report.details}
    assert not report.ok
    assert verdicts["squares_faithful"] is False
    assert verdicts["vertical_full_faithful"] is True


def test_identity_is_an_equivalence_with_inverse():
    F, choices = catalog.EQUIVALENCES["span-identity"]()
    assert check_equivalence(F, choices, samples=20).ok
    assert check_inverse(F, build_inverse(F, choices), samples=8).ok


@pytest.mark.parametrize("name", ["span-inl", "span-projection", "span-constants",
                                  "span-singleton", "rel-identity"])
def test_transformations(name):
    al = catalog.lookup(catalog.TRANSFORMATIONS, "transformation", name)
    report = check_framed_transformation(al, samples=20)
    assert report.ok, report.witness


def test_corrupted_projection_breaks_naturality():
    al = catalog.lookup(catalog.TRANSFORMATIONS, "transformation", "corrupt-projection")
    report = check_framed_transformation(al, samples=30)
    assert not report.ok
    failed = {d.law for d in report.details if not d.ok}
    # every component is still a well-framed square; only the equations break
    assert {"square_naturality", "lowered_naturality"} <= failed
    assert not any("frames" in law for law in failed)
    assert report.witness["law"] in failed


def adjunction(name, samples=20):
    return check_framed_adjunction(*catalog.lookup(catalog.ADJUNCTIONS, "adjunction", name),
                                   samples=samples)


def test_identity_adjunction_passes():
    assert adjunction("identity").ok


def test_exponential_adjunction_and_strongness():
    report = adjunction("exponential")
    assert report.ok, report.witness
    laws = {d.law for d in report.details}
    assert {"triangle_left", "triangle_right", "left_adjoint_strong_compositor",
            "left_adjoint_strong_unitor"} <= laws


def test_corrupted_counit_fails_on_a_named_triangle():
    report = adjunction("corrupt-counit")
    assert not report.ok
    assert report.witness["law"] in ("triangle_left", "triangle_right")
