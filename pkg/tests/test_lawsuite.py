import pytest

from framedkit import catalog
from framedkit.faults import DuplicatedRestrictionSpan, TwistedAssociatorSpan
from framedkit.lawsuite import (check_double_axioms, check_framed_structure, check_involution,
                                check_monoidal_framed, replay_law, replaying, sample_rng)
from framedkit.matinst import MatInstance
from framedkit.spaninst import SpanInstance


def test_sample_streams_are_reproducible():
    a, b = sample_rng(3, "pentagon", 5), sample_rng(3, "pentagon", 5)
    assert [a.random() for _ in range(4)] == [b.random() for _ in range(4)]
    assert sample_rng(3, "pentagon", 6).random() != sample_rng(3, "pentagon", 5).random()


@pytest.mark.parametrize("name", ["span", "mat"])
def test_double_and_framed_suites_pass(name):
    inst = catalog.instance(name)
    assert check_double_axioms(inst, seed=1, samples=30, cap=3).ok
    assert check_framed_structure(inst, seed=1, samples=30, cap=3).ok


@pytest.mark.parametrize("name,samples", [("fr-arr", 10), ("fr-fam", 10), ("mod-span", 4),
                                          ("mod-mat", 4)])
def test_suites_pass_on_constructed_instances(name, samples):
    inst = catalog.instance(name)
    double = check_double_axioms(inst, seed=0, samples=samples, cap=3)
    framed = check_framed_structure(inst, seed=0, samples=samples, cap=3)
    assert double.ok and framed.ok
    assert double.samples > 0 and framed.samples > 0


@pytest.mark.parametrize("inst", [SpanInstance(), MatInstance()], ids=["span", "mat"])
def test_monoidal_and_involution_suites_pass(inst):
    assert check_monoidal_framed(inst, seed=0, samples=15, cap=3).ok
    assert check_involution(inst, seed=0, samples=15, cap=3).ok


def test_twisted_associator_breaks_the_pentagon():
    report = check_double_axioms(TwistedAssociatorSpan(), seed=0, samples=50, cap=4)
    bad = report.first_failure()
    assert bad.law == "pentagon"
    assert bad.witness["instance"] == "span+twisted-associator"


def test_duplicated_restriction_breaks_the_companion_equations():
    report = check_framed_structure(DuplicatedRestrictionSpan(), seed=0, samples=50, cap=4)
    bad = report.first_failure()
    assert bad.law == "companion_equations"
    assert "2 solutions" in bad.witness["message"]


def test_reports_are_deterministic():
    inst = SpanInstance()
    runs = [check_double_axioms(inst, seed=5, samples=10, cap=3).to_json() for _ in range(2)]
    assert runs[0] == runs[1]


def test_witness_replays_from_its_encoded_sample():
    inst = TwistedAssociatorSpan()
    witness = check_double_axioms(inst, seed=0, samples=50, cap=4).first_failure().witness
    assert replay_law(inst, witness) == witness


def test_replaying_runs_only_the_recorded_sample():
    inst = TwistedAssociatorSpan()
    witness = check_double_axioms(inst, seed=0, samples=50, cap=4).first_failure().witness
    with replaying(witness):
        again = check_double_axioms(inst, seed=0, samples=50, cap=4)
    assert again.first_failure().witness == witness
    assert again.samples == 1
