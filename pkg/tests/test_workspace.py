from importlib import resources

import pytest

from framedkit.doublecore import companion_conjoint
from framedkit.fibcon import ARR, FrInstance
from framedkit.matinst import MatInstance
from framedkit.modcon import ModInstance, check_bimodule
from framedkit.spaninst import SpanInstance
from framedkit.workspace import Workspace, WorkspaceError

WS = Workspace.load(resources.files("framedkit") / "fixtures" / "workspace.json")
SPAN = SpanInstance()


def test_expression_cells_agree_with_direct_calls():
    M, N = WS.cell(SPAN, "M"), WS.cell(SPAN, "N")
    assert WS.cell(SPAN, {"compose": ["M", "N"]}) == SPAN.compose(M, N)
    assert WS.cell(SPAN, {"unit": "A"}) == SPAN.unit(WS.set("t", "A"))
    f = WS.arrow("t", "f")
    assert WS.cell(SPAN, {"companion": "f"}) == companion_conjoint(SPAN, f).companion


def test_identity_arrow_reference():
    assert WS.arrow("t", "id:B") == SPAN.v_id(WS.set("t", "B"))


def test_cells_load_in_every_instance():
    for inst in (MatInstance(), FrInstance(ARR)):
        assert WS.cell(inst, "M").right_frame == WS.cell(inst, "N").left_frame
    mod = ModInstance(SPAN)
    for name in ("Hom", "Q"):
        assert check_bimodule(SPAN, WS.cell(mod, name)).ok


@pytest.mark.parametrize("data, message", [
    ({"sets": {"A": ["a", "a"]}}, "sets.A"),
    ({"colours": {}}, "colours"),
    ({"sets": {"A": ["a"]}, "functions": {"f": {"dom": "A", "cod": "B", "map": {}}}},
     "functions.f"),
    ({"sets": {"A": ["a"], "B": ["b"]},
      "spans": {"M": {"left": "A", "right": "B", "apex": {"m": ["a", "x"]}}}}, "spans.M"),
])
def test_malformed_sections_are_named(data, message):
    with pytest.raises(WorkspaceError, match=message):
        Workspace(data)


def test_unknown_reference():
    with pytest.raises(WorkspaceError):
        WS.cell(SPAN, "Missing")
