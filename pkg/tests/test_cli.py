import json
import os
import subprocess
import sys
from importlib import resources
from pathlib import Path

import pytest

from framedkit.cli import canonical, main, run

FIXTURES = resources.files("framedkit") / "fixtures"
WS = str(FIXTURES / "workspace.json")
FAULTS = sorted(p.name for p in FIXTURES.iterdir() if p.name.startswith("fault_"))
INVALID = {
    "invalid_function.json": ("check", "functions.f: image 'c' of 'a2' is not in the codomain"),
    "invalid_category.json": ("check", "categories.Bad: composition is not associative at (a, e, a)"),
    "invalid_bimodule.json": ("check", "bimodules."),
    "invalid_square.json": ("check", "squares.skew: the square does not commute at 'a'"),
}


def fixture(name):
    return str(FIXTURES / name)


def test_compose_mat_labels():
    code, report, lines = run(["compose", "--instance", "mat", "--input", WS, "--lhs", "M",
                               "--rhs", "N"])
    assert code == 0
    assert lines[1] == ("  (a1, c): [inl_b1(pair(x,u)), inl_b2(pair(y,v)), inl_b2(pair(y,t)), "
                        "inl_b2(pair(z,v)), inl_b2(pair(z,t))]")


def test_compose_span_apex():
    code, report, lines = run(["compose", "--instance", "span", "--input", WS, "--lhs", "M",
                               "--rhs", "N"])
    assert code == 0
    assert "  pair(m2,n3): (a1, c)" in lines


def test_tensor_over_with_hom_is_the_identity():
    code, report, _ = run(["tensor-over", "--instance", "mod-span", "--input", WS,
                           "--lhs", "Hom", "--rhs", "Q"])
    assert code == 0, report


def test_mismatched_tensor_is_an_input_error():
    code, report, _ = run(["tensor-over", "--instance", "mod-span", "--input", WS,
                           "--lhs", "Q", "--rhs", "Q"])
    assert code == 2
    assert "do not share a middle category" in report["error"]


def test_unknown_cell_is_an_input_error():
    code, report, _ = run(["compose", "--instance", "span", "--input", WS, "--lhs", "M",
                           "--rhs", "Nope"])
    assert code == 2


@pytest.mark.parametrize("module", ["arr", "fam"])
def test_bad_square_witness(module):
    code, report, _ = run(["bc-check", "--input", fixture("bad_square.json"), "--module", module,
                           "--square", "badSquare"])
    assert code == 1
    w = report["witness"]
    assert (w["source_size"], w["target_size"]) == (2, 1)
    assert "2 elements against 1" in w["message"]
    code, _, _ = run(["bc-check", "--input", fixture("bad_square.json"), "--module", module,
                      "--square", "pullbackSquare"])
    assert code == 0


def test_rel_faithful_fails():
    code, report, _ = run(["check", "--suite", "equivalence", "--subject", "rel",
                           "--samples", "10"])
    assert code == 1
    assert report["witness"]["law"] == "squares_faithful"


def test_identity_adjunction_passes():
    code, _, _ = run(["check", "--suite", "adjunction", "--subject", "identity",
                      "--samples", "10"])
    assert code == 0


@pytest.mark.parametrize("name", FAULTS)
def test_fault_fixture_fails_and_replays(name, tmp_path):
    code, report, _ = run(["--input", fixture(name)])
    assert code == 1
    assert report["witness"]["message"]
    replay = tmp_path / "replay.json"
    replay.write_text(canonical(report["replay"]))
    code2, again, _ = run(["--input", str(replay)])
    assert code2 == 1
    assert again["replay_identical"] is True
    assert canonical(again["witness"]) == canonical(report["witness"])


@pytest.mark.parametrize("name", sorted(INVALID))
def test_invalid_fixture_is_rejected(name):
    command, message = INVALID[name]
    code, report, _ = run([command, "--input", fixture(name)])
    assert code == 2
    assert message in report["error"]


def test_budget_env_marks_a_search_partial(monkeypatch):
    monkeypatch.setenv("FRAMEDKIT_BUDGET", "1")
    code, report, _ = run(["dual-check", "--instance", "span", "--input", WS, "--search", "A,B"])
    assert report["result"]["partial"] is True


def test_main_json_format(capsys):
    assert main(["unit", "--instance", "span", "--input", WS, "--object", "A",
                 "--format", "json"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["verdict"] == "pass" and report["exit_code"] == 0


def _cli(args, cwd):
    env = dict(os.environ)
    return subprocess.run([sys.executable, "-m", "framedkit", *args], cwd=cwd, env=env,
                          capture_output=True, text=True)


@pytest.mark.parametrize("args", [
    ["--input", fixture("fault_twisted_associator.json")],
    ["check", "--suite", "framed", "--instance", "mat", "--samples", "20", "--max-size", "3"],
])
def test_reports_are_byte_identical(args, tmp_path):
    outs = []
    for i in range(2):
        path = tmp_path / f"r{i}.json"
        proc = _cli([*args, "--report", str(path)], tmp_path)
        assert proc.returncode in (0, 1), proc.stderr
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_exit_code_two_goes_to_stderr(tmp_path):
    proc = _cli(["check", "--input", fixture("invalid_function.json")], tmp_path)
    assert proc.returncode == 2
    assert "not in the codomain" in proc.stderr
    assert proc.stdout == ""


def test_missing_file_is_an_input_error(tmp_path):
    code, report, _ = run(["check", "--input", str(Path(tmp_path) / "absent.json")])
    assert code == 2
