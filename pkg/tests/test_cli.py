"""Command-line interface: exit codes, output formats, determinism."""
from __future__ import annotations

import json

from coinfactory import CoinNode, Leaf, tree_to_json
from coinfactory.cli import main
from conftest import p_squared_one_minus_p_tree

TRIANGLE = '{"n": 3, "M": [["1","1","1"]], "b": ["2"]}'


def tree_doc() -> str:
    return json.dumps(tree_to_json(p_squared_one_minus_p_tree()))


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_eval_tree(capsys):
    code, out, _ = run_cli(capsys, "eval", "--tree", tree_doc(), "--at", '["1/2"]')
    assert code == 0
    assert out.strip() == "1/8"


def test_eval_subset_probs(capsys):
    code, out, _ = run_cli(
        capsys, "eval", "--subset-k", "2", "--at", '["1","1","0"]', "--json"
    )
    assert code == 0
    rows = {r["subset"]: r["prob"] for r in json.loads(out)}
    assert rows["{1,2}"] == "1" and rows["{1,3}"] == "0"


def test_eval_polytope_mixture(capsys):
    code, out, _ = run_cli(
        capsys, "eval", "--polytope", TRIANGLE, "--at", '["2/3","2/3","2/3"]', "--json"
    )
    assert code == 0
    coeffs = {r["vertex"]: r["coeff"] for r in json.loads(out)}
    assert set(coeffs.values()) == {"1/3"}


def test_eval_level_residual(capsys):
    code, out, _ = run_cli(
        capsys, "eval", "--level", "2", "--named", "half", "--at", '["1/4"]', "--t", "4"
    )
    assert code == 0
    assert "residual=1/3" in out


def test_simulate_tree_deterministic_csv(capsys):
    args = (
        "simulate", "--tree", tree_doc(), "--p", '["1/2"]',
        "--trials", "2000", "--seed", "9",
    )
    code1, out1, _ = run_cli(capsys, *args)
    code2, out2, _ = run_cli(capsys, *args)
    assert code1 == code2 == 0
    assert out1 == out2
    assert out1.startswith("outcome,")


def test_verify_margin(capsys):
    code, out, _ = run_cli(
        capsys, "verify", "margin", "--named", "affine14",
        "--t", "16", "--levels", "3", "--mesh", "8",
    )
    assert code == 0
    assert "holds=True" in out


def test_verify_facet_witness_pass_and_planted_failure(capsys):
    code, out, _ = run_cli(capsys, "verify", "facet-witness", "--domain", TRIANGLE)
    assert code == 0 and "holds=True" in out
    code, out, _ = run_cli(capsys, "verify", "facet-witness", "--free-triangle")
    assert code == 1 and "holds=False" in out


def test_verify_face_bound_and_scalar(capsys):
    code, out, _ = run_cli(
        capsys, "verify", "face-bound", "--tree", tree_doc(),
        "--c", "1", "--m", "2", "--mesh", "8",
    )
    assert code == 0 and "holds=True" in out
    code, out, _ = run_cli(
        capsys, "verify", "scalar", "--tree", tree_doc(), "--m", "5", "--mesh", "8"
    )
    assert code == 0


def test_polytope_geometry(capsys):
    code, out, _ = run_cli(capsys, "polytope", "--domain", TRIANGLE, "--json")
    assert code == 0
    doc = json.loads(out)
    assert doc["dim"] == 2 and len(doc["vertices"]) == 3


def test_sampford_classic_small(capsys):
    code, out, _ = run_cli(
        capsys, "sampford", "--p", '["1/2","3/4","3/4"]', "--k", "2",
        "--trials", "2000", "--seed", "4",
    )
    assert code == 0
    assert "{1,2}" in out


def test_usage_error_exit_code(capsys):
    code, _, err = run_cli(capsys, "eval", "--at", '["1/2"]')  # no oracle chosen
    assert code == 2
    assert "error:" in err
    code, _, _ = run_cli(capsys, "bogus-command")
    assert code == 2


def test_resource_limit_exit_code(capsys):
    big_cube = json.dumps({"n": 13, "M": [], "b": []})
    code, _, err = run_cli(capsys, "polytope", "--domain", big_cube)
    assert code == 3
    assert "resource limit" in err
