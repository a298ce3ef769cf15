"""Exit codes and output formats of the batch front end."""

import json
import os

import pytest

from mints.cli import run
from mints.models import (BranchingPuzzle, TilingPuzzle, branching_to_json,
                          tiling_to_json)
from mints.syntax import parse_problem, print_formula

DATA = os.path.join(os.path.dirname(__file__), "data")
EX51 = os.path.join(DATA, "ex51.json")


def test_classify_output(capsys):
    rc = run(["classify", "--formula", "((forall x. P(x)) -> Q) -> Q"])
    assert rc == 0
    assert capsys.readouterr().out.strip() == "Pi-level 1, Sigma-level 2"


def test_classify_json(capsys):
    rc = run(["classify", "--formula", "P", "--json"])
    assert rc == 0
    assert json.loads(capsys.readouterr().out) == {"pi": 0, "sigma": 0}


def test_prove_positive_emits_term(capsys):
    rc = run(["prove", "--env", "X : A", "--goal", "A"])
    assert rc == 0
    assert capsys.readouterr().out.strip() == "X"


def test_prove_negative(capsys):
    assert run(["prove", "--env", "X : B", "--goal", "A"]) == 1


def test_prove_reads_problem_from_stdin(capsys, monkeypatch):
    import io
    monkeypatch.setattr("sys.stdin", io.StringIO("X : B -> A\nY : B\n|- A"))
    rc = run(["prove", "--sigma1", "--json"])
    assert rc == 0
    out = json.loads(capsys.readouterr().out)
    assert out["result"] == "proved"
    assert out["term"] == "X Y"


def test_prove_monadic(capsys):
    rc = run(["prove", "--monadic", "--env", "X : H(a,b)", "--goal",
              "H(a,b)"])
    assert rc == 0


def test_refute_emits_soup(capsys):
    rc = run(["refute", "--env", "X : B", "--goal", "A"])
    assert rc == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0].startswith("j0:")


def test_refute_provable_is_negative(capsys):
    assert run(["refute", "--env", "X : A", "--goal", "A"]) == 1


def test_check_proof_roundtrip(capsys, tmp_path):
    rc = run(["prove", "--env", "X : B -> A\nY : B", "--goal", "A"])
    assert rc == 0
    term_text = capsys.readouterr().out.strip()
    proof = tmp_path / "proof.txt"
    proof.write_text(term_text)
    rc = run(["check-proof", "--env", "X : B -> A\nY : B", "--goal", "A",
              "--in", str(proof)])
    assert rc == 0
    assert "typechecks" in capsys.readouterr().out


def test_check_proof_rejects_wrong_term(capsys, tmp_path):
    proof = tmp_path / "proof.txt"
    proof.write_text("Y")
    rc = run(["check-proof", "--env", "X : B -> A\nY : B", "--goal", "A",
              "--in", str(proof)])
    assert rc == 1


def test_translate_formula(capsys):
    rc = run(["translate", "--formula", "forall x y. H(x,y) -> P"])
    assert rc == 0
    out = capsys.readouterr().out.strip()
    assert out == "forall x y. (M1(x) -> M2(y) -> H$0) -> P"


def test_encode_prove_pipeline(capsys, monkeypatch):
    import io
    rc = run(["encode", "bus", "--in", EX51])
    problem = capsys.readouterr().out
    env, goal = parse_problem(problem)
    assert print_formula(goal) == "Bus(a,a,a,a)"
    monkeypatch.setattr("sys.stdin", io.StringIO(problem))
    assert run(["prove", "--sigma1"]) == 0


def test_encode_branching_monadic(capsys, tmp_path):
    G = BranchingPuzzle(["E", "OK"], "E", "OK", {}, ("OK", "E"))
    path = tmp_path / "b.json"
    path.write_text(json.dumps(branching_to_json(G)))
    rc = run(["encode", "branching", "--in", str(path), "--s", "1",
              "--monadic"])
    assert rc == 0
    assert "M1(" in capsys.readouterr().out


def test_encode_wrong_model_kind(capsys, tmp_path):
    G = BranchingPuzzle(["E", "OK"], "E", "OK", {}, ("OK", "E"))
    path = tmp_path / "b.json"
    path.write_text(json.dumps(branching_to_json(G)))
    assert run(["encode", "tiling", "--in", str(path)]) == 64


def test_simulate_bus(capsys):
    rc = run(["simulate", "bus", "--in", EX51, "--json"])
    assert rc == 0
    assert json.loads(capsys.readouterr().out) == {"accepts": True}


def test_simulate_bus_budget_unknown(capsys):
    assert run(["simulate", "bus", "--in", EX51, "--budget", "3"]) == 2


def test_simulate_tiling(capsys, tmp_path):
    G = TilingPuzzle(["E", "OK"], "E", "OK", {}, "OK")
    path = tmp_path / "t.json"
    path.write_text(json.dumps(tiling_to_json(G)))
    rc = run(["simulate", "tiling", "--in", str(path), "--json"])
    assert rc == 0
    assert json.loads(capsys.readouterr().out) == {"solvable": [1, 1]}


def test_simulate_branching(capsys, tmp_path):
    G = BranchingPuzzle(["E", "OK"], "E", "OK", {}, ("E", "E"))
    path = tmp_path / "b.json"
    path.write_text(json.dumps(branching_to_json(G)))
    assert run(["simulate", "branching", "--in", str(path), "--s", "2"]) == 1


def test_crosscheck_bus(capsys):
    rc = run(["crosscheck", "bus", "--count", "5", "--seed", "3", "--json"])
    assert rc == 0
    out = json.loads(capsys.readouterr().out)
    assert out["result"] == "agreed"
    assert out["checked"] + out["excluded"] == 5


def test_crosscheck_branching(capsys):
    rc = run(["crosscheck", "branching", "--count", "3", "--seed", "1",
              "--monadic"])
    assert rc == 0


def test_crosscheck_tiling(capsys):
    rc = run(["crosscheck", "tiling", "--count", "5", "--seed", "2",
              "--json"])
    assert rc == 0
    assert json.loads(capsys.readouterr().out)["result"] == "agreed"


def test_usage_errors(capsys):
    assert run(["encode", "branching"]) == 64
    assert run(["classify", "--formula", "P("]) == 64
    assert run(["simulate", "branching", "--in", EX51]) == 64
    assert run(["crosscheck", "branching", "--s", "0"]) == 64


def test_threads_flag_accepted(capsys):
    assert run(["classify", "--formula", "P", "--threads", "4"]) == 0
