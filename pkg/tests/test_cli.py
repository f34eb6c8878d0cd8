import json
from importlib import resources

import pytest

from dliekit.cli import TASKS, main, run_problem
from dliekit.problem import FileParseError, ProblemError, load

CORPUS = sorted(p for p in resources.files("dliekit").joinpath("corpus").iterdir() if p.name.endswith(".dlie"))


def run(tmp_path, text, *flags):
    p = tmp_path / "p.dlie"
    p.write_text(text, encoding="utf-8")
    return main(["run", str(p), *flags])


def test_trivial_cocycle_file(tmp_path, capsys):
    assert run(tmp_path, "tasks {\n  check-cocycle f=0\n}\n", "--json") == 0
    out = json.loads(capsys.readouterr().out)
    assert out["status"] == "pass" and out["tasks"][0]["seed"] == 0


def test_undefined_reference_names_the_id(tmp_path, capsys):
    assert run(tmp_path, "tasks {\n  curvature-transfer ghost\n}\n") == 2
    assert "'ghost'" in capsys.readouterr().err


def test_unknown_task(tmp_path, capsys):
    assert run(tmp_path, "tasks {\n  frobnicate nilpotent\n}\n") == 2
    assert "frobnicate" in capsys.readouterr().err


def test_parse_error_position():
    text = "ring { vars = 2 }\ncocycle f {\n  values = {(1,2) -> x1 +}\n}\n"
    with pytest.raises(FileParseError) as e:
        load(text)
    assert (e.value.line, e.value.col) == (3, 26)


def test_check_failure_exit_code(tmp_path):
    assert run(tmp_path, "tasks {\n  curvature-type nilpotent der2_zero\n}\n") == 1
    assert run(tmp_path, "tasks {\n  curvature-type nilpotent der2_zero expect=fail\n}\n") == 0


def test_step_budget_is_a_task_error(tmp_path, capsys):
    text = "tasks {\n  nf der2_x kind=utensor expr='u2 ⊗ (x1)*u1'\n}\n"
    assert run(tmp_path, text, "--max-steps", "0", "--json") == 1
    task = json.loads(capsys.readouterr().out)["tasks"][0]
    assert task["status"] == "error" and "budget" in task["error"]


def test_declarations_resolve():
    text = """
    ring { vars = 2 }
    lie_rinehart A { anchor = [[1, 0], [x1, 0]]; brackets = {(1,2) -> [1, 0]} }
    cocycle f { values = {(1,2) -> x1} }
    dlie T { from = (A, f) }
    connection rho { dlie = T; rank = 1; gamma = [[[x1]], [[1]]]; psi = Id }
    projective_basis P { u = [1, x1]; w = [1 - x1*x2, x2] }
    tasks {
      check-axioms T
    }
    """
    pf, env = load(text)
    assert env.connection("rho").r == 1
    assert env.basis("P").phi.trace() == env.basis("P").phi.trace() * env.basis("P").phi.trace()
    assert [t.name for t in pf.tasks] == ["check-axioms"]


def test_invalid_declaration_is_an_input_error():
    with pytest.raises(ProblemError):
        load("projective_basis P { phi = [[1, 1], [1, 1]] }\n")
    with pytest.raises(ProblemError):
        load("dlie T { from = (Der2) }\n")


def test_nf_subcommand_json(capsys):
    assert main(["nf", "--kind", "utensor-tilde", "--expr", "u2 ⊗ u1", "--json"]) == 0
    values = json.loads(capsys.readouterr().out)["tasks"][0]["values"]
    assert values["normal_form"] == "(-1) + u1 ⊗ u2"
    assert values["degree"] == 2 and values["steps"] >= 1


@pytest.mark.parametrize("argv", [
    ["chern", "--connection", "chern4", "--cocycle", "chern4", "--k", "2"],
    ["jet", "--connection", "nilpotent", "--check", "roundtrip"],
    ["end-ext", "--connection", "nilpotent", "--check", "orders", "--degree", "2"],
    ["check-cocycle", "--value", "x1*x2"],
    ["check-cocycle", "--cocycle", "der2_exact"],
])
def test_subcommands_pass(argv):
    assert main(argv) == 0


def test_chern_negative_subcommand():
    assert main(["chern", "--connection", "chern4_split", "--cocycle", "chern4"]) == 1


def test_every_task_is_in_the_corpus():
    used = set()
    for path in CORPUS:
        pf, _ = load(path.read_text(encoding="utf-8"))
        used |= {t.name for t in pf.tasks}
    assert used == set(TASKS)


@pytest.mark.parametrize("path", CORPUS, ids=lambda p: p.name)
def test_corpus_passes_deterministically(path):
    text = path.read_text(encoding="utf-8")
    a = run_problem(text, seed=7, label=path.name)
    b = run_problem(text, seed=7, parallel=True, label=path.name)
    assert a["status"] == "pass", [t for t in a["tasks"] if t["status"] != "pass"]
    assert json.dumps(a) == json.dumps(b)
