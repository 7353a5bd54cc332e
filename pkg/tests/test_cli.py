"""Command-line front end: exit codes, JSON determinism, error bodies."""

import json
from fractions import Fraction

import pytest

from dilogic import cli, jsonio

from helpers import atomic_example_field, joint_witness_field, sup_example_field

F = Fraction


@pytest.fixture()
def paths(tmp_path):
    out = {}

    def write(name, doc):
        p = tmp_path / name
        p.write_text(json.dumps(doc), encoding="utf-8")
        out[name] = str(p)
        return str(p)

    write("sig.json", {"predicates": [{"name": "P", "arity": 1},
                                      {"name": "Q", "arity": 1}]})
    write("sig_p.json", {"predicates": [{"name": "P", "arity": 1}]})
    write("atomic_field.json", jsonio.field_to_doc(atomic_example_field()))
    write("sup_field.json", jsonio.field_to_doc(sup_example_field()))
    write("joint_field.json", jsonio.field_to_doc(joint_witness_field()))
    write("assignment.json", {"x": {"w1": "p", "w2": "p"}})
    write("alg.json", {"atoms": ["w1", "w2"], "weights": ["1/2", "1/2"]})
    write("alg3.json", {"atoms": ["a", "b", "c"],
                        "weights": ["1/2", "1/4", "1/4"]})
    write("m2.json", {"components": [{"m": 2, "atoms": ["1"], "diffuse": "0"}]})
    write("m3.json", {"components": [{"m": 3, "atoms": ["1"], "diffuse": "0"}]})
    write("dist_input.json", {"chain": [["w1", "w2"], ["w1"]],
                              "tuple": [["w2"], ["w2"]]})
    return out


def run(capsys, argv):
    code = cli.main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# ---------------------------------------------------------------------------
# check / eval


def test_check_atomic_example(paths, capsys):
    code, out, _ = run(capsys, [
        "check", "--formula", "P(x)", "--field", paths["atomic_field.json"],
        "--assignment", paths["assignment.json"], "--k", "2",
    ])
    assert code == cli.EXIT_PASS
    doc = json.loads(out)
    assert doc["ok"] is True
    assert doc["integral_value"] == "1/2"
    assert doc["mba_value"] == "1/4"


def test_check_joint_witness(paths, capsys):
    code, out, _ = run(capsys, [
        "check", "--formula", "sup y . sub(P(y), Q(y))",
        "--field", paths["joint_field.json"], "--k", "2",
        "--mode", "enumerate",
    ])
    assert code == cli.EXIT_PASS
    doc = json.loads(out)
    assert doc["integral_value"] == "5/8"
    assert doc["mba_value"] == "2/3"


def test_eval_sup(paths, capsys):
    code, out, _ = run(capsys, [
        "eval", "--formula", "sup y . P(y)", "--field", paths["sup_field.json"],
    ])
    assert code == cli.EXIT_PASS
    assert json.loads(out) == {"value": "5/8"}


def test_eval_pretty_format(paths, capsys):
    code, out, _ = run(capsys, [
        "eval", "--formula", "sup y . P(y)", "--field", paths["sup_field.json"],
        "--format", "pretty",
    ])
    assert code == cli.EXIT_PASS
    assert out.strip() == "5/8"


# ---------------------------------------------------------------------------
# transform


def test_transform_deterministic_bytes(paths, capsys):
    argv = ["transform", "--formula", "sup y . P(y)",
            "--signature", paths["sig_p.json"], "--k", "2"]
    code1, out1, _ = run(capsys, argv)
    code2, out2, _ = run(capsys, argv)
    assert code1 == code2 == cli.EXIT_PASS
    assert out1 == out2
    doc = json.loads(out1)
    assert doc["k"] == 2
    assert doc["formulas"] == [
        "sup y0 . sub(P(y0), 0)", "sup y0 . sub(P(y0), 1/2)",
    ]
    assert doc["levels"] == {"0": 2, "1": 2}


def test_transform_budget_error_exit_2(paths, capsys):
    code, out, err = run(capsys, [
        "transform", "--formula", "sup y . P(y)",
        "--signature", paths["sig_p.json"], "--k", "2", "--budget-c", "1",
    ])
    assert code == cli.EXIT_INPUT
    assert out == ""
    assert json.loads(err)["error"] == "budget"


def test_bad_input_exit_2(paths, capsys):
    code, _, err = run(capsys, [
        "eval", "--formula", "R(x)", "--field", paths["sup_field.json"],
    ])
    assert code == cli.EXIT_INPUT
    assert json.loads(err)["error"] == "input"
    code, _, err = run(capsys, [
        "eval", "--formula", "P(x)", "--field", "/does/not/exist.json",
    ])
    assert code == cli.EXIT_INPUT


# ---------------------------------------------------------------------------
# mba subcommands


def test_mba_defin(paths, capsys):
    code, out, _ = run(capsys, ["mba", "defin", "--algebra", paths["alg3.json"]])
    assert code == cli.EXIT_PASS
    assert json.loads(out)["ok"] is True


def test_mba_monotone(paths, capsys):
    code, out, _ = run(capsys, [
        "mba", "monotone", "--formula", "sub(P(x), Q(x))",
        "--signature", paths["sig.json"], "--algebra", paths["alg.json"],
        "--k", "2", "--trials", "20",
    ])
    assert code == cli.EXIT_PASS
    assert json.loads(out) == {"ok": True}


def test_mba_dist(paths, capsys):
    code, out, _ = run(capsys, [
        "mba", "dist", "--algebra", paths["alg.json"],
        "--input", paths["dist_input.json"],
    ])
    assert code == cli.EXIT_PASS
    doc = json.loads(out)
    assert doc["ok"] is True
    assert jsonio.parse_fraction(doc["distance"]) <= jsonio.parse_fraction(
        doc["phi_value"]
    )


# ---------------------------------------------------------------------------
# typei subcommands


def test_typei_rho(paths, capsys):
    code, out, _ = run(capsys, ["typei", "rho", "--desc", paths["m2.json"]])
    assert code == cli.EXIT_PASS
    assert json.loads(out) == {"(2,1)": "1"}


def test_typei_equiv_and_tensor(paths, capsys):
    code, out, _ = run(capsys, [
        "typei", "equiv", "--left", paths["m2.json"], "--right", paths["m3.json"],
    ])
    assert code == cli.EXIT_PASS
    assert json.loads(out) == {"equiv": False}
    code, out, _ = run(capsys, [
        "typei", "tensor", "--left", paths["m2.json"], "--right", paths["m3.json"],
    ])
    assert code == cli.EXIT_PASS
    doc = json.loads(out)
    assert doc["components"] == [{"m": 6, "atoms": ["1"], "diffuse": "0"}]


# ---------------------------------------------------------------------------
# selftest


def test_selftest_small_run(capsys):
    code, out, _ = run(capsys, ["selftest", "--seed", "0", "--count", "6"])
    assert code == cli.EXIT_PASS
    doc = json.loads(out)
    assert doc["ok"] is True
    assert doc["instances"] == 6
