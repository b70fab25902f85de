import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from braidleg.algebra import parse_element
from braidleg.cli import emit_report, run
from braidleg.epoche import parse_epoch
from braidleg.qcoeff import Context

GOLDEN = Path(__file__).parent / "golden"

# problem file -> extra arguments after the subcommand
GOLDEN_RUNS = {
    "normal-form.json": ["normal-form"],
    "bracket.json": ["bracket"],
    "hj-evolve.json": ["hj-evolve"],
    "hj-evolve-braided.json": ["hj-evolve"],
    "ham-evolve.json": ["ham-evolve"],
    "ham-evolve-braided.json": ["ham-evolve"],
    "legendre-classical.json": ["legendre", "--classical-check"],
    "legendre-symbolic.json": ["legendre"],
    "epoche-nf.json": ["epoche-nf"],
    "epoche-thermo.json": ["epoche-nf"],
}


def golden_argv(name):
    cmd, *extra = GOLDEN_RUNS[name]
    return [cmd, "--problem", str(GOLDEN / name), *extra]


def test_every_problem_file_is_registered():
    assert sorted(p.name for p in GOLDEN.glob("*.json")) == sorted(GOLDEN_RUNS)


def test_bracket_example():
    assert run(["bracket", "p1", "x1*x1", "--s", "1", "--q", "one"]) == (0, "2*x1*h[1,1]")


def test_verify_suite_message():
    assert run(["verify", "--suite", "jacobi", "--s", "2", "--seed", "7"]) == (0, "20/20 identities hold")


def test_missing_b_table_is_a_schema_error():
    code, text = run(["legendre", "--problem", str(GOLDEN / "invalid" / "legendre-missing-b.json")])
    assert code == 1
    assert text.startswith("error: schema") and "'b' is a required property" in text


@pytest.mark.parametrize("name, fragment", [
    ("legendre-singular.json", "singular"),
    ("malformed.json", "malformed JSON"),
])
def test_invalid_problems(name, fragment):
    code, text = run(["legendre", "--problem", str(GOLDEN / "invalid" / name)])
    assert code == 1 and fragment in text and "\n" not in text


def test_usage_errors_exit_one():
    assert run(["bracket", "p1"])[0] == 1
    assert run(["frobnicate"])[0] == 1
    assert run(["normal-form", "x1 +", "--s", "1"])[0] == 1
    assert run(["hj-evolve"])[0] == 1
    assert run(["legendre", "--problem", "/nonexistent/problem.json"])[0] == 1


def test_consistency_failures_exit_two(monkeypatch):
    from braidleg import cli
    from braidleg.errors import CancellationError

    def boom(*_a, **_k):
        raise CancellationError("units survive")

    monkeypatch.setattr(cli, "cmd_legendre", boom)
    code, text = run(["legendre", "--problem", str(GOLDEN / "legendre-symbolic.json")])
    assert code == 2 and "internal consistency" in text


def test_emit_report():
    assert emit_report({}, "json") == "{}"
    assert emit_report({}, "text") == "no output"
    rows = json.loads(run(golden_argv("hj-evolve.json"))[1])["coefficients"]
    keys = [(r["m"], r["N"]) for r in rows]
    assert keys == sorted(keys)


def test_printed_results_reparse():
    code, text = run(golden_argv("bracket.json"))
    assert code == 0
    ctx = Context.symbolic(2)
    printed = json.loads(text)["result"]
    assert parse_element(printed, ctx).terms
    code, text = run(golden_argv("epoche-nf.json"))
    printed = json.loads(text)["result"]
    assert parse_epoch(printed, ctx) is not None
    again = run(["epoche-nf", printed, "--s", "2", "--q", "symbolic"])
    assert again == (0, printed)


def test_numeric_results_follow_the_oracles():
    rows = json.loads(run(golden_argv("hj-evolve.json"))[1])["coefficients"]
    b2 = {r["m"]: r["value"] for r in rows if r["N"] == [2]}
    assert (b2[1], b2[3], b2[5]) == ("-1", "-2", "-16")
    out = json.loads(run(golden_argv("legendre-classical.json"))[1])
    assert out["classical_check"]["ok"]


def test_subcommands_are_deterministic_across_processes():
    env = dict(os.environ)
    outputs = []
    for hashseed in ("1", "2"):
        env["PYTHONHASHSEED"] = hashseed
        res = subprocess.run([sys.executable, "-m", "braidleg.cli", *golden_argv("epoche-nf.json")],
                             capture_output=True, text=True, env=env, check=True)
        outputs.append(res.stdout)
    assert outputs[0] == outputs[1]
