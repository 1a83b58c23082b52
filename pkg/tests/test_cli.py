import json
import os
import subprocess
import sys
from pathlib import Path

import pytest
from click.testing import CliRunner

from xworkbench.cli import main
from xworkbench.syntax import alpha_eq, parse

CORPUS = Path(__file__).resolve().parents[1] / "corpus"


def run(*args, stdin=None):
    return CliRunner().invoke(main, list(args), input=stdin)


@pytest.mark.parametrize("text, canonical", [
    ("<x.a>", "<x.a>"),
    ("  x^<x.a>   b^.c \n", "x^ <x.a> b^ . c"),
])
def test_parse_prints_canonical_text(text, canonical):
    res = run("parse", "-", stdin=text)
    assert res.exit_code == 0 and res.output == canonical + "\n"


def test_parse_reads_a_file(tmp_path):
    f = tmp_path / "net.txt"
    f.write_text("(<x.a>)")
    assert run("parse", str(f)).output == "<x.a>\n"


@pytest.mark.parametrize("text", ["<x.a> a^ + x^ <a.y>", "<x.a", "<x.x>"])
def test_parse_errors_exit_2(text):
    res = run("parse", "-", stdin=text)
    assert res.exit_code == 2


def test_missing_file_exits_2(tmp_path):
    assert run("parse", str(tmp_path / "absent")).exit_code == 2


def test_reduce_figure_net_reaches_identity():
    net = run("translate", "(\\x.x x)(\\y.y)").output.strip()
    res = run("reduce", net, "--regime", "full", "--trace")
    assert res.exit_code == 0
    lines = res.output.splitlines()
    assert lines[0] == f"START: {net}"
    assert any(line.startswith("STEP 1: ") for line in lines)
    identity = run("translate", "\\y.y").output.strip()
    result = next(line for line in lines if line.startswith("RESULT: "))[len("RESULT: "):]
    assert alpha_eq(parse(result), parse(identity))
    assert "truncated: false" in lines


def test_reduce_graph_lists_both_sinks():
    res = run("reduce", "<y.b> a^ + x^ <z.c>", "--graph")
    assert res.exit_code == 0
    assert res.output.splitlines()[-3:] == ["sinks: 2", "  <y.b>", "  <z.c>"]


def test_reduce_without_fuel_prints_the_start():
    res = run("reduce", "<y.b> a^ + x^ <z.c>", "--fuel", "0")
    assert res.output.splitlines() == [
        "START: <y.b> a^ + x^ <z.c>", "RESULT: <y.b> a^ + x^ <z.c>", "steps: 0", "truncated: true",
    ]


def test_reduce_rejects_unknown_regime():
    assert run("reduce", "<x.a>", "--regime", "lazy").exit_code == 2


def test_check_peirce_ok():
    res = run("check", str(CORPUS / "peirce" / "derivation.json"))
    assert res.exit_code == 0 and res.output.splitlines()[0] == "ok"


def test_check_reports_the_edited_node():
    res = run("check", str(CORPUS / "peirce-mutated" / "derivation.json"))
    assert res.exit_code == 1
    assert res.output.startswith("error at [0, 1]: ")


def test_check_reports_the_union_side_condition():
    res = run("check", str(CORPUS / "cbn-unrestricted-union" / "derivation.json"))
    assert res.exit_code == 1
    assert res.output == "error at []: unionL in CBN needs x introduced\n"


def test_check_malformed_json_exits_2(tmp_path):
    f = tmp_path / "d.json"
    f.write_text("{not json")
    assert run("check", str(f)).exit_code == 2


def test_translate_and_derive():
    assert run("translate", "x").output == "<x.a>\n"
    res = run("translate", "\\x y.x", "--derive")
    assert res.exit_code == 0
    header, body = res.output.split("\n", 1)
    assert header == "#  |- A->B->A"
    assert json.loads(body)["conclusion"]["plug_ctx"] == {"a": "A->B->A"}
    assert run("translate", "\\x.x x", "--derive").exit_code == 1
    assert run("translate", "\\.").exit_code == 2


@pytest.mark.parametrize("name", ["counterexample-1", "counterexample-2", "cbn-expansion-failure"])
def test_fixed_demos_pass(name):
    res = run("demo", name)
    assert res.exit_code == 0, res.output
    assert res.output.startswith(f"== {name} ==\nstart: ") or res.output.startswith(f"== {name} ==\n")
    assert res.output.rstrip().endswith("verdict: PASS")


@pytest.mark.parametrize("name", ["expansion", "cbn-preservation", "cbv-preservation"])
def test_property_demos_pass(name):
    res = run("demo", name, "--seed", "4", "--cases", "30")
    assert res.exit_code == 0, res.output
    assert "seed 4, 30 cases" in res.output


def test_unknown_demo_is_a_usage_error():
    assert run("demo", "nope").exit_code == 2


def test_proptest_small_run():
    res = run("proptest", "--seed", "2", "--cases", "10")
    assert res.exit_code == 0, res.output
    assert len(res.output.splitlines()) == 8


@pytest.mark.parametrize("args", [
    ("demo", "counterexample-2"),
    ("demo", "expansion", "--seed", "5", "--cases", "20"),
    ("reduce", "(x^ <x.d> b^ . d) d^ + z^ (v^ <z.a> a^ . g)", "--seed", "9", "--trace"),
    ("translate", "(\\x.x x)(\\y.y)", "--derive"),
    ("proptest", "--seed", "3", "--cases", "5"),
])
def test_output_is_byte_identical_across_runs(args):
    assert run(*args).output == run(*args).output


@pytest.mark.parametrize("args", [
    ("proptest", "--seed", "3", "--cases", "10"),
    ("demo", "counterexample-1"),
])
def test_output_does_not_depend_on_hash_seed(args):
    outputs = set()
    for hash_seed in ("1", "2"):
        env = {**os.environ, "PYTHONHASHSEED": hash_seed}
        done = subprocess.run([sys.executable, "-m", "xworkbench.cli", *args], env=env,
                              capture_output=True, check=True)
        outputs.add(done.stdout)
    assert len(outputs) == 1
