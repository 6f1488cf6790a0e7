import json

import pytest
from click.testing import CliRunner

from grassqkz.cli import export_object, main


@pytest.fixture
def run():
    runner = CliRunner()

    def _run(*args):
        return runner.invoke(main, list(args))

    return _run


def test_qkz_text_and_json(run):
    r = run("qkz", "--n", "3", "--k", "1", "--a", "1")
    assert r.exit_code == 0
    assert r.output.splitlines()[0] == "basis: {1} {2} {3}"
    r = run("qkz", "--n", "3", "--k", "2", "--a", "3", "--format", "json")
    d = json.loads(r.output)
    assert d["entries"][1] == ["0", "-z2*p1 + z3*p1 + kp*p1", "p1"]
    assert d["size"] == 3


def test_dyn(run):
    d = json.loads(run("dyn", "--n", "3", "--k", "1", "--i", "1", "--format", "json").output)
    assert d["entries"][2][0] == "p1^-1*p2"


def test_verification_commands_exit_zero(run):
    for args in (
        ("verify-compat", "--n", "3", "--k", "2"),
        ("verify-compat", "--n", "5", "--k", "2", "--pair", "1,2"),
        ("satake-check", "--n", "4", "--k", "2"),
        ("canonical-check", "--n", "3"),
        ("mutate", "--basis", "kapranov", "--k", "2", "--n", "4", "--braid", "t1 t2^-1"),
        ("detprop", "--n", "3", "--k", "2", "--z", "0.31,-0.57,0.11"),
        ("bcheck", "--n", "3", "--k", "2"),
        ("hrr", "--n", "3", "--k", "1"),
    ):
        r = run(*args)
        assert r.exit_code == 0, (args, r.output)


def test_failed_numeric_check_exits_one(run):
    r = run("detprop", "--n", "2", "--k", "2", "--tol", "1e-30")
    assert r.exit_code == 1
    assert "FAIL" in r.output


def test_bad_input_is_a_clean_error(run):
    r = run("qkz", "--n", "3", "--k", "5", "--a", "1")
    assert r.exit_code == 1 and "BadRange" in r.output
    r = run("detprop", "--n", "3", "--k", "2", "--z", "0.1,0.2")
    assert r.exit_code == 2
    r = run("export", "nonsense:1")
    assert r.exit_code == 1 and "unknown object id" in r.output


def test_cohomology_commands(run):
    d = json.loads(run("schubert", "--k", "2", "--n", "4", "--lam", "1", "--format", "json").output)
    assert d["localizations"]["{3,4}"] == "0"
    r = run("schubert", "--k", "2", "--n", "4", "--lam", "1", "--method", "kempf-laksov", "--format", "json")
    assert json.loads(r.output)["localizations"] == d["localizations"]
    d = json.loads(run("quantum-matrix", "--k", "2", "--n", "4", "--format", "json").output)
    assert d["entries"][0][4] == "-q"
    d = json.loads(run("pairing-table", "--k", "1", "--n", "3", "--format", "json").output)
    assert d["entries"] == [["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]]


def test_gram_and_stokes(run):
    d = json.loads(run("gram", "--basis", "beilinson", "--n", "3", "--format", "json").output)
    assert d["exceptional"] and d["entries"][0][0] == "1"
    d = json.loads(run("stokes", "--n", "3", "--format", "json").output)
    assert set(d) == {"S1", "S2"}


def test_export_is_byte_stable(run, tmp_path):
    ids = ["qkz:3,2,1", "dyn:4,2,2", "gram:kapranov:2,3", "gram:prime:1,4,1", "stokes:1,3", "quantum:2,4,2"]
    for obj in ids:
        a = run("export", obj, "--format", "json").output
        b = run("export", obj, "--format", "json").output
        assert a == b and json.loads(a)["id"] == obj
        out = tmp_path / "o.json"
        run("export", obj, "--format", "json", "--output", str(out))
        assert out.read_text() == a


def test_export_stokes_markov_flag():
    assert export_object("stokes:1,3")["markov"] is True
    assert export_object("stokes:2,3")["markov"] is True


def test_suite_reproducible(run, tmp_path):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    r = run("suite", "--max-n", "3", "--only", "compat", "--only", "numeric", "--output", str(a), "--format", "json")
    assert r.exit_code == 0
    run("suite", "--max-n", "3", "--only", "compat", "--only", "numeric", "--output", str(b), "--format", "json")
    assert a.read_bytes() == b.read_bytes()
    d = json.loads(a.read_text())
    assert d["passed"] and "elapsed" not in d


def test_suite_rejects_bad_config(run):
    r = run("suite", "--max-n", "9")
    assert r.exit_code == 1 and "max_n" in r.output
