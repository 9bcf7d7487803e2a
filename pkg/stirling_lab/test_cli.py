"""Tests for the command-line front end."""

import json

import pytest

from stirling_lab import config, stats
from stirling_lab.cli import EXIT_ERROR, EXIT_FAILED, EXIT_OK, SCHEMA, main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_table_polynomial(capsys):
    """Polynomials print in canonical text."""
    code, out, _ = run(capsys, "table", "--family", "N", "--n", "3")
    assert code == EXIT_OK
    assert out == "4*x + 10*x^2 + x^3\n"


def test_table_routes_and_k(capsys):
    code, out, _ = run(capsys, "table", "--family", "Ak", "--n", "3", "--k", "2", "--route", "grammar")
    assert code == EXIT_OK
    assert out == "1 + 10*x + 4*x^2\n"
    code, out, _ = run(capsys, "table", "--family", "Ak", "--n", "2")
    assert out == "1 + k*x\n"


def test_table_json(capsys):
    code, out, _ = run(capsys, "table", "--family", "M", "--n", "3", "--format", "json")
    data = json.loads(out)
    assert code == EXIT_OK
    assert data["schema"] == SCHEMA
    assert data["polynomial"]["text"] == "1 + 10*x + 4*x^2"
    assert data["polynomial"]["vars"] == ["x"]
    assert all(isinstance(t["coeff"], str) for t in data["polynomial"]["terms"])


def test_coefficient_tables(capsys):
    """Table keys print as name[index]."""
    code, out, _ = run(capsys, "table", "--family", "XiEta", "--n", "2")
    assert code == EXIT_OK
    assert out.splitlines() == ["eta[0] = 3", "xi[0] = 1", "xi[1] = 5"]
    code, out, _ = run(capsys, "table", "--family", "GammaK", "--n", "2")
    assert out.splitlines() == ["GammaK[0,1] = k + k^2", "GammaK[2,0] = 1"]


def test_b_grammar_route_is_an_error(capsys):
    code, _, err = run(capsys, "table", "--family", "B", "--n", "2", "--route", "grammar")
    assert code == EXIT_ERROR
    assert "error:" in err and "grammar" in err


def test_grammar_command(capsys):
    """Derivatives of the Dumont grammar, with and without substitution."""
    code, out, _ = run(capsys, "grammar", "--spec", "dumont", "--start", "a", "--steps", "2")
    assert code == EXIT_OK
    assert out == "a*b^2 + a^2*b\n"
    code, out, _ = run(capsys, "grammar", "--spec", "dumont", "--start", "a", "--steps", "2", "--subs", "a=x, b=1")
    assert out == "x + x^2\n"


def test_grammar_from_file(capsys, tmp_path):
    path = tmp_path / "tiny.gram"
    path.write_text("# tiny\nx -> x*y\ny -> 1\n", encoding="utf-8")
    code, out, _ = run(capsys, "grammar", "--spec", str(path), "--start", "x", "--steps", "2", "--format", "json")
    data = json.loads(out)
    assert code == EXIT_OK
    assert data["grammar"] == "tiny"
    assert data["result"]["text"] == "x + x*y^2"


def test_grammar_errors(capsys, tmp_path):
    """Missing files and malformed grammars exit with status 2."""
    code, _, err = run(capsys, "grammar", "--spec", "no-such-grammar", "--start", "a", "--steps", "1")
    assert code == EXIT_ERROR
    bad = tmp_path / "bad.gram"
    bad.write_text("a -> a*\n", encoding="utf-8")
    code, _, err = run(capsys, "grammar", "--spec", str(bad), "--start", "a", "--steps", "1")
    assert code == EXIT_ERROR
    assert "line 1" in err


def test_check_json(capsys):
    code, out, _ = run(capsys, "check", "--identity", "thm17", "--max-n", "4", "--format", "json")
    data = json.loads(out)
    assert code == EXIT_OK
    assert data["passed"] is True
    [report] = data["reports"]
    assert report["id"] == "thm17" and report["bound"] == 4
    assert "wall_time" not in report


def test_check_text_and_timings(capsys):
    code, out, _ = run(capsys, "check", "--identity", "dumont", "--max-n", "3", "--timings")
    assert code == EXIT_OK
    assert "IDENTITY CHECKS" in out
    assert "✓ dumont (bound 3, exact)" in out
    assert "1/1 identities passed" in out


def test_check_failure_exit_code(capsys):
    """A failing identity exits with status 1 and prints its counterexample."""
    with stats.mutated("des"):
        code, out, _ = run(capsys, "check", "--identity", "stirling-cycles", "--max-n", "3")
    assert code == EXIT_FAILED
    assert "✗ stirling-cycles" in out
    assert "counterexample: n=1 des" in out


def test_check_list(capsys):
    code, out, _ = run(capsys, "check", "--list", "--format", "json")
    ids = [entry["id"] for entry in json.loads(out)["identities"]]
    assert code == EXIT_OK
    assert "dumont" in ids and "routes-Mq" in ids
    assert ids == sorted(ids)


def test_unknown_identity_exit_code(capsys):
    code, _, err = run(capsys, "check", "--identity", "nope")
    assert code == EXIT_ERROR
    assert "unknown identity" in err


def test_decompose(capsys):
    code, out, _ = run(capsys, "decompose", "--family", "M", "--n", "3")
    data = json.loads(out)
    assert code == EXIT_OK
    assert data["reference_degree"] == 2
    assert data["a"]["text"] == "1 + 7*x + x^2"
    assert data["b"]["text"] == "3 + 3*x"
    assert data["predicates"]["bi_gamma_positive"] is True
    assert data["predicates"]["symmetric"] is False


def test_decompose_mq_at_rational_q(capsys):
    code, out, _ = run(capsys, "decompose", "--family", "Mq", "--n", "3", "--q", "1/2")
    data = json.loads(out)
    assert code == EXIT_OK
    assert data["q"] == "1/2"
    assert data["predicates"]["bi_gamma_positive"] is True


def test_decompose_usage_errors(capsys):
    """--k and --q are exclusive; Mq without q is an error."""
    assert main(["decompose", "--family", "Ak", "--n", "3", "--k", "2", "--q", "1"]) == EXIT_ERROR
    code, _, err = run(capsys, "decompose", "--family", "Mq", "--n", "3")
    assert code == EXIT_ERROR
    assert "numeric q" in err


@pytest.mark.parametrize(
    "argv,flag",
    [
        (["--family", "M", "--n", "3", "--q", "1/2"], "--q"),
        (["--family", "Ak", "--n", "3", "--q", "1"], "--q"),
        (["--family", "B", "--n", "3", "--k", "2"], "--k"),
        (["--family", "Mq", "--n", "3", "--k", "2"], "--k"),
    ],
)
def test_decompose_rejects_parameters_the_family_lacks(capsys, argv, flag):
    """--q is only for Mq and --k only for Ak."""
    code, out, err = run(capsys, "decompose", *argv)
    assert code == EXIT_ERROR
    assert out == ""
    assert f"{flag} applies only to family" in err


def test_enumerate_csv(capsys):
    code, out, _ = run(capsys, "enumerate", "--objects", "stirling", "--n", "2", "--stats", "ap,lap")
    assert code == EXIT_OK
    assert out.splitlines() == ["obj,ap,lap", "2 2 1 1,0,1", "1 2 2 1,1,1", "1 1 2 2,1,2"]


def test_enumerate_words(capsys, tmp_path):
    target = tmp_path / "words.txt"
    code, out, _ = run(capsys, "enumerate", "--objects", "perm", "--n", "3", "--format", "words", "--out", str(target))
    assert code == EXIT_OK
    assert out == ""
    assert target.read_text(encoding="utf-8").splitlines()[:2] == ["1 2 3", "1 3 2"]


def test_enumerate_errors(capsys):
    """Unknown statistics and exceeded guards exit with status 2."""
    code, _, err = run(capsys, "enumerate", "--objects", "perm", "--n", "3", "--stats", "inv")
    assert code == EXIT_ERROR
    assert "inv" in err
    code, _, err = run(capsys, "enumerate", "--objects", "perm", "--n", "4", "--max-perm-n", "3")
    assert code == EXIT_ERROR
    assert "--max-perm-n" in err


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["table", "--family", "Nope", "--n", "2"],
        ["table", "--family", "Ak", "--n", "2", "--k", "0"],
        ["enumerate", "--objects", "trees", "--n", "2"],
    ],
)
def test_usage_errors(capsys, argv):
    assert main(argv) == EXIT_ERROR


def test_version(capsys):
    assert main(["--version"]) == EXIT_OK
    assert "stirling_lab" in capsys.readouterr().out


def test_bad_jobs_environment_is_a_usage_error(capsys, monkeypatch):
    """An invalid STIRLING_LAB_JOBS gives exit code 2 and a one-line message."""
    monkeypatch.setattr(config, "_active", None)
    monkeypatch.setenv(config.JOBS_ENV_VAR, "zero")
    code, out, err = run(capsys, "table", "--family", "N", "--n", "3")
    assert code == EXIT_ERROR
    assert out == ""
    assert err.startswith(f"error: {config.JOBS_ENV_VAR} must be a positive integer")
