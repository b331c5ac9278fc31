import io as stdio
import json
import subprocess
import sys

import pytest

from abcpart.cli import main
from abcpart.io import parse_profile

PROFILE = "3 1\n2: 0\n2: 1\n1: 2\n"


@pytest.fixture
def profile_file(tmp_path):
    path = tmp_path / "p.txt"
    path.write_text(PROFILE)
    return path


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_elect_text_and_json(capsys, profile_file):
    code, out, _ = run(capsys, "elect", "--rule", "av", profile_file)
    assert code == 0 and out.splitlines() == ["{0}", "{1}"]
    code, out, _ = run(capsys, "elect", "--rule", "seqpav", "--format", "json", profile_file)
    data = json.loads(out)
    assert code == 0 and data["committees"] == [[0], [1]] and data["rule"] == "seqpav"
    assert sorted(data["sequences"]) == [[0], [1]]


def test_elect_trace_and_stdin(capsys, monkeypatch):
    monkeypatch.setattr(sys, "stdin", stdio.StringIO(PROFILE))
    code, out, err = run(capsys, "elect", "--rule", "phragmen", "--trace", "-")
    assert code == 0 and "[trace]" in err and "level=1/2" in err


def test_generated_counterexample_has_witness(capsys, tmp_path):
    code, out, _ = run(capsys, "generate", "mes-unrep")
    assert code == 0
    path = tmp_path / "mes.txt"
    path.write_text(out)
    code, out, _ = run(capsys, "participation", "--rule", "mes", path)
    assert code == 1 and "abstainers" in out
    code, out, _ = run(capsys, "participation", "--rule", "mes", "--unrepresented", "--format", "json", path)
    assert code == 1 and json.loads(out)["witnesses"]
    code, _, _ = run(capsys, "participation", "--rule", "pav", "--group-size", "2", path)
    assert code == 0


def test_verify_outcome(capsys, profile_file, tmp_path):
    claim = tmp_path / "c.json"
    claim.write_text("[[0], [1]]")
    assert run(capsys, "verify-outcome", "--rule", "av", profile_file, claim)[0] == 0
    claim.write_text('{"committees": [[0]]}')
    assert run(capsys, "verify-outcome", "--rule", "av", profile_file, claim)[0] == 1


def test_robustness(capsys, profile_file):
    code, out, _ = run(capsys, "robustness", "--rule", "pav", profile_file)
    assert code == 1 and "candidate" in out


def test_laminar_check(capsys, tmp_path):
    code, out, _ = run(capsys, "generate", "laminar", "--m", "6", "--seed", "3")
    path = tmp_path / "lam.txt"
    path.write_text(out)
    dot = tmp_path / "lam.dot"
    assert run(capsys, "check-laminar", "--dot", dot, path)[0] == 0
    assert dot.read_text().startswith("digraph")
    code, out, _ = run(capsys, "generate", "concurrence")
    path.write_text(out)
    assert run(capsys, "check-laminar", path) == (1, "not laminar\n", "")


def test_axiom_scan(capsys, tmp_path):
    code, out, _ = run(capsys, "generate", "concurrence")
    path = tmp_path / "conc.txt"
    path.write_text(out)
    code, out, _ = run(capsys, "axiom-scan", "--rule", "seqpav", path)
    assert code == 0 and "standard: True" in out
    assert run(capsys, "axiom-scan", "--rule", "seqav", path)[0] == 1
    assert run(capsys, "axiom-scan", "--rule", "pav", path)[0] == 2


@pytest.mark.parametrize("argv", [
    ["generate", "noshow", "--k", "4", "--lambda", "2"],
    ["generate", "indset", "--graph", "k33", "--t", "2"],
    ["generate", "rx3c-source", "--t", "4", "--seed", "1"],
    ["generate", "rx3c", "--t", "92", "--scramble", "9", "--format", "json"],
])
def test_generators_emit_parseable_output(capsys, argv):
    code, out, _ = run(capsys, *argv)
    assert code == 0
    if argv[1] == "rx3c-source":
        assert len(out.splitlines()) == 12
    else:
        assert parse_profile(out).profile.n > 0


def test_errors_exit_two(capsys, tmp_path, profile_file):
    assert run(capsys, "elect", "--rule", "av", tmp_path / "missing.txt")[0] == 2
    assert run(capsys, "elect", "--rule", "av", "--k", "3", profile_file)[0] == 2
    assert run(capsys, "elect", "--rule", "nonsense", profile_file)[0] == 2
    bad = tmp_path / "bad.txt"
    bad.write_text("3 1\n1: 7\n")
    code, _, err = run(capsys, "elect", "--rule", "av", bad)
    assert code == 2 and "line 2" in err
    assert run(capsys, "frobnicate")[0] == 2


def test_module_entry_point(profile_file):
    out = subprocess.run([sys.executable, "-m", "abcpart", "elect", "--rule", "ccav", str(profile_file)],
                         capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout.splitlines() == ["{0}", "{1}"]
