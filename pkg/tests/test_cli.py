import json
import subprocess
import sys

import pytest

from tameforge import __version__
from tameforge.cli import K_LIMITS, main, parse_injection
from tameforge.errors import ConfigError

CHECK_FIELDS = {"name", "residual", "tol", "pass", "expected_fail"}


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, (json.loads(out.out) if out.out else None), out.err


def assert_schema(report, command):
    assert report["construction"] == command
    assert report["version"] == __version__
    assert isinstance(report["seed"], int) and isinstance(report["config"], dict)
    assert isinstance(report["chain"], dict)
    for check in report["checks"]:
        assert set(check) == CHECK_FIELDS


def test_seq1_random(capsys):
    code, rep, _ = run_cli(capsys, "seq1", "--k", "10", "--injection", "random", "--seed", "7")
    assert code == 0
    assert_schema(rep, "seq1")
    assert [c["name"] for c in rep["checks"]] == ["tame_action", "det", "haar"]
    assert {"kind", "dim"} <= set(rep["chain"]["primitives"][0])


def test_flatten_paper_mode(capsys):
    code, rep, _ = run_cli(capsys, "flatten-c4", "--k", "3", "--mode", "paper")
    assert code == 0
    flagged = {c["name"] for c in rep["checks"] if c["expected_fail"]}
    assert {"tame_action", "symplectic"} <= flagged
    assert not any(c["pass"] for c in rep["checks"] if c["expected_fail"])


def test_equivalence_stages(capsys):
    code, rep, _ = run_cli(capsys, "equivalence", "--points", "3", "--eps", "0.5")
    assert code == 0
    assert len(rep["stages"]) == 3
    assert {"stage", "epsilon_target", "measured_deviation", "matched_pairs", "damping_nodes_used"} <= set(
        rep["stages"][0])


@pytest.mark.parametrize("argv", [
    ["seq2", "--injection", "random", "--seed", "1"],
    ["sympl-axis", "--n", "3"],
    ["fiber-lift"],
    ["flatten-c4"],
    ["tame-c4", "--k", "4"],
    ["product", "--injection", "random"],
    ["gizatullin", "--m", "1", "--injection", "3,1,2"],
    ["kr-flow", "--k", "30"],
    ["oka-rank"],
])
def test_other_commands_pass(capsys, argv):
    code, rep, _ = run_cli(capsys, *argv)
    assert code == 0, rep
    assert_schema(rep, argv[0])
    assert rep["checks"]


def test_bad_configs_exit_2(capsys):
    assert main(["seq1", "--k", str(K_LIMITS["seq1"][1] + 1)]) == 2
    assert "ConfigError" in capsys.readouterr().err
    assert main(["seq1", "--k", "3", "--injection", "1,1,2"]) == 2
    assert main(["seq1", "--tol", "-1"]) == 2


def test_env_tolerance(capsys, monkeypatch):
    monkeypatch.setenv("TAMEFORGE_TOL", "oops")
    assert main(["seq1"]) == 2
    monkeypatch.setenv("TAMEFORGE_TOL", "1e-30")
    code, rep, _ = run_cli(capsys, "seq1", "--k", "5", "--injection", "random")
    assert rep["config"]["tol"]["residual_tol"] == 1e-30
    code, rep, _ = run_cli(capsys, "seq1", "--k", "5", "--tol", "1e-6")
    assert code == 0 and rep["config"]["tol"]["residual_tol"] == 1e-6


def test_construction_error_exit_1(capsys):
    # m = 2 with K = 4 puts 4^3 = 64 past the exponent guard
    code, rep, _ = run_cli(capsys, "gizatullin", "--m", "2", "--k", "4")
    assert code == 1 and rep["error"]["type"] == "OverflowGuard"


def test_determinism(tmp_path):
    outs = []
    for i in range(2):
        path = tmp_path / f"r{i}.json"
        subprocess.run([sys.executable, "-m", "tameforge", "equivalence", "--points", "2", "--seed", "3",
                        "--out", str(path)], check=True)
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_parse_injection():
    assert parse_injection("identity", 3, 0, 12) == [1, 2, 3]
    ell = parse_injection("random", 5, 4, 20)
    assert len(set(ell)) == 5 and max(ell) <= 20
    assert parse_injection("random", 5, 4, 20) == ell
    with pytest.raises(ConfigError):
        parse_injection("1,2", 3, 0, 12)
