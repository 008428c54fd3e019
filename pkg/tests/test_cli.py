from __future__ import annotations

import json
import random

import pytest

from expcomplex.chern2 import sorted_section_data
from expcomplex.cli import main
from expcomplex.grassmann import random_flag_tuple


def run(tmp_path, *argv):
    out = tmp_path / "out.json"
    code = main([*argv, "--json", str(out)])
    return code, json.loads(out.read_text())


@pytest.mark.parametrize("argv", [
    ["polylog", "--z", "0.3+0.4j", "--n", "3"],
    ["polylog", "--z", "0.3+0.4j", "--via", "0.5+1j", "0.1+0.8j"],
    ["monodromy", "--n", "3", "--loop", "g0"],
    ["period", "--example", "four-by-four"],
    ["period", "--n", "3"],
    ["five-term", "1/3", "1/2", "2", "3", "5"],
    ["five-term", "0", "0.1", "0.4", "0.7", "2", "--reals"],
    ["ladder", "--n", "3", "--k", "2", "--y", "0.2+0.1j"],
    ["bigrass", "--m", "2", "--N", "3"],
    ["hypersimplex", "--m", "3", "--N", "2"],
    ["chern2", "--charts", "6"],
    ["homotopy-check", "--n", "2", "--samples", "3"],
])
def test_subcommands_emit_json(tmp_path, argv):
    code, doc = run(tmp_path, *argv)
    assert code == 0
    assert doc["command"] == argv[0] and "config" in doc and "result" in doc


def test_monodromy_matches_closed_form(tmp_path):
    _, doc = run(tmp_path, "monodromy", "--n", "4", "--loop", "g1")
    assert doc["result"]["residual"] < 1e-9


def test_five_term_delta_vanishes(tmp_path):
    _, doc = run(tmp_path, "five-term", "1/3", "1/2", "2", "3", "5")
    assert doc["result"]["delta_zero"] is True


def test_file_inputs(tmp_path):
    flags = tmp_path / "flags.json"
    flags.write_text(json.dumps(random_flag_tuple(3, 3, random.Random(1)).to_json()))
    _, doc = run(tmp_path, "bigrass", "--flags", str(flags))
    assert doc["result"]["chain_map"] is True
    data = tmp_path / "data.json"
    data.write_text(json.dumps(sorted_section_data([0, 1, 2, 3, 5, 8]).to_json()))
    _, doc = run(tmp_path, "chern2", "--data", str(data), "--charts", "6")
    assert doc["result"]["cocycle_residual"] < 1e-9
    assert set(doc["result"]["C5_over_2pii"].values()) == {"0"}


def test_global_flags_before_or_after_the_subcommand(tmp_path):
    _, a = run(tmp_path, "--seed", "3", "hypersimplex", "--m", "2", "--N", "2")
    _, b = run(tmp_path, "hypersimplex", "--m", "2", "--N", "2", "--seed", "3")
    assert a == b and a["config"]["seed"] == 3


def test_verify_all_subset(tmp_path, capsys):
    code, doc = run(tmp_path, "verify-all", "--only", "bernoulli-identity", "hypersimplex")
    assert code == 0 and doc["pass"] is True
    assert [c["name"] for c in doc["checks"]] == ["bernoulli-identity", "hypersimplex"]
    assert all({"name", "paper_anchor", "residual", "threshold", "pass"} <= set(c) for c in doc["checks"])
    assert "PASS bernoulli-identity" in capsys.readouterr().out


def test_fault_injection_is_caught(tmp_path):
    code, doc = run(tmp_path, "verify-all", "--only", "bernoulli-identity", "five-term", "--corrupt-beta")
    assert code == 1 and doc["pass"] is False
    failed = [c["name"] for c in doc["checks"] if not c["pass"]]
    assert failed == ["bernoulli-identity"]


def test_bad_tolerance_is_a_config_error(tmp_path):
    assert main(["--tol-atom", "-1", "hypersimplex", "--m", "2", "--N", "2"]) == 2


def test_bad_precision_is_rejected():
    with pytest.raises(SystemExit):
        main(["--precision", "quad", "hypersimplex", "--m", "2", "--N", "2"])


def test_reports_are_deterministic(tmp_path):
    out = tmp_path / "r.json"
    args = ["verify-all", "--only", "five-term", "ladders", "monodromy-table", "--json", str(out)]
    main(args)
    first = out.read_bytes()
    main(args)
    assert out.read_bytes() == first


def test_seed_change_keeps_the_pass_set(tmp_path):
    only = ["--only", "five-term", "grassmannian-chain-map", "chern2"]
    _, a = run(tmp_path, "verify-all", *only)
    _, b = run(tmp_path, "--seed", "17", "verify-all", *only)
    assert [c["pass"] for c in a["checks"]] == [c["pass"] for c in b["checks"]] == [True] * 3
