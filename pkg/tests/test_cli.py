import json
import subprocess
import sys
from itertools import combinations

import numpy as np
import pytest

from lilverify import acceptance, cli, count


def _run(capsys, argv):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_count_example(capsys):
    code, out, _ = _run(capsys, ["count", "--structure", "pm", "--model", "bnm", "--n", "7", "--m", "25", "--seed", "1"])
    assert code == 0
    d = json.loads(out)
    assert d["structure"] == "perfect_matchings" and int(d["value"]) >= 0
    assert "elapsed_ms" in d["metadata"]


def test_expect_example(capsys):
    code, out, _ = _run(capsys, ["expect", "--structure", "pm", "--n", "2", "--m", "2", "--mode", "exact"])
    assert code == 0 and json.loads(out)["value_exact"] == "1/3"


def test_resource_limit_exit(capsys):
    code, _, err = _run(capsys, ["count", "--structure", "hc", "--n", "40", "--p", "0.5"])
    assert code == 3 and "22" in err


@pytest.mark.parametrize("argv", [
    ["count", "--structure", "pm", "--model", "bnm", "--n", "3", "--m", "20"],
    ["expect", "--structure", "triangles", "--n", "5"],
    ["bound", "--name", "janson", "--mu", "4", "--delta", "8", "--t", "9"],
    ["count", "--structure", "pm", "--n", "4"],
])
def test_invalid_input_exit(capsys, argv):
    code, _, err = _run(capsys, argv)
    assert code == 2 and err.startswith("error:")


def test_missing_parameter_is_named(capsys):
    code, _, err = _run(capsys, ["census", "--structure", "pm", "--n", "3"])
    assert code == 2 and "--k" in err


def _strip_metadata(text):
    d = json.loads(text)
    d.pop("metadata", None)
    return d


def test_same_manifest_same_bytes(tmp_path, capsys):
    argv = ["count", "--structure", "hc", "--n", "12", "--p", "0.6", "--seed", "7"]
    a, b = _run(capsys, argv)[1], _run(capsys, argv)[1]
    assert _strip_metadata(a) == _strip_metadata(b)
    argv = ["clt", "--structure", "subgraph", "--n", "9", "--p", "0.5", "--replicates", "300", "--seed", "3"]
    assert _run(capsys, argv)[1] == _run(capsys, argv)[1]


def test_manifest_round_trip_and_override(tmp_path, capsys):
    m = cli.Manifest("expect", {"structure": "hc", "n": 5, "m": 6, "mode": "exact"}, {"path": None, "format": "json"}, 9)
    assert cli.Manifest.from_dict(json.loads(json.dumps(m.to_dict()))) == m
    path = tmp_path / "m.json"
    path.write_text(json.dumps(m.to_dict()))
    code, out, _ = _run(capsys, ["--manifest", str(path)])
    assert code == 0 and json.loads(out)["value_exact"] == "2/7"  # 12 cycles * C(5, 1) / C(10, 6)
    code, out, _ = _run(capsys, ["--manifest", str(path), "expect", "--m", "10"])
    assert json.loads(out)["value_exact"] == "12"
    with pytest.raises(Exception):
        cli.Manifest.from_dict({"command": "count", "bogus": 1})


def test_csv_and_file_output(tmp_path, capsys):
    out = tmp_path / "r.csv"
    code, _, _ = _run(capsys, ["clt", "--structure", "edges", "--n", "10", "--p", "0.5", "--replicates", "20",
                               "--format", "csv", "--out", str(out)])
    lines = out.read_text().splitlines()
    assert code == 0 and lines[0] == "replicate,seed,value,edges" and len(lines) == 21
    code, _, err = _run(capsys, ["expect", "--structure", "pm", "--n", "2", "--m", "2", "--format", "csv"])
    assert code == 2


def test_count_from_edge_list(tmp_path, capsys):
    f = tmp_path / "k4.txt"
    f.write_text("graph 4 2\n" + "".join(f"{u} {v}\n" for u, v in combinations(range(1, 5), 2)))
    code, out, _ = _run(capsys, ["count", "--structure", "hc", "--input", str(f)])
    assert code == 0 and json.loads(out)["value"] == "3"


def test_check_exit_codes(monkeypatch, capsys):
    ok = acceptance.Outcome("x", "stub", True, "fine")
    bad = acceptance.Outcome("y", "stub", False, "broken")
    monkeypatch.setattr(acceptance, "run_suite", lambda suite, echo: [ok])
    assert _run(capsys, ["check", "oracles"])[0] == 0
    monkeypatch.setattr(acceptance, "run_suite", lambda suite, echo: [ok, bad])
    code, out, _ = _run(capsys, ["check", "oracles"])
    assert code == 4 and json.loads(out)["failed"] == ["y"]


def test_broken_ryser_sign_is_caught(monkeypatch):
    def ryser_without_sign(a):
        n = a.shape[0]
        total = 0
        for s in range(1, 1 << n):
            cols = [j for j in range(n) if s >> j & 1]
            total += int(np.prod(a[:, cols].sum(axis=1)))
        return total if n else 1

    monkeypatch.setattr(count, "permanent", ryser_without_sign)
    outcome = acceptance.crit_1a()
    assert not outcome.passed
    assert "first mismatch" in outcome.detail and "'seed'" in outcome.detail


def test_lil_sizes_come_from_subsequence(capsys):
    code, out, _ = _run(capsys, ["lil", "--structure", "subgraph", "--p", "0.5", "--base", "2", "--kmax", "4",
                                 "--replicates", "3", "--format", "csv"])
    assert code == 0 and {row.split(",")[2] for row in out.splitlines()[1:]} == {"8", "16"}


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "lilverify", "bound", "--name", "envelope", "--n", "100"],
                       capture_output=True, text=True, check=True)
    assert json.loads(r.stdout)["value"] > 0
