import json
import os
import subprocess
import sys

import pytest

from chevelem.cli import main, write_atomic


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_rootsys(capsys):
    code, out, _ = run(capsys, "rootsys", "--system", "G2")
    d = json.loads(out)
    assert code == 0 and d["hyperplane_lemma"]["ok"] and len(d["positive_roots"]) == 6


def test_ring(capsys):
    code, out, _ = run(capsys, "ring", "--ring", "Z/6")
    d = json.loads(out)
    assert code == 0 and len(d["units"]) == 2 and len(d["ideals"]) == 4


def test_commutator_csv(tmp_path, capsys):
    path = tmp_path / "b2.csv"
    assert run(capsys, "commutator", "--system", "B2", "-o", str(path))[0] == 0
    lines = path.read_text().splitlines()
    assert lines[0] == "alpha,beta,i,j,coefficient" and len(lines) > 1


def test_egroup(capsys):
    code, out, _ = run(capsys, "egroup", "--system", "A2", "--ring", "Z/2")
    d = json.loads(out)
    assert code == 0 and d["order"] == 168 and d["complete"]


def test_egroup_width(capsys, tmp_path):
    dump = tmp_path / "e.json"
    code, out, _ = run(capsys, "egroup", "--system", "A1", "--ring", "Z/3", "--full-generators",
                       "--width-of", "1,-1:2", "--dump", str(dump))
    d = json.loads(out)
    assert code == 0 and d["target_width"] == 1 and d["width"] == d["diameter"]
    assert len(json.loads(dump.read_text())) == 12


def test_egroup_cap_exit_3(capsys):
    code, out, _ = run(capsys, "egroup", "--system", "A2", "--ring", "Z/7", "--cap", "1000")
    assert code == 3 and not json.loads(out)["complete"]


def test_verify_pass_and_expected_failure(capsys):
    code, out, _ = run(capsys, "verify", "--lemma", "perfect", "--system", "A2", "--ring", "Z/2")
    assert code == 0 and json.loads(out)["exit_code"] == 0
    code, out, _ = run(capsys, "verify", "--lemma", "perfect", "--system", "B2", "--ring", "Z/2")
    d = json.loads(out)
    assert code == 1 and d["exit_code"] == 1
    (rep,) = d["reports"]
    assert rep["expected_failure"] and rep["details"]["index"] == 2
    assert set(rep) >= {"lemma_id", "instance", "status", "witnesses", "details", "timings"}


def test_verify_relative_with_ideal(capsys):
    code, out, _ = run(capsys, "verify", "--lemma", "rel-elem", "--lemma", "rel-expl",
                       "--system", "A2", "--ring", "Z/4", "--ideal", "2", "--timings")
    d = json.loads(out)
    assert code == 0 and [r["lemma_id"] for r in d["reports"]] == ["rel-elem", "rel-expl"]
    assert all("seconds" in r["timings"] for r in d["reports"])


@pytest.mark.parametrize("argv", [
    ["verify", "--lemma", "bogus", "--system", "A2", "--ring", "Z/2"],
    ["egroup", "--system", "A2,", "--ring", "Z/2"],
    ["egroup", "--system", "A2", "--ring", "Z/0"],
    ["egroup", "--system", "BC2", "--ring", "Z/2"],
    ["verify", "--lemma", "perfect", "--system", "A2"],
    ["verify", "--lemma", "elim-abs", "--system", "A1", "--ring", "Z/2"],
])
def test_usage_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and err.startswith("error:")


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["suite", "--profile", "nope"])
    assert exc.value.code == 2


def test_verify_cap_exit_3(capsys):
    code, out, _ = run(capsys, "verify", "--lemma", "rel-elem", "--system", "A2", "--ring", "Z/7",
                       "--ideal", "R", "--cap", "500")
    assert code == 3 and json.loads(out)["reports"][0]["status"] == "cap-exceeded"


def test_suite_empty(capsys):
    code, out, _ = run(capsys, "suite", "--profile", "empty")
    d = json.loads(out)
    assert code == 0 and d["reports"] == [] and d["exit_code"] == 0


def test_write_atomic(tmp_path):
    path = tmp_path / "out.json"
    path.write_text("old")
    write_atomic(str(path), "new")
    assert path.read_text() == "new"
    assert os.listdir(tmp_path) == ["out.json"]


def test_write_atomic_leaves_no_partial_file(tmp_path):
    path = tmp_path / "out.json"
    path.write_text("old")

    with pytest.raises(TypeError):
        write_atomic(str(path), 12345)       # fails while writing
    assert path.read_text() == "old" and os.listdir(tmp_path) == ["out.json"]


def test_output_is_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        assert run(capsys, "verify", "--lemma", "homogeneity", "--system", "A2", "--ring", "Z/2",
                   "-o", str(p))[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "chevelem.cli", "ring", "--ring", "Z/2"],
                          capture_output=True, text=True, timeout=120)
    assert proc.returncode == 0 and json.loads(proc.stdout)["size"] == 2
