import json
import subprocess
import sys

import pytest

from lacunary.cli import main, parse_ladder
from lacunary import ValidationError


def run(tmp_path, *argv):
    return main([str(a) for a in argv])


def load(path):
    return json.loads(path.read_text())


def test_gen_writes_sequence_file(tmp_path):
    out = tmp_path / "seq.txt"
    assert run(tmp_path, "gen", "--geometric", 2, "--count", 20, "--out", out) == 0
    data = [l for l in out.read_text().splitlines() if not l.startswith("#")]
    assert data == [str(2 ** k) for k in range(1, 21)]
    manifest = load(tmp_path / "seq.txt.manifest.json")
    assert manifest["config"]["seed"] == 0 and "library_version" in manifest


def test_gamma_kac(tmp_path):
    out = tmp_path / "g.json"
    assert run(tmp_path, "gamma", "--kac", "--base", 2, "--cos", "1,1", "--out", out) == 0
    doc = load(out)
    assert doc["result"]["value"] == 2 and doc["result"]["exact"] == "2/1"


def test_dioph_b2_strong_geometric(tmp_path):
    seq = tmp_path / "seq.txt"
    run(tmp_path, "gen", "--geometric", 2, "--count", 20, "--out", seq)
    out = tmp_path / "c.json"
    assert run(tmp_path, "dioph", "--b2", "strong", "--coeff-bound", 1, "--seq", seq,
               "--N", 20, "--out", out) == 0
    assert load(out)["result"]["verdict"] == "consistent"


def test_gamma_ladder_and_report(tmp_path):
    g = tmp_path / "g.json"
    assert run(tmp_path, "gamma", "--seq", "geometric:2", "--capacity-bits", 0, "--cos", "1,1",
               "--ladder", "10,100", "--out", g) == 0
    rep = tmp_path / "r.json"
    md = tmp_path / "r.md"
    assert run(tmp_path, "report", g, "--out", rep, "--markdown", md) == 0
    summary = load(rep)["experiments"]
    (entry,) = summary.values()
    assert entry["ladder"] == [[10, 1.9], [100, 1.99]]
    assert load(g)["experiment_id"] in summary
    assert "gamma" in md.read_text()


def test_report_errors(tmp_path, capsys):
    assert run(tmp_path, "report", "--out", tmp_path / "r.json") == 2
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "ValidationError" and err["exit_code"] == 2
    g = tmp_path / "g.json"
    run(tmp_path, "gamma", "--kac", "--cos", "1", "--out", g)
    doc = load(g)
    doc["version"] = 999
    old = tmp_path / "old.json"
    old.write_text(json.dumps(doc))
    assert run(tmp_path, "report", g, old, "--out", tmp_path / "r.json") == 2
    assert json.loads(capsys.readouterr().err)["error"] == "VersionMismatchError"


def test_exit_codes(tmp_path, capsys):
    assert run(tmp_path, "gen", "--geometric", 2, "--count", 80, "--out", tmp_path / "s") == 3
    assert json.loads(capsys.readouterr().err)["error"] == "CapacityError"
    assert run(tmp_path, "gamma", "--seq", "geometric:2", "--cos", "1", "--ladder", "10,5",
               "--out", tmp_path / "g") == 2
    assert run(tmp_path, "dioph", "--seq", "missing.txt", "--b2", "plain",
               "--out", tmp_path / "d") == 2
    assert run(tmp_path, "dioph", "--seq", "geometric:2", "--count", 20, "--ap", 9,
               "--out", tmp_path / "d") == 3


def test_budget_exhaustion_flags_partial(tmp_path):
    out = tmp_path / "d.json"
    code = run(tmp_path, "dioph", "--seq", "geometric:2", "--count", 40, "--b2", "plain",
               "--coeff-bound", 3, "--budget", 5000, "--out", out)
    assert code == 3
    doc = load(out)
    assert doc["partial"] and doc["result"]["verdict"] == "inconclusive"


def test_determinism(tmp_path):
    outs = []
    for i in range(2):
        d = tmp_path / str(i)
        d.mkdir()
        args = ["lil", "--seq", "geometric:2", "--capacity-bits", 0, "--ladder", "geom:16:500:6",
                "--samples", 4, "--seed", 7]
        assert run(tmp_path, *args, "--out", d / "l.json") == 0
        assert run(tmp_path, "clt", "--seq", "geometric:2", "--capacity-bits", 0, "--cos", "1",
                   "--N", 128, "--samples", 300, "--out", d / "k.json") == 0
        outs.append([(d / n).read_bytes() for n in ("l.json", "l.csv", "k.json")])
    assert outs[0] == outs[1]
    assert outs[0][1].decode().splitlines()[0] == "source_id,N,value"


def test_disc_and_baseline(tmp_path):
    d = tmp_path / "d.json"
    assert run(tmp_path, "disc", "--seq", "hlp:2,3", "--N", 50, "--samples", 3, "--out", d) == 0
    cells = load(d)["result"]["cells"]
    assert len(cells) == 3 and all(c["star"] <= c["extreme"] for c in cells)
    b = tmp_path / "b.json"
    assert run(tmp_path, "baseline", "--ladder", "16,100,1000", "--seed", 2, "--out", b) == 0
    assert load(b)["result"]["n_grid"] == [16, 100, 1000]


def test_permutation_specs(tmp_path):
    table = tmp_path / "t.txt"
    table.write_text("2\n1\n")
    for spec in ("identity", "interleave:4", "window:2", f"table:{table}"):
        out = tmp_path / "g.json"
        assert run(tmp_path, "gamma", "--seq", "geometric:2", "--capacity-bits", 0, "--cos", "1,1",
                   "--perm", spec, "--ladder", "4,16", "--out", out) == 0
    assert run(tmp_path, "gamma", "--seq", "geometric:2", "--cos", "1", "--perm", "bogus",
               "--out", tmp_path / "x") == 2


def test_parse_ladder():
    assert parse_ladder("1,2,5") == [1, 2, 5]
    geo = parse_ladder("geom:16:100000:20")
    assert geo[0] == 16 and geo[-1] == 100000 and geo == sorted(set(geo))
    with pytest.raises(ValidationError):
        parse_ladder("3,3")


def test_module_entry_point(tmp_path):
    out = tmp_path / "g.json"
    res = subprocess.run([sys.executable, "-m", "lacunary", "gamma", "--kac", "--cos", "1,1",
                          "--out", str(out)], capture_output=True, text=True)
    assert res.returncode == 0, res.stderr
    assert load(out)["result"]["value"] == 2
