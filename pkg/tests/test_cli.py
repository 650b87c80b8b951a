import json

import pytest

from chiralkit.cli import main


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_version(capsys):
    assert main(["--version"]) == 0
    assert "chiralkit-model-v1" in capsys.readouterr().out


def test_lattice_info(capsys):
    code, out, _ = run(["lattice", "info"], capsys)
    data = json.loads(out)
    assert code == 0 and data["counts_K"]["1"] == 126 and data["counts_Kdual"]["1"] == 6


def test_check_diff(fixtures, capsys):
    code, out, _ = run(["check-diff", "--model", str(fixtures / "fermat.json")], capsys)
    assert code == 0 and json.loads(out)["pass"]
    code, out, _ = run(["check-diff", "--model", str(fixtures / "corrupted_fermat.json")], capsys)
    rep = json.loads(out)
    assert code == 1
    assert {"i": 0, "m": [0, 5, 0, 0, 0], "n": "v0"}.items() <= rep["witnesses"][0].items()


def test_check_diff_general(tmp_path, capsys):
    p = tmp_path / "ansatz.json"
    p.write_text(json.dumps({
        "delta": [[0, 5, 0, 0, 0]], "delta_dual_numerators": [[5, 0, 0, 0, 0]],
        "F": [{"i": 0, "m": [0, 5, 0, 0, 0], "c": "1"}],
        "G": [{"i": 0, "n_numerators": [5, 0, 0, 0, 0], "c": "1"}]}))
    code, out, _ = run(["check-diff", "--general", str(p)], capsys)
    assert code == 1 and json.loads(out)["details"]["per_pair_pass"] is False


def test_bad_input_exit_2(tmp_path, fixtures, capsys):
    bad = tmp_path / "bad.json"
    data = json.loads((fixtures / "fermat.json").read_text())
    del data["g"]["v2"]
    bad.write_text(json.dumps(data))
    code, _, err = run(["chiral", "--model", str(bad), "--tmax", "2"], capsys)
    assert code == 2 and "g.v2" in err
    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    code, _, err = run(["check-diff", "--model", str(broken)], capsys)
    assert code == 2 and "invalid JSON" in err
    code, _, _ = run(["chiral", "--model", str(fixtures / "fermat.json"), "--tmax", "1"], capsys)
    assert code == 2
    code, _, _ = run(["chiral", "--model", str(tmp_path / "missing.json")], capsys)
    assert code == 2
    code, _, _ = run(["verify", "--check", "nonsense"], capsys)
    assert code == 2


def test_chiral_outputs_byte_stable(tmp_path, fixtures, capsys):
    model = str(fixtures / "random0.json")
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["chiral", "--model", model, "--ring", "B", "--tmax", "3", "--out", str(a)]) == 0
    assert main(["chiral", "--model", model, "--ring", "B", "--tmax", "3", "--out", str(b),
                 "--threads", "3"]) == 0
    assert a.read_bytes() == b.read_bytes()
    data = json.loads(a.read_text())
    assert data["ring"] == "B" and data["format"] == "chiralkit-dims-v1"
    t = tmp_path / "a.tsv"
    assert main(["chiral", "--model", model, "--tmax", "2", "--tsv", "--out", str(t)]) == 0
    assert t.read_text().startswith("t\tw\tdim\n")


def test_jacobian(fixtures, capsys):
    code, out, _ = run(["jacobian", "--model", str(fixtures / "fermat.json"), "--dmax", "6"], capsys)
    dims = {e["d"]: e["dim"] for e in json.loads(out)["dims"]}
    assert code == 0 and dims[5] == 101


@pytest.mark.parametrize("argv,code", [
    (["verify", "--check", "remark-beta"], 0),
    (["verify", "--check", "lemma4.6", "--dim", "2"], 0),
    (["verify", "--check", "lemma4.8"], 1),
    (["verify", "--check", "lemma4.8", "--variant", "derived"], 0),
    (["verify", "--check", "vertop"], 0),
    (["verify", "--check", "sigma"], 0),
    (["verify", "--check", "prop3.4", "--count", "3"], 0),
    (["verify", "--check", "d-squared", "--count", "1", "--ttop", "2"], 0),
])
def test_verify(argv, code, capsys):
    got, out, _ = run(argv, capsys)
    assert got == code
    assert json.loads(out)["pass"] is (code == 0)
