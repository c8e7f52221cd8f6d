import json

import numpy as np
import pytest

from diracred.cli import main, parse_qspec
from diracred.constraints import save_system, synth_linear, toy_system
from diracred.numerics import InvalidInputError


@pytest.fixture()
def synth_file(tmp_path):
    path = tmp_path / "synth.json"
    save_system(synth_linear(10, 12, 8, 2, seed=7), path)
    return str(path)


@pytest.fixture()
def toy_file(tmp_path):
    path = tmp_path / "toy.json"
    save_system(toy_system(), path)
    return str(path)


def test_qspec_parser():
    labels = ("q1", "q2", "p1", "p2")
    h = parse_qspec("0.5*q1^2 + 0.5*p1^2", labels)
    z = np.array([2.0, 0.0, 3.0, 0.0])
    assert h(z) == pytest.approx(0.5 * 4 + 0.5 * 9)
    assert np.allclose(h.gradient(z), [2.0, 0.0, 3.0, 0.0])
    mixed = parse_qspec("q1*p2 - 2*q2 + 1.5", labels)
    z = np.array([1.0, 1.0, 0.0, 4.0])
    assert mixed(z) == pytest.approx(4.0 - 2.0 + 1.5)
    with pytest.raises(InvalidInputError):
        parse_qspec("q1^3", labels)
    with pytest.raises(InvalidInputError):
        parse_qspec("q1*q2*p1", labels)
    with pytest.raises(InvalidInputError):
        parse_qspec("x7", labels)
    with pytest.raises(InvalidInputError):
        parse_qspec("", labels)


def test_validate_and_analyze_pass(synth_file, tmp_path, capsys):
    assert main(["validate", synth_file]) == 0
    out = str(tmp_path / "rep.json")
    assert main(["analyze", synth_file, "--points", "5", "--json", out]) == 0
    doc = json.loads(open(out).read())
    names = [c["name"] for c in doc["checks"]]
    for tag in ("eq_21q", "eq_32", "eq_p11", "eq_11x"):
        assert tag in names
    assert len(names) == len(set(names))
    assert doc["passed"] is True


def test_analyze_detects_corrupted_z2(synth_file, tmp_path, capsys):
    doc = json.loads(open(synth_file).read())
    doc["Z2"][0][0] += 1.0
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(doc))
    assert main(["analyze", str(bad)]) == 1
    out = capsys.readouterr().out
    assert "eq_11x" in out and "FAIL" in out


def test_missing_and_malformed_files_exit_2(tmp_path, capsys):
    assert main(["analyze", str(tmp_path / "absent.json")]) == 2
    junk = tmp_path / "junk.json"
    junk.write_text("{oops")
    assert main(["validate", str(junk)]) == 2


def test_bracket_methods_agree(synth_file, capsys):
    mats = {}
    for method in ("subset", "reducible", "invertible", "irreducible"):
        assert main(["bracket", synth_file, "--method", method]) == 0
        out = capsys.readouterr().out
        mats[method] = np.array(
            [[float(v) for v in line.split()] for line in out.splitlines()]
        )
    ref = mats["subset"]
    assert ref.shape == (20, 20)
    for mat in mats.values():
        assert np.abs(mat - ref).max() < 1e-8


def test_synth_then_analyze_round_trip(tmp_path, capsys):
    out = str(tmp_path / "s.json")
    rc = main(["synth", "--pairs", "10", "--m0", "12", "--m1", "8",
               "--m2", "2", "--seed", "7", "-o", out])
    assert rc == 0
    assert main(["analyze", out, "--points", "20", "--seed", "1"]) == 0


def test_analyze_determinism(synth_file, tmp_path):
    a = str(tmp_path / "a.json")
    b = str(tmp_path / "b.json")
    main(["analyze", synth_file, "--points", "5", "--json", a])
    main(["analyze", synth_file, "--points", "5", "--json", b])
    da = json.loads(open(a).read())
    db = json.loads(open(b).read())
    da.pop("timings")
    db.pop("timings")
    assert da == db


def test_threeform_subcommand(tmp_path, capsys):
    out = str(tmp_path / "tf.json")
    assert main(["threeform", "--dim", "3", "--lattice", "4",
                 "--json", out]) == 0
    doc = json.loads(open(out).read())
    rows = {c["name"]: c for c in doc["checks"]}
    assert rows["eq_v23"]["residual"] < 1e-8
    assert rows["eq_v23"]["pass"] is True
    capsys.readouterr()


def test_threeform_paper_choices_sections(tmp_path, capsys):
    out = str(tmp_path / "tf2.json")
    assert main(["threeform", "--dim", "3", "--lattice", "3",
                 "--paper-choices", "--json", out]) == 0
    doc = json.loads(open(out).read())
    assert set(doc) == {"engine", "paper_choices"}
    paper_names = [c["name"] for c in doc["paper_choices"]["checks"]]
    assert "eq_58" in paper_names and "eq_27qq" in paper_names
    capsys.readouterr()


def test_analyze_order_one_system(tmp_path, capsys):
    from diracred.constraints import duplicated_pair_system

    path = tmp_path / "first.json"
    save_system(duplicated_pair_system(), path)
    assert main(["validate", str(path)]) == 0
    assert main(["analyze", str(path), "--points", "4"]) == 0


def test_evolve_toy(toy_file, capsys):
    rc = main(["evolve", toy_file, "--h", "0.5*q2^2 + 0.5*p2^2",
               "--steps", "50", "--dt", "0.01"])
    assert rc == 0
    out = capsys.readouterr().out
    assert "constraint drift" in out
    rc = main(["evolve", toy_file, "--h", "0.5*q9^2",
               "--steps", "1", "--dt", "0.01"])
    assert rc == 2
