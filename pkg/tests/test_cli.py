import json

import pytest

from frobsys.cli import main


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def records(out, kind):
    recs = []
    for line in out.splitlines():
        if line.startswith("{"):
            rec = json.loads(line)
            if rec["kind"] == kind:
                recs.append(rec)
    return recs


@pytest.fixture
def curve(tmp_path, capsys):
    path = tmp_path / "curve.jsonl"
    assert run(capsys, "count", "--a", 1, "--b", 0, "--p-max", 100, "--out", path)[0] == 0
    return path


def test_count_header_and_dataset(tmp_path, capsys, curve):
    code, out, _ = run(capsys, "count", "--a", 1, "--b", 0, "--p-max", 30,
                       "--out", tmp_path / "x.jsonl")
    cfg = records(out, "config")[0]
    assert code == 0 and cfg["threads"] >= 1 and cfg["p_max"] == 30
    text = (tmp_path / "x.jsonl").read_text()
    assert '"place":"5"' in text and '"coeffs":["5","-2"]' in text


def test_count_to_stdout_is_pure_dataset(capsys):
    code, out, _ = run(capsys, "count", "--a", 1, "--b", 0, "--p-max", 12)
    assert code == 0
    assert all(json.loads(line)["kind"] in ("sheet", "sample") for line in out.splitlines())


def test_singular_curve_exits_2(capsys):
    code, _, err = run(capsys, "count", "--a", 0, "--b", 0, "--p-max", 30)
    assert code == 2 and "singular" in err


def test_dual_twice_is_identity(tmp_path, capsys, curve):
    d1, d2 = tmp_path / "d1.jsonl", tmp_path / "d2.jsonl"
    assert run(capsys, "combine", "--op", "dual", curve, "--out", d1)[0] == 0
    assert run(capsys, "combine", "--op", "dual", d1, "--out", d2)[0] == 0
    assert d2.read_bytes() == curve.read_bytes()


def test_twist_check_exit_0(tmp_path, capsys, curve):
    tw = tmp_path / "twist.jsonl"
    run(capsys, "count", "--a", 1, "--b", 0, "--p-max", 100, "--twist-nonresidue",
        "--label", "twist", "--out", tw)
    code, out, _ = run(capsys, "check", curve, tw, "--format", "json")
    assert code == 0
    verdicts = records(out, "verdict")
    assert verdicts and {v.get("level") for v in verdicts} <= {1, 2}
    assert any(v.get("level") == 2 for v in verdicts)
    inputs = records(out, "input")
    assert len(inputs) == 2 and all(len(r["sha256"]) == 64 for r in inputs)


def test_check_negative_names_first_place(tmp_path, capsys):
    bad = tmp_path / "bad.jsonl"
    run(capsys, "cm-fixture", "--p-max", 60, "--conjugate", "--out", bad)
    code, out, _ = run(capsys, "check", bad, "--strict")
    assert code == 1
    assert "INCOMPATIBLE: first failing place 5 " in out
    assert records(out, "summary")[0]["first_failure"]["place"] == "5"


def test_check_positive_strict(tmp_path, capsys):
    good = tmp_path / "good.jsonl"
    run(capsys, "cm-fixture", "--p-max", 60, "--out", good)
    code, out, _ = run(capsys, "check", good, "--strict")
    assert code == 0 and "OK: strongly quasi-compatible" in out


def test_restrict_then_torus_rank(tmp_path, capsys):
    cm, res = tmp_path / "cm.jsonl", tmp_path / "res.jsonl"
    run(capsys, "cm-fixture", "--p-max", 20, "--out", cm)
    assert run(capsys, "restrict", cm, "--out", res)[0] == 0
    code, out, _ = run(capsys, "torus-rank", res, "--place", 5, "--place", 7)
    assert code == 0
    ranks = {(r["place"], r["rank"]) for r in records(out, "torus_rank")}
    assert ranks == {("5", 2), ("7", 1)}
    assert "ranks agree across sheets: true" in out


def test_extend_restrict_round_trip(tmp_path, capsys, curve):
    ext, back = tmp_path / "ext.jsonl", tmp_path / "back.jsonl"
    assert run(capsys, "extend", curve, "--field", "E1:Q:-3,1", "--out", ext)[0] == 0
    assert run(capsys, "restrict", ext, "--field", "Q", "--out", back)[0] == 0
    assert back.read_bytes() == curve.read_bytes()


def test_precision_failure_exits_3(tmp_path, capsys):
    path = tmp_path / "huge.jsonl"
    lines = [
        {"kind": "sheet", "label": "a", "field": "Q", "ell": 2},
        {"kind": "sample", "sheet": "a", "place": "p", "p": 5, "f": 1, "q": 5, "n": 1,
         "status": "unramified",
         "coeffs": [str((10**40 + 7) * (10**40 + 9)), str(10**40 + 7 + 3 * (10**40 + 9)),
                    str(10**40 + 7 + 10**40 + 9 + 3), "4"]},
    ]
    path.write_text("\n".join(json.dumps(r) for r in lines) + "\n")
    code, _, err = run(capsys, "torus-rank", path, "--precision-bits", 32)
    assert code == 3 and "precision" in err


def test_input_errors_exit_2(tmp_path, capsys):
    missing = tmp_path / "nope.jsonl"
    assert run(capsys, "check", missing)[0] == 2
    broken = tmp_path / "broken.jsonl"
    broken.write_text('{"kind":"sheet"}\n')
    code, _, err = run(capsys, "check", broken)
    assert code == 2 and "broken.jsonl:1:" in err


def test_halftwist(capsys):
    code, out, _ = run(capsys, "halftwist", "--dagger", "(0 2)(1 3)",
                       "--slots", "0:(1,0) 1:(1,0) 2:(0,1) 3:(0,1)", "--phi", "2,3")
    assert code == 0 and "0:(1,1) 1:(1,1) 2:(1,1) 3:(1,1)" in out
    code, out, _ = run(capsys, "halftwist", "--dagger", "(0 2)(1 3)",
                       "--slots", "0:(2,0) 1:(1,1) 2:(0,2) 3:(1,1)", "--ladder")
    assert code == 0 and "(top-set rule)" in out
    code, _, err = run(capsys, "halftwist", "--dagger", "(0 2)(1 3)",
                       "--slots", "0:(1,0) 1:(1,0) 2:(0,1) 3:(0,1)", "--phi", "0,1")
    assert code == 2 and "meets" in err
