import json

import pytest
from click.testing import CliRunner

from shearwitt.cli import main


@pytest.fixture
def run(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    runner = CliRunner()

    def invoke(*args, ok=True):
        res = runner.invoke(main, list(args), catch_exceptions=False)
        if ok:
            assert res.exit_code == 0, res.output
        return res

    return invoke


def test_ring_commands(run, tmp_path):
    run("ring", "new-field", "3", "--poly", "1,0,1", "-o", "f9.json")
    info = json.loads(run("ring", "info", "f9.json").output)
    assert info["size"] == 9 and info["perfect_field"]
    run("ring", "extend-nilpotent", "f9.json", "2", "-o", "r.json")
    info = json.loads(run("ring", "info", "r.json").output)
    assert info["size"] == 81 and info["nilpotency_index"] == 2
    q = json.loads(run("ring", "quotient", "r.json", "--gen", "[0,0,1,0]").output)
    assert q["rank"] == 2


def test_unknown_ring_is_reported(run):
    res = run("ring", "info", "no-such-ring", ok=False)
    assert res.exit_code != 0 and "unknown ring" in res.output


def test_snf(run):
    out = json.loads(run("linalg", "snf", "[[2,4],[6,8]]").output)
    assert out["diagonal"] == [2, 4]


def test_witt_eval(run):
    out = json.loads(run("witt", "eval", "--ring", "F2", "-n", "3", "1 + 1 + 1 + 1").output)
    assert out["packed"] == [0, 0, 1]
    out = json.loads(run("witt", "eval", "--ring", "F3", "-n", "2", "--var", "x=[1,2]", "F(V(x)) - 3*x").output)
    assert out["packed"] == [0, 0]
    res = run("witt", "eval", "--ring", "F2", "-n", "2", "__import__('os')", ok=False)
    assert res.exit_code != 0


def test_sheared_eval_and_verify(run):
    out = json.loads(run("sheared", "eval", "--ring", "F2[t]/(t^2)", "--precision", "3",
                         "--var", "x=[2,0,0]", "F(x)").output)
    assert out["witt_components"] == [[0, 0], [0, 0], [0, 0]]
    res = run("sheared", "verify", "vn-wn", "--ring", "F2[t]/(t^2)", "--precision", "3", "-n", "1",
              "--samples", "5")
    assert json.loads(res.output)["ok"]


def test_frame_window_round_trip(run, tmp_path):
    run("frame", "new", "--kind", "witt-n", "--ring", "F2", "-n", "2", "--samples", "5", "-o", "fr.json")
    spec = json.loads((tmp_path / "fr.json").read_text())
    assert spec["frame_id"] == "W_2(F2)"
    run("display", "new", "--frame", "fr.json", "--r0", "1", "--r1", "1",
        "--psi", "[[[0,0],[1,0]],[[1,0],[0,0]]]", "-o", "w.json")
    run("corpus", "import-window", "w.json", "-o", "w2.json")
    assert (tmp_path / "w.json").read_bytes() == (tmp_path / "w2.json").read_bytes()
    run("display", "dual", "w.json", "-o", "d.json")
    run("display", "dual", "d.json", "-o", "dd.json")
    assert json.loads((tmp_path / "dd.json").read_text())["psi"] == json.loads((tmp_path / "w.json").read_text())["psi"]


def test_export_import_is_byte_stable(run, tmp_path):
    for name in ("unit", "twist", "ordinary", "supersingular"):
        run("corpus", "export-window", name, "-p", "3", "--precision", "2", "-o", "a.json")
        run("corpus", "import-window", "a.json", "-o", "b.json")
        assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


def test_window_errors(run, tmp_path):
    run("corpus", "export-window", "unit", "-o", "u.json")
    d = json.loads((tmp_path / "u.json").read_text())
    d["frame_id"] = "W_9(F5)"
    (tmp_path / "bad.json").write_text(json.dumps(d))
    res = run("corpus", "import-window", "bad.json", ok=False)
    assert res.exit_code != 0 and "unknown frame id" in res.output
    d = json.loads((tmp_path / "u.json").read_text())
    d["r1"] = "one"
    (tmp_path / "bad2.json").write_text(json.dumps(d))
    res = run("corpus", "import-window", "bad2.json", ok=False)
    assert "/r1" in res.output
    run("frame", "new", "--kind", "witt-n", "--ring", "F2", "-n", "2", "--no-verify", "-o", "fr.json")
    res = run("display", "new", "--frame", "fr.json", "--r0", "1", "--r1", "1",
              "--psi", "[[[1,0],[1,0]],[[1,0],[1,0]]]", ok=False)
    assert res.exit_code != 0 and "witness" in res.output and '"det": [0]' in res.output


def test_check_morphism_exit_code(run, tmp_path):
    run("corpus", "export-window", "supersingular", "--precision", "2", "-o", "s.json")
    (tmp_path / "id.json").write_text('{"a":[[[1,0]]],"b":[[[0,0]]],"c":[[[0,0]]],"e":[[[1,0]]]}')
    (tmp_path / "bad.json").write_text('{"a":[[[1,0]]],"b":[[[0,0]]],"c":[[[1,0]]],"e":[[[1,0]]]}')
    assert json.loads(run("display", "check-morphism", "s.json", "s.json", "id.json").output)["ok"]
    assert run("display", "check-morphism", "s.json", "s.json", "bad.json", ok=False).exit_code == 1


def test_lift(run, tmp_path):
    run("frame", "new", "--kind", "rel-witt", "--ring", "F2[t]/(t^2)", "-n", "2", "--pd-gen", "[0,1]",
        "--samples", "5", "-o", "rel.json")
    run("display", "new", "--frame", '{"kind":"witt-n","ring":"F2","n":2}', "--r0", "1", "--r1", "1",
        "--psi", "[[[0,0],[1,0]],[[1,0],[0,0]]]", "-o", "q.json")
    (tmp_path / "id.json").write_text('{"a":[[[1,0]]],"b":[[[0,0]]],"c":[[[0,0]]],"e":[[[1,0]]]}')
    out = json.loads(run("display", "lift", "--frame", "rel.json", "--window", "q.json", "--window", "q.json",
                         "--morphism", "id.json").output)
    assert out["iterations"] == out["nu"]


def test_points_commands(run, tmp_path):
    out = json.loads(run("points", "eval", "--window", "twist", "--ring", "F4", "-n", "2", "--precision", "2").output)
    assert out["order_H0"] == 4 and out["provenance"]["budget"] == 2**20
    res = run("points", "table", "--window", "supersingular", "-p", "2", "--precision", "2", "-n", "1",
              "--format", "csv", "-o", "t.csv")
    lines = (tmp_path / "t.csv").read_text().splitlines()
    assert lines[0].startswith("window,ring,n,complex") and len(lines) == 4
    assert json.loads(run("points", "triangle", "--window", "unit", "--ring", "F2[t]/(t^2)",
                          "--precision", "2").output)["ok"]
    assert json.loads(run("points", "duality", "--window", "ordinary", "--ring", "F2",
                          "--precision", "2").output)["ok"]


def test_verify_and_schemas(run, tmp_path):
    res = run("verify", "constants", "-o", "rep.json", "--csv", "rep.csv")
    assert json.loads(res.output)["ok"]
    rep = json.loads((tmp_path / "rep.json").read_text())
    from shearwitt.cli import validate
    validate(rep, "report")
    res = run("verify", "nope", ok=False)
    assert res.exit_code != 0
    run("corpus", "schemas", "-o", "sch")
    assert sorted(p.name for p in (tmp_path / "sch").iterdir()) == [
        "algebra.schema.json", "frame.schema.json", "report.schema.json", "window.schema.json"]
