import json

import pytest

from nbrefute import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_gen_xor_is_deterministic(tmp_path, capsys):
    out = tmp_path / "inst.json"
    code, stdout, _ = run(capsys, "gen", "--kind", "xor", "--n", "12",
                          "--p", "0.3", "--seed", "5", "--out", str(out))
    assert code == 0
    assert "kind=xor" in stdout
    first = out.read_bytes()
    code, _, _ = run(capsys, "gen", "--kind", "xor", "--n", "12",
                     "--p", "0.3", "--seed", "5", "--out", str(out))
    assert code == 0
    assert out.read_bytes() == first
    d = json.loads(first)
    assert d["kind"] == "xor" and d["n"] == 12


def test_gen_rejects_bad_arity(tmp_path, capsys):
    out = tmp_path / "inst.json"
    code, _, stderr = run(capsys, "gen", "--kind", "xor", "--n", "2",
                          "--p", "0.3", "--out", str(out))
    assert code == 2
    assert "exceeds variable count" in stderr


def test_gen_csp_with_predicate(tmp_path, capsys):
    out = tmp_path / "inst.json"
    code, _, _ = run(capsys, "gen", "--kind", "csp", "--n", "10",
                     "--p", "0.001", "--seed", "3", "--out", str(out))
    assert code == 0
    d = json.loads(out.read_text())
    assert d["kind"] == "csp"
    assert d["truth_table"] == [0, 1, 1, 1, 1, 1, 1, 1]


def test_gen_csp_truth_table_override(tmp_path, capsys):
    out = tmp_path / "inst.json"
    code, _, _ = run(capsys, "gen", "--kind", "csp", "--n", "8",
                     "--p", "0.001", "--truth-table", "0,1,1,0,1,0,0,1",
                     "--out", str(out))
    assert code == 0
    d = json.loads(out.read_text())
    assert d["truth_table"] == [0, 1, 1, 0, 1, 0, 0, 1]


def test_refute_sound_mode(tmp_path, capsys):
    inst = tmp_path / "inst.json"
    cert = tmp_path / "cert.json"
    run(capsys, "gen", "--kind", "xor", "--n", "12", "--p", "0.3",
        "--seed", "1", "--out", str(inst))
    code, stdout, _ = run(capsys, "refute", "--in", str(inst),
                          "--out", str(cert))
    assert code == 0
    assert "bound=" in stdout
    d = json.loads(cert.read_text())
    assert d["kind"] == "xor_refutation"
    assert d["sound"] is True
    assert "timestamp" in d["meta"]
    assert d["meta"]["mode"] == "gelfand"


def test_refute_estimate_mode_is_unsound(tmp_path, capsys):
    inst = tmp_path / "inst.json"
    cert = tmp_path / "cert.json"
    run(capsys, "gen", "--kind", "xor", "--n", "12", "--p", "0.3",
        "--seed", "1", "--out", str(inst))
    code, _, _ = run(capsys, "refute", "--in", str(inst),
                     "--mode", "estimate", "--out", str(cert))
    assert code == 0
    d = json.loads(cert.read_text())
    assert d["sound"] is False
    assert d["meta"]["mode"] == "eig"


def test_refute_rerun_identical_up_to_timestamp(tmp_path, capsys):
    inst = tmp_path / "inst.json"
    run(capsys, "gen", "--kind", "xor", "--n", "12", "--p", "0.3",
        "--seed", "2", "--out", str(inst))
    certs = []
    for name in ("a.json", "b.json"):
        cert = tmp_path / name
        code, _, _ = run(capsys, "refute", "--in", str(inst),
                         "--out", str(cert))
        assert code == 0
        certs.append(json.loads(cert.read_text()))
    for d in certs:
        d["meta"].pop("timestamp")
    assert certs[0] == certs[1]


def test_refute_csp_instance(tmp_path, capsys):
    inst = tmp_path / "inst.json"
    cert = tmp_path / "cert.json"
    run(capsys, "gen", "--kind", "csp", "--n", "10", "--p", "0.002",
        "--seed", "4", "--out", str(inst))
    code, _, _ = run(capsys, "refute", "--in", str(inst), "--out", str(cert))
    assert code == 0
    assert json.loads(cert.read_text())["kind"] == "csp_refutation"


def test_audit_roundtrip(tmp_path, capsys):
    inst = tmp_path / "inst.json"
    cert = tmp_path / "cert.json"
    run(capsys, "gen", "--kind", "xor", "--n", "12", "--p", "0.3",
        "--seed", "1", "--out", str(inst))
    run(capsys, "refute", "--in", str(inst), "--out", str(cert))
    code, stdout, _ = run(capsys, "audit", "--in", str(inst),
                          "--cert", str(cert))
    assert code == 0
    report = json.loads(stdout)
    assert report["passed"] is True


def test_audit_detects_tampering(tmp_path, capsys):
    inst = tmp_path / "inst.json"
    cert = tmp_path / "cert.json"
    run(capsys, "gen", "--kind", "xor", "--n", "12", "--p", "0.3",
        "--seed", "1", "--out", str(inst))
    run(capsys, "refute", "--in", str(inst), "--out", str(cert))
    d = json.loads(cert.read_text())
    d["final_bound"] = 0.01
    d["steps"][-1]["value"] = 0.01
    cert.write_text(json.dumps(d))
    code, stdout, _ = run(capsys, "audit", "--in", str(inst),
                          "--cert", str(cert))
    assert code == 3
    assert json.loads(stdout)["passed"] is False


def test_audit_infeasible_instance(tmp_path, capsys):
    inst = tmp_path / "inst.json"
    cert = tmp_path / "cert.json"
    run(capsys, "gen", "--kind", "xor", "--n", "40", "--p", "0.02",
        "--seed", "1", "--out", str(inst))
    code, _, _ = run(capsys, "refute", "--in", str(inst), "--out", str(cert))
    assert code == 0
    code, stdout, _ = run(capsys, "audit", "--in", str(inst),
                          "--cert", str(cert))
    assert code == 4
    assert json.loads(stdout)["auditable"] is False


def test_audit_unknown_kind_is_bad_input(tmp_path, capsys):
    inst = tmp_path / "inst.json"
    inst.write_text(json.dumps({"kind": "mystery"}))
    cert = tmp_path / "cert.json"
    cert.write_text("{}")
    code, _, stderr = run(capsys, "audit", "--in", str(inst),
                          "--cert", str(cert))
    assert code == 2
    assert "unknown instance kind" in stderr


def test_missing_file_is_exit_2(tmp_path, capsys):
    code, _, stderr = run(capsys, "refute", "--in",
                          str(tmp_path / "absent.json"),
                          "--out", str(tmp_path / "cert.json"))
    assert code == 2
    assert "error" in stderr


def test_invalid_json_is_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, stderr = run(capsys, "refute", "--in", str(bad),
                          "--out", str(tmp_path / "cert.json"))
    assert code == 2
    assert "invalid JSON" in stderr


def test_check_identity(capsys):
    code, stdout, _ = run(capsys, "check-identity", "--n", "5",
                          "--trials", "10", "--seed", "1")
    assert code == 0
    assert "max residual over 10 trials at n=5" in stdout
    residual = float(stdout.strip().rsplit(" ", 1)[-1])
    assert residual <= 1e-8


def test_walks_census_command(capsys):
    code, stdout, _ = run(capsys, "walks", "--experiment", "census",
                          "--q", "2", "--z", "2", "--t", "1",
                          "--v-max", "5")
    assert code == 0
    report = json.loads(stdout)
    assert report["q"] == 2 and report["z"] == 2
    assert {"v": 5, "e": 4, "count": 1} in report["counts"]


def test_walks_census_infeasible(capsys):
    code, _, stderr = run(capsys, "walks", "--experiment", "census",
                          "--q", "2", "--z", "8", "--t", "1")
    assert code == 4
    assert "infeasible" in stderr


def test_walks_rho_command(tmp_path, capsys):
    out = tmp_path / "rho.jsonl"
    code, stdout, _ = run(capsys, "walks", "--experiment", "rho",
                          "--n", "30", "--d", "3", "--seeds", "3",
                          "--out", str(out))
    assert code == 0
    assert "median rho/sqrt(d)" in stdout
    lines = out.read_text().splitlines()
    assert len(lines) == 3
    for line in lines:
        record = json.loads(line)
        assert record["n"] == 30
