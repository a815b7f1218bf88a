import json

import pytest

from ffplanar.cli import main
from ffplanar.config import Config, load_config


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_verify_x4_on_f9_not_planar(capsys):
    code, out, _ = run_cli(capsys, "verify", "--p", "3", "--m", "1", "--n", "2",
                           "--a", "1")
    assert code == 1
    lines = [json.loads(line) for line in out.strip().split("\n")]
    summary = lines[-1]
    assert summary["agreement"] is True and summary["planar"] is False
    witnesses = [rec["witness"] for rec in lines[:-1] if rec.get("witness")]
    assert witnesses, "a non-planar verdict must print a witness"


def test_verify_square_is_planar(capsys):
    code, out, _ = run_cli(capsys, "verify", "--p", "3", "--m", "1", "--n", "2",
                           "--a", "0", "--ell-preset", "identity")
    assert code == 0
    summary = json.loads(out.strip().split("\n")[-1])
    assert summary["planar"] is True and summary["agreement"] is True


def test_verify_example1_preset_q25(capsys):
    code, out, _ = run_cli(capsys, "verify", "--p", "5", "--m", "2", "--n", "2",
                           "--a", "3,2", "--ell-preset", "example1")
    # a = inv(2) in F_625 has digits 3,2? irrelevant: any a with Tr(a) != 0
    # only changes normalization, so just demand agreement
    summary = json.loads(out.strip().split("\n")[-1])
    assert summary["agreement"] is True
    assert code in (0, 1)


def test_verify_example1_preset_q25_normalized(capsys):
    from ffplanar.field import new_ctx

    ctx = new_ctx(5, 2, 2)
    a = ctx.format_element(ctx.inv(2))
    code, out, _ = run_cli(capsys, "verify", "--p", "5", "--m", "2", "--n", "2",
                           "--a", a, "--ell-preset", "example1")
    assert code == 0
    summary = json.loads(out.strip().split("\n")[-1])
    assert summary["planar"] is True


def test_verify_example1_preset_degenerate_char3(capsys):
    from ffplanar.field import new_ctx

    ctx = new_ctx(3, 2, 2)
    a = ctx.format_element(ctx.inv(2))
    code, out, _ = run_cli(capsys, "verify", "--p", "3", "--m", "2", "--n", "2",
                           "--a", a, "--ell-preset", "example1")
    assert code == 1  # the shape degenerates in characteristic 3


def test_verify_missing_flags_usage_error(capsys):
    code, _, err = run_cli(capsys, "verify")
    assert code == 64


def test_unknown_subcommand_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 64


def test_verify_candidate_file(tmp_path, capsys):
    from ffplanar.field import new_ctx
    from ffplanar.linpoly import LinearizedPoly
    from ffplanar.planarity import PlanarCandidate

    ctx = new_ctx(3, 1, 2)
    cand = PlanarCandidate(ctx, 0, LinearizedPoly.identity(ctx))
    path = tmp_path / "cand.json"
    path.write_text(json.dumps(cand.to_json()))
    code, out, _ = run_cli(capsys, "verify", "--candidate", str(path))
    assert code == 0

    bad = tmp_path / "bad.json"
    bad.write_text("{nope")
    code, _, err = run_cli(capsys, "verify", "--candidate", str(bad))
    assert code == 65
    code, _, _ = run_cli(capsys, "verify", "--candidate", str(tmp_path / "no.json"))
    assert code == 66


def test_scan_inline_job(capsys):
    code, out, _ = run_cli(capsys, "scan", "--p", "3", "--m", "1", "--n", "2",
                           "--family", "monomial", "--filter", "criterion-n2",
                           "--oracle-all")
    assert code == 0
    lines = out.strip().split("\n")
    assert len(lines) == 163
    assert json.loads(lines[-1])["summary"]["disagreements"] == 0


def test_scan_job_file_and_out(tmp_path, capsys):
    job = {
        "p": 3, "m": 1, "n": 2, "family": "monomial",
        "filters": ["criterion-n2"], "oracle_all": True,
    }
    job_path = tmp_path / "job.json"
    job_path.write_text(json.dumps(job))
    out_path = tmp_path / "findings.jsonl"
    code, _, _ = run_cli(capsys, "scan", "--job", str(job_path),
                         "--out", str(out_path))
    assert code == 0
    lines = out_path.read_text().strip().split("\n")
    assert len(lines) == 163
    for line in lines:
        json.loads(line)


def test_scan_csv_format(capsys):
    code, out, _ = run_cli(capsys, "--format", "csv", "charsum", "--q", "3",
                           "--k", "5", "--c", "1", "--all-targets")
    assert code == 0
    lines = out.strip().split("\n")
    assert len(lines) == 7  # header + 6 targets
    assert "count" in lines[0]


def test_charsum_all_targets(capsys):
    code, out, _ = run_cli(capsys, "charsum", "--q", "3", "--k", "5", "--c", "1",
                           "--all-targets")
    assert code == 0
    records = [json.loads(line) for line in out.strip().split("\n")]
    assert len(records) == 6
    for rec in records:
        assert rec["count"] >= 1
        assert rec["bound_holds"]


def test_charsum_single_target_with_orthogonality(capsys):
    code, out, _ = run_cli(capsys, "charsum", "--q", "3", "--k", "4",
                           "--c", "1", "--upsilon", "1", "--omega", "2",
                           "--orthogonality")
    assert code == 0
    rec = json.loads(out.strip())
    assert rec["char_sum_residual"] < 1e-4


def test_charsum_rejects_non_prime_power(capsys):
    code, _, err = run_cli(capsys, "charsum", "--q", "6", "--k", "2")
    assert code == 64


def test_subspace_roundtrip_cli(capsys):
    code, out, _ = run_cli(capsys, "subspace", "--p", "3", "--n", "3",
                           "--basis", "1,0,0;0,1,0")
    assert code == 0
    rec = json.loads(out.strip())
    assert rec["dim"] == 2
    assert rec["roundtrip_ok"] is True


def test_selftest_filtered(capsys):
    code, out, _ = run_cli(capsys, "selftest", "--filter", "field-tables")
    assert code == 0
    assert "PASS" in out


def test_selftest_corrupt_tables_negative_control(capsys):
    # the corrupted-table hook must still PASS the check that corruption is
    # detected; the check itself asserts the invariants fail on the bad copy
    code, out, _ = run_cli(capsys, "selftest", "--filter", "field-tables",
                           "--corrupt-tables")
    assert code == 0
    assert "corrupted tables detected" in out


def test_selftest_cubic_filter_runs_only_cubic(capsys):
    code, out, _ = run_cli(capsys, "selftest", "--filter", "cubic-root")
    assert code == 0
    assert "cubic-root-test" in out
    assert "classical-fixtures" not in out


def test_config_env_override(tmp_path, monkeypatch):
    monkeypatch.setenv("FFPLANAR_TABLE_CAP", "0x1000")
    cfg = load_config()
    assert cfg.table_cap == 0x1000
    monkeypatch.delenv("FFPLANAR_TABLE_CAP")
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"brute_cap": 1024, "fmt": "csv"}))
    cfg = load_config(str(path))
    assert cfg.brute_cap == 1024 and cfg.fmt == "csv"
    assert Config().brute_cap == 1 << 16


def test_config_validation():
    with pytest.raises(ValueError):
        Config(table_cap=0)
    with pytest.raises(ValueError):
        Config(fmt="xml")
