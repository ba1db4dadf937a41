import json

import pytest

from spinboson.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_trace_text(capsys):
    code, out, _ = run(capsys, "trace", "--expr", "Sz^2", "--n", "8")
    assert code == 0
    assert out.strip() == "N=8: 0.25"


def test_trace_flagship_value(capsys):
    code, out, _ = run(
        capsys, "trace", "--expr", "(S+*S- + S-*S+)^5", "--n", "2000",
        "--digits", "6",
    )
    assert code == 0
    assert "119.670" in out


def test_trace_json_schema_and_determinism(capsys):
    argv = ("trace", "--expr", "Sz^2", "--n-list", "4,8", "--format", "json")
    code, out1, _ = run(capsys, *argv)
    assert code == 0
    code, out2, _ = run(capsys, *argv)
    assert out1 == out2
    data = json.loads(out1)
    assert data["command"] == "trace"
    assert data["inputs"]["N"] == [4, 8]
    assert [r["N"] for r in data["results"]] == [4, 8]
    assert all(r["value"] == "0.25" for r in data["results"])


def test_trace_csv_and_out_file(tmp_path, capsys):
    path = tmp_path / "trace.csv"
    code, out, _ = run(
        capsys, "trace", "--expr", "Sz^2", "--n", "4", "--format", "csv",
        "--out", str(path),
    )
    assert code == 0 and out == ""
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "N,value,float_path"
    assert lines[1].startswith("4,0.25")


def test_trace_float_path_labeled(capsys):
    code, out, _ = run(
        capsys, "trace", "--expr", "Sz^2", "--n", "64", "--float"
    )
    assert code == 0 and "[float path]" in out


def test_moments_table(capsys):
    code, out, _ = run(capsys, "moments", "--max-l", "3")
    assert code == 0
    assert "1/4" in out and "3/16" in out and "15/64" in out


def test_verify_flagship(capsys):
    code, out, _ = run(
        capsys, "verify", "--expr", "(S+*S- + S-*S+)^5",
        "--n-list", "500,1000,2000", "--digits", "6",
    )
    assert code == 0
    assert "119.670" in out
    assert "boson value: 120" in out
    assert "fitted decay rate" in out


def test_xy_report(capsys):
    code, out, _ = run(
        capsys, "xy", "--gamma", "1", "--kt", "4",
        "--expr", "S+*S- + S-*S+", "--n", "64",
    )
    assert code == 0
    assert "bound 2*gamma/kT < 1: pass" in out
    assert "T_eff" in out and "<f>_boson = 0.8" in out


def test_xy_invalid_params_reported_not_fatal(capsys):
    code, out, _ = run(capsys, "xy", "--gamma", "1", "--kt", "1")
    assert code == 0
    assert "bound 2*gamma/kT < 1: FAIL" in out


def test_normal_order(capsys):
    code, out, _ = run(capsys, "normal-order", "--expr", "S+*S- + S-*S+")
    assert code == 0
    assert "->" in out and "ad a" in out


def test_oracle_match(capsys):
    code, out, _ = run(
        capsys, "oracle", "--expr", "Sz^2 + (1/2)*S+*S-", "--n-list", "3,6"
    )
    assert code == 0
    assert out.count("MATCH") == 2


def test_exit_code_domain_error(capsys):
    code, _, err = run(capsys, "trace", "--expr", "Sz^^", "--n", "4")
    assert code == 1 and "error" in err
    code, _, err = run(capsys, "trace", "--expr", "Sz")
    assert code == 1  # missing --n


def test_exit_code_resource_error(capsys):
    code, _, err = run(
        capsys, "oracle", "--expr", "Sz", "--n", "20", "--oracle-cap", "14"
    )
    assert code == 2 and "resource error" in err


def test_config_file_with_flag_precedence(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# defaults\nexpr = Sz^2\nn = 8\ndigits = 4\n")
    code, out, _ = run(capsys, "--config", str(cfg), "trace")
    assert code == 0 and out.strip() == "N=8: 0.25"
    # explicit flags win over the config value
    code, out, _ = run(
        capsys, "--config", str(cfg), "trace", "--expr", "S+*S-", "--n", "4"
    )
    assert code == 0 and out.strip() == "N=4: 0.5"


def test_config_malformed_line(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("this is not a pair\n")
    code, _, err = run(capsys, "--config", str(cfg), "trace", "--expr", "Sz")
    assert code == 1 and "malformed" in err
