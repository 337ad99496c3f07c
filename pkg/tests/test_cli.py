"""Exit codes, report files and determinism of the command-line harness."""

import json

import pytest

from linkey import cli
from linkey.metrics import CSV_HEADER


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_single_run_deterministic(capsys):
    args = ("--benchmark", "ll", "--size", "small", "--prefetcher", "linkey",
            "--preset", "a256_c1024", "--seed", "7")
    code1, out1, _ = run_cli(capsys, *args)
    code2, out2, _ = run_cli(capsys, *args)
    assert code1 == code2 == 0
    assert out1 == out2
    lines = out1.strip().split("\n")
    assert lines[0] == CSV_HEADER
    assert len(lines) == 2
    assert lines[1].startswith("ll,small,7,linkey,256,1024,")


def test_print_hw_size(capsys):
    code, out, _ = run_cli(capsys, "--preset", "a64_c256", "--print-hw-size")
    assert code == 0
    assert out == "1599.5\n"
    code, out, _ = run_cli(capsys, "--preset", "a1024_c4096",
                           "--print-hw-size")
    assert code == 0
    assert out == "32833.5\n"


def test_hw_size_follows_overrides(capsys):
    code, out, _ = run_cli(capsys, "--at", "256", "--cat", "1024",
                           "--print-hw-size")
    assert code == 0
    assert out == "7232.5\n"


def test_unknown_benchmark_is_usage_error(capsys):
    code, _, err = run_cli(capsys, "--benchmark", "btree")
    assert code == 2
    assert "btree" in err


def test_unknown_flag_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["--frobnicate"])
    assert exc.value.code == 2


def test_bad_table_size_is_usage_error(capsys):
    code, _, err = run_cli(capsys, "--benchmark", "ll", "--at", "100")
    assert code == 2
    assert "power of two" in err


def test_write_failure_exit_code(capsys, tmp_path):
    code, _, err = run_cli(capsys, "--benchmark", "ll",
                           "--csv", str(tmp_path / "nodir" / "rows.csv"))
    assert code == 1
    assert "write failed" in err


def test_csv_and_json_reports(capsys, tmp_path):
    csv_path = tmp_path / "rows.csv"
    json_path = tmp_path / "rows.json"
    code, out, err = run_cli(capsys, "--benchmark", "ll", "--size", "small",
                             "--seed", "1", "--compare", "stride",
                             "--csv", str(csv_path), "--json", str(json_path))
    assert code == 0
    assert out == ""                          # rows went to the file
    lines = csv_path.read_text().strip().split("\n")
    assert lines[0] == CSV_HEADER
    assert [ln.split(",")[3] for ln in lines[1:]] == ["linkey", "stride"]

    doc = json.loads(json_path.read_text())
    assert len(doc["runs"]) == 2
    summary = doc["summary"]
    assert summary["baseline"] == "stride"
    overall = summary["scopes"]["overall"]
    assert overall["miss_ratio_geomean"] < 1.0
    assert overall["accuracy"]["linkey"]["mean"] > 0.3
    assert overall["accuracy"]["stride"]["mean"] == 0.0
    assert overall["accuracy"]["stride"]["geomean"] is None
    assert "summary" in err or err            # human summary on stderr


def test_seed_env_fallback(capsys, monkeypatch):
    monkeypatch.setenv("LINKEY_SEED", "9")
    code, out, _ = run_cli(capsys, "--benchmark", "ll")
    assert code == 0
    assert out.split("\n")[1].startswith("ll,small,9,")
    # an explicit flag wins over the environment
    code, out, _ = run_cli(capsys, "--benchmark", "ll", "--seed", "4")
    assert out.split("\n")[1].startswith("ll,small,4,")
    monkeypatch.setenv("LINKEY_SEED", "not-a-number")
    code, _, err = run_cli(capsys, "--benchmark", "ll")
    assert code == 2
    assert "LINKEY_SEED" in err


def test_compare_with_itself(capsys):
    code, out, _ = run_cli(capsys, "--benchmark", "ll", "--prefetcher",
                           "stride", "--compare", "stride")
    assert code == 0
    assert len(out.strip().split("\n")) == 2  # one run, not two


def test_preset_with_override(capsys):
    code, out, _ = run_cli(capsys, "--benchmark", "ll", "--preset",
                           "a64_c256", "--at", "1024")
    assert code == 0
    row = out.strip().split("\n")[1].split(",")
    assert (row[4], row[5]) == ("1024", "256")
