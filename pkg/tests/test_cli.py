import csv
import math

import pytest

from sasample.cli import cli_main


def read_rows(path):
    with open(path) as fh:
        return list(csv.reader(fh))


def test_sample_is_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    argv = "sample --dist normal --n 1009 --width-sd 6.7 --k 100 --method sas --seed 42 --out".split()
    assert cli_main(argv + [str(a)]) == 0
    assert cli_main(argv + [str(b)]) == 0
    rows = read_rows(a)
    assert rows[0] == ["index", "value"]
    assert len(rows) == 101
    assert a.read_text() == b.read_text()


@pytest.mark.parametrize("method", ["iid-binary", "iid-alias", "sas-golden", "sas-urn",
                                    "sys-binary", "sys-linear"])
def test_sample_methods(tmp_path, method):
    out = tmp_path / "s.csv"
    assert cli_main(["sample", "--dist", "tailed101", "--k", "7", "--method", method,
                     "--seed", "1", "--shuffle", "--out", str(out)]) == 0
    assert len(read_rows(out)) == 8


def test_sample_from_pmf_file(tmp_path):
    pmf = tmp_path / "pmf.csv"
    pmf.write_text("value,prob\n1,1\n2,3\n")
    out = tmp_path / "s.csv"
    assert cli_main(["sample", "--dist", "pmf-file", "--pmf-file", str(pmf), "--k", "4",
                     "--seed", "0", "--out", str(out)]) == 0
    assert {r[1] for r in read_rows(out)[1:]} <= {"1.0", "2.0"}


def test_sample_to_stdout(capsys):
    assert cli_main(["sample", "--k", "3", "--seed", "5"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "index,value" and len(lines) == 4


def test_seed_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("SAS_SEED", "17")
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert cli_main(["sample", "--k", "20", "--out", str(a)]) == 0
    assert cli_main(["sample", "--k", "20", "--seed", "17", "--out", str(b)]) == 0
    assert a.read_text() == b.read_text()


def test_entropy_seed_is_reported(tmp_path, monkeypatch, capsys):
    monkeypatch.delenv("SAS_SEED", raising=False)
    assert cli_main(["sample", "--k", "2", "--out", str(tmp_path / "s.csv")]) == 0
    assert "using seed" in capsys.readouterr().err


def test_gof_row_count(tmp_path):
    out = tmp_path / "gof.csv"
    assert cli_main(["gof", "--dist", "tailed101", "--kmax", "202", "--runs", "2",
                     "--seed", "1", "--out", str(out)]) == 0
    rows = read_rows(out)
    assert rows[0] == ["method", "n", "k", "mean_W", "rel_to_iid"]
    assert len(rows) == 1 + 5 * 202
    assert {r[0] for r in rows[1:]} == {"iid-alias", "sys-binary", "sas", "sas-golden", "sas-urn"}
    assert all(not math.isnan(float(r[3])) for r in rows[1:])


def test_gof_reproducible(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    argv = ["gof", "--kmax", "30", "--runs", "3", "--seed", "8", "--epsilon", "0"]
    assert cli_main(argv + ["--out", str(a)]) == 0
    assert cli_main(argv + ["--out", str(b)]) == 0
    assert a.read_text() == b.read_text()


def test_pf_row_count(tmp_path):
    out = tmp_path / "pf.csv"
    assert cli_main(["pf", "--particles", "10,20,50,100", "--series", "2", "--steps", "20",
                     "--seed", "7", "--out", str(out)]) == 0
    rows = read_rows(out)
    assert rows[0] == ["method", "N", "rmse", "seconds_per_run"]
    per_method = {}
    for r in rows[1:]:
        per_method.setdefault(r[0], []).append(int(r[1]))
    assert per_method == {m: [10, 20, 50, 100] for m in ("iid-binary", "sys-binary", "sas", "sas-urn")}


def test_pf_rmse_reproducible(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    argv = ["pf", "--particles", "8", "--series", "2", "--steps", "10", "--seed", "3",
            "--methods", "sas,iid-binary"]
    assert cli_main(argv + ["--out", str(a)]) == 0
    assert cli_main(argv + ["--out", str(b)]) == 0
    assert [r[:3] for r in read_rows(a)] == [r[:3] for r in read_rows(b)]


def test_bench(tmp_path):
    out = tmp_path / "bench.csv"
    assert cli_main(["bench", "--methods", "sas,iid-binary", "--sizes", "101,211", "--k", "10,50",
                     "--total", "5000", "--repeats", "1", "--seed", "0", "--out", str(out)]) == 0
    rows = read_rows(out)
    assert rows[0] == ["method", "n", "k", "samples_per_second"]
    assert len(rows) == 1 + 2 * 2 * 2


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["frobnicate"],
        ["sample", "--k", "3", "--bogus"],
        ["sample", "--k", "3", "--method", "nope"],
        ["gof", "--methods", "sas,nope"],
        ["pf", "--particles", "0"],
    ],
)
def test_usage_errors_exit_2(argv, capsys):
    assert cli_main(argv) == 2
    assert capsys.readouterr().err


def test_runtime_error_exits_1(tmp_path, capsys):
    assert cli_main(["sample", "--dist", "pmf-file", "--pmf-file", str(tmp_path / "missing.csv"),
                     "--k", "3", "--seed", "0"]) == 1
    assert "error" in capsys.readouterr().err
