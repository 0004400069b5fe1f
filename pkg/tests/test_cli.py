import csv
import filecmp
import os
import subprocess
import sys

import pytest

from rdnsgeo import cli

GOLDEN = os.path.join(os.path.dirname(__file__), "fixtures", "golden")


def run(*argv):
    return cli.main([str(a) for a in argv])


@pytest.fixture(scope="module")
def pipeline(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    assert run("build-index", "--sample", "--out", d / "index.bin") == 0
    assert run("generate-synthetic", "--index", d / "index.bin", "--domains", 40, "--hosts", 400,
               "--seed", 11, "--out", d / "corpus.csv", "--manifest", d / "manifest.jsonl") == 0
    assert run("mine-patterns", "--corpus", d / "corpus.csv", "--index", d / "index.bin",
               "--out", d / "rules.json") == 0
    assert run("train", "--corpus", d / "corpus.csv", "--index", d / "index.bin",
               "--patterns", d / "rules.json", "--seed", 11, "--out", d / "model.json") == 0
    return d


def test_no_arguments_is_usage_error(capsys):
    assert cli.main([]) == 1
    assert "usage" in capsys.readouterr().err.lower()


def test_unknown_flag(capsys):
    assert cli.main(["train", "--bogus"]) == 1
    assert "usage" in capsys.readouterr().err.lower()


def test_console_script_exit_code():
    proc = subprocess.run([sys.executable, "-m", "rdnsgeo.cli"], capture_output=True, text=True)
    assert proc.returncode == 1


def test_missing_file_is_data_error(tmp_path):
    assert run("analyze", "--corpus", tmp_path / "nope.csv") == 2


def test_geolocate_frankfurt(pipeline, capsys):
    d = pipeline
    capsys.readouterr()
    assert run("geolocate", "--model", d / "model.json", "--index", d / "index.bin",
               "--patterns", d / "rules.json", "62.80.122.50.fra.de.eunx.net") == 0
    rows = [line.split("\t") for line in capsys.readouterr().out.splitlines()]
    assert rows[0] == ["hostname", "rank", "city", "admin1", "country", "lat", "lon",
                       "confidence"]
    assert rows[1][1] == "1" and rows[1][2].startswith("Frankfurt")
    assert run("geolocate", "--model", d / "model.json", "--index", d / "index.bin",
               "--", "-bad-.isp.net") == 2


def test_evaluate_report(pipeline, tmp_path):
    d = pipeline
    assert run("evaluate", "--model", d / "model.json", "--index", d / "index.bin",
               "--patterns", d / "rules.json", "--test", d / "corpus.csv",
               "--report-out", tmp_path / "r.csv", "--cdf-out", tmp_path / "c.tsv") == 0
    rows = list(csv.reader(open(tmp_path / "r.csv")))
    golden_header = next(csv.reader(open(os.path.join(GOLDEN, "report.csv"))))
    assert rows[0] == golden_header
    assert rows[-1][0] == "overall" and int(rows[-1][1]) == 40 * 400


def test_evaluate_golden(tmp_path):
    assert run("evaluate", "--predictions", os.path.join(GOLDEN, "predictions.csv"),
               "--test", os.path.join(GOLDEN, "test.csv"),
               "--report-out", tmp_path / "r.csv", "--cdf-out", tmp_path / "c.tsv") == 0
    assert filecmp.cmp(tmp_path / "r.csv", os.path.join(GOLDEN, "report.csv"), shallow=False)
    assert filecmp.cmp(tmp_path / "c.tsv", os.path.join(GOLDEN, "cdf.tsv"), shallow=False)


def test_analyze(pipeline, capsys):
    capsys.readouterr()
    assert run("analyze", "--corpus", pipeline / "corpus.csv", "--index",
               pipeline / "index.bin") == 0
    out = capsys.readouterr().out
    assert out.startswith("set\tsize\tpct_of_records\tpct_of_distinct\n")
    assert "Hostnames\t16000" in out


def test_byte_identical_reruns(pipeline, tmp_path):
    d = pipeline
    assert run("build-index", "--sample", "--out", tmp_path / "index.bin") == 0
    assert filecmp.cmp(tmp_path / "index.bin", d / "index.bin", shallow=False)
    assert run("generate-synthetic", "--index", d / "index.bin", "--domains", 40, "--hosts", 400,
               "--seed", 11, "--out", tmp_path / "corpus.csv") == 0
    assert filecmp.cmp(tmp_path / "corpus.csv", d / "corpus.csv", shallow=False)
    assert run("mine-patterns", "--corpus", d / "corpus.csv", "--index", d / "index.bin",
               "--out", tmp_path / "rules.json") == 0
    assert filecmp.cmp(tmp_path / "rules.json", d / "rules.json", shallow=False)
    assert run("train", "--corpus", d / "corpus.csv", "--index", d / "index.bin",
               "--patterns", d / "rules.json", "--seed", 11, "--out", tmp_path / "model.json") == 0
    assert filecmp.cmp(tmp_path / "model.json", d / "model.json", shallow=False)
