import json

import pandas as pd
import pytest

from divlat.cli import EXIT_FAILED, EXIT_IO, EXIT_OK, EXIT_USAGE, RunConfig, main
from divlat.errors import ConfigError


@pytest.fixture(autouse=True)
def fixed_threads(monkeypatch):
    monkeypatch.delenv("DIVLAT_THREADS", raising=False)


@pytest.fixture
def pairs_csv(tmp_path):
    """fixture function to write a CSV of two pairs, one of dimension 2 and one of dimension 3.

    Args:
        tmp_path


    Return : path (string).

    """

    path = tmp_path / "pairs.csv"
    path.write_text("0.5,0.5\n0.25,0.75\n0.2,0.3,0.5\n0.1,0.6,0.3\n", encoding="utf-8")
    return str(path)


def test_compute_csv_report(pairs_csv, tmp_path):
    """integration testing of compute from CSV input to CSV report.

    Args:
        pairs_csv (fixture)
        tmp_path


    Return : assert, None.

    """

    out = tmp_path / "measures.csv"
    code = main(["compute", "-i", pairs_csv, "--report-format", "csv", "-o", str(out)])
    assert code == EXIT_OK
    df = pd.read_csv(out)
    assert list(df["pair"]) == [0, 1]
    assert list(df["n"]) == [2, 3]
    assert df.loc[0, "Delta"] == pytest.approx(2 / 15, rel=1e-11)
    assert df.loc[0, "Psi"] == pytest.approx(7 / 12, rel=1e-11)
    slack_columns = [c for c in df.columns if c.startswith("slack ")]
    assert len(slack_columns) == 10
    assert (df[slack_columns] >= -1e-10).all().all()


def test_compute_json_input_to_stdout(tmp_path, capsys):
    path = tmp_path / "pairs.json"
    path.write_text(json.dumps([{"p": [0.5, 0.5], "q": [0.25, 0.75]}]), encoding="utf-8")
    code = main(["compute", "-i", str(path), "-f", "json", "--report-format", "json"])
    assert code == EXIT_OK
    rows = json.loads(capsys.readouterr().out)
    assert rows[0]["J"] == pytest.approx(0.2746530722, rel=1e-9)


@pytest.mark.parametrize(
    "content, fragment",
    [
        ("0.5,0.5\n0.25,0.75\n0.5,0.5\n", "OddRowCount"),
        ("0.5,0.5\n0.0,1.0\n", "row 1"),
        ("0.5,0.5\n0.5,0.6\n", "SumNotOne"),
        ("0.25,,0.75\n0.5,0.5\n", "row 0: NonPositiveEntry"),
    ],
)
def test_compute_rejects_bad_input(tmp_path, capsys, content, fragment):
    path = tmp_path / "bad.csv"
    path.write_text(content, encoding="utf-8")
    assert main(["compute", "-i", str(path)]) == EXIT_USAGE
    assert fragment in capsys.readouterr().err


@pytest.mark.parametrize(
    "payload",
    [
        [[0.5, 0.5], 0.25],
        [{"p": [0.5, 0.5]}],
        {"p": [0.5, 0.5], "q": [0.25, 0.75]},
    ],
)
def test_compute_rejects_malformed_json(tmp_path, capsys, payload):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(payload), encoding="utf-8")
    assert main(["compute", "-i", str(path), "-f", "json"]) == EXIT_USAGE
    assert "MalformedRow" in capsys.readouterr().err


def test_missing_input_is_io_error(tmp_path):
    assert main(["compute", "-i", str(tmp_path / "absent.csv")]) == EXIT_IO


def test_verify_is_deterministic(tmp_path):
    args = ["verify", "--pairs", "40", "--dims", "2,7", "--seed", "3"]
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["--threads", "1"] + args + ["-o", str(first)]) == EXIT_OK
    assert main(["--threads", "3"] + args + ["-o", str(second)]) == EXIT_OK
    assert first.read_text(encoding="utf-8") == second.read_text(encoding="utf-8")
    report = json.loads(first.read_text(encoding="utf-8"))
    assert report["total"] == report["passed"] == 261 * 80
    assert report["failures"] == {}


def test_verify_family_subset_csv(tmp_path):
    out = tmp_path / "report.csv"
    code = main(["verify", "--families", "theorem-part,chain2", "--pairs", "10", "--format", "csv", "-o", str(out)])
    assert code == EXIT_OK
    df = pd.read_csv(out)
    assert df.loc[0, "total"] == (59 + 13) * 10 * 5


@pytest.mark.parametrize(
    "extra",
    [
        ["--tolerance", "0"],
        ["--pairs", "0"],
        ["--dims", "1,2"],
        ["--families", "group9"],
    ],
)
def test_verify_rejects_bad_config(extra):
    assert main(["verify"] + extra) == EXIT_USAGE


def test_threads_from_environment(monkeypatch, tmp_path):
    monkeypatch.setenv("DIVLAT_THREADS", "many")
    assert main(["verify", "--pairs", "2", "-o", str(tmp_path / "r.json")]) == EXIT_USAGE


def test_argparse_errors_exit():
    with pytest.raises(SystemExit):
        main(["frobnicate"])
    with pytest.raises(SystemExit):
        main(["compute"])


def test_run_config_validation():
    assert RunConfig().tolerance == 1e-10
    with pytest.raises(ConfigError):
        RunConfig(grid_points=10)
    with pytest.raises(ConfigError):
        RunConfig(output_format="xml")
    with pytest.raises(ConfigError):
        RunConfig(threads=0)


def test_pyramid_single_pair_and_dot(tmp_path):
    src = tmp_path / "one.csv"
    src.write_text("0.5,0.5\n0.25,0.75\n", encoding="utf-8")
    out, dot = tmp_path / "table.json", tmp_path / "lattice.dot"
    assert main(["pyramid", "-i", str(src), "--dot", str(dot), "-o", str(out)]) == EXIT_OK
    table = json.loads(out.read_text(encoding="utf-8"))
    assert len(table) == 55
    assert all(v >= 0 for v in table)
    text = dot.read_text(encoding="utf-8")
    assert text.startswith("digraph pyramid {")
    assert "style=dashed" in text


def test_pyramid_several_pairs(pairs_csv, capsys):
    assert main(["pyramid", "-i", pairs_csv]) == EXIT_OK
    tables = json.loads(capsys.readouterr().out)
    assert len(tables) == 2
    assert all(len(t) == 55 for t in tables)


def test_catalog_export(tmp_path):
    out = tmp_path / "catalog.json"
    assert main(["catalog", "-o", str(out)]) == EXIT_OK
    rows = json.loads(out.read_text(encoding="utf-8"))
    assert len(rows) == 261
    assert rows[0]["label"] == "part 1"
    assert rows[0]["constant"] == [1, 36]


def test_exit_codes_distinct():
    assert len({EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_IO}) == 4
