"""Tests for the slab-scatter command line."""

import csv
import json
import math

import pytest

from slab_scatter.cli.slab_tool import (
    EXIT_NUMERIC,
    EXIT_OK,
    EXIT_UNDER_RESOLUTION,
    EXIT_USAGE,
    EXIT_VERIFY,
    main,
)
from slab_scatter.config import DEFAULTS, config

SINGLE_COMB = json.dumps({"period": 1, "amplitude": 100, "deltas": [{"offset": 0, "strength": 1}]})
ALTERNATING_COMB = json.dumps(
    {"period": 2, "amplitude": 50, "deltas": [{"offset": 0, "strength": 1}, {"offset": 1, "strength": -1}]}
)
FREE = json.dumps({"period": 1})


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as f:
        return list(csv.DictReader(f))


def read_json(path):
    with open(path, encoding="utf-8") as f:
        return json.load(f)


def test_bands_csv(tmp_path):
    out = tmp_path / "bands.csv"
    code = main(["bands", "--spec", SINGLE_COMB, "--omega-min", "0.1", "--omega-max", "10", "--out", str(out)])
    assert code == EXIT_OK
    assert out.read_text().splitlines()[0] == "index,lo,hi,width,lo_class,hi_class"
    rows = read_csv(out)
    assert [row["index"] for row in rows] == ["1", "2", "3"]
    assert {row["hi_class"] for row in rows} == {"nondegenerate"}
    assert float(rows[0]["hi"]) == pytest.approx(math.pi, abs=1e-9)
    # 17 significant digits
    assert len(rows[0]["hi"].replace(".", "").lstrip("0")) >= 15


def test_bands_under_resolution_still_writes(tmp_path):
    spec = json.dumps({"period": 1, "amplitude": 5000, "deltas": [{"offset": 0, "strength": 1}]})
    out = tmp_path / "bands.json"
    code = main(
        ["bands", "--spec", spec, "--omega-min", "0.1", "--omega-max", "40", "--omega-steps", "20", "--format", "json", "--out", str(out)]
    )
    assert code == EXIT_UNDER_RESOLUTION
    payload = read_json(out)
    assert payload["command"] == "bands"
    assert payload["under_resolved"]


def test_scatter_json(tmp_path):
    out = tmp_path / "scatter.json"
    code = main(
        [
            "scatter", "--spec", ALTERNATING_COMB, "--omega-min", "2.9", "--omega-max", "3.3",
            "--omega-steps", "5", "--periods", "1", "--periods", "4", "--format", "json", "--out", str(out),
        ]
    )
    assert code == EXIT_OK
    rows = read_json(out)["rows"]
    assert len(rows) == 10
    assert [row["N"] for row in rows] == [1] * 5 + [4] * 5
    for row in rows:
        assert row["error"] == ""
        assert row["R"] + row["T"] == pytest.approx(1.0, abs=1e-9)
        assert row["R_plus_T"] == pytest.approx(1.0, abs=1e-9)
        assert row["abs_t"] == pytest.approx(math.sqrt(row["T"]), rel=1e-12)
        assert row["regime"] in {"band", "gap", "edge"}


def test_scatter_output_is_deterministic(tmp_path):
    outputs = []
    for name in ("a.csv", "b.csv"):
        out = tmp_path / name
        args = ["scatter", "--spec", SINGLE_COMB, "--omega-min", "2", "--omega-max", "4", "--omega-steps", "7", "--periods", "8"]
        assert main(args + ["--out", str(out)]) == EXIT_OK
        outputs.append(out.read_bytes())
    assert outputs[0] == outputs[1]


def test_semi_reports_edge_as_error_row(tmp_path):
    out = tmp_path / "semi.json"
    code = main(
        [
            "semi", "--spec", SINGLE_COMB, "--omega-min", repr(math.pi), "--omega-max", "3.2",
            "--omega-steps", "2", "--format", "json", "--out", str(out),
        ]
    )
    assert code == EXIT_OK
    rows = read_json(out)["rows"]
    assert rows[0]["error"].startswith("EdgeSingularityError")
    assert rows[1]["error"] == ""


def test_dispersion_free_medium(tmp_path):
    out = tmp_path / "dispersion.csv"
    code = main(["dispersion", "--spec", FREE, "--omega-min", "0.5", "--omega-max", "2.5", "--omega-steps", "5", "--out", str(out)])
    assert code == EXIT_OK
    for row in read_csv(out):
        assert float(row["k_re"]) == pytest.approx(float(row["omega_re"]), abs=1e-9)
        assert float(row["V_g"]) == pytest.approx(1.0, abs=1e-6)


def test_transparency_rows(tmp_path):
    out = tmp_path / "transparency.json"
    code = main(
        ["transparency", "--spec", SINGLE_COMB, "--omega-min", "0.1", "--omega-max", "4", "--periods", "8", "--format", "json", "--out", str(out)]
    )
    assert code == EXIT_OK
    rows = read_json(out)["rows"]
    assert [row["m"] for row in rows] == list(range(1, 8))


def test_pulse_writes_series_and_summary(tmp_path):
    out = tmp_path / "pulse.csv"
    snapshot = tmp_path / "field.bin"
    code = main(
        [
            "pulse", "--amplitude", "0", "--periods", "1", "--width", "20", "--cells-per-period", "32",
            "--out", str(out), "--snapshot", str(snapshot),
        ]
    )
    assert code == EXIT_OK
    assert out.read_text().splitlines()[0] == "t,total,reflected,inside,transmitted"
    summary = read_json(tmp_path / "pulse.summary.json")
    assert summary["transmitted_fraction"] > 0.99
    assert summary["oracle"]["transmitted_total"] == pytest.approx(summary["initial_energy"], rel=1e-2)
    assert snapshot.exists()


def test_set_overrides_are_scoped_to_the_command(tmp_path):
    out = tmp_path / "scatter.csv"
    code = main(
        [
            "scatter", "--spec", SINGLE_COMB, "--omega-min", "2", "--omega-max", "3", "--omega-steps", "3",
            "--set", "transfer.det_tol=1e-11", "--out", str(out),
        ]
    )
    assert code == EXIT_OK
    assert config.get("transfer.det_tol") == DEFAULTS["transfer.det_tol"]


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["bands"],
        ["bands", "--spec", SINGLE_COMB, "--omega-min", "3", "--omega-max", "2"],
        ["scatter", "--spec", SINGLE_COMB, "--omega-min", "2", "--omega-max", "3", "--periods", "0"],
        ["scatter", "--spec", SINGLE_COMB, "--omega-min", "2", "--omega-max", "3", "--set", "transfer.nope=1"],
        ["scatter", "--spec", SINGLE_COMB, "--omega-min", "2", "--omega-max", "3", "--set", "novalue"],
        ["scatter", "--spec", '{"period": -1}', "--omega-min", "2", "--omega-max", "3"],
        ["scatter", "--spec", SINGLE_COMB, "--omega-min", "2", "--omega-max", "3", "--bogus"],
        ["pulse", "--amplitude", "1", "--theta", "2"],
    ],
)
def test_usage_errors(argv, capsys):
    assert main(argv) == EXIT_USAGE


def test_numeric_failure_exit_code():
    code = main(["dispersion", "--spec", SINGLE_COMB, "--omega-min", "2", "--omega-max", "3", "--set", "transfer.overflow=1e-3"])
    assert code == EXIT_NUMERIC


def test_verify_quick_subset(tmp_path):
    out = tmp_path / "report.json"
    assert main(["verify", "--only", "4", "--quick", "--seed", "1", "--out", str(out)]) == EXIT_OK
    report = read_json(out)
    assert report["passed"] is True
    assert [c["id"] for c in report["criteria"]] == [4]


def test_verify_failure_exit_code(tmp_path):
    out = tmp_path / "report.json"
    code = main(["verify", "--only", "4", "--quick", "--set", "verify.edge_ep_tol=-1", "--out", str(out)])
    assert code == EXIT_VERIFY
    assert read_json(out)["criteria"][0]["passed"] is False


def test_log_file_option(tmp_path):
    log = tmp_path / "run.log"
    out = tmp_path / "bands.csv"
    code = main(
        ["bands", "--spec", SINGLE_COMB, "--omega-min", "0.1", "--omega-max", "4", "--verbose", "--log-file", str(log), "--out", str(out)]
    )
    assert code == EXIT_OK
    assert "bands result written to" in log.read_text(encoding="utf-8")
