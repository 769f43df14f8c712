import csv
import json

import pytest

from nuqs.scenario import writer
from nuqs.scenario.runner import SweepRecord, ValidationReport
from nuqs.scenario.writer import write_records, write_report, write_result
from nuqs.utils.exceptions import ConfigError

# globals
RECORDS = [
    SweepRecord(
        scenario="vacuum-sweep",
        backend="closed-form",
        mode="vacuum",
        initial="e",
        x_kind="l-over-e",
        x=float(i),
        V_eV=0.0,
        delta_rad=0.0,
        P_e=1.0 - 0.1 * i,
        P_mu=0.1 * i / 3.0,
        P_tau=1.0 - (1.0 - 0.1 * i) - 0.1 * i / 3.0,
    )
    for i in range(3)
]
REPORT = ValidationReport(
    seed=1,
    draws=0,
    haar_draws=1,
    tolerance=1e-9,
    synthesized=3,
    max_reconstruction_error=2e-15,
    cnot_counts=[0, 2, 3],
    max_cnot_count=3,
    max_backend_deviation=0.0,
    passed=True,
)


def test_csv_output(tmp_path):
    path = write_records(RECORDS, tmp_path / "nested" / "out.csv")
    assert path.exists()
    with open(path, newline="", encoding="utf-8") as f:
        rows = list(csv.DictReader(f))
    assert list(rows[0]) == [
        "scenario",
        "backend",
        "mode",
        "initial",
        "x_kind",
        "x",
        "V_eV",
        "delta_rad",
        "P_e",
        "P_mu",
        "P_tau",
    ]
    assert len(rows) == len(RECORDS)
    for row, record in zip(rows, RECORDS):
        # floats survive the round trip bit for bit
        assert float(row["P_mu"]) == record.P_mu
        assert float(row["P_tau"]) == record.P_tau
        assert row["initial"] == "e"


def test_json_output(tmp_path):
    path = write_records(RECORDS, tmp_path / "out.json", "json")
    data = json.loads(path.read_text(encoding="utf-8"))
    assert [SweepRecord(**item) for item in data] == RECORDS


def test_failed_write_leaves_nothing(tmp_path, monkeypatch):
    def _broken(record):
        raise RuntimeError("disk on fire")

    monkeypatch.setattr(writer, "_row", _broken)
    with pytest.raises(RuntimeError):
        write_records(RECORDS, tmp_path / "out.csv")
    assert list(tmp_path.iterdir()) == []


def test_failed_write_keeps_previous_file(tmp_path, monkeypatch):
    path = write_records(RECORDS, tmp_path / "out.csv")
    before = path.read_bytes()
    monkeypatch.setattr(writer, "_row", lambda record: 1 / 0)
    with pytest.raises(ZeroDivisionError):
        write_records(RECORDS, path)
    assert path.read_bytes() == before
    assert [p.name for p in tmp_path.iterdir()] == ["out.csv"]


def test_report_output(tmp_path):
    path = write_report(REPORT, tmp_path / "report.json")
    data = json.loads(path.read_text(encoding="utf-8"))
    assert data["scenario"] == "circuit-validate"
    assert data["passed"] is True
    assert ValidationReport.model_validate(data) == REPORT


def test_write_result_dispatch(tmp_path):
    assert write_result(REPORT, tmp_path / "r.json", "json").exists()
    assert write_result(RECORDS, tmp_path / "r.csv").exists()
    with pytest.raises(ConfigError):
        write_result(REPORT, tmp_path / "r2.csv", "csv")
    assert not (tmp_path / "r2.csv").exists()
