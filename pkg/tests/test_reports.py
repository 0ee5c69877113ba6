"""
Tests for report writing and reading.
"""

import json
import math

import numpy as np
import pandas as pd
import pytest

from zeta_boundary.dirichlet import CoeffSeries
from zeta_boundary.exceptions import ValidationError
from zeta_boundary.metadata import RunMetadata
from zeta_boundary.reports import (
    ReportWriter,
    create_report_writer,
    read_coeff_csv,
    read_table,
    validate_format,
    write_coeff_csv,
)


@pytest.fixture
def metadata():
    return RunMetadata("ztable", "0.3.0", "deadbeef", seed=1, extra={"curve": "11a"})


@pytest.fixture
def frame():
    return pd.DataFrame(
        {
            "x": [0.2, 0.5, 1.0 / 3.0],
            "value": [-1.25e-7, 3.0, math.pi],
            "bound": [1e-12, 0.0, 1e-9],
            "sign": ["-", "+", "+"],
        }
    )


class TestValidateFormat:
    """Test format validation."""

    def test_valid(self):
        assert validate_format("csv") == "csv"
        assert validate_format("JSON") == "json"

    def test_invalid(self):
        with pytest.raises(ValidationError):
            validate_format("xlsx")


class TestReportWriter:
    """Test rendering and writing tables."""

    def test_csv_header_precedes_table(self, metadata, frame):
        text = ReportWriter(metadata, "csv").render_table(frame)
        lines = text.splitlines()
        assert lines[0] == "# tool: zeta-boundary"
        header = next(line for line in lines if not line.startswith("#"))
        assert header == "x,value,bound,sign"

    def test_csv_round_trip_is_exact(self, tmp_path, metadata, frame):
        path = ReportWriter(metadata, "csv").write_table(frame, tmp_path / "z.csv")
        meta, restored = read_table(path)
        assert meta.command == "ztable"
        assert meta.seed == 1
        assert meta.extra["curve"] == "11a"
        np.testing.assert_array_equal(restored["value"].to_numpy(), frame["value"].to_numpy())
        assert restored["sign"].tolist() == ["-", "+", "+"]

    def test_json_table(self, tmp_path, metadata, frame):
        path = ReportWriter(metadata, "json").write_table(frame, tmp_path / "nested" / "z.json")
        payload = json.loads(path.read_text())
        assert payload["metadata"]["config_hash"] == "deadbeef"
        assert len(payload["rows"]) == 3
        meta, restored = read_table(path)
        assert meta.extra["curve"] == "11a"
        assert restored["x"].tolist() == frame["x"].tolist()

    def test_json_non_finite(self, metadata):
        df = pd.DataFrame({"x": [1.0], "value": [math.inf]})
        payload = json.loads(ReportWriter(metadata, "json").render_table(df))
        assert payload["rows"][0]["value"] is None

    def test_summary_formats(self, metadata):
        summary = {"points": 5, "prefix_sign": "-", "brackets": [[0.3, 0.4]]}
        payload = json.loads(ReportWriter(metadata, "json").render_summary(summary))
        assert payload["summary"]["points"] == 5
        text = ReportWriter(metadata, "csv").render_summary(summary)
        assert "key,value" in text
        assert "points,5" in text

    def test_byte_identical_runs(self, tmp_path, frame):
        first = create_report_writer("ztable", {"curve": "11a"}, "csv", seed=0)
        second = create_report_writer("ztable", {"curve": "11a"}, "csv", seed=0)
        a = first.write_table(frame, tmp_path / "a.csv").read_bytes()
        b = second.write_table(frame, tmp_path / "b.csv").read_bytes()
        assert a == b

    def test_invalid_format(self, metadata):
        with pytest.raises(ValidationError):
            ReportWriter(metadata, "txt")


class TestCoefficientFiles:
    """Test coefficient tables."""

    def test_round_trip(self, tmp_path):
        series = CoeffSeries([0.0, 2.0, 0.0, 0.5, 0.0], label="demo")
        path = write_coeff_csv(series, tmp_path / "c.csv")
        restored = read_coeff_csv(path, limit=5)
        np.testing.assert_array_equal(restored.values, series.values)
        assert restored.label == "demo"

    def test_default_limit(self, tmp_path):
        series = CoeffSeries([1.0, 0.0, 3.0, 0.0, 0.0])
        restored = read_coeff_csv(write_coeff_csv(series, tmp_path / "c.csv"))
        assert restored.limit == 3

    def test_missing_columns(self, tmp_path, metadata):
        path = ReportWriter(metadata, "csv").write_table(
            pd.DataFrame({"n": [1], "c": [1.0]}), tmp_path / "bad.csv"
        )
        with pytest.raises(ValidationError):
            read_coeff_csv(path)
