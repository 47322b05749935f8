"""Unit tests for deterministic result tables."""

import json
import math
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from scatterlab._utils.table_utils import ResultTable, format_value, result_timestamp
from scatterlab.exception import DomainError


def _table() -> ResultTable:
    table = ResultTable(subcommand="xsec", columns=["theta_deg", "value", "ok"])
    table.add_row(np.float64(30.0), 0.1, True)
    table.add_row(90.0, 1e-20, False)
    table.metadata = {"subcommand": "xsec", "summary": {"max_residual": 2.5e-17, "monotone": True}}
    return table


class TestFormatValue:
    @pytest.mark.parametrize(
        "value, expected",
        [
            (0.1, "0.1"),
            (1e-20, "1e-20"),
            (1.0, "1.0"),
            (-3, "-3"),
            (True, "true"),
            (False, "false"),
            (None, ""),
            (math.nan, "nan"),
            ("first", "first"),
        ],
    )
    def test_values(self, value, expected):
        assert format_value(value) == expected

    def test_round_trips_floats(self):
        value = 0.1 + 0.2
        assert float(format_value(value)) == value


class TestResultTable:
    def test_numpy_scalars_become_python_values(self):
        table = _table()
        assert type(table.rows[0][0]) is float
        assert table.column("theta_deg") == [30.0, 90.0]

    def test_row_length_checked(self):
        with pytest.raises(DomainError):
            _table().add_row(1.0, 2.0)

    def test_csv_layout(self):
        text = _table().to_csv()

        assert text == (
            "# subcommand=xsec\r\n"
            "# summary.max_residual=2.5e-17\r\n"
            "# summary.monotone=true\r\n"
            "theta_deg,value,ok\r\n"
            "30.0,0.1,true\r\n"
            "90.0,1e-20,false\r\n"
        )

    def test_json_layout(self):
        text = _table().to_json()
        document = json.loads(text)

        assert text.endswith("}\n")
        assert document["columns"] == ["theta_deg", "value", "ok"]
        assert document["rows"][1] == [90.0, 1e-20, False]
        assert document["metadata"]["summary"]["monotone"] is True

    def test_json_non_finite_as_text(self):
        table = ResultTable(subcommand="reciprocity", columns=["negated_residual"])
        table.add_row(math.nan)
        assert json.loads(table.to_json())["rows"] == [["nan"]]

    def test_render_unknown_format(self):
        with pytest.raises(DomainError):
            _table().render("xml")


class TestResultTimestamp:
    def test_fixed_default(self, monkeypatch):
        monkeypatch.delenv("SOURCE_DATE_EPOCH", raising=False)
        monkeypatch.delenv("SCATTERLAB_RESULT_TIMESTAMP", raising=False)
        assert result_timestamp() == "1970-01-01T00:00:00Z"

    def test_source_date_epoch(self, monkeypatch):
        monkeypatch.setenv("SOURCE_DATE_EPOCH", "1700000000")
        assert result_timestamp() == "2023-11-14T22:13:20Z"

    def test_setting_override(self, monkeypatch):
        monkeypatch.delenv("SOURCE_DATE_EPOCH", raising=False)
        monkeypatch.setenv("SCATTERLAB_RESULT_TIMESTAMP", "2025-01-01T00:00:00Z")
        assert result_timestamp() == "2025-01-01T00:00:00Z"
