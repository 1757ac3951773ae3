"""Tests for CSV tables and run reports"""

import io
import json

import numpy as np
import pytest

from hydrowave.core.errors import InvalidParameter
from hydrowave.schemas.analysis import RunReport, Verdict
from hydrowave.services.reporting import emit_report, format_cell, read_field_csv, render_text, write_csv


@pytest.fixture
def report():
    return RunReport(
        command="verify",
        verdict=Verdict.PASS,
        tolerance=1e-8,
        metrics={"max_residual": 2.5e-16, "points": 4},
        provenance={"family": "case2", "k0": 1.0},
        notes=["checked"],
        outputs=["out.csv"],
    )


def test_format_cell():
    assert format_cell(True) == "true"
    assert format_cell(0.1) == "0.10000000000000001"
    assert format_cell(float("nan")) == "nan"
    assert format_cell(np.float64(2.5)) == "2.5"
    assert format_cell(np.int64(3)) == "3"
    assert format_cell("ok") == "ok"


def test_write_csv(tmp_path):
    path = tmp_path / "sub" / "table.csv"
    count = write_csv(str(path), ["u", "v", "flag"], [(1.0, 0.5, "ok"), (2, float("nan"), "masked")])
    assert count == 2
    assert path.read_text() == "u,v,flag\n1,0.5,ok\n2,nan,masked\n"


def test_write_csv_is_deterministic(tmp_path):
    rows = [(u, u / 3.0, u**0.5) for u in np.linspace(0.0, 1.0, 11)]
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    write_csv(str(first), ["a", "b", "c"], rows)
    write_csv(str(second), ["a", "b", "c"], rows)
    assert first.read_bytes() == second.read_bytes()


def test_write_csv_rejects_ragged_rows(tmp_path):
    with pytest.raises(ValueError):
        write_csv(str(tmp_path / "bad.csv"), ["a", "b"], [(1.0,)])


def test_text_report(report):
    text = render_text(report)
    lines = text.splitlines()
    assert lines[0] == "verify: PASS"
    assert "  tolerance: 1.000e-08" in lines
    assert "  points: 4" in lines
    assert "  k0 = 1.0" in lines
    assert "  note: checked" in lines
    assert lines[-1] == "  wrote out.csv"


def test_json_lines_report(report):
    stream = io.StringIO()
    text = emit_report(report, "json-lines", stream)
    assert stream.getvalue() == text
    assert text.endswith("\n") and text.count("\n") == 1
    data = json.loads(text)
    assert data["verdict"] == "pass"
    assert data["metrics"]["points"] == 4.0


def test_unknown_report_format(report):
    with pytest.raises(ValueError):
        emit_report(report, "yaml", io.StringIO())


class TestReadField:
    def test_round_trip_with_flags(self, tmp_path):
        path = tmp_path / "field.csv"
        path.write_text("x,u,v,flag\n0,1,2,ok\n0.5,1.5,2.5,ok\n1,nan,nan,catastrophe\n")
        field = read_field_csv(str(path))
        assert field.n == 3
        assert field.h == pytest.approx(0.5)
        assert list(field.flags) == ["ok", "ok", "catastrophe"]
        assert not field.all_ok()

    def test_without_flags(self, tmp_path):
        path = tmp_path / "field.csv"
        path.write_text("x,u,v\n0,1,2\n1,1,2\n")
        assert read_field_csv(str(path)).all_ok()

    @pytest.mark.parametrize(
        "content", ["", "x,u,v\n", "x,u\n0,1\n", "x,u,v\n0,1,two\n", "x,u,v\n0,1,2\n0.5,1,2\n2,1,2\n"]
    )
    def test_rejects_bad_files(self, tmp_path, content):
        path = tmp_path / "field.csv"
        path.write_text(content)
        with pytest.raises(InvalidParameter):
            read_field_csv(str(path))
