"""File schema tests: ingestion validation, round trips, byte determinism."""

from __future__ import annotations

import datetime as dt

import pytest

from mergerkit.io import (
    DataValidationError,
    ResultTable,
    read_alias_map,
    read_events,
    read_gdp,
    read_panel,
    read_result,
    write_result,
)


def write(path, text):
    path.write_text(text, encoding="utf-8")
    return str(path)


class TestReadEvents:
    def test_empty_body(self, tmp_path):
        path = write(tmp_path / "e.csv", "date,acquirer_id,target_id\n")
        events, report = read_events(path)
        assert events == []
        assert report.rows_read == 0

    def test_three_row_fixture(self, tmp_path):
        path = write(
            tmp_path / "e.csv",
            "date,acquirer_id,target_id\n"
            "2001-01-31,A,B\n"
            "2002-02-02,A,C\n"
            "2003-03-03,D,A\n",
        )
        events, report = read_events(path)
        assert [(e.date.isoformat(), e.acquirer_id, e.target_id) for e in events] == [
            ("2001-01-31", "A", "B"),
            ("2002-02-02", "A", "C"),
            ("2003-03-03", "D", "A"),
        ]
        assert report.rows_kept == 3

    def test_missing_file(self, tmp_path):
        with pytest.raises(DataValidationError, match="no such file"):
            read_events(str(tmp_path / "absent.csv"))

    def test_malformed_header(self, tmp_path):
        path = write(tmp_path / "e.csv", "when,who,whom\n2001-01-01,A,B\n")
        with pytest.raises(DataValidationError, match="malformed header"):
            read_events(path)

    def test_self_merger_rejected_with_line_number(self, tmp_path):
        path = write(tmp_path / "e.csv",
                     "date,acquirer_id,target_id\n2001-01-01,A,A\n")
        with pytest.raises(DataValidationError, match=r"e\.csv:2"):
            read_events(path, strict=True)
        events, report = read_events(path, strict=False)
        assert events == []
        assert report.dropped == [(2, "acquirer equals target ('A')")]

    def test_bad_date_and_duplicate_in_lenient_mode(self, tmp_path):
        path = write(
            tmp_path / "e.csv",
            "date,acquirer_id,target_id\n"
            "01/02/2001,A,B\n"
            "2001-01-01,A,B\n"
            "2001-01-01,A,B\n",
        )
        events, report = read_events(path, strict=False)
        assert len(events) == 1
        assert [line for line, _ in report.dropped] == [2, 4]

    def test_alias_substitution_applies_to_both_columns(self, tmp_path):
        alias_path = write(tmp_path / "a.csv", "alias,canonical\nOLD,NEW\n")
        path = write(
            tmp_path / "e.csv",
            "date,acquirer_id,target_id\n2001-01-01,OLD,B\n2002-01-01,C,OLD\n",
        )
        aliases = read_alias_map(alias_path)
        events, report = read_events(path, aliases=aliases)
        assert events[0].acquirer_id == "NEW"
        assert events[1].target_id == "NEW"
        assert report.alias_substitutions == 2

    def test_alias_collision_becomes_self_merger(self, tmp_path):
        alias_path = write(tmp_path / "a.csv", "alias,canonical\nOLD,B\n")
        path = write(tmp_path / "e.csv", "date,acquirer_id,target_id\n2001-01-01,OLD,B\n")
        with pytest.raises(DataValidationError, match="acquirer equals target"):
            read_events(path, aliases=read_alias_map(alias_path))


class TestReadPanel:
    def test_single_row(self, tmp_path):
        path = write(tmp_path / "p.csv", "entity_id,year,balance\nA,1999,12.5\n")
        panel, report = read_panel(path)
        assert panel.balance("A", 1999) == 12.5
        assert report.rows_kept == 1

    def test_duplicate_names_both_lines(self, tmp_path):
        path = write(
            tmp_path / "p.csv",
            "entity_id,year,balance\nA,1999,12.5\nA,1999,13.0\n",
        )
        with pytest.raises(DataValidationError, match="first on line 2"):
            read_panel(path)
        panel, report = read_panel(path, strict=False)
        assert panel.balance("A", 1999) == 12.5
        assert report.dropped[0][0] == 3

    def test_nonpositive_balance_rejected(self, tmp_path):
        path = write(
            tmp_path / "p.csv",
            "entity_id,year,balance\nA,1999,-5\nB,1999,0\nC,1999,1\n",
        )
        panel, report = read_panel(path, strict=False)
        assert len(panel) == 1
        assert len(report.dropped) == 2


class TestReadGdp:
    def test_basic(self, tmp_path):
        path = write(tmp_path / "g.csv", "year,gdp\n1992,100\n1993,103.5\n")
        gdp, _ = read_gdp(path)
        assert gdp.level(1993) == 103.5
        assert gdp.ratio(1993, 1992) == pytest.approx(1.035)

    def test_duplicate_year(self, tmp_path):
        path = write(tmp_path / "g.csv", "year,gdp\n1992,100\n1992,101\n")
        with pytest.raises(DataValidationError, match="duplicate year 1992"):
            read_gdp(path)

    def test_nonpositive_level(self, tmp_path):
        path = write(tmp_path / "g.csv", "year,gdp\n1992,0\n")
        with pytest.raises(DataValidationError, match="positive"):
            read_gdp(path)


class TestResultFiles:
    def test_zipf_round_trip(self, tmp_path):
        table = ResultTable("zipf", ((1, 5), (2, 3), (3, 3)))
        path = str(tmp_path / "zipf.csv")
        write_result(path, table, {"command": "zipf", "config": {"x": 1}})
        data = read_result(path)
        assert data.schema == "zipf"
        assert data.table.rows == ((1, 5), (2, 3), (3, 3))
        assert data.metadata["config"] == {"x": 1}

    def test_two_writes_byte_identical(self, tmp_path):
        table = ResultTable("growth", (("A", 2, 0.30102999566398, 400.0),))
        meta = {"command": "growth", "config": {"start_year": 1992}}
        p1, p2 = str(tmp_path / "a.csv"), str(tmp_path / "b.csv")
        write_result(p1, table, meta)
        write_result(p2, table, meta)
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()

    def test_float_formatting_is_stable(self, tmp_path):
        table = ResultTable("market_share", ((2000, 1, 1.0 / 3.0, -0.25),))
        path = str(tmp_path / "m.csv")
        write_result(path, table, {})
        body = (tmp_path / "m.csv").read_text().splitlines()[-1]
        assert body == "2000,1,0.333333333333,-0.25"

    def test_unknown_schema_rejected(self):
        with pytest.raises(ValueError, match="unknown result schema"):
            ResultTable("nope", ())

    def test_wrong_width_rejected(self):
        with pytest.raises(ValueError, match="columns"):
            ResultTable("zipf", ((1, 2, 3),))

    def test_string_field_with_comma_rejected(self, tmp_path):
        table = ResultTable("ancestry_table", (("A,B", 1),))
        with pytest.raises(ValueError, match="may not contain"):
            write_result(str(tmp_path / "x.csv"), table, {})

    def test_reader_rejects_foreign_files(self, tmp_path):
        path = write(tmp_path / "x.csv", "rank,ancestry\n1,5\n")
        with pytest.raises(DataValidationError, match="not a mergerkit result file"):
            read_result(path)

    def test_reader_types_columns_by_schema(self, tmp_path):
        table = ResultTable("growth", (("A", 2, 0.0, 10.0),))
        path = str(tmp_path / "g.csv")
        write_result(path, table, {})
        row = read_result(path).table.rows[0]
        assert isinstance(row[1], int)
        assert isinstance(row[2], float)
        assert isinstance(row[3], float)

    def test_metadata_floats_round_trip_exactly(self, tmp_path):
        meta = {"config": {"p": 1.0 / 40000.0, "exponent": 1.5}}
        table = ResultTable("zipf", ((1, 1),))
        path = str(tmp_path / "z.csv")
        write_result(path, table, meta)
        back = read_result(path).metadata
        assert back["config"]["p"] == 1.0 / 40000.0
        assert back["config"]["exponent"] == 1.5
