"""Delimited file schemas: merger events, balance panels, GDP series, results.

Input files are plain UTF-8 CSV with exact headers. Readers run strict by
default (first bad row is fatal, with its line number); lenient mode drops
bad rows into a data-quality report instead. Result files carry a two-line
preamble - a schema tag and a canonical-JSON metadata line - followed by the
data columns. Writers are byte-stable: fixed column order, '\\n' newlines,
locale-independent numbers at 12 significant digits, and an atomic
temp-file-plus-rename so readers never see a partial file. Identical payload
and metadata always produce identical bytes, which is what makes replay
verification a byte comparison.
"""

from __future__ import annotations

import csv
import datetime as dt
import hashlib
import json
import os
import tempfile
from dataclasses import dataclass, field

from .analysis import BalancePanel, GdpSeries
from .genealogy import MergerEvent

__all__ = [
    "DataValidationError",
    "IngestReport",
    "ResultTable",
    "ResultData",
    "SCHEMAS",
    "SCHEMA_VERSION",
    "read_events",
    "read_alias_map",
    "read_panel",
    "read_gdp",
    "write_result",
    "read_result",
    "sha256_of",
]

# Bump on any column change to an export schema; readers reject other versions.
SCHEMA_VERSION = 1

EVENT_HEADER = ["date", "acquirer_id", "target_id"]
ALIAS_HEADER = ["alias", "canonical"]
PANEL_HEADER = ["entity_id", "year", "balance"]
GDP_HEADER = ["year", "gdp"]

# Result export schemas: column name -> type tag (int / float / str).
SCHEMAS: dict[str, list[tuple[str, str]]] = {
    "population": [("agent_id", "int"), ("ancestry", "int")],
    "ancestry_table": [("entity_id", "str"), ("ancestry", "int")],
    "zipf": [("rank", "int"), ("ancestry", "int")],
    "distribution": [("bin_low", "int"), ("bin_high", "int"), ("frequency", "int")],
    "rank_envelope": [
        ("rank", "int"),
        ("min", "int"),
        ("band_low", "float"),
        ("band_high", "float"),
        ("max", "int"),
        ("support", "int"),
    ],
    "distribution_envelope": [("ancestry", "int"), ("freq_min", "int"), ("freq_max", "int")],
    "coverage": [
        ("coordinate", "int"),
        ("empirical", "float"),
        ("envelope_min", "float"),
        ("envelope_max", "float"),
        ("inside", "int"),
    ],
    "rank_groups": [
        ("method", "str"),
        ("group_low", "int"),
        ("group_high", "int"),
        ("mean_mergers", "float"),
    ],
    "growth": [
        ("entity_id", "str"),
        ("acquisition_count", "int"),
        ("growth_index", "float"),
        ("end_balance", "float"),
    ],
    "market_share": [
        ("year", "int"),
        ("percentile", "int"),
        ("share", "float"),
        ("cumulative_change", "float"),
    ],
}


class DataValidationError(ValueError):
    """A file (or row, in strict mode) that violates its schema."""


@dataclass
class IngestReport:
    """What a reader kept and what it dropped."""

    path: str
    rows_read: int = 0
    rows_kept: int = 0
    dropped: list[tuple[int, str]] = field(default_factory=list)
    alias_substitutions: int = 0

    def drop(self, line_no: int, reason: str, strict: bool) -> None:
        if strict:
            raise DataValidationError(f"{self.path}:{line_no}: {reason}")
        self.dropped.append((line_no, reason))


def _open_rows(path: str, expected_header: list[str]):
    try:
        handle = open(path, "r", encoding="utf-8", newline="")
    except FileNotFoundError:
        raise DataValidationError(f"no such file: {path}") from None
    with handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise DataValidationError(f"{path}: empty file, expected header {','.join(expected_header)}")
        if header != expected_header:
            raise DataValidationError(
                f"{path}: malformed header {','.join(header)!r}, expected {','.join(expected_header)!r}"
            )
        yield from ((line_no, row) for line_no, row in enumerate(reader, start=2))


def read_alias_map(path: str) -> dict[str, str]:
    """Alias sidecar mapping old ids to canonical ids (single substitution pass)."""
    aliases: dict[str, str] = {}
    for line_no, row in _open_rows(path, ALIAS_HEADER):
        if len(row) != 2 or not row[0] or not row[1]:
            raise DataValidationError(f"{path}:{line_no}: expected alias,canonical")
        if row[0] in aliases:
            raise DataValidationError(f"{path}:{line_no}: duplicate alias {row[0]!r}")
        aliases[row[0]] = row[1]
    return aliases


def read_events(
    path: str,
    strict: bool = True,
    aliases: dict[str, str] | None = None,
) -> tuple[list[MergerEvent], IngestReport]:
    """Parse a merger-event file, applying alias substitution to both id columns."""
    aliases = aliases or {}
    report = IngestReport(path=str(path))
    events: list[MergerEvent] = []
    seen: set[tuple[dt.date, str, str]] = set()
    for line_no, row in _open_rows(path, EVENT_HEADER):
        report.rows_read += 1
        if len(row) != 3:
            report.drop(line_no, f"expected 3 fields, got {len(row)}", strict)
            continue
        raw_date, acquirer, target = row
        try:
            date = dt.date.fromisoformat(raw_date)
        except ValueError:
            report.drop(line_no, f"unparseable date {raw_date!r}", strict)
            continue
        if not acquirer or not target:
            report.drop(line_no, "empty entity id", strict)
            continue
        if acquirer in aliases:
            acquirer = aliases[acquirer]
            report.alias_substitutions += 1
        if target in aliases:
            target = aliases[target]
            report.alias_substitutions += 1
        if acquirer == target:
            report.drop(line_no, f"acquirer equals target ({acquirer!r})", strict)
            continue
        key = (date, acquirer, target)
        if key in seen:
            report.drop(line_no, f"duplicate event {raw_date},{acquirer},{target}", strict)
            continue
        seen.add(key)
        events.append(MergerEvent(date=date, acquirer_id=acquirer, target_id=target))
        report.rows_kept += 1
    return events, report


def read_panel(path: str, strict: bool = True) -> tuple[BalancePanel, IngestReport]:
    """Parse a balance panel; duplicate (entity, year) names both offending lines."""
    report = IngestReport(path=str(path))
    panel = BalancePanel()
    first_line: dict[tuple[str, int], int] = {}
    for line_no, row in _open_rows(path, PANEL_HEADER):
        report.rows_read += 1
        if len(row) != 3:
            report.drop(line_no, f"expected 3 fields, got {len(row)}", strict)
            continue
        entity, raw_year, raw_balance = row
        if not entity:
            report.drop(line_no, "empty entity id", strict)
            continue
        try:
            year = int(raw_year)
        except ValueError:
            report.drop(line_no, f"unparseable year {raw_year!r}", strict)
            continue
        try:
            balance = float(raw_balance)
        except ValueError:
            report.drop(line_no, f"unparseable balance {raw_balance!r}", strict)
            continue
        if not (balance > 0):
            report.drop(line_no, f"balance must be positive, got {raw_balance}", strict)
            continue
        key = (entity, year)
        if key in first_line:
            report.drop(
                line_no,
                f"duplicate observation for ({entity},{year}); first on line {first_line[key]}",
                strict,
            )
            continue
        first_line[key] = line_no
        panel.add(entity, year, balance)
        report.rows_kept += 1
    return panel, report


def read_gdp(path: str, strict: bool = True) -> tuple[GdpSeries, IngestReport]:
    report = IngestReport(path=str(path))
    gdp = GdpSeries()
    first_line: dict[int, int] = {}
    for line_no, row in _open_rows(path, GDP_HEADER):
        report.rows_read += 1
        if len(row) != 2:
            report.drop(line_no, f"expected 2 fields, got {len(row)}", strict)
            continue
        raw_year, raw_level = row
        try:
            year = int(raw_year)
        except ValueError:
            report.drop(line_no, f"unparseable year {raw_year!r}", strict)
            continue
        try:
            level = float(raw_level)
        except ValueError:
            report.drop(line_no, f"unparseable gdp {raw_level!r}", strict)
            continue
        if not (level > 0):
            report.drop(line_no, f"gdp must be positive, got {raw_level}", strict)
            continue
        if year in first_line:
            report.drop(line_no, f"duplicate year {year}; first on line {first_line[year]}", strict)
            continue
        first_line[year] = line_no
        gdp.add(year, level)
        report.rows_kept += 1
    return gdp, report


@dataclass(frozen=True)
class ResultTable:
    """One export payload: a known schema plus its rows."""

    schema: str
    rows: tuple[tuple, ...]

    def __post_init__(self) -> None:
        if self.schema not in SCHEMAS:
            raise ValueError(f"unknown result schema {self.schema!r}")
        width = len(SCHEMAS[self.schema])
        for row in self.rows:
            if len(row) != width:
                raise ValueError(
                    f"schema {self.schema!r} expects {width} columns, got row {row!r}"
                )

    @property
    def columns(self) -> list[str]:
        return [name for name, _ in SCHEMAS[self.schema]]


@dataclass(frozen=True)
class ResultData:
    schema: str
    schema_version: int
    metadata: dict
    table: ResultTable


def _format_value(value, kind: str) -> str:
    if kind == "int":
        return str(int(value))
    if kind == "float":
        return format(float(value), ".12g")
    text = str(value)
    if any(c in text for c in (",", "\n", "\r", '"')):
        raise ValueError(f"string field {text!r} may not contain commas, quotes or newlines")
    return text


def _parse_value(text: str, kind: str):
    if kind == "int":
        return int(text)
    if kind == "float":
        return float(text)
    return text


def canonical_metadata(metadata: dict) -> str:
    return json.dumps(metadata, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def write_result(path: str, table: ResultTable, metadata: dict) -> None:
    """Write one result file atomically (temp file in place, then rename)."""
    kinds = [kind for _, kind in SCHEMAS[table.schema]]
    lines = [
        f"# mergerkit-result schema={table.schema} schema_version={SCHEMA_VERSION}",
        f"# meta {canonical_metadata(metadata)}",
        ",".join(table.columns),
    ]
    for row in table.rows:
        lines.append(",".join(_format_value(v, k) for v, k in zip(row, kinds)))
    payload = "\n".join(lines) + "\n"
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".mergerkit-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_result(path: str) -> ResultData:
    """Parse a result file back into its schema, metadata and typed rows."""
    try:
        with open(path, "r", encoding="utf-8", newline="") as handle:
            text = handle.read()
    except FileNotFoundError:
        raise DataValidationError(f"no such file: {path}") from None
    lines = text.split("\n")
    if len(lines) < 3 or not lines[0].startswith("# mergerkit-result "):
        raise DataValidationError(f"{path}: not a mergerkit result file")
    tags = dict(part.split("=", 1) for part in lines[0].removeprefix("# mergerkit-result ").split())
    schema = tags.get("schema", "")
    if schema not in SCHEMAS:
        raise DataValidationError(f"{path}: unknown schema {schema!r}")
    version = int(tags.get("schema_version", "0"))
    if version != SCHEMA_VERSION:
        raise DataValidationError(f"{path}: unsupported schema_version {version}")
    if not lines[1].startswith("# meta "):
        raise DataValidationError(f"{path}: missing metadata preamble line")
    metadata = json.loads(lines[1].removeprefix("# meta "))
    columns = [name for name, _ in SCHEMAS[schema]]
    if lines[2].split(",") != columns:
        raise DataValidationError(f"{path}: header {lines[2]!r} does not match schema {schema}")
    kinds = [kind for _, kind in SCHEMAS[schema]]
    rows = []
    for line_no, line in enumerate(lines[3:], start=4):
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != len(columns):
            raise DataValidationError(f"{path}:{line_no}: expected {len(columns)} fields")
        rows.append(tuple(_parse_value(p, k) for p, k in zip(parts, kinds)))
    return ResultData(
        schema=schema,
        schema_version=version,
        metadata=metadata,
        table=ResultTable(schema=schema, rows=tuple(rows)),
    )


def sha256_of(path: str) -> str:
    digest = hashlib.sha256()
    try:
        with open(path, "rb") as handle:
            for chunk in iter(lambda: handle.read(1 << 16), b""):
                digest.update(chunk)
    except FileNotFoundError:
        raise DataValidationError(f"no such file: {path}") from None
    return digest.hexdigest()
