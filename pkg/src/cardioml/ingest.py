"""CSV ingestion: parse the source file into typed records with per-row
quarantine instead of hard failure.

The public distribution of the cohort file is semicolon-delimited; when no
delimiter is given the header is probed for ';' first, then ','. Rows that
fail type coercion are kept as (line, reason) pairs so every data line is
accounted for.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path

from .errors import SchemaError

MANDATORY_COLUMNS = (
    "age",
    "gender",
    "height",
    "weight",
    "ap_hi",
    "ap_lo",
    "cholesterol",
    "gluc",
    "smoke",
    "alco",
    "active",
    "cardio",
)
# 'id' is optional; when absent the 0-based data-row index is used.
OPTIONAL_COLUMNS = ("id",)

_MISSING_TOKENS = {"", "na", "nan", "null", "none"}

# (record field, csv column, parser); parsers raise ValueError on bad input
_INT_COLUMNS = {"age", "gender", "cholesterol", "gluc", "smoke", "alco", "active", "cardio", "id"}
_FLOAT_COLUMNS = {"height", "weight", "ap_hi", "ap_lo"}

_CODE_DOMAINS = {
    "gender": (1, 2),
    "cholesterol": (1, 2, 3),
    "gluc": (1, 2, 3),
    "smoke": (0, 1),
    "alco": (0, 1),
    "active": (0, 1),
    "cardio": (0, 1),
}
_POSITIVE_FIELDS = ("age_days", "height_cm", "weight_kg", "ap_hi", "ap_lo")

_FIELD_TO_COLUMN = {
    "age_days": "age",
    "height_cm": "height",
    "weight_kg": "weight",
    "ap_hi": "ap_hi",
    "ap_lo": "ap_lo",
}


@dataclass(frozen=True)
class RawRecord:
    id: int
    age_days: int | None
    gender: int | None
    height_cm: float | None
    weight_kg: float | None
    ap_hi: float | None
    ap_lo: float | None
    cholesterol: int | None
    gluc: int | None
    smoke: int | None
    alco: int | None
    active: int | None
    cardio: int
    line: int = 0  # source line number (header is line 1)


@dataclass(frozen=True)
class RawDataset:
    records: tuple[RawRecord, ...]
    source_path: str
    rejected: tuple[tuple[int, str], ...]

    @property
    def n_data_lines(self) -> int:
        return len(self.records) + len(self.rejected)


@dataclass(frozen=True)
class SchemaViolation:
    line: int
    column: str
    reason: str

    def __post_init__(self):
        if not self.reason:
            raise ValueError("violation reason must be non-empty")


def _coerce_int(raw: str) -> int:
    try:
        return int(raw)
    except ValueError:
        v = float(raw)  # tolerate "120.0"; reject true fractions
        if not v.is_integer():
            raise ValueError(f"not an integer: {raw!r}")
        return int(v)


def _coerce_float(raw: str) -> float:
    v = float(raw)
    if v != v or v in (float("inf"), float("-inf")):
        raise ValueError(f"non-finite value: {raw!r}")
    return v


def _open_source(source):
    if isinstance(source, (str, Path)):
        return io.open(source, "r", encoding="utf-8-sig", newline=""), str(source)
    if isinstance(source, (bytes, bytearray)):
        return io.StringIO(bytes(source).decode("utf-8-sig")), "<bytes>"
    if hasattr(source, "read"):
        data = source.read()
        if isinstance(data, (bytes, bytearray)):
            data = bytes(data).decode("utf-8-sig")
        return io.StringIO(data), getattr(source, "name", "<stream>")
    raise SchemaError(f"unsupported source type: {type(source)!r}")


def detect_delimiter(header_line: str) -> str:
    return ";" if ";" in header_line else ","


def parse_csv(source, delimiter: str | None = None) -> RawDataset:
    """Parse the cohort CSV into a RawDataset.

    Every non-header line becomes either a RawRecord or a rejected
    (line, reason) entry; order is preserved. Unknown columns are ignored.
    Raises SchemaError when mandatory header columns are missing.
    """
    stream, source_path = _open_source(source)
    try:
        first = stream.readline()
        if first == "":
            raise SchemaError("empty input: no header row")
        if delimiter is None:
            delimiter = detect_delimiter(first)
        header = [h.strip().lower() for h in next(csv.reader([first], delimiter=delimiter))]
        missing = [c for c in MANDATORY_COLUMNS if c not in header]
        if missing:
            raise SchemaError(f"missing mandatory columns: {', '.join(missing)}")
        col_index = {name: i for i, name in enumerate(header)}
        has_id = "id" in col_index

        records: list[RawRecord] = []
        rejected: list[tuple[int, str]] = []
        reader = csv.reader(stream, delimiter=delimiter)
        row_counter = 0
        for row in reader:
            line_no = reader.line_num + 1  # header consumed outside the reader
            if len(row) == 1 and row[0].strip() == "":
                continue  # blank trailing line
            row_counter += 1
            if len(row) != len(header):
                rejected.append((line_no, f"expected {len(header)} fields, got {len(row)}"))
                continue
            values: dict[str, int | float | None] = {}
            bad_reason = None
            for name in MANDATORY_COLUMNS + (("id",) if has_id else ()):
                raw = row[col_index[name]].strip()
                if raw.lower() in _MISSING_TOKENS:
                    if name in ("cardio", "id"):
                        bad_reason = f"{name}: missing value"
                        break
                    values[name] = None
                    continue
                try:
                    values[name] = (
                        _coerce_int(raw) if name in _INT_COLUMNS else _coerce_float(raw)
                    )
                except ValueError:
                    bad_reason = f"{name}: cannot parse {raw!r}"
                    break
            if bad_reason is not None:
                rejected.append((line_no, bad_reason))
                continue
            records.append(
                RawRecord(
                    id=int(values["id"]) if has_id else row_counter - 1,
                    age_days=values["age"],
                    gender=values["gender"],
                    height_cm=values["height"],
                    weight_kg=values["weight"],
                    ap_hi=values["ap_hi"],
                    ap_lo=values["ap_lo"],
                    cholesterol=values["cholesterol"],
                    gluc=values["gluc"],
                    smoke=values["smoke"],
                    alco=values["alco"],
                    active=values["active"],
                    cardio=int(values["cardio"]),
                    line=line_no,
                )
            )
        return RawDataset(records=tuple(records), source_path=source_path, rejected=tuple(rejected))
    finally:
        stream.close()


def validate_schema(dataset: RawDataset) -> list[SchemaViolation]:
    """One violation per out-of-domain code or non-positive physical
    measurement. Missing values are not violations (imputation handles them).
    The dataset itself is never modified."""
    violations: list[SchemaViolation] = []
    for rec in dataset.records:
        for column, domain in _CODE_DOMAINS.items():
            value = getattr(rec, column)
            if value is not None and value not in domain:
                violations.append(
                    SchemaViolation(rec.line, column, f"value {value} not in {domain}")
                )
        for fld in _POSITIVE_FIELDS:
            value = getattr(rec, fld)
            if value is not None and value <= 0:
                violations.append(
                    SchemaViolation(rec.line, _FIELD_TO_COLUMN[fld], f"non-positive value {value}")
                )
    return violations


def _format_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float) and v.is_integer():
        return str(int(v))
    return str(v)


def write_records_csv(records, target, delimiter: str = ";") -> None:
    """Serialize accepted records back to CSV (id column included)."""
    own = isinstance(target, (str, Path))
    out = io.open(target, "w", encoding="utf-8", newline="") if own else target
    try:
        writer = csv.writer(out, delimiter=delimiter)
        writer.writerow(("id",) + MANDATORY_COLUMNS)
        for rec in records:
            writer.writerow(
                [
                    _format_value(v)
                    for v in (
                        rec.id,
                        rec.age_days,
                        rec.gender,
                        rec.height_cm,
                        rec.weight_kg,
                        rec.ap_hi,
                        rec.ap_lo,
                        rec.cholesterol,
                        rec.gluc,
                        rec.smoke,
                        rec.alco,
                        rec.active,
                        rec.cardio,
                    )
                ]
            )
    finally:
        if own:
            out.close()


def write_rejected_csv(dataset: RawDataset, target) -> None:
    own = isinstance(target, (str, Path))
    out = io.open(target, "w", encoding="utf-8", newline="") if own else target
    try:
        writer = csv.writer(out)
        writer.writerow(("line", "reason"))
        for line, reason in dataset.rejected:
            writer.writerow((line, reason))
    finally:
        if own:
            out.close()
