"""Load market volatility series (e.g. VIX daily closes) from CSV.

Expected schema: a header row, a date column (default ``Date``) and a value
column (default ``Close``), comma-delimited, optionally quoted. Dates are
ISO (YYYY-MM-DD) or day-first (DD-MM-YYYY, ``-`` or ``/``); the format is
detected once per file. Calendar gaps are ignored: rows are treated as
evenly spaced in trading time.
"""

import io
import logging
import re
from typing import BinaryIO, Optional, Tuple, Union

import numpy as np
import pandas as pd

from config import DEFAULT_DATE_COLUMN, DEFAULT_VALUE_COLUMN
from exceptions import DomainError, InputError
from models import DatedSeries, IngestReport

logger = logging.getLogger(__name__)

ISO_PATTERN = re.compile(r"^\d{4}-\d{1,2}-\d{1,2}$")
DAY_MONTH_PATTERN = re.compile(r"^(\d{1,2})([-/])(\d{1,2})\2(\d{4})$")

TRANSFORMS = ("levels", "log_returns")


def detect_date_format(date_strings) -> str:
    """Pick ISO or day-first from the file's date strings.

    Two-digit-first dates are day-first only when some leading field is
    above 12; otherwise the file is ambiguous and needs an explicit format.
    """
    strings = [s for s in date_strings if s]
    iso = [s for s in strings if ISO_PATTERN.match(s)]
    dmy = [m for m in (DAY_MONTH_PATTERN.match(s) for s in strings) if m]
    if iso and len(iso) >= len(dmy):
        return "%Y-%m-%d"
    if not dmy:
        raise InputError("no recognizable dates (expected YYYY-MM-DD or DD-MM-YYYY)")

    sep = dmy[0].group(2)
    day_first, month_first = f"%d{sep}%m{sep}%Y", f"%m{sep}%d{sep}%Y"
    if any(int(m.group(1)) > 12 for m in dmy):
        return day_first
    raise InputError(
        f"ambiguous date format: could be {day_first!r} or {month_first!r}; pass an explicit date format"
    )


def _read_frame(source: Union[bytes, BinaryIO]) -> Tuple[pd.DataFrame, int]:
    """Read every field as text. Rows with more fields than the header are skipped and counted."""
    if isinstance(source, (bytes, bytearray)):
        source = io.BytesIO(source)
    overlong = []

    def skip_row(fields):
        overlong.append(fields)
        return None

    try:
        frame = pd.read_csv(
            source,
            dtype=str,
            keep_default_na=False,
            encoding="utf-8",
            skipinitialspace=True,
            engine="python",
            on_bad_lines=skip_row,
        )
    except pd.errors.EmptyDataError as e:
        raise InputError("empty input: no header row") from e
    except (UnicodeDecodeError, pd.errors.ParserError) as e:
        raise InputError(f"unreadable CSV: {e}") from e
    frame.columns = [str(c).strip() for c in frame.columns]
    return frame, len(overlong)


def parse_csv(
    source: Union[bytes, BinaryIO],
    date_column: str = DEFAULT_DATE_COLUMN,
    value_column: str = DEFAULT_VALUE_COLUMN,
    date_format: Optional[str] = None,
    source_label: str = "",
) -> Tuple[DatedSeries, IngestReport]:
    """Parse, clean, sort and deduplicate a dated value series."""
    frame, overlong = _read_frame(source)
    missing = [c for c in (date_column, value_column) if c not in frame.columns]
    if missing:
        raise InputError(f"missing column(s) {', '.join(missing)}; found {', '.join(frame.columns)}")

    if frame.empty:
        raise InputError("no valid rows")

    report = IngestReport(rows_read=len(frame) + overlong)
    raw_dates = frame[date_column].fillna("").str.strip()
    raw_values = frame[value_column].fillna("").str.strip()

    fmt = date_format or detect_date_format(raw_dates)
    dates = pd.to_datetime(raw_dates, format=fmt, errors="coerce")
    values = pd.to_numeric(raw_values, errors="coerce")

    malformed = dates.isna() | values.isna() | ~np.isfinite(values.fillna(0.0))
    nonpositive = ~malformed & (values <= 0)
    report.rows_dropped_malformed = int(malformed.sum()) + overlong
    report.rows_dropped_nonpositive = int(nonpositive.sum())

    clean = pd.DataFrame({"date": dates, "value": values})[~malformed & ~nonpositive]
    clean = clean.sort_values("date", kind="mergesort")
    duplicated = clean.duplicated(subset="date", keep="last")
    report.duplicate_dates_resolved = int(duplicated.sum())
    clean = clean[~duplicated]
    report.rows_kept = len(clean)

    if report.rows_dropped_malformed or report.rows_dropped_nonpositive:
        logger.warning(
            f"Dropped {report.rows_dropped_malformed} malformed and "
            f"{report.rows_dropped_nonpositive} non-positive rows"
        )
    if clean.empty:
        raise InputError("no valid rows")

    logger.info(f"Ingested {report.rows_kept}/{report.rows_read} rows ({fmt})")
    series = DatedSeries(
        dates=pd.DatetimeIndex(clean["date"]),
        values=clean["value"].to_numpy(dtype=float),
        source_label=source_label,
    )
    return series, report


def read_csv_file(path: str, **kwargs) -> Tuple[DatedSeries, IngestReport]:
    try:
        with open(path, "rb") as fh:
            return parse_csv(fh, source_label=kwargs.pop("source_label", path), **kwargs)
    except OSError as e:
        raise InputError(f"cannot read {path}: {e}") from e


def write_csv(
    series: DatedSeries,
    date_column: str = DEFAULT_DATE_COLUMN,
    value_column: str = DEFAULT_VALUE_COLUMN,
) -> bytes:
    """Serialize with ISO dates and round-trip float precision."""
    frame = pd.DataFrame({date_column: series.dates.strftime("%Y-%m-%d"), value_column: series.values})
    return frame.to_csv(index=False, float_format="%.17g", lineterminator="\n").encode("utf-8")


def to_signal(series: DatedSeries, transform: str = "levels") -> np.ndarray:
    """Levels verbatim, or log returns ln(v[k+1] / v[k])."""
    if transform not in TRANSFORMS:
        raise DomainError("transform", f"must be one of {', '.join(TRANSFORMS)} (got {transform!r})")
    values = np.asarray(series.values, dtype=float)
    if transform == "levels":
        return values.copy()

    if values.size < 2:
        raise InputError("log returns need at least two values")
    bad = np.flatnonzero(values <= 0)
    if bad.size:
        raise InputError(f"non-positive value on {series.dates[bad[0]]:%Y-%m-%d}")
    return np.diff(np.log(values))
