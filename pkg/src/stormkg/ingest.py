"""Readers for NWS Storm Events Database "details" CSV files.

The details files are published per year as plain or gzip-compressed CSV.
Headers are matched case-insensitively and extra columns are ignored, so a
file carrying the full public schema parses the same as one trimmed down to
the columns we need.  Malformed data rows are skipped and reported, never
raised: real files contain blanks and irregularities and one bad row should
not abort a year of data.
"""

from __future__ import annotations

import csv
import gzip
import io
import re
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from decimal import Decimal, InvalidOperation, ROUND_HALF_UP
from enum import Enum
from pathlib import Path
from typing import BinaryIO

__all__ = [
    "CZType",
    "EventRecord",
    "FormatError",
    "GeoPoint",
    "REQUIRED_COLUMNS",
    "RowError",
    "format_damage",
    "normalize_time",
    "parse_damage",
    "parse_details_csv",
    "parse_details_file",
]

#: Columns a details file must carry (case-insensitive match on the header).
REQUIRED_COLUMNS = (
    "EVENT_ID",
    "EPISODE_ID",
    "EVENT_TYPE",
    "STATE",
    "CZ_TYPE",
    "CZ_FIPS",
    "CZ_NAME",
    "BEGIN_DATE_TIME",
    "END_DATE_TIME",
    "CZ_TIMEZONE",
    "BEGIN_LAT",
    "BEGIN_LON",
    "END_LAT",
    "END_LON",
    "INJURIES_DIRECT",
    "INJURIES_INDIRECT",
    "DEATHS_DIRECT",
    "DEATHS_INDIRECT",
    "DAMAGE_PROPERTY",
    "DAMAGE_CROPS",
    "EVENT_NARRATIVE",
    "EPISODE_NARRATIVE",
)


class FormatError(ValueError):
    """The input is not a details file (unreadable or missing header columns)."""


class CZType(Enum):
    """County/zone designator of the reporting area."""

    COUNTY = "County"
    ZONE = "Zone"
    MARINE = "Marine"


_CZ_TYPE_CODES = {
    "C": CZType.COUNTY,
    "Z": CZType.ZONE,
    "M": CZType.MARINE,
    "COUNTY": CZType.COUNTY,
    "ZONE": CZType.ZONE,
    "MARINE": CZType.MARINE,
}


@dataclass(frozen=True)
class GeoPoint:
    latitude: float
    longitude: float

    def __post_init__(self) -> None:
        if not -90.0 <= self.latitude <= 90.0:
            raise ValueError(f"latitude {self.latitude} out of range [-90, 90]")
        if not -180.0 <= self.longitude <= 180.0:
            raise ValueError(f"longitude {self.longitude} out of range [-180, 180]")


@dataclass(frozen=True)
class EventRecord:
    """One storm event, normalized: UTC times, integer dollars."""

    event_id: int
    episode_id: int | None
    event_type: str
    state: str
    cz_type: CZType
    cz_fips: int
    cz_name: str
    begin_time: datetime
    end_time: datetime
    begin_point: GeoPoint | None
    end_point: GeoPoint | None
    injuries_direct: int
    injuries_indirect: int
    deaths_direct: int
    deaths_indirect: int
    damage_property_usd: int
    damage_crops_usd: int
    event_narrative: str
    episode_narrative: str

    def __post_init__(self) -> None:
        if self.event_id <= 0:
            raise ValueError(f"event_id {self.event_id} must be positive")
        if self.episode_id is not None and self.episode_id <= 0:
            raise ValueError(f"episode_id {self.episode_id} must be positive")
        if not self.event_type:
            raise ValueError("event_type must be non-empty")
        if self.begin_time > self.end_time:
            raise ValueError(
                f"begin_time {self.begin_time:%Y-%m-%dT%H:%M:%SZ} is after "
                f"end_time {self.end_time:%Y-%m-%dT%H:%M:%SZ}"
            )
        for name in (
            "injuries_direct",
            "injuries_indirect",
            "deaths_direct",
            "deaths_indirect",
            "damage_property_usd",
            "damage_crops_usd",
        ):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")


@dataclass(frozen=True)
class RowError:
    """A skipped data row.  ``row`` counts the header as row 1."""

    row: int
    reason: str


_DAMAGE_RE = re.compile(r"^(\d+(?:\.\d+)?)([KMB])?$", re.IGNORECASE)
_DAMAGE_MULTIPLIERS = {"K": 1_000, "M": 1_000_000, "B": 1_000_000_000}


def parse_damage(raw: str) -> int:
    """Decode a damage figure like ``10.00K`` to whole dollars.

    Empty means zero, a bare number means plain dollars, and K/M/B suffixes
    (any case) scale by thousand/million/billion.  The result is rounded to
    the nearest dollar.
    """
    token = raw.strip()
    if not token:
        return 0
    m = _DAMAGE_RE.match(token)
    if m is None:
        raise ValueError(f"unrecognized damage value {raw.strip()!r}")
    value = Decimal(m.group(1))
    if m.group(2):
        value *= _DAMAGE_MULTIPLIERS[m.group(2).upper()]
    return int(value.to_integral_value(rounding=ROUND_HALF_UP))


def format_damage(usd: int) -> str:
    """Canonical inverse of :func:`parse_damage` for non-negative dollars."""
    if usd < 0:
        raise ValueError("damage must be non-negative")
    if usd == 0:
        return "0.00K"
    for suffix, mult in (("B", 1_000_000_000), ("M", 1_000_000), ("K", 1_000)):
        if usd % mult == 0:
            return f"{usd // mult}.00{suffix}"
    return str(usd)


_DATE_RE = re.compile(r"^(\d{1,2})-([A-Za-z]{3})-(\d{2}) (\d{1,2}):(\d{2}):(\d{2})$")
_TZ_RE = re.compile(r"^([A-Za-z]+)([+-]\d{1,2})$")
_MONTHS = {
    "JAN": 1, "FEB": 2, "MAR": 3, "APR": 4, "MAY": 5, "JUN": 6,
    "JUL": 7, "AUG": 8, "SEP": 9, "OCT": 10, "NOV": 11, "DEC": 12,
}


def normalize_time(date_time: str, tz: str) -> datetime:
    """Convert a local ``DD-MON-YY HH:MM:SS`` stamp plus a ``NAME±H`` zone to UTC.

    Two-digit years pivot at 50: 50-99 are the 1900s, 00-49 the 2000s, which
    covers the database span.  UTC is the local time minus the signed hour
    offset, e.g. ``EST-5`` subtracts -5 hours (adds five).
    """
    dm = _DATE_RE.match(date_time.strip())
    if dm is None:
        raise ValueError(f"unrecognized date-time {date_time.strip()!r}")
    day, mon, yy, hh, mm, ss = dm.groups()
    month = _MONTHS.get(mon.upper())
    if month is None:
        raise ValueError(f"unrecognized month {mon!r} in {date_time.strip()!r}")
    year2 = int(yy)
    year = 1900 + year2 if year2 >= 50 else 2000 + year2
    tm = _TZ_RE.match(tz.strip())
    if tm is None:
        raise ValueError(f"unrecognized timezone {tz.strip()!r}")
    offset = int(tm.group(2))
    try:
        local = datetime(year, month, int(day), int(hh), int(mm), int(ss))
    except ValueError as exc:
        raise ValueError(f"invalid date-time {date_time.strip()!r}: {exc}") from None
    return (local - timedelta(hours=offset)).replace(tzinfo=timezone.utc)


def _parse_count(raw: str, name: str) -> int:
    token = raw.strip()
    if not token:
        return 0
    try:
        value = int(token)
    except ValueError:
        raise ValueError(f"{name} {raw.strip()!r} is not an integer") from None
    if value < 0:
        raise ValueError(f"{name} {raw.strip()!r} is negative")
    return value


def _parse_point(lat_raw: str, lon_raw: str, which: str) -> GeoPoint | None:
    lat, lon = lat_raw.strip(), lon_raw.strip()
    if not lat and not lon:
        return None
    if not lat or not lon:
        raise ValueError(f"incomplete {which} coordinate pair ({lat_raw!r}, {lon_raw!r})")
    try:
        return GeoPoint(float(lat), float(lon))
    except ValueError as exc:
        # re-raise range errors as-is; float() failures get named
        if "out of range" in str(exc):
            raise
        raise ValueError(f"bad {which} coordinates ({lat_raw!r}, {lon_raw!r})") from None


def _record_from_row(get) -> EventRecord:
    event_id_raw = get("EVENT_ID").strip()
    try:
        event_id = int(event_id_raw)
    except ValueError:
        raise ValueError(f"EVENT_ID {event_id_raw!r} is not an integer") from None

    episode_raw = get("EPISODE_ID").strip()
    episode_id: int | None
    if episode_raw:
        try:
            episode_id = int(episode_raw)
        except ValueError:
            raise ValueError(f"EPISODE_ID {episode_raw!r} is not an integer") from None
    else:
        episode_id = None

    cz_raw = get("CZ_TYPE").strip().upper()
    cz_type = _CZ_TYPE_CODES.get(cz_raw)
    if cz_type is None:
        raise ValueError(f"unrecognized CZ_TYPE {get('CZ_TYPE').strip()!r}")

    fips_raw = get("CZ_FIPS").strip()
    try:
        cz_fips = int(fips_raw)
    except ValueError:
        raise ValueError(f"CZ_FIPS {fips_raw!r} is not an integer") from None

    tz = get("CZ_TIMEZONE")
    return EventRecord(
        event_id=event_id,
        episode_id=episode_id,
        event_type=get("EVENT_TYPE").strip(),
        state=get("STATE").strip(),
        cz_type=cz_type,
        cz_fips=cz_fips,
        cz_name=get("CZ_NAME").strip(),
        begin_time=normalize_time(get("BEGIN_DATE_TIME"), tz),
        end_time=normalize_time(get("END_DATE_TIME"), tz),
        begin_point=_parse_point(get("BEGIN_LAT"), get("BEGIN_LON"), "begin"),
        end_point=_parse_point(get("END_LAT"), get("END_LON"), "end"),
        injuries_direct=_parse_count(get("INJURIES_DIRECT"), "INJURIES_DIRECT"),
        injuries_indirect=_parse_count(get("INJURIES_INDIRECT"), "INJURIES_INDIRECT"),
        deaths_direct=_parse_count(get("DEATHS_DIRECT"), "DEATHS_DIRECT"),
        deaths_indirect=_parse_count(get("DEATHS_INDIRECT"), "DEATHS_INDIRECT"),
        damage_property_usd=parse_damage(get("DAMAGE_PROPERTY")),
        damage_crops_usd=parse_damage(get("DAMAGE_CROPS")),
        event_narrative=get("EVENT_NARRATIVE").strip(),
        episode_narrative=get("EPISODE_NARRATIVE").strip(),
    )


def parse_details_csv(source: BinaryIO) -> tuple[list[EventRecord], list[RowError]]:
    """Parse a details CSV byte stream (gzip or plain, sniffed by magic bytes).

    Returns the well-formed records plus one :class:`RowError` per skipped
    row; record count + error count always equals the data row count.
    Missing required header columns raise :class:`FormatError`.
    """
    buffered = source if hasattr(source, "peek") else io.BufferedReader(source)  # type: ignore[arg-type]
    try:
        magic = buffered.peek(2)[:2]
    except OSError as exc:
        raise FormatError(f"unreadable input: {exc}") from exc
    if magic == b"\x1f\x8b":
        stream: BinaryIO = gzip.GzipFile(fileobj=buffered)  # type: ignore[assignment]
    else:
        stream = buffered
    text = io.TextIOWrapper(stream, encoding="utf-8-sig", errors="replace", newline="")
    reader = csv.reader(text)
    try:
        header = next(reader, None)
    except (csv.Error, OSError, gzip.BadGzipFile) as exc:
        raise FormatError(f"unreadable input: {exc}") from exc
    if header is None:
        raise FormatError("empty input, no header row")

    index = {name.strip().upper(): i for i, name in enumerate(header)}
    missing = [c for c in REQUIRED_COLUMNS if c not in index]
    if missing:
        raise FormatError(f"missing required columns: {', '.join(missing)}")

    records: list[EventRecord] = []
    errors: list[RowError] = []
    width = len(header)
    row_num = 1
    while True:
        try:
            row = next(reader)
        except StopIteration:
            break
        except (csv.Error, gzip.BadGzipFile) as exc:
            raise FormatError(f"unreadable input: {exc}") from exc
        row_num += 1
        if len(row) != width:
            errors.append(RowError(row_num, f"expected {width} fields, got {len(row)}"))
            continue
        try:
            records.append(_record_from_row(lambda col: row[index[col]]))
        except ValueError as exc:
            errors.append(RowError(row_num, str(exc)))
    return records, errors


def parse_details_file(path: str | Path) -> tuple[list[EventRecord], list[RowError]]:
    """Open ``path`` and parse it with :func:`parse_details_csv`."""
    with open(path, "rb") as fh:
        return parse_details_csv(fh)
